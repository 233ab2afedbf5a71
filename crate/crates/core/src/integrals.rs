//! The integral family
//!
//! 𝓑(λ,λ′,μ,μ′,ν,ν′) = (1/B(λ,λ′)) ∫₀¹ t^(λ−1) (1−t)^(λ′−1) I(μ,μ′;t) I(ν,ν′;t) dt
//!                    = P(X_{λ,λ′} > max{Y_{μ,μ′}, Z_{ν,ν′}})
//!
//! evaluated through several independent representations, together with the
//! moment, inner-product and special-case formulas built on it.
//!
//! Most single-₃F₂ expressions here are instances of
//! E[X^a I(μ,μ′;X)] for X ~ Beta(λ,λ′), which is a beta ratio times
//! [`prob_exceeds`]; routing them all through that one function lets it pick
//! the better-conditioned of its two hypergeometric orientations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{self, binomial, factorial, rational_to_f64, IntParamSet};
use crate::error::{Error, Result};
use crate::dd::Dd;
use crate::hyper::{kdf, pfq, pfq_dd_shifted, KdfSpec, PfqSpec, SeriesOptions, SeriesValue};
use crate::special::{ln_beta, positive_integer, SMALL_PARAMETER};

/// Tolerance of the range guard on computed probabilities.
pub const RANGE_EPS: f64 = 1e-9;

/// Shape parameters (λ, λ′, μ, μ′, ν, ν′).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ParamSet {
    pub lambda: f64,
    pub lambda_prime: f64,
    pub mu: f64,
    pub mu_prime: f64,
    pub nu: f64,
    pub nu_prime: f64,
}

impl ParamSet {
    pub fn new(lambda: f64, lambda_prime: f64, mu: f64, mu_prime: f64, nu: f64, nu_prime: f64) -> Result<Self> {
        Self::from_array([lambda, lambda_prime, mu, mu_prime, nu, nu_prime])
    }

    pub fn from_array(a: [f64; 6]) -> Result<Self> {
        check_positive(&a)?;
        Ok(ParamSet { lambda: a[0], lambda_prime: a[1], mu: a[2], mu_prime: a[3], nu: a[4], nu_prime: a[5] })
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.lambda, self.lambda_prime, self.mu, self.mu_prime, self.nu, self.nu_prime]
    }

    /// Exchange the (μ,μ′) and (ν,ν′) pairs.
    pub fn swapped(&self) -> Self {
        ParamSet { mu: self.nu, mu_prime: self.nu_prime, nu: self.mu, nu_prime: self.mu_prime, ..*self }
    }

    /// (μ,μ′,ν,ν′,λ,λ′).
    pub fn cycled(&self) -> Self {
        ParamSet {
            lambda: self.mu,
            lambda_prime: self.mu_prime,
            mu: self.nu,
            mu_prime: self.nu_prime,
            nu: self.lambda,
            nu_prime: self.lambda_prime,
        }
    }

    /// (λ′,λ,μ′,μ,ν′,ν): every variable replaced by its reflection 1 − X.
    pub fn reflected(&self) -> Self {
        ParamSet {
            lambda: self.lambda_prime,
            lambda_prime: self.lambda,
            mu: self.mu_prime,
            mu_prime: self.mu,
            nu: self.nu_prime,
            nu_prime: self.nu,
        }
    }

    /// The integer parameter set, if every entry is a positive integer.
    pub fn to_integers(&self) -> Option<IntParamSet> {
        let a = self.as_array();
        let mut out = [0u64; 6];
        for (o, &v) in out.iter_mut().zip(&a) {
            if v.fract() != 0.0 || v > 1e15 {
                return None;
            }
            *o = v as u64;
        }
        IntParamSet::from_array(out).ok()
    }

    fn reduced_accuracy(&self) -> bool {
        self.as_array().iter().any(|&v| v < SMALL_PARAMETER)
    }
}

fn check_positive(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        Some(v) => Err(Error::Domain(format!("parameters must be positive and finite, got {v}"))),
        None => Ok(()),
    }
}

/// Which representation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MethodTag {
    #[serde(rename = "kdf_closed_form")]
    KdfClosedForm,
    #[serde(rename = "series_4f3")]
    Series4f3,
    #[serde(rename = "series_c")]
    SeriesC,
    #[serde(rename = "special_case_1")]
    SpecialCase1,
    #[serde(rename = "special_case_2")]
    SpecialCase2,
    #[serde(rename = "special_case_3")]
    SpecialCase3,
    #[serde(rename = "special_case_4")]
    SpecialCase4,
    #[serde(rename = "nu_prime_one")]
    NuPrimeOne,
    #[serde(rename = "lambda_prime_one")]
    LambdaPrimeOne,
    #[serde(rename = "exact_rational")]
    ExactRational,
    #[serde(rename = "quadrature")]
    Quadrature,
    #[serde(rename = "monte_carlo")]
    MonteCarlo,
}

impl MethodTag {
    pub const ALL: [MethodTag; 12] = [
        MethodTag::KdfClosedForm,
        MethodTag::Series4f3,
        MethodTag::SeriesC,
        MethodTag::SpecialCase1,
        MethodTag::SpecialCase2,
        MethodTag::SpecialCase3,
        MethodTag::SpecialCase4,
        MethodTag::NuPrimeOne,
        MethodTag::LambdaPrimeOne,
        MethodTag::ExactRational,
        MethodTag::Quadrature,
        MethodTag::MonteCarlo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodTag::KdfClosedForm => "kdf_closed_form",
            MethodTag::Series4f3 => "series_4f3",
            MethodTag::SeriesC => "series_c",
            MethodTag::SpecialCase1 => "special_case_1",
            MethodTag::SpecialCase2 => "special_case_2",
            MethodTag::SpecialCase3 => "special_case_3",
            MethodTag::SpecialCase4 => "special_case_4",
            MethodTag::NuPrimeOne => "nu_prime_one",
            MethodTag::LambdaPrimeOne => "lambda_prime_one",
            MethodTag::ExactRational => "exact_rational",
            MethodTag::Quadrature => "quadrature",
            MethodTag::MonteCarlo => "monte_carlo",
        }
    }
}

impl std::fmt::Display for MethodTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Work counters attached to a result.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Series terms or double-series cells summed.
    pub terms: usize,
    /// Integrand evaluations or Monte Carlo samples.
    pub evaluations: usize,
    /// Upward shifts applied to (μ′, ν′) before the double series.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<(u32, u32)>,
    /// "p/q" form of an exact result.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    /// A parameter lies below 1e-3.
    pub reduced_accuracy: bool,
}

/// A value of 𝓑 with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BResult {
    pub value: f64,
    pub method: MethodTag,
    pub abs_error_estimate: f64,
    pub diagnostics: Diagnostics,
}

/// Reject probabilities outside [−ε, 1+ε]; never clamps.
pub fn range_guard(value: f64) -> Result<f64> {
    if value.is_nan() || !(-RANGE_EPS..=1.0 + RANGE_EPS).contains(&value) {
        return Err(Error::Range { value });
    }
    Ok(value)
}

// Running value plus error and work counters.
#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    value: f64,
    err: f64,
    terms: usize,
}

impl Acc {
    fn from_series(s: &SeriesValue, scale: f64) -> Self {
        Acc { value: scale * s.value, err: (scale * s.abs_error_estimate).abs(), terms: s.terms_used }
    }

    fn scaled(self, k: f64) -> Self {
        Acc { value: k * self.value, err: (k * self.err).abs(), terms: self.terms }
    }

    // Scale by exp(ln_k); exp amplifies the rounding error of ln_k.
    fn scaled_ln(self, ln_k: f64) -> Self {
        let out = self.scaled(ln_k.exp());
        Acc { err: out.err + out.value.abs() * f64::EPSILON * 4.0 * (1.0 + ln_k.abs()), ..out }
    }

    fn plus(self, other: Acc) -> Self {
        let rounding = 2.0 * f64::EPSILON * (self.value.abs() + other.value.abs());
        Acc { value: self.value + other.value, err: self.err + other.err + rounding, terms: self.terms + other.terms }
    }

    fn minus(self, other: Acc) -> Self {
        self.plus(other.scaled(-1.0))
    }

    fn one_minus(self) -> Self {
        Acc { value: 1.0 - self.value, err: self.err + 2.0 * f64::EPSILON * self.value.abs().max(1.0), ..self }
    }

    fn with_rounding(self) -> Self {
        Acc { err: self.err + 32.0 * f64::EPSILON * self.value.abs().max(1.0), ..self }
    }

    fn into_result(self, p: Option<&ParamSet>, method: MethodTag) -> Result<BResult> {
        let value = range_guard(self.value)?;
        Ok(BResult {
            value,
            method,
            abs_error_estimate: self.err,
            diagnostics: Diagnostics {
                terms: self.terms,
                reduced_accuracy: p.is_some_and(ParamSet::reduced_accuracy),
                ..Default::default()
            },
        })
    }
}

// P(X_{λ,λ′} ≥ Y_{μ,μ′}) through the ₃F₂ whose numerator carries 1 − μ′.
fn prob_exceeds_direct(lambda: f64, lambda_prime: f64, mu: f64, mu_prime: f64) -> Result<Acc> {
    let s = lambda + mu;
    let ln_pref = ln_beta(s, lambda_prime)? - mu.ln() - ln_beta(lambda, lambda_prime)? - ln_beta(mu, mu_prime)?;
    let series = pfq(&PfqSpec::unit(&[1.0 - mu_prime, mu, s], &[mu + 1.0, s + lambda_prime]))?;
    Ok(Acc::from_series(&series, 1.0).scaled_ln(ln_pref))
}

fn prob_exceeds_acc(lambda: f64, lambda_prime: f64, mu: f64, mu_prime: f64) -> Result<Acc> {
    check_positive(&[lambda, lambda_prime, mu, mu_prime])?;
    // Terms are bounded by |(1−c)_k/k!| for the primed parameter c in the
    // numerator, so put the smaller one there; integers terminate either way.
    let direct = match (positive_integer(mu_prime), positive_integer(lambda_prime)) {
        (Some(a), Some(b)) => a <= b,
        (Some(_), None) => true,
        (None, Some(_)) => false,
        (None, None) => mu_prime <= lambda_prime,
    };
    if direct {
        prob_exceeds_direct(lambda, lambda_prime, mu, mu_prime)
    } else {
        Ok(prob_exceeds_direct(mu, mu_prime, lambda, lambda_prime)?.one_minus())
    }
}

/// P(X_{λ,λ′} ≥ Y_{μ,μ′}) for independent beta variables.
pub fn prob_exceeds(lambda: f64, lambda_prime: f64, mu: f64, mu_prime: f64) -> Result<f64> {
    let v = prob_exceeds_acc(lambda, lambda_prime, mu, mu_prime)?.value;
    range_guard(v)
}

/// E[X^a I(μ,μ′;X)] for X ~ Beta(λ,λ′).
fn weighted_cdf_mean(lambda: f64, lambda_prime: f64, a: f64, mu: f64, mu_prime: f64) -> Result<Acc> {
    let ln_ratio = ln_beta(lambda + a, lambda_prime)? - ln_beta(lambda, lambda_prime)?;
    Ok(prob_exceeds_acc(lambda + a, lambda_prime, mu, mu_prime)?.scaled_ln(ln_ratio))
}

/// 𝓑(λ,λ′,μ,μ′,ν,1): here I(ν,1;t) = t^ν and a single ₃F₂ remains.
pub fn b_nu_prime_one(lambda: f64, lambda_prime: f64, mu: f64, mu_prime: f64, nu: f64) -> Result<BResult> {
    check_positive(&[lambda, lambda_prime, mu, mu_prime, nu])?;
    let p = ParamSet::new(lambda, lambda_prime, mu, mu_prime, nu, 1.0)?;
    weighted_cdf_mean(lambda, lambda_prime, nu, mu, mu_prime)?
        .with_rounding()
        .into_result(Some(&p), MethodTag::NuPrimeOne)
}

// P(Y > max{Z, X_{λ,1}}) + P(Z > max{Y, X_{λ,1}}) = E[max{Y,Z}^λ]
fn max_moment_acc(lambda: f64, mu: f64, mu_prime: f64, nu: f64, nu_prime: f64) -> Result<Acc> {
    let y_wins = weighted_cdf_mean(mu, mu_prime, lambda, nu, nu_prime)?;
    let z_wins = weighted_cdf_mean(nu, nu_prime, lambda, mu, mu_prime)?;
    Ok(y_wins.plus(z_wins))
}

/// 𝓑(λ,1,μ,μ′,ν,ν′) = 1 − E[max{Y,Z}^λ], two ₃F₂'s.
pub fn b_lambda_prime_one(lambda: f64, mu: f64, mu_prime: f64, nu: f64, nu_prime: f64) -> Result<BResult> {
    let p = ParamSet::new(lambda, 1.0, mu, mu_prime, nu, nu_prime)?;
    max_moment_acc(lambda, mu, mu_prime, nu, nu_prime)?
        .one_minus()
        .with_rounding()
        .into_result(Some(&p), MethodTag::LambdaPrimeOne)
}

/// E[max{Y_{μ,μ′}, Z_{ν,ν′}}^λ] for λ ≥ 0.
pub fn moment_max(lambda: f64, mu: f64, mu_prime: f64, nu: f64, nu_prime: f64) -> Result<f64> {
    check_positive(&[mu, mu_prime, nu, nu_prime])?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::Domain(format!("moment order must be nonnegative, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    range_guard(max_moment_acc(lambda, mu, mu_prime, nu, nu_prime)?.value)
}

/// E[max] of two i.i.d. Beta(μ,ν) variables.
pub fn mean_max_iid(mu: f64, nu: f64) -> Result<f64> {
    check_positive(&[mu, nu])?;
    let ratio = (ln_beta(2.0 * mu, 2.0 * nu)? - 2.0 * ln_beta(mu, nu)?).exp();
    Ok(mu / (mu + nu) + 2.0 * ratio / (mu + nu))
}

// (μ+ν) B(μ+ν, μ+ν+1) / (μν B(μ,μ+1) B(ν,ν+1))
fn symmetric_ratio(mu: f64, nu: f64) -> Result<f64> {
    let s = mu + nu;
    let ln = ln_beta(s, s + 1.0)? - ln_beta(mu, mu + 1.0)? - ln_beta(nu, nu + 1.0)?;
    Ok(s * ln.exp() / (mu * nu))
}

/// E[max{Y,Z}] for Y ~ Beta(μ,μ), Z ~ Beta(ν,ν).
pub fn mean_max_symmetric(mu: f64, nu: f64) -> Result<f64> {
    check_positive(&[mu, nu])?;
    Ok(0.5 + 0.25 * symmetric_ratio(mu, nu)?)
}

/// 𝓑(1,1,μ,μ,ν,ν), from the contiguous Whipple sum with a + b = 1.
pub fn b_case1(mu: f64, nu: f64) -> Result<f64> {
    check_positive(&[mu, nu])?;
    range_guard(0.5 - 0.25 * symmetric_ratio(mu, nu)?)
}

/// 𝓑(1,1,μ,μ+1,ν,ν+1), from the contiguous Whipple sum with a + b = 0.
pub fn b_case2(mu: f64, nu: f64) -> Result<f64> {
    check_positive(&[mu, nu])?;
    let s = mu + nu;
    let first = (4.0 * mu * nu + 3.0 * s + 2.0) / (2.0 * (2.0 * mu + 1.0) * (2.0 * nu + 1.0));
    let ln = ln_beta(s + 1.0, s + 2.0)? - ln_beta(mu, mu + 1.0)? - ln_beta(nu, nu + 1.0)?;
    range_guard(first - s * ln.exp() / (mu * nu))
}

/// 𝓑(1,1,μ,μ′,μ,μ′), from the contiguous Dixon sum.
pub fn b_case3(mu: f64, mu_prime: f64) -> Result<f64> {
    check_positive(&[mu, mu_prime])?;
    let ratio = (ln_beta(2.0 * mu, 2.0 * mu_prime)? - 2.0 * ln_beta(mu, mu_prime)?).exp();
    range_guard((mu_prime - 2.0 * ratio) / (mu + mu_prime))
}

fn case4_acc(lambda: f64, lambda_prime: f64, mu: f64) -> Result<Acc> {
    check_positive(&[lambda, lambda_prime, mu])?;
    let s = lambda + 2.0 * mu;
    let pref = (ln_beta(s, lambda_prime)? - 2.0 * mu.ln() - ln_beta(lambda, lambda_prime)? - 2.0 * ln_beta(mu, 0.5)?).exp();
    let series = pfq(&PfqSpec::unit(
        &[1.0, mu + 0.5, 2.0 * mu, s],
        &[mu + 1.0, 2.0 * mu + 1.0, s + lambda_prime],
    ))?;
    Ok(Acc::from_series(&series, pref))
}

/// 𝓑(λ,λ′,μ,½,μ,½), a single non-terminating ₄F₃ (Clausen's formula).
pub fn b_case4(lambda: f64, lambda_prime: f64, mu: f64) -> Result<f64> {
    range_guard(case4_acc(lambda, lambda_prime, mu)?.value)
}

/// E[W^λ] for W ~ BB(2,2,μ,μ′), the median of three i.i.d. Beta(μ,μ′)
/// variables: E[W^λ] = 6 E[X^λ F(X)(1 − F(X))] with F the Beta(μ,μ′) CDF.
pub fn bb22_moment(lambda: f64, mu: f64, mu_prime: f64) -> Result<f64> {
    check_positive(&[mu, mu_prime])?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::Domain(format!("moment order must be nonnegative, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let a = lambda + mu;
    let ratio = (ln_beta(a, mu_prime)? - ln_beta(mu, mu_prime)?).exp();
    let once = prob_exceeds_acc(a, mu_prime, mu, mu_prime)?.value;
    let twice = b_auto(&ParamSet::new(a, mu_prime, mu, mu_prime, mu, mu_prime)?, None)?.value;
    Ok(6.0 * ratio * (once - twice))
}

/// ⟨p_m, p_n⟩ = ∫ I(m,m;t) I(n,n;t) dt = 1/2 − C(m+n,m)²/(4 C(2m+2n,2m)).
pub fn pm_inner(m: u64, n: u64) -> Result<BigRational> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("m and n must be positive".into()));
    }
    let c = binomial(m + n, m);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    Ok(half - BigRational::new(&c * &c, binomial(2 * m + 2 * n, 2 * m) * 4))
}

/// (‖p′_m‖², ‖p_m^(m)‖²) = (B(2m−1,2m−1)/B(m,m)², (2m−2)!(2m−1)!/(m−1)!²).
pub fn pm_derivative_norms(m: u64) -> Result<(f64, f64)> {
    let (a, b) = pm_derivative_norms_exact(m)?;
    Ok((rational_to_f64(&a), rational_to_f64(&b)))
}

pub fn pm_derivative_norms_exact(m: u64) -> Result<(BigRational, BigRational)> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let bm = combinatorics::beta_int(m, m);
    let first = combinatorics::beta_int(2 * m - 1, 2 * m - 1) / (&bm * &bm);
    let fm = factorial(m - 1);
    let second = BigRational::new(factorial(2 * m - 2) * factorial(2 * m - 1), &fm * &fm);
    Ok((first, second))
}

/// 𝓒(λ,λ′,μ,μ′,ν,ν′) as the k-indexed series of ₃F₂ values; exactly λ′
/// outer terms when λ′ is a positive integer. For other λ′ the outer sum is
/// best-effort: it decays like k^(−1−λ′−μ′).
pub fn c_function(lambda: f64, lambda_prime: f64, mu: f64, mu_prime: f64, nu: f64, nu_prime: f64) -> Result<SeriesValue> {
    const OUTER_BUDGET: usize = 100_000;
    check_positive(&[lambda, lambda_prime, mu, mu_prime, nu, nu_prime])?;
    let a = lambda + mu + nu;
    let last = positive_integer(lambda_prime).map(|n| n as usize - 1);
    // The outer coefficients alternate and can exceed the sum by many orders
    // of magnitude, so the inner values are kept in double-double as well.
    let inner_opts = SeriesOptions { tol_rel: 1e-30, ..SeriesOptions::default() };
    let one_minus = 1.0 - lambda_prime;
    let mut sum = Dd::ZERO;
    let mut err = 0.0;
    let mut coeff = Dd::ONE; // (1−λ′)_k / k! · B(a+k, μ′) / B(a, μ′)
    let mut small_run = 0;
    let mut k = 0usize;
    let base = (ln_beta(a, mu_prime)? - nu.ln()).exp();
    // a + μ′ is rounded once, as in the double series, and a + k, a + μ′ + k
    // are then formed exactly.
    let a_mu = a + mu_prime;
    let inner_base = PfqSpec::unit(&[1.0 - nu_prime, nu, a], &[nu + 1.0, a_mu]);
    loop {
        let kf = k as f64;
        let ak = Dd::sum(a, kf);
        let (inner, est) = pfq_dd_shifted(&inner_base, &[0.0, 0.0, kf], &[0.0, kf], &inner_opts)?;
        let scale = coeff / Dd::sum(lambda, kf);
        let term = scale * inner;
        sum += term;
        err += (scale.value() * est.abs_error_estimate).abs();
        let total = sum.value();
        if last == Some(k) {
            let terminated = err == 0.0;
            return Ok(SeriesValue { value: base * total, abs_error_estimate: base * err, terms_used: k + 1, terminated });
        }
        if term.value().abs() < 1e-15 * total.abs() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 {
            let err = base * (err + 10.0 * term.value().abs());
            return Ok(SeriesValue { value: base * total, abs_error_estimate: err, terms_used: k + 1, terminated: false });
        }
        if k + 1 >= OUTER_BUDGET {
            return Err(Error::BudgetExceeded { budget: OUTER_BUDGET, context: "C-series outer sum" });
        }
        coeff = coeff * Dd::sum(one_minus, kf) / Dd::new(kf + 1.0) * ak / Dd::sum(a_mu, kf);
        k += 1;
    }
}

fn norm_ln(p: &ParamSet) -> Result<f64> {
    Ok(ln_beta(p.lambda, p.lambda_prime)? + ln_beta(p.mu, p.mu_prime)? + ln_beta(p.nu, p.nu_prime)?)
}

/// 𝓑 through the iterated 𝓒 series.
pub fn b_series_c(p: &ParamSet) -> Result<BResult> {
    let n = norm_ln(p)?;
    let c1 = c_function(p.lambda, p.lambda_prime, p.mu, p.mu_prime, p.nu, p.nu_prime)?;
    let c2 = c_function(p.lambda, p.lambda_prime, p.nu, p.nu_prime, p.mu, p.mu_prime)?;
    let scale = (-n).exp();
    Acc::from_series(&c1, scale)
        .plus(Acc::from_series(&c2, scale))
        .one_minus()
        .with_rounding()
        .into_result(Some(p), MethodTag::SeriesC)
}

/// 𝓑 through the ₄F₃ series: the product of the two ₂F₁'s in
/// I(μ,μ′;t) I(ν,ν′;t) expanded in powers of t and integrated termwise.
///
/// The k'th term of the n'th ₄F₃, times its outer factor, equals
/// a_{n−k} b_k with a, b the coefficients of ₂F₁(1−μ′,μ;μ+1;t) and
/// ₂F₁(1−ν′,ν;ν+1;t). Summing those products directly gives the same series
/// and also the right value when μ′ is an integer and n ≥ μ′, where the ₄F₃
/// written out has a pole cancelled by the zero of (1−μ′)_n. The series
/// terminates at n = μ′ + ν′ − 2 when both μ′ and ν′ are positive integers.
pub fn b_series_4f3(p: &ParamSet) -> Result<BResult> {
    const CELL_BUDGET: usize = 1_000_000;
    let a = p.lambda + p.mu + p.nu;
    let ln_norm = -(p.mu.ln() + p.nu.ln() + norm_ln(p)?);
    let last = match (positive_integer(p.mu_prime), positive_integer(p.nu_prime)) {
        (Some(m), Some(n)) => Some((m + n - 2) as usize),
        _ => None,
    };
    let coefficients = |m: f64, mp: f64| {
        let mut c = vec![Dd::ONE];
        move |j: usize| -> Dd {
            while c.len() <= j {
                let i = c.len() as f64;
                let prev = c[c.len() - 1];
                c.push(prev * Dd::sum(i, -mp) / Dd::new(i) * Dd::sum(m, i - 1.0) / Dd::sum(m, i));
            }
            c[j]
        }
    };
    let mut ca = coefficients(p.mu, p.mu_prime);
    let mut cb = coefficients(p.nu, p.nu_prime);

    // w_n = B(a+n, λ′) / B(a, λ′) by recurrence, so that the weights carry
    // no independent rounding into the cancellation.
    let mut w = Dd::ONE;
    let mut sum = Dd::ZERO;
    let mut cells = 0usize;
    let mut small_run = 0;
    let mut n = 0usize;
    let mut err = 0.0;
    loop {
        let mut c = Dd::ZERO;
        for j in 0..=n {
            c += ca(j) * cb(n - j);
        }
        cells += n + 1;
        let term = c * w;
        sum += term;
        if last == Some(n) {
            break;
        }
        if term.value().abs() < 1e-15 * sum.value().abs() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 {
            err = 10.0 * term.value().abs();
            break;
        }
        if cells >= CELL_BUDGET {
            return Err(Error::BudgetExceeded { budget: CELL_BUDGET, context: "4F3 series cells" });
        }
        let an = Dd::sum(a, n as f64);
        w = w * an / (an + Dd::new(p.lambda_prime));
        n += 1;
    }
    let ln_w0 = ln_beta(a, p.lambda_prime)? + ln_norm;
    let acc = Acc { value: sum.value(), err, terms: cells }.scaled_ln(ln_w0);
    acc.with_rounding().into_result(Some(p), MethodTag::Series4f3)
}

/// Primed parameters below this are raised before the double series is summed.
pub const SHIFT_TARGET: f64 = 8.0;

fn shift_count(prime: f64, lambda_prime: f64) -> u32 {
    if prime >= SHIFT_TARGET || (positive_integer(prime).is_some() && positive_integer(lambda_prime).is_some()) {
        0
    } else {
        (SHIFT_TARGET - prime).ceil() as u32
    }
}

// 1 − [𝓒 + 𝓒(swapped)] / (B B B) with both 𝓒 from the Kampé de Fériet series.
fn kdf_unshifted(p: &ParamSet) -> Result<Acc> {
    let a = p.lambda + p.mu + p.nu;
    let n = norm_ln(p)?;
    let s1 = kdf(&KdfSpec::c_series(p.lambda, p.lambda_prime, p.mu, p.mu_prime, p.nu, p.nu_prime))?;
    let s2 = kdf(&KdfSpec::c_series(p.lambda, p.lambda_prime, p.nu, p.nu_prime, p.mu, p.mu_prime))?;
    let w1 = ln_beta(a, p.mu_prime)? - p.lambda.ln() - p.nu.ln() - n;
    let w2 = ln_beta(a, p.nu_prime)? - p.lambda.ln() - p.mu.ln() - n;
    Ok(Acc::from_series(&s1, 1.0).scaled_ln(w1).plus(Acc::from_series(&s2, 1.0).scaled_ln(w2)).one_minus())
}

/// 𝓑 from the Kampé de Fériet form of 𝓒.
///
/// The double series decays only like a power of the index set by the
/// primed parameters, so small μ′ and ν′ are first raised to μ* = μ′ + K
/// using I(μ,μ′;t) = I(μ,μ*;t) − Σ_{j<K} g_j(t), g_j = t^μ (1−t)^(μ′+j) / ((μ′+j) B(μ,μ′+j)).
/// Expanding the product leaves 𝓑 at the raised parameters, cross terms that
/// are beta ratios times [`prob_exceeds`], and a closed-form double sum.
pub fn b_general(p: &ParamSet) -> Result<BResult> {
    let km = shift_count(p.mu_prime, p.lambda_prime);
    let kn = shift_count(p.nu_prime, p.lambda_prime);
    let raised = ParamSet { mu_prime: p.mu_prime + km as f64, nu_prime: p.nu_prime + kn as f64, ..*p };
    let mut acc = kdf_unshifted(&raised)?;

    let (l, lp) = (p.lambda, p.lambda_prime);
    let ln_bl = ln_beta(l, lp)?;
    // E[g_{a,r}(X) h(X)] = B(λ+a, λ′+r) / (B(λ,λ′) r B(a,r)) · E_{λ+a,λ′+r}[h]
    let weight = |a: f64, r: f64| -> Result<f64> { Ok(ln_beta(l + a, lp + r)? - ln_bl - r.ln() - ln_beta(a, r)?) };

    for j in 0..km {
        let r = p.mu_prime + j as f64;
        let cross = prob_exceeds_acc(l + p.mu, lp + r, p.nu, raised.nu_prime)?;
        acc = acc.minus(cross.scaled_ln(weight(p.mu, r)?));
    }
    for i in 0..kn {
        let s = p.nu_prime + i as f64;
        let cross = prob_exceeds_acc(l + p.nu, lp + s, p.mu, raised.mu_prime)?;
        acc = acc.minus(cross.scaled_ln(weight(p.nu, s)?));
    }
    let a = l + p.mu + p.nu;
    let mut double = 0.0;
    let mut double_err = 0.0;
    for j in 0..km {
        let r = p.mu_prime + j as f64;
        for i in 0..kn {
            let s = p.nu_prime + i as f64;
            let ln = ln_beta(a, lp + r + s)? - ln_bl - r.ln() - ln_beta(p.mu, r)? - s.ln() - ln_beta(p.nu, s)?;
            double += ln.exp();
            double_err += ln.exp() * f64::EPSILON * (2.0 + ln.abs());
        }
    }
    acc.value += double;
    acc.err += double_err;
    let mut out = acc.with_rounding().into_result(Some(p), MethodTag::KdfClosedForm)?;
    if km + kn > 0 {
        out.diagnostics.shift = Some((km, kn));
    }
    Ok(out)
}

/// Options for [`b_auto`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AutoPolicy {
    /// Use exact rational arithmetic when every parameter is a positive integer.
    pub exact: bool,
}

/// Evaluate 𝓑 through the cheapest applicable route.
///
/// The (μ,μ′) and (ν,ν′) pairs are put in a canonical order first, so the
/// result is bit-for-bit symmetric under their exchange. Special-case
/// patterns are matched by exact equality of the supplied values.
pub fn b_auto(p: &ParamSet, policy: Option<&AutoPolicy>) -> Result<BResult> {
    let policy = policy.copied().unwrap_or_default();
    let q = if (p.mu, p.mu_prime) <= (p.nu, p.nu_prime) { *p } else { p.swapped() };

    if policy.exact {
        if let Some(ip) = q.to_integers() {
            return Ok(exact_result(&ip));
        }
    }

    let unit_lambda = q.lambda == 1.0 && q.lambda_prime == 1.0;
    if unit_lambda && q.mu == q.mu_prime && q.nu == q.nu_prime {
        return special(&q, MethodTag::SpecialCase1, b_case1(q.mu, q.nu));
    }
    if unit_lambda && q.mu_prime == q.mu + 1.0 && q.nu_prime == q.nu + 1.0 {
        return special(&q, MethodTag::SpecialCase2, b_case2(q.mu, q.nu));
    }
    if unit_lambda && q.mu == q.nu && q.mu_prime == q.nu_prime {
        return special(&q, MethodTag::SpecialCase3, b_case3(q.mu, q.mu_prime));
    }
    if q.mu_prime == 0.5 && q.nu_prime == 0.5 && q.mu == q.nu {
        let acc = case4_acc(q.lambda, q.lambda_prime, q.mu)?;
        return acc.with_rounding().into_result(Some(&q), MethodTag::SpecialCase4);
    }
    if q.nu_prime == 1.0 {
        return b_nu_prime_one(q.lambda, q.lambda_prime, q.mu, q.mu_prime, q.nu);
    }
    if q.mu_prime == 1.0 {
        return b_nu_prime_one(q.lambda, q.lambda_prime, q.nu, q.nu_prime, q.mu);
    }
    if q.lambda_prime == 1.0 {
        return b_lambda_prime_one(q.lambda, q.mu, q.mu_prime, q.nu, q.nu_prime);
    }
    if positive_integer(q.mu_prime).is_some() && positive_integer(q.nu_prime).is_some() {
        return b_series_4f3(&q);
    }
    // An integer λ′ alone would allow the 𝓒 series, but its inner ₃F₂'s do
    // not terminate and need long tails when μ′ + ν′ is small; the shifted
    // double series is cheaper there.
    b_general(&q)
}

fn special(p: &ParamSet, method: MethodTag, value: Result<f64>) -> Result<BResult> {
    let value = value?;
    Acc { value, err: 0.0, terms: 0 }.with_rounding().into_result(Some(p), method)
}

/// Exact route packaged as a [`BResult`].
pub fn exact_result(p: &IntParamSet) -> BResult {
    let r = combinatorics::b_exact_rational(p);
    BResult {
        value: rational_to_f64(&r),
        method: MethodTag::ExactRational,
        abs_error_estimate: 0.0,
        diagnostics: Diagnostics { exact: Some(r.to_string()), ..Default::default() },
    }
}
