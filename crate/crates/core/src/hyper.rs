//! Generalized hypergeometric series, the two-variable Kampé de Fériet
//! function, and contiguous Whipple/Dixon summation formulas for ₃F₂(1).
//!
//! Terms are generated by their ratio recurrence and carried in log space.
//! A non-terminating ₚFₚ₋₁ at unit argument decays only like k^(−1−s),
//! where s is the sum of denominators minus the sum of numerators, so once
//! the summation index is well inside the asymptotic regime the remainder is
//! summed in closed form (see [`asymptotic_tail`]). Every other series is
//! summed until three consecutive terms fall below the relative tolerance.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::special::{gamma_signed, nonpositive_integer, LogSigned};

/// Result of summing a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub terms_used: usize,
    /// The series has finitely many non-zero terms and all were summed.
    pub terminated: bool,
}

impl SeriesValue {
    pub fn exact(value: f64, terms_used: usize) -> Self {
        SeriesValue { value, abs_error_estimate: 0.0, terms_used, terminated: true }
    }
}

/// Summation controls shared by [`pfq_with`] and [`kdf_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    /// A term counts as negligible when |term| < tol_rel · |partial sum|.
    pub tol_rel: f64,
    /// Hard budget on summed terms (cells, for double series).
    pub max_terms: usize,
    /// Allow the closed-form tail for slowly converging unit-argument series.
    pub asymptotic_tail: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions { tol_rel: 1e-15, max_terms: 1_000_000, asymptotic_tail: true }
    }
}

impl SeriesOptions {
    pub fn kdf() -> Self {
        SeriesOptions { max_terms: 4_000_000, ..Self::default() }
    }
}

/// Parameters of ₚF_q(a₁..a_p; b₁..b_q; z).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfqSpec {
    pub numerators: Vec<f64>,
    pub denominators: Vec<f64>,
    pub argument: f64,
}

impl PfqSpec {
    pub fn new(numerators: &[f64], denominators: &[f64], argument: f64) -> Self {
        PfqSpec { numerators: numerators.to_vec(), denominators: denominators.to_vec(), argument }
    }

    /// Series at unit argument.
    pub fn unit(numerators: &[f64], denominators: &[f64]) -> Self {
        Self::new(numerators, denominators, 1.0)
    }

    /// Σ denominators − Σ numerators.
    pub fn margin(&self) -> f64 {
        self.denominators.iter().sum::<f64>() - self.numerators.iter().sum::<f64>()
    }

    /// Index of the last non-zero term, if some numerator terminates the series.
    pub fn last_term(&self) -> Option<u64> {
        self.numerators.iter().filter_map(|&a| nonpositive_integer(a)).min()
    }
}

/// Evaluate ₚF_q with default options.
pub fn pfq(spec: &PfqSpec) -> Result<SeriesValue> {
    pfq_with(spec, &SeriesOptions::default())
}

/// Evaluate ₚF_q(a; b; z) for |z| ≤ 1.
pub fn pfq_with(spec: &PfqSpec, opts: &SeriesOptions) -> Result<SeriesValue> {
    let (_, mut v) = pfq_dd(spec, opts)?;
    if !v.terminated {
        // the f64 view of a double-double sum that includes an f64 tail
        v.abs_error_estimate += 4.0 * f64::EPSILON * v.value.abs();
    }
    Ok(v)
}

// Ratio of consecutive terms, (Π (a_i + k) / Π (b_j + k)) z / (k + 1), in
// double-double so that heavily cancelling sums keep their digits. Each
// parameter carries an integer shift s_i (missing shifts are zero) and
// a_i + s_i + k is formed exactly.
fn dd_ratio_shifted(num: &[f64], num_shift: &[f64], den: &[f64], den_shift: &[f64], z: f64, k: f64, with_factorial: bool) -> Dd {
    let mut r = Dd::new(z);
    if with_factorial {
        r = r / Dd::new(k + 1.0);
    }
    for (i, &a) in num.iter().enumerate() {
        r = r * Dd::sum(a, k + num_shift.get(i).copied().unwrap_or(0.0));
    }
    for (i, &b) in den.iter().enumerate() {
        r = r / Dd::sum(b, k + den_shift.get(i).copied().unwrap_or(0.0));
    }
    r
}

// Denominators within a few ulps of a numerator plus a small integer n are
// re-expressed as that numerator's base with its shift plus n, so pairs
// such as (λ)_k/(λ+1)_k keep the exact ratio λ/(λ+k) however λ+1 rounded.
// Returns the denominators' (bases, shifts).
fn anchor(num: &[f64], num_shift: &[f64], den: &[f64], den_shift: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let shift = |sh: &[f64], i: usize| sh.get(i).copied().unwrap_or(0.0);
    let mut bases = den.to_vec();
    let mut shifts: Vec<f64> = (0..den.len()).map(|j| shift(den_shift, j)).collect();
    for j in 0..den.len() {
        for (i, &a) in num.iter().enumerate() {
            let gap = (den[j] - a) + (shifts[j] - shift(num_shift, i));
            let n = gap.round();
            if n.abs() <= 64.0 && (gap - n).abs() <= 8.0 * f64::EPSILON * a.abs().max(den[j].abs()) {
                bases[j] = a;
                shifts[j] = shift(num_shift, i) + n;
                break;
            }
        }
    }
    (bases, shifts)
}

/// As [`pfq_with`], also returning the double-double sum; the error
/// estimate then leaves out the rounding of the f64 view.
pub(crate) fn pfq_dd(spec: &PfqSpec, opts: &SeriesOptions) -> Result<(Dd, SeriesValue)> {
    pfq_dd_shifted(spec, &[], &[], opts)
}

/// As [`pfq_dd`] for the parameters of `base` plus integer shifts. The terms
/// see each a_i + s_i exactly, not its rounded f64 value.
pub(crate) fn pfq_dd_shifted(base: &PfqSpec, num_shift: &[f64], den_shift: &[f64], opts: &SeriesOptions) -> Result<(Dd, SeriesValue)> {
    let shifted = |v: &[f64], sh: &[f64]| -> Vec<f64> { v.iter().enumerate().map(|(i, &a)| a + sh.get(i).copied().unwrap_or(0.0)).collect() };
    let spec = &PfqSpec::new(&shifted(&base.numerators, num_shift), &shifted(&base.denominators, den_shift), base.argument);
    let (den_base, den_shift) = anchor(&base.numerators, num_shift, &base.denominators, den_shift);
    let z = spec.argument;
    let all = spec.numerators.iter().chain(&spec.denominators);
    if !z.is_finite() || z.abs() > 1.0 || all.clone().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("pFq needs finite parameters and |z| <= 1, got z = {z}")));
    }

    let last = spec.last_term();
    for &b in &spec.denominators {
        if let Some(nb) = nonpositive_integer(b) {
            if last.is_none_or(|n| n > nb) {
                return Err(Error::Pole(format!("denominator parameter {b} is reached before the series terminates")));
            }
        }
    }
    if z == 0.0 {
        return Ok((Dd::ONE, SeriesValue::exact(1.0, 1)));
    }

    let p = spec.numerators.len();
    let q = spec.denominators.len();
    let margin = spec.margin();
    let unit = z == 1.0;
    if last.is_none() {
        if p > q + 1 {
            return Err(Error::Divergent { p, q });
        }
        if p == q + 1 && ((unit && margin <= 0.0) || (z == -1.0 && margin <= -1.0)) {
            return Err(Error::NonConvergent { margin });
        }
    }

    let use_tail = opts.asymptotic_tail && last.is_none() && p == q + 1 && unit && margin < 100.0;
    let tail_start = if use_tail {
        // The tail is good to about 1e-15 of itself and shrinks like k^(−s),
        // so tolerances below that push its start outwards.
        let ratio = 1e-15 / opts.tol_rel;
        let needed = if ratio > 1.0 { ratio.powf(1.0 / margin).min(opts.max_terms as f64 / 2.0) as usize } else { 0 };
        tail_start_index(&spec.numerators, &spec.denominators).max(needed)
    } else {
        usize::MAX
    };

    let mut term = Dd::ONE;
    let mut sum = Dd::ZERO;
    let mut small_run = 0;
    let mut k: usize = 0;
    loop {
        if !term.is_finite() {
            return Err(Error::Overflow("pFq term"));
        }
        sum += term;

        if last == Some(k as u64) {
            return Ok((sum, SeriesValue::exact(sum.value(), k + 1)));
        }
        let next = term * dd_ratio_shifted(&base.numerators, num_shift, &den_base, &den_shift, z, k as f64, true);

        let s = sum.value();
        if last.is_none() && term.value().abs() < opts.tol_rel * s.abs() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 {
            let value = SeriesValue {
                value: s,
                abs_error_estimate: 10.0 * next.value().abs(),
                terms_used: k + 1,
                terminated: false,
            };
            return Ok((sum, value));
        }
        if k + 1 == tail_start {
            let (tail, tail_err) =
                asymptotic_tail(&spec.numerators, &spec.denominators, margin, k + 1, next.value());
            let total = sum + Dd::new(tail);
            let value = total.value();
            let value = SeriesValue {
                value,
                abs_error_estimate: tail_err,
                terms_used: k + 1,
                terminated: false,
            };
            return Ok((total, value));
        }
        if k + 1 >= opts.max_terms {
            return Err(Error::BudgetExceeded { budget: opts.max_terms, context: "pFq summation" });
        }
        term = next;
        k += 1;
    }
}

fn tail_start_index(numerators: &[f64], denominators: &[f64]) -> usize {
    let scale = numerators.iter().chain(denominators).fold(1.0f64, |m, v| m.max(v.abs()));
    (40.0 * scale).ceil().max(64.0) as usize
}

const BERNOULLI: [f64; 21] = [
    1.0,
    -0.5,
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    5.0 / 66.0,
    0.0,
    -691.0 / 2730.0,
    0.0,
    7.0 / 6.0,
    0.0,
    -3617.0 / 510.0,
    0.0,
    43867.0 / 798.0,
    0.0,
    -174_611.0 / 330.0,
];

fn bernoulli_poly(n: usize, x: f64) -> f64 {
    let mut binom = 1.0;
    let mut acc = 0.0;
    for (k, bk) in BERNOULLI.iter().enumerate().take(n + 1) {
        if k > 0 {
            binom = binom * (n + 1 - k) as f64 / k as f64;
        }
        acc += binom * bk * x.powi((n - k) as i32);
    }
    acc
}

/// Closed-form remainder Σ_{k ≥ K} t_k of a unit-argument ₚF_{p−1} series,
/// given the first omitted term `t_k_start` = t_K.
///
/// Expanding ln Γ(x + a) in powers of 1/x (Bernoulli polynomials) gives
/// t_k = A k^(−1−s) Σ_m e_m k^(−m) for k ≥ K; each power is then summed with
/// the Euler–Maclaurin form of the Hurwitz zeta function ζ(1+s+m, K).
/// Returns (tail, error estimate).
pub fn asymptotic_tail(
    numerators: &[f64],
    denominators: &[f64],
    margin: f64,
    start: usize,
    t_k_start: f64,
) -> (f64, f64) {
    const ORDER: usize = 14;
    const EM_TERMS: usize = 8;

    // c_n: coefficients of ln t_k − ln A + (1+s) ln k in powers of 1/k.
    let mut c = [0.0; ORDER + 1];
    for (n, cn) in c.iter_mut().enumerate().skip(1) {
        let num: f64 = numerators.iter().map(|&a| bernoulli_poly(n + 1, a)).sum();
        let den: f64 = denominators.iter().map(|&b| bernoulli_poly(n + 1, b)).sum::<f64>() + bernoulli_poly(n + 1, 1.0);
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        *cn = sign * (num - den) / (n * (n + 1)) as f64;
    }
    // e_m: coefficients of exp(Σ c_n x^−n).
    let mut e = [0.0; ORDER + 1];
    e[0] = 1.0;
    for m in 1..=ORDER {
        let mut acc = 0.0;
        for j in 1..=m {
            acc += j as f64 * c[j] * e[m - j];
        }
        e[m] = acc / m as f64;
    }

    let kf = start as f64;
    let inv = 1.0 / kf;
    let mut scaled = 1.0;
    let mut envelope = 0.0;
    let mut weighted = 0.0;
    let mut last = 0.0;
    for (m, em) in e.iter().enumerate() {
        let sigma = 1.0 + margin + m as f64;
        // ζ(σ, K) K^(σ−1)
        let mut h = 1.0 / (sigma - 1.0) + 0.5 * inv;
        let mut rising = sigma; // (σ)_{2j−1}
        let mut fact = 2.0; // (2j)!
        let mut kpow = inv * inv;
        for j in 1..=EM_TERMS {
            h += BERNOULLI[2 * j] / fact * rising * kpow;
            let jf = j as f64;
            rising *= (sigma + 2.0 * jf - 1.0) * (sigma + 2.0 * jf);
            fact *= (2.0 * jf + 1.0) * (2.0 * jf + 2.0);
            kpow *= inv * inv;
        }
        envelope += em * scaled;
        last = em * scaled * h;
        weighted += last;
        scaled *= inv;
    }
    let factor = t_k_start * kf / envelope;
    let tail = factor * weighted;
    (tail, (factor * last).abs() + 1e-15 * tail.abs())
}

/// Parameters of a two-variable Kampé de Fériet function
/// F^{A:C;F}_{B:D;G}[(a):(c);(f); (b):(d);(g); x, y].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdfSpec {
    /// Numerators coupled through (·)_{m+n}.
    pub a: Vec<f64>,
    /// Denominators coupled through (·)_{m+n}.
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub x: f64,
    pub y: f64,
}

impl KdfSpec {
    /// The function 𝓒(λ,λ′,μ,μ′,ν,ν′) is B(λ+μ+ν, μ′)/(λν) times this
    /// series at (1, 1).
    pub fn c_series(lambda: f64, lambda_prime: f64, mu: f64, mu_prime: f64, nu: f64, nu_prime: f64) -> Self {
        let s = lambda + mu + nu;
        KdfSpec {
            a: vec![s],
            b: vec![s + mu_prime],
            c: vec![lambda, 1.0 - lambda_prime],
            d: vec![lambda + 1.0],
            f: vec![nu, 1.0 - nu_prime],
            g: vec![nu + 1.0],
            x: 1.0,
            y: 1.0,
        }
    }
}

// Single-index factor sequence ((num))_k/((den))_k z^k/k!, generated lazily.
struct FactorSeq {
    num: Vec<f64>,
    den: Vec<f64>,
    den_shift: Vec<f64>,
    z: f64,
    with_factorial: bool,
    values: Vec<Dd>,
    last: Option<u64>,
}

impl FactorSeq {
    fn new(num: &[f64], den: &[f64], z: f64, with_factorial: bool) -> Result<Self> {
        let mut last = num.iter().filter_map(|&a| nonpositive_integer(a)).min();
        if z == 0.0 {
            last = Some(0);
        }
        for &b in den {
            if let Some(nb) = nonpositive_integer(b) {
                if last.is_none_or(|n| n > nb) {
                    return Err(Error::Pole(format!("Kampé de Fériet denominator {b} is reached")));
                }
            }
        }
        let (den, den_shift) = anchor(num, &[], den, &[]);
        Ok(FactorSeq { num: num.to_vec(), den, den_shift, z, with_factorial, values: vec![Dd::ONE], last })
    }

    fn get(&mut self, k: usize) -> Result<Dd> {
        while self.values.len() <= k {
            let j = self.values.len() - 1;
            let prev = self.values[j];
            if prev.hi == 0.0 || self.last.is_some_and(|n| j as u64 >= n) {
                self.values.push(Dd::ZERO);
                continue;
            }
            let next = prev * dd_ratio_shifted(&self.num, &[], &self.den, &self.den_shift, self.z, j as f64, self.with_factorial);
            if !next.is_finite() {
                return Err(Error::Overflow("Kampé de Fériet factor"));
            }
            self.values.push(next);
        }
        Ok(self.values[k])
    }
}

/// Evaluate a Kampé de Fériet series with default options.
pub fn kdf(spec: &KdfSpec) -> Result<SeriesValue> {
    kdf_with(spec, &SeriesOptions::kdf())
}

/// Double sum over anti-diagonals m + n = s, s ascending. The coupled factor
/// is constant along a diagonal and computed once per diagonal.
pub fn kdf_with(spec: &KdfSpec, opts: &SeriesOptions) -> Result<SeriesValue> {
    let params = [&spec.a, &spec.b, &spec.c, &spec.d, &spec.f, &spec.g];
    if params.iter().any(|l| l.iter().any(|v| !v.is_finite())) || !spec.x.is_finite() || !spec.y.is_finite() {
        return Err(Error::Domain("Kampé de Fériet parameters must be finite".into()));
    }
    let mut coupled = FactorSeq::new(&spec.a, &spec.b, 1.0, false)?;
    let mut left = FactorSeq::new(&spec.c, &spec.d, spec.x, true)?;
    let mut right = FactorSeq::new(&spec.f, &spec.g, spec.y, true)?;
    let last_diagonal = match (coupled.last, left.last, right.last) {
        (Some(a), _, _) => Some(a as usize),
        (None, Some(m), Some(n)) => Some((m + n) as usize),
        _ => None,
    };
    // Cells vanish outside m ≤ left.last, n ≤ right.last.
    let m_max = left.last.map_or(usize::MAX, |n| n as usize);
    let n_max = right.last.map_or(usize::MAX, |n| n as usize);

    // Returns (d_s, Σ|cell| on the diagonal, cells evaluated).
    let mut diagonal = |s: usize| -> Result<(Dd, f64, usize)> {
        let p = coupled.get(s)?;
        let mut acc = Dd::ZERO;
        let mut abs = 0.0;
        if p.hi == 0.0 {
            return Ok((acc, 0.0, 1));
        }
        let lo = s.saturating_sub(n_max);
        let hi = s.min(m_max);
        for m in lo..=hi {
            let cell = left.get(m)? * right.get(s - m)?;
            acc += cell;
            abs += cell.hi.abs();
        }
        Ok((acc * p, abs * p.hi.abs(), (hi + 1).saturating_sub(lo).max(1)))
    };
    // Each factor is a product of up to s double-double ratios, so a cell
    // carries relative error of order s·2⁻¹⁰⁴; when the cells cancel this
    // bound, not truncation, limits the result. Finite sums report zero,
    // like every terminated series.
    let rounding = |abs_sum: f64, s: usize| abs_sum * (8.0 + 4.0 * s as f64) * 2f64.powi(-104);

    // A diagonal d_s is counted as small when it and the tail it implies,
    // d_s / (1 − r) with r = |d_s / d_{s−1}|, are both below tol·|sum|;
    // power-law decay has r → 1 and a tail much larger than d_s.
    let tail_factor = |d: f64, prev: f64, s: usize| -> f64 {
        let r = if prev == 0.0 { 0.0 } else { (d / prev).abs() };
        if r < 1.0 {
            (1.0 / (1.0 - r)).min((s + 1) as f64)
        } else {
            (s + 1) as f64
        }
    };
    let mut sum = Dd::ZERO;
    let mut abs_sum = 0.0;
    let mut cells = 0usize;
    let mut small_run = 0;
    let mut prev = 0.0;
    let mut s = 0usize;
    loop {
        let (d, abs, evaluated) = diagonal(s)?;
        sum += d;
        abs_sum += abs;
        cells += evaluated;
        if last_diagonal == Some(s) {
            return Ok(SeriesValue::exact(sum.value(), cells));
        }
        let total = sum.value();
        let dv = d.value();
        if last_diagonal.is_none() && dv.abs() * tail_factor(dv, prev, s) < opts.tol_rel * total.abs() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 {
            let next = diagonal(s + 1)?.0.value();
            return Ok(SeriesValue {
                value: total,
                abs_error_estimate: 2.0 * next.abs() * tail_factor(next, dv, s + 1) + rounding(abs_sum, s),
                terms_used: cells,
                terminated: false,
            });
        }
        if cells >= opts.max_terms {
            return Err(Error::BudgetExceeded { budget: opts.max_terms, context: "Kampé de Fériet summation" });
        }
        prev = dv;
        s += 1;
    }
}

/// Π Γ(num) / Π Γ(den). A pole in the denominator makes the ratio zero; a
/// pole in the numerator is an error.
pub fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<LogSigned> {
    let mut acc = LogSigned::ONE;
    for &x in num {
        acc = acc * gamma_signed(x)?;
    }
    for &x in den {
        match gamma_signed(x) {
            Ok(g) => acc = acc / g,
            Err(Error::Pole(_)) => return Ok(LogSigned::ZERO),
            Err(e) => return Err(e),
        }
    }
    Ok(acc)
}

const CONSTRAINT_TOL: f64 = 1e-9;

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Constraint(what.to_string()))
    }
}

/// ₃F₂(a, b, c; e, f; 1) for a + b = 1, e + f = 2c (contiguous Whipple, i = −1, j = 1).
///
/// The bracket's first denominators are Γ(½(e+a−1)) and Γ(½(f+a−1)); with
/// ½(e+a+1), ½(f+a+1) there instead, a = 0 would give 2/(c − 1) rather
/// than 1. Each Γ(e−a), Γ(f−a) is merged with the bracket by the
/// duplication formula, leaving only reciprocal gammas, which stay accurate
/// next to their poles.
pub fn whipple_contiguous_m1_p1(a: f64, b: f64, c: f64, e: f64, f: f64) -> Result<f64> {
    require((a + b - 1.0).abs() <= CONSTRAINT_TOL, "a + b = 1")?;
    require((e + f - 2.0 * c).abs() <= CONSTRAINT_TOL, "e + f = 2c")?;
    if c == 1.0 {
        return Err(Error::Pole("factor 1/(c − 1) at c = 1".into()));
    }
    let t1 = gamma_ratio(&[e, f], &[0.5 * (e - a), 0.5 * (f - a + 1.0), 0.5 * (e + a - 1.0), 0.5 * (f + a)])?;
    let t2 = gamma_ratio(&[e, f], &[0.5 * (f - a), 0.5 * (e - a + 1.0), 0.5 * (f + a - 1.0), 0.5 * (e + a)])?;
    Ok(PI * 2f64.powf(2.0 - 2.0 * c) / (c - 1.0) * (t1.value() + t2.value()))
}

/// ₃F₂(a, b, c; e, f; 1) for a + b = 0, e + f = 2c + 1 (contiguous Whipple, i = 0, j = −1).
pub fn whipple_contiguous_0_m1(a: f64, b: f64, c: f64, e: f64, f: f64) -> Result<f64> {
    require((a + b).abs() <= CONSTRAINT_TOL, "a + b = 0")?;
    require((e + f - 2.0 * c - 1.0).abs() <= CONSTRAINT_TOL, "e + f = 2c + 1")?;
    // Duplication-merged as above.
    let t1 = gamma_ratio(&[e, f], &[0.5 * (e - a + 1.0), 0.5 * (f - a + 1.0), 0.5 * (e + a), 0.5 * (f + a)])?;
    let t2 = gamma_ratio(&[e, f], &[0.5 * (e - a), 0.5 * (f - a), 0.5 * (e + a + 1.0), 0.5 * (f + a + 1.0)])?;
    Ok(PI * 2f64.powf(-2.0 * c) * (t1.value() + t2.value()))
}

/// ₃F₂(a, b, c; a − b, a − c + 1; 1) (contiguous Dixon, i = −1, j = 1).
pub fn dixon_contiguous_m1_p1(a: f64, b: f64, c: f64) -> Result<f64> {
    let e = a - b;
    let f = a - c + 1.0;
    let front = gamma_ratio(&[e, f], &[f - c, f - b])?;
    let t1 = gamma_ratio(&[0.5 * (f - c), 0.5 * a - b - c + 1.0], &[0.5 * (a + 1.0), 0.5 * (e - b)])?;
    let t2 = gamma_ratio(&[0.5 * (f - c + 1.0), 0.5 * a - b - c + 0.5], &[0.5 * a, 0.5 * (e - b + 1.0)])?;
    Ok(front.value() / 4f64.powf(c) * (t1.value() + t2.value()))
}

/// The Dixon instance's implied denominators (e, f) = (a − b, a − c + 1).
pub fn dixon_denominators(a: f64, b: f64, c: f64) -> (f64, f64) {
    (a - b, a - c + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn gauss_sum_and_terminating_examples() {
        let v = pfq(&PfqSpec::unit(&[1.0, 1.0], &[3.0])).unwrap();
        assert!(close(v.value, 2.0, 1e-13), "{v:?}");
        assert!(!v.terminated);

        let v = pfq(&PfqSpec::unit(&[0.0, 1.0, 3.0], &[2.0, 4.0])).unwrap();
        assert_eq!(v.value, 1.0);
        assert!(v.terminated);
        assert_eq!(v.abs_error_estimate, 0.0);
        assert_eq!(v.terms_used, 1);

        let v = pfq(&PfqSpec::unit(&[-1.0, 1.0, 3.0], &[2.0, 4.0])).unwrap();
        assert!(close(v.value, 5.0 / 8.0, 1e-15));
        assert_eq!(v.terms_used, 2);
    }

    #[test]
    fn gauss_sum_with_tiny_margin() {
        // ₂F₁(a,b;c;1) = Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b)); margin 0.05
        let (a, b, c) = (0.3, 0.45, 0.8);
        let exact = gamma_ratio(&[c, c - a - b], &[c - a, c - b]).unwrap().value();
        let v = pfq(&PfqSpec::unit(&[a, b], &[c])).unwrap();
        assert!(close(v.value, exact, 1e-13), "{} vs {exact}", v.value);
        assert!(v.abs_error_estimate < 1e-12 * exact);

        // larger parameters, negative numerator
        let (a, b, c) = (-7.5, 12.25, 5.0);
        let exact = gamma_ratio(&[c, c - a - b], &[c - a, c - b]).unwrap().value();
        let v = pfq(&PfqSpec::unit(&[a, b], &[c])).unwrap();
        assert!((v.value - exact).abs() < 1e-11 * exact.abs().max(1.0), "{} vs {exact}", v.value);
    }

    #[test]
    fn saalschutz_sum() {
        // ₃F₂(−n, a, b; c, 1+a+b−c−n; 1) = (c−a)_n (c−b)_n / ((c)_n (c−a−b)_n)
        let (n, a, b, c) = (6u64, 0.7, 2.3, 4.1);
        let v = pfq(&PfqSpec::unit(&[-(n as f64), a, b], &[c, 1.0 + a + b - c - n as f64])).unwrap();
        let p = crate::special::pochhammer;
        let exact = (p(c - a, n) * p(c - b, n) / (p(c, n) * p(c - a - b, n))).value();
        assert!(close(v.value, exact, 1e-12));
        assert!(v.terminated);
    }

    #[test]
    fn pfq_errors() {
        assert!(matches!(pfq(&PfqSpec::unit(&[1.0, 1.0], &[2.0])), Err(Error::NonConvergent { .. })));
        assert!(matches!(pfq(&PfqSpec::unit(&[1.0, 1.0, 1.0], &[2.0])), Err(Error::Divergent { .. })));
        assert!(matches!(pfq(&PfqSpec::unit(&[1.0, 2.0], &[-3.0])), Err(Error::Pole(_))));
        // zero before pole is fine
        assert!(pfq(&PfqSpec::unit(&[-2.0, 2.0], &[-3.0])).is_ok());
        assert!(matches!(pfq(&PfqSpec::unit(&[-4.0, 2.0], &[-3.0])), Err(Error::Pole(_))));
        assert!(pfq(&PfqSpec::new(&[1.0], &[2.0], 1.5)).is_err());
        let opts = SeriesOptions { asymptotic_tail: false, max_terms: 1000, ..Default::default() };
        assert!(matches!(pfq_with(&PfqSpec::unit(&[0.5, 0.5], &[1.2]), &opts), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn pfq_inside_disc() {
        // ₁F₀(a;;z) = (1−z)^(−a)
        let v = pfq(&PfqSpec::new(&[2.5], &[], 0.3)).unwrap();
        assert!(close(v.value, 0.7f64.powf(-2.5), 1e-14));
        // ₂F₁(1,1;2;−1) = ln 2, alternating at the edge of the disc
        let v = pfq(&PfqSpec::new(&[1.0, 1.0], &[2.0], -0.5)).unwrap();
        assert!(close(v.value, 1.5f64.ln() / 0.5, 1e-14));
    }

    #[test]
    fn kdf_examples() {
        let empty = KdfSpec { a: vec![], b: vec![], c: vec![], d: vec![], f: vec![], g: vec![], x: 1.0, y: 1.0 };
        let v = kdf(&empty).unwrap();
        assert!(close(v.value, 2f64.exp(), 1e-14));

        let zero = KdfSpec { a: vec![0.0], ..empty.clone() };
        let v = kdf(&zero).unwrap();
        assert_eq!(v.value, 1.0);
        assert!(v.terminated);

        let prop2 = KdfSpec::c_series(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(prop2.a, vec![3.0]);
        assert_eq!(prop2.b, vec![4.0]);
        assert_eq!(prop2.c, vec![1.0, 0.0]);
        assert_eq!(prop2.d, vec![2.0]);
        assert_eq!(prop2.f, vec![1.0, 0.0]);
        assert_eq!(prop2.g, vec![2.0]);
        let v = kdf(&prop2).unwrap();
        assert_eq!(v.value, 1.0);
        assert!(v.terminated);
    }

    #[test]
    fn kdf_factorizes_without_coupling() {
        // no coupled parameters: product of two single series
        let spec = KdfSpec {
            a: vec![],
            b: vec![],
            c: vec![0.5],
            d: vec![],
            f: vec![1.5],
            g: vec![],
            x: 0.3,
            y: -0.4,
        };
        let v = kdf(&spec).unwrap();
        let exact = 0.7f64.powf(-0.5) * 1.4f64.powf(-1.5);
        assert!(close(v.value, exact, 1e-13));
    }

    #[test]
    fn whipple_and_dixon_degenerate_instances() {
        assert!(close(whipple_contiguous_m1_p1(0.0, 1.0, 3.0, 2.0, 4.0).unwrap(), 1.0, 1e-14));
        assert!(close(whipple_contiguous_m1_p1(0.0, 1.0, 1.2, 0.2, 2.2).unwrap(), 1.0, 1e-14));
        assert!(close(whipple_contiguous_0_m1(0.0, 0.0, 1.0, 1.0, 2.0).unwrap(), 1.0, 1e-14));
        assert!(close(dixon_contiguous_m1_p1(3.0, 1.0, 0.0).unwrap(), 1.0, 1e-14));
        assert!(matches!(whipple_contiguous_m1_p1(0.5, 0.6, 3.0, 2.0, 4.0), Err(Error::Constraint(_))));
        assert!(matches!(whipple_contiguous_0_m1(0.5, 0.0, 1.0, 1.0, 2.0), Err(Error::Constraint(_))));
    }
}
