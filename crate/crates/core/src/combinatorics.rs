//! Exact arithmetic for integer parameters: 𝓑 as a reduced rational, the
//! string counts T(ℓ,ℓ′,m,m′,n,n′), their closed forms and Tables 1–3.
//!
//! With integer parameters, X ~ Beta(ℓ,ℓ′) is the ℓ'th smallest of
//! L = ℓ+ℓ′−1 uniforms (likewise Y, Z), so 𝓑 = P(X > max{Y,Z}) is the
//! fraction of the L+M+N arrangements in which the ℓ'th X is preceded by
//! at least m Y's and n Z's.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::ParamSet;

/// Six positive integer parameters (ℓ, ℓ′, m, m′, n, n′).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntParamSet {
    pub ell: u64,
    pub ell_prime: u64,
    pub m: u64,
    pub m_prime: u64,
    pub n: u64,
    pub n_prime: u64,
}

impl IntParamSet {
    pub fn new(ell: u64, ell_prime: u64, m: u64, m_prime: u64, n: u64, n_prime: u64) -> Result<Self> {
        let p = IntParamSet { ell, ell_prime, m, m_prime, n, n_prime };
        if p.as_array().contains(&0) {
            return Err(Error::Domain(format!("integer parameters must be at least 1, got {:?}", p.as_array())));
        }
        Ok(p)
    }

    pub fn from_array(a: [u64; 6]) -> Result<Self> {
        Self::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub fn as_array(&self) -> [u64; 6] {
        [self.ell, self.ell_prime, self.m, self.m_prime, self.n, self.n_prime]
    }

    /// Letter counts (L, M, N).
    pub fn sizes(&self) -> (u64, u64, u64) {
        (self.ell + self.ell_prime - 1, self.m + self.m_prime - 1, self.n + self.n_prime - 1)
    }

    /// Parameters for the given counts and ranks: (ℓ, L−ℓ+1, m, M−m+1, n, N−n+1).
    pub fn from_sizes(l: u64, ell: u64, m_total: u64, m: u64, n_total: u64, n: u64) -> Result<Self> {
        if ell == 0 || ell > l || m == 0 || m > m_total || n == 0 || n > n_total {
            return Err(Error::Domain("ranks must satisfy 1 <= rank <= count".into()));
        }
        Self::new(ell, l - ell + 1, m, m_total - m + 1, n, n_total - n + 1)
    }

    pub fn swapped(&self) -> Self {
        IntParamSet { m: self.n, m_prime: self.n_prime, n: self.m, n_prime: self.m_prime, ..*self }
    }

    /// (m, m′, n, n′, ℓ, ℓ′): the second variable becomes the one that must be largest.
    pub fn cycled(&self) -> Self {
        IntParamSet {
            ell: self.m,
            ell_prime: self.m_prime,
            m: self.n,
            m_prime: self.n_prime,
            n: self.ell,
            n_prime: self.ell_prime,
        }
    }

    pub fn to_params(&self) -> ParamSet {
        let a = self.as_array().map(|v| v as f64);
        ParamSet::from_array(a).expect("positive integers are valid parameters")
    }
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// C(n, k), zero for k > n.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// (Σ parts)! / Π parts!
pub fn multinomial(parts: &[u64]) -> BigInt {
    let mut total = 0;
    let mut acc = BigInt::one();
    for &p in parts {
        total += p;
        acc *= binomial(total, p);
    }
    acc
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// B(a, b) = (a−1)!(b−1)!/(a+b−1)! for positive integers.
pub fn beta_int(a: u64, b: u64) -> BigRational {
    BigRational::new(factorial(a - 1) * factorial(b - 1), factorial(a + b - 1))
}

// A terminating ₚF_q(1) with integer-valued rational parameters. Terms are
// built by the ratio recurrence; summation stops at `last` inclusive.
fn pfq_exact(num: &[BigInt], den: &[BigInt], last: u64) -> BigRational {
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for k in 0..last {
        let mut p = BigInt::one();
        let mut q = BigInt::from(k + 1);
        for a in num {
            p *= a + k;
        }
        for b in den {
            q *= b + k;
        }
        if p.is_zero() {
            break;
        }
        assert!(!q.is_zero(), "pole reached in terminating series");
        term *= BigRational::new(p, q);
        sum += &term;
    }
    sum
}

/// Route used by [`b_exact_rational`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactRoute {
    /// The ₄F₃ (coefficient-product) series, μ′ν′ cells.
    Series4f3,
    /// The 𝓒 series, terminating in λ′, with terminating inner ₃F₂'s.
    SeriesC,
}

/// Pick whichever terminating representation needs fewer inner terms.
pub fn exact_route(p: &IntParamSet) -> ExactRoute {
    let cost_4f3 = p.m_prime * p.n_prime;
    let cost_c = p.ell_prime * (p.m_prime + p.n_prime);
    if cost_4f3 <= cost_c {
        ExactRoute::Series4f3
    } else {
        ExactRoute::SeriesC
    }
}

/// Exact 𝓑(ℓ,ℓ′,m,m′,n,n′) as a reduced rational.
pub fn b_exact_rational(p: &IntParamSet) -> BigRational {
    match exact_route(p) {
        ExactRoute::Series4f3 => exact_series_4f3(p),
        ExactRoute::SeriesC => exact_series_c(p),
    }
}

// Coefficients of ₂F₁(1−m′, m; m+1; t) = Σ_j (−1)^j C(m′−1, j) m/(m+j) t^j.
fn inc_beta_coefficients(m: u64, m_prime: u64) -> Vec<BigRational> {
    (0..m_prime)
        .map(|j| {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            BigRational::new(binomial(m_prime - 1, j) * sign * m, BigInt::from(m + j))
        })
        .collect()
}

/// The ₄F₃ representation. Each ₄F₃ term times its outer factor is a
/// product a_{n−k} b_k of the two ₂F₁ coefficients, so the double sum runs
/// over j < m′, k < n′ and ends at outer index m′ + n′ − 2.
pub fn exact_series_4f3(p: &IntParamSet) -> BigRational {
    let (l, lp, mu, mup, nu, nup) = (p.ell, p.ell_prime, p.m, p.m_prime, p.n, p.n_prime);
    let a = l + mu + nu;
    let ca = inc_beta_coefficients(mu, mup);
    let cb = inc_beta_coefficients(nu, nup);
    let mut acc = BigRational::zero();
    for n in 0..(mup + nup - 1) {
        let mut c = BigRational::zero();
        for j in n.saturating_sub(nup - 1)..=n.min(mup - 1) {
            c += &ca[j as usize] * &cb[(n - j) as usize];
        }
        acc += c * beta_int(a + n, lp);
    }
    let norm = rat(mu * nu) * beta_int(l, lp) * beta_int(mu, mup) * beta_int(nu, nup);
    acc / norm
}

/// 𝓒(ℓ,ℓ′,m,m′,n,n′) for integer parameters: λ′ outer terms.
pub fn exact_c_function(p: &IntParamSet) -> BigRational {
    let (l, lp, mu, mup, nu, nup) = (p.ell, p.ell_prime, p.m, p.m_prime, p.n, p.n_prime);
    let a = l + mu + nu;
    let mut acc = BigRational::zero();
    for k in 0..lp {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let coeff = rat(binomial(lp - 1, k) * sign) * beta_int(a + k, mup) / rat((l + k) * nu);
        let num = [BigInt::from(1) - BigInt::from(nup), BigInt::from(nu), BigInt::from(k + a)];
        let den = [BigInt::from(nu + 1), BigInt::from(k + mup + a)];
        acc += coeff * pfq_exact(&num, &den, nup - 1);
    }
    acc
}

/// 𝓑 = 1 − [𝓒 + 𝓒(swapped)] / (B(ℓ,ℓ′)B(m,m′)B(n,n′)).
pub fn exact_series_c(p: &IntParamSet) -> BigRational {
    let norm = beta_int(p.ell, p.ell_prime) * beta_int(p.m, p.m_prime) * beta_int(p.n, p.n_prime);
    BigRational::one() - (exact_c_function(p) + exact_c_function(&p.swapped())) / norm
}

fn to_integer(r: BigRational, what: &str) -> Result<BigInt> {
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(Error::Consistency(format!("{what} is not an integer: {r}")))
    }
}

/// T(ℓ,ℓ′,m,m′,n,n′) = multinomial(L+M+N; L, M, N) · 𝓑.
pub fn t_count(p: &IntParamSet) -> Result<BigInt> {
    let (l, m, n) = p.sizes();
    to_integer(rat(multinomial(&[l, m, n])) * b_exact_rational(p), "T count")
}

/// Default length limit for [`t_count_bruteforce`].
pub const BRUTEFORCE_BUDGET: u64 = 18;

/// Count arrangements of L X's, M Y's, N Z's in which the ℓ'th X is
/// preceded by at least m Y's and n Z's, by walking every distinct
/// arrangement in lexicographic order.
pub fn t_count_bruteforce(p: &IntParamSet) -> Result<BigInt> {
    t_count_bruteforce_with_budget(p, BRUTEFORCE_BUDGET)
}

pub fn t_count_bruteforce_with_budget(p: &IntParamSet, budget: u64) -> Result<BigInt> {
    let (l, m, n) = p.sizes();
    let len = l + m + n;
    if len > budget {
        return Err(Error::BudgetExceeded { budget: budget as usize, context: "string enumeration length" });
    }
    // 0 = X, 1 = Y, 2 = Z; sorted start is the lexicographically first arrangement
    let mut s: Vec<u8> = std::iter::repeat_n(0, l as usize)
        .chain(std::iter::repeat_n(1, m as usize))
        .chain(std::iter::repeat_n(2, n as usize))
        .collect();
    let mut count: u64 = 0;
    loop {
        if satisfies(&s, p.ell, p.m, p.n) {
            count += 1;
        }
        if !next_permutation(&mut s) {
            break;
        }
    }
    Ok(BigInt::from(count))
}

fn satisfies(s: &[u8], ell: u64, m: u64, n: u64) -> bool {
    let (mut xs, mut ys, mut zs) = (0, 0, 0);
    for &c in s {
        match c {
            0 => {
                xs += 1;
                if xs == ell {
                    return ys >= m && zs >= n;
                }
            }
            1 => ys += 1,
            _ => zs += 1,
        }
    }
    unreachable!("string holds at least ell X's")
}

/// Rearrange into the next lexicographic permutation; false after the last.
pub fn next_permutation<T: Ord>(s: &mut [T]) -> bool {
    let Some(i) = s.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = s.iter().rposition(|x| *x > s[i]).expect("a larger element exists right of i");
    s.swap(i, j);
    s[i + 1..].reverse();
    true
}

/// T(1,1,m,m,n,n) = 1/(2B(2m,2n)) − C(m+n,m)/(2B(m,n)).
pub fn t_closed_mmnn(m: u64, n: u64) -> Result<BigInt> {
    check_positive(m, n)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let v = &half / beta_int(2 * m, 2 * n) - half * rat(binomial(m + n, m)) / beta_int(m, n);
    to_integer(v, "T(1,1,m,m,n,n)")
}

/// T(1,1,m,m+1,n,n+1) = (4mn+3(m+n)+2)/(4(m+n+1)) C(2(m+n+1), 2m+1) − (m+n)/2 C(m+n,m)².
pub fn t_closed_mm1nn1(m: u64, n: u64) -> Result<BigInt> {
    check_positive(m, n)?;
    let first = BigRational::new(BigInt::from(4 * m * n + 3 * (m + n) + 2), BigInt::from(4 * (m + n + 1)))
        * rat(binomial(2 * (m + n + 1), 2 * m + 1));
    let c = binomial(m + n, m);
    let second = BigRational::new(BigInt::from(m + n) * &c * &c, BigInt::from(2));
    to_integer(first - second, "T(1,1,m,m+1,n,n+1)")
}

/// T(1,1,m,n,m,n) = n C(2m+2n−1, m+n) − 2mn/(m+n) C(2m−1,m) C(2n−1,n).
pub fn t_closed_mnmn(m: u64, n: u64) -> Result<BigInt> {
    check_positive(m, n)?;
    let first = rat(binomial(2 * m + 2 * n - 1, m + n) * n);
    let second = BigRational::new(BigInt::from(2 * m * n) * binomial(2 * m - 1, m) * binomial(2 * n - 1, n), BigInt::from(m + n));
    to_integer(first - second, "T(1,1,m,n,m,n)")
}

fn check_positive(m: u64, n: u64) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("m and n must be positive".into()));
    }
    Ok(())
}

/// Integer sequences arising from the tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    /// n(3n+1)/2, the first column of Table 1.
    Pentagonal,
    /// T(1,1,n,n,n,n).
    IidDiag,
    /// T(1,1,n,n+1,n,n+1).
    Mm1Diag,
    /// 2n C(2n, n−1), the first column of Table 3.
    OneN,
    /// C(2m, m), the diagonal of Table 3.
    CentralBinomial,
}

pub fn sequence(kind: SequenceKind, count: usize) -> Result<Vec<BigInt>> {
    if count == 0 {
        return Err(Error::Domain("sequence length must be at least 1".into()));
    }
    (1..=count as u64)
        .map(|n| match kind {
            SequenceKind::Pentagonal => Ok(BigInt::from(n * (3 * n + 1) / 2)),
            SequenceKind::IidDiag => t_count(&IntParamSet::new(1, 1, n, n, n, n)?),
            SequenceKind::Mm1Diag => t_count(&IntParamSet::new(1, 1, n, n + 1, n, n + 1)?),
            SequenceKind::OneN => Ok(binomial(2 * n, n - 1) * (2 * n)),
            SequenceKind::CentralBinomial => Ok(binomial(2 * n, n)),
        })
        .collect()
}

/// The three tabulated families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    /// T(1,1,m,m,n,n)
    T11mmnn,
    /// T(1,1,m,m+1,n,n+1)
    T11mm1nn1,
    /// T(1,1,m,n,m,n)
    T11mnmn,
}

impl TableKind {
    pub fn params(self, m: u64, n: u64) -> IntParamSet {
        let a = match self {
            TableKind::T11mmnn => [1, 1, m, m, n, n],
            TableKind::T11mm1nn1 => [1, 1, m, m + 1, n, n + 1],
            TableKind::T11mnmn => [1, 1, m, n, m, n],
        };
        IntParamSet::from_array(a).expect("m, n >= 1")
    }
}

/// Lower-triangular table: row i holds m+n = i+2 and entries for m = 1..m+n−1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub kind: TableKind,
    pub rows: Vec<(u64, Vec<BigInt>)>,
}

pub fn table(kind: TableKind, max_row: u64) -> Result<Table> {
    if max_row < 2 {
        return Err(Error::Domain("tables start at m+n = 2".into()));
    }
    let rows = (2..=max_row)
        .map(|s| {
            let entries = (1..s).map(|m| t_count(&kind.params(m, s - m))).collect::<Result<Vec<_>>>()?;
            Ok((s, entries))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { kind, rows })
}

impl Table {
    /// CSV with header `m+n,1,2,…` and empty cells above the diagonal.
    pub fn to_csv(&self) -> String {
        let width = self.rows.last().map_or(0, |(s, _)| *s - 1) as usize;
        let mut out = String::from("m+n");
        for m in 1..=width {
            write!(out, ",{m}").unwrap();
        }
        out.push('\n');
        for (s, entries) in &self.rows {
            write!(out, "{s}").unwrap();
            for i in 0..width {
                out.push(',');
                if let Some(v) = entries.get(i) {
                    write!(out, "{v}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Serde adapter writing a rational as its "p/q" string.
pub mod rational_string {
    use std::str::FromStr;

    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        BigRational::from_str(&text).map_err(serde::de::Error::custom)
    }
}

/// Lossy conversion of a rational to the nearest f64.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // scale both down so the quotient survives the conversion
    let shift = r.numer().abs().bits().max(r.denom().bits()).saturating_sub(900);
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}
