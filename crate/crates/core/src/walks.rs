//! Exit times of a north-east lattice walk conditioned to end at (M, N),
//! from the rectangle R = [0, M−m] × [0, N−n].
//!
//! The walk is monotone, so it stays in R until it leaves for good and
//! P(T > k) = P(A_k ∈ R). Summing over k gives E[T] = (M+N+1) P(A_U ∈ R)
//! for U uniform on {0, …, M+N}, which is a 𝓑 value with λ = λ′ = 1.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{b_exact_rational, binomial, next_permutation, rational_to_f64, IntParamSet};
use crate::error::{Error, Result};
use crate::oracles::{split_samples, substreams};
use crate::special::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Total east steps M.
    #[serde(rename = "M")]
    pub east: u64,
    /// Total north steps N.
    #[serde(rename = "N")]
    pub north: u64,
    pub m: u64,
    pub n: u64,
}

impl WalkConfig {
    pub fn new(east: u64, north: u64, m: u64, n: u64) -> Result<Self> {
        if !(1..=east).contains(&m) || !(1..=north).contains(&n) {
            return Err(Error::Domain(format!("walk needs 1 <= m <= M and 1 <= n <= N, got M={east} N={north} m={m} n={n}")));
        }
        Ok(WalkConfig { east, north, m, n })
    }

    /// Upper-right corner (M−m, N−n) of R.
    pub fn corner(&self) -> (u64, u64) {
        (self.east - self.m, self.north - self.n)
    }

    pub fn steps(&self) -> u64 {
        self.east + self.north
    }

    /// The 𝓑 parameters (1, 1, m, M−m+1, n, N−n+1).
    pub fn params(&self) -> IntParamSet {
        IntParamSet {
            ell: 1,
            ell_prime: 1,
            m: self.m,
            m_prime: self.east - self.m + 1,
            n: self.n,
            n_prime: self.north - self.n + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitTimeReport {
    #[serde(with = "crate::combinatorics::rational_string")]
    pub analytic_mean: BigRational,
    pub simulated_mean: f64,
    pub simulated_stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// E[T_R] = (M+N+1) 𝓑(1,1,m,M−m+1,n,N−n+1), exactly.
pub fn expected_exit_conditioned(cfg: &WalkConfig) -> BigRational {
    BigRational::from_integer(BigInt::from(cfg.steps() + 1)) * b_exact_rational(&cfg.params())
}

/// Largest M + N accepted by [`expected_exit_enumerated`].
pub const ENUMERATION_LIMIT: u64 = 22;

/// E[T_R] by walking every one of the C(M+N, M) paths.
pub fn expected_exit_enumerated(cfg: &WalkConfig) -> Result<BigRational> {
    if cfg.steps() > ENUMERATION_LIMIT {
        return Err(Error::BudgetExceeded { budget: ENUMERATION_LIMIT as usize, context: "path enumeration (M + N)" });
    }
    // false = east, true = north; lexicographic order starts all-east
    let mut path: Vec<bool> = (0..cfg.steps()).map(|i| i >= cfg.east).collect();
    let mut total = 0u64;
    loop {
        total += exit_time(cfg, &path);
        if !next_permutation(&mut path) {
            break;
        }
    }
    Ok(BigRational::new(BigInt::from(total), binomial(cfg.steps(), cfg.east)))
}

/// First k with A_k ∉ R; A_0 = (0, 0) ∈ R.
pub fn exit_time(cfg: &WalkConfig, north_steps: &[bool]) -> u64 {
    let (xr, yr) = cfg.corner();
    let (mut x, mut y) = (0u64, 0u64);
    for (k, &north) in north_steps.iter().enumerate() {
        if north {
            y += 1;
        } else {
            x += 1;
        }
        if x > xr || y > yr {
            return k as u64 + 1;
        }
    }
    // unreachable for valid configs: (M, N) ∉ R
    north_steps.len() as u64 + 1
}

/// E[T] for the free walk (east/north with probability ½) leaving [0,n]²:
/// 2(n+1) − 2Γ(n+3/2)/(√π Γ(n+1)).
pub fn expected_exit_unconditioned(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("square side must be positive".into()));
    }
    let nf = n as f64;
    let ratio = (ln_gamma(nf + 1.5)? - ln_gamma(nf + 1.0)?).exp() / std::f64::consts::PI.sqrt();
    Ok(2.0 * (nf + 1.0) - 2.0 * ratio)
}

/// Direct sum Σ_{k=n+1}^{2n+1} k P(T = k): the walk leaves when one
/// coordinate reaches n+1, which happens at step k with probability
/// 2 C(k−1, n) / 2^k.
pub fn expected_exit_unconditioned_sum(n: u64) -> f64 {
    let mut sum = BigRational::zero();
    for k in (n + 1)..=(2 * n + 1) {
        let p = BigRational::new(binomial(k - 1, n) * 2u32, BigInt::from(1) << k as usize);
        sum += p * BigInt::from(k);
    }
    rational_to_f64(&sum)
}

/// E[T] for the square case M = N = 2n, m = n (R = [0,n]²) minus
/// 2n − √(2n/π); bounded in n.
pub fn exit_asymptotic_gap(n: u64) -> Result<f64> {
    let cfg = WalkConfig::new(2 * n, 2 * n, n, n)?;
    let mean = rational_to_f64(&expected_exit_conditioned(&cfg));
    let nf = n as f64;
    Ok(mean - (2.0 * nf - (2.0 * nf / std::f64::consts::PI).sqrt()))
}

/// Monte Carlo estimate of E[T_R] over uniformly shuffled step sequences.
/// Deterministic for a given seed.
pub fn simulate_conditioned(cfg: &WalkConfig, samples: u64, seed: u64) -> Result<ExitTimeReport> {
    if samples == 0 {
        return Err(Error::Domain("simulation needs at least one sample".into()));
    }
    let steps = cfg.steps();
    let (sum, sum_sq) = substreams(seed)
        .into_par_iter()
        .zip(split_samples(samples))
        .map(|(mut rng, count)| {
            let mut path: Vec<bool> = (0..steps).map(|i| i >= cfg.east).collect();
            let (mut s, mut s2) = (0u128, 0u128);
            for _ in 0..count {
                path.shuffle(&mut rng);
                let t = exit_time(cfg, &path);
                debug_assert!((1..=steps).contains(&t));
                s += t as u128;
                s2 += (t * t) as u128;
            }
            (s, s2)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = sum.to_f64().unwrap_or(f64::NAN) / n;
    let var = if samples > 1 { ((sum_sq as f64 - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(ExitTimeReport {
        analytic_mean: expected_exit_conditioned(cfg),
        simulated_mean: mean,
        simulated_stderr: (var / n).sqrt(),
        samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_configurations() {
        let c = WalkConfig::new(2, 2, 1, 1).unwrap();
        assert_eq!(expected_exit_conditioned(&c), q(8, 3));
        assert_eq!(expected_exit_enumerated(&c).unwrap(), q(8, 3));
        assert_eq!(expected_exit_conditioned(&WalkConfig::new(2, 2, 2, 2).unwrap()), q(1, 1));
        assert_eq!(expected_exit_conditioned(&WalkConfig::new(1, 1, 1, 1).unwrap()), q(1, 1));
        assert!(WalkConfig::new(2, 2, 3, 1).is_err());
        assert!(WalkConfig::new(2, 2, 0, 1).is_err());
    }

    #[test]
    fn unconditioned_values() {
        assert!((expected_exit_unconditioned(1).unwrap() - 2.5).abs() < 1e-14);
        assert!((expected_exit_unconditioned(2).unwrap() - 4.125).abs() < 1e-14);
        assert!((expected_exit_unconditioned_sum(2) - 4.125).abs() < 1e-15);
    }

    #[test]
    fn gap_at_one() {
        let expected = 8.0 / 3.0 - (2.0 - (2.0 / std::f64::consts::PI).sqrt());
        assert!((exit_asymptotic_gap(1).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn degenerate_simulation() {
        let c = WalkConfig::new(1, 1, 1, 1).unwrap();
        let r = simulate_conditioned(&c, 1000, 3).unwrap();
        assert_eq!(r.simulated_mean, 1.0);
        assert_eq!(r.simulated_stderr, 0.0);
    }
}
