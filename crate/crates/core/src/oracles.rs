//! Independent checks on 𝓑: tanh-sinh quadrature of the defining integral
//! and Monte Carlo over the probabilistic form P(X > max{Y, Z}).

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Gamma};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::ParamSet;
use crate::special::{ln_beta, reg_inc_beta_split};

/// Evaluation budget for [`b_quadrature`].
pub const QUADRATURE_BUDGET: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

// Integrand of 𝓑 at the tanh-sinh node x, times the node weight.
// t = 1/(1 + e^{−u}) and 1 − t = 1/(1 + e^{u}) with u = π sinh x, so both
// ends keep full relative accuracy.
struct Integrand {
    p: ParamSet,
    ln_norm: f64,
}

impl Integrand {
    fn new(p: &ParamSet) -> Result<Self> {
        Ok(Integrand { p: *p, ln_norm: ln_beta(p.lambda, p.lambda_prime)? })
    }

    fn at(&self, x: f64) -> Result<f64> {
        let u = std::f64::consts::PI * x.sinh();
        // ln t and ln(1 − t)
        let (ln_t, ln_s) = if u >= 0.0 {
            let l = (-u).exp().ln_1p();
            (-l, -u - l)
        } else {
            let l = u.exp().ln_1p();
            (u - l, -l)
        };
        let (t, s) = (ln_t.exp(), ln_s.exp());
        // dt/dx = π cosh x · t (1 − t)
        let ln_jac = (std::f64::consts::PI * x.cosh()).ln() + ln_t + ln_s;
        let p = &self.p;
        let ln_w = (p.lambda - 1.0) * ln_t + (p.lambda_prime - 1.0) * ln_s + ln_jac - self.ln_norm;
        if ln_w < -745.0 {
            return Ok(0.0);
        }
        let iy = reg_inc_beta_split(p.mu, p.mu_prime, t, s)?.value;
        let iz = reg_inc_beta_split(p.nu, p.nu_prime, t, s)?.value;
        Ok(ln_w.exp() * (iy * iz))
    }
}

/// 𝓑 by tanh-sinh quadrature of t^{λ−1}(1−t)^{λ′−1} I(μ,μ′;t) I(ν,ν′;t)/B(λ,λ′).
///
/// The step is halved until two successive levels agree to `tol` (absolute)
/// or [`QUADRATURE_BUDGET`] evaluations are spent. The double-exponential
/// map absorbs the algebraic endpoint singularities for any λ, λ′ > 0.
pub fn b_quadrature(p: &ParamSet, tol: f64) -> Result<QuadratureResult> {
    if tol.is_nan() || tol < 1e-14 {
        return Err(Error::Domain(format!("quadrature tolerance must be at least 1e-14, got {tol}")));
    }
    const X_MAX: f64 = 8.0;
    let f = Integrand::new(p)?;

    // Sum f(kh) over k = ±first, ±(first + stride), ... (plus k = 0 when
    // first is 0), walking outwards until the terms are negligible.
    let sweep = |h: f64, first: i64, stride: i64| -> Result<(f64, usize)> {
        let mut total = 0.0;
        let mut evaluations = 0;
        let mut start = first;
        if first == 0 {
            total += f.at(0.0)?;
            evaluations += 1;
            start = stride;
        }
        for dir in [1.0, -1.0] {
            let mut k = start;
            let mut small = 0;
            loop {
                let x = dir * k as f64 * h;
                if x.abs() > X_MAX {
                    break;
                }
                let v = f.at(x)?;
                evaluations += 1;
                total += v;
                if v.abs() <= 1e-18 * total.abs() {
                    small += 1;
                    if small >= 2 {
                        break;
                    }
                } else {
                    small = 0;
                }
                k += stride;
            }
        }
        Ok((total, evaluations))
    };

    let mut h = 0.5;
    let (mut sum, mut evaluations) = sweep(h, 0, 1)?;
    let mut value = sum * h;
    loop {
        h /= 2.0;
        let (part, count) = sweep(h, 1, 2)?;
        sum += part;
        evaluations += count;
        let next = sum * h;
        // successive levels agree far better than either's rounding
        let estimate = (next - value).abs() + 32.0 * f64::EPSILON * next.abs();
        value = next;
        if estimate < tol {
            return Ok(QuadratureResult { value, abs_error_estimate: estimate, evaluations });
        }
        if evaluations >= QUADRATURE_BUDGET {
            return Err(Error::ToleranceNotMet { value, estimate, tol });
        }
    }
}

// Log-odds ln(x / (1 − x)) of a Beta(a, b) variate from two gamma variates.
// Comparing log-odds instead of x keeps variates that round to 1 distinct.
fn beta_log_odds<R: Rng + ?Sized>(a: &Gamma<f64>, b: &Gamma<f64>, rng: &mut R) -> f64 {
    a.sample(rng).ln() - b.sample(rng).ln()
}

fn gamma(shape: f64) -> Result<Gamma<f64>> {
    Gamma::new(shape, 1.0).map_err(|e| Error::Domain(format!("gamma shape {shape}: {e}")))
}

/// A Beta(μ,μ′) variate as G₁/(G₁+G₂) with G₁ ~ Gamma(μ), G₂ ~ Gamma(μ′).
///
/// The gamma variates come from Marsaglia–Tsang squeeze/acceptance, with
/// the U^{1/a} boost for shapes below 1.
pub fn sample_beta<R: Rng + ?Sized>(mu: f64, mu_prime: f64, rng: &mut R) -> Result<f64> {
    let (g1, g2) = (gamma(mu)?, gamma(mu_prime)?);
    let x = g1.sample(rng);
    let y = g2.sample(rng);
    Ok(x / (x + y))
}

/// A Beta(m,m′) variate as the m'th smallest of m + m′ − 1 uniforms.
pub fn sample_beta_order_statistic<R: Rng + ?Sized>(m: u64, m_prime: u64, rng: &mut R) -> Result<f64> {
    if m == 0 || m_prime == 0 {
        return Err(Error::Domain("order-statistic sampler needs positive integer shapes".into()));
    }
    let mut u: Vec<f64> = (0..m + m_prime - 1).map(|_| rng.gen::<f64>()).collect();
    let (_, kth, _) = u.select_nth_unstable_by(m as usize - 1, f64::total_cmp);
    Ok(*kth)
}

/// Number of independent substreams the Monte Carlo routines split into.
/// Fixed, so the result depends only on the seed, not on the thread count.
pub const SUBSTREAMS: usize = 64;

/// Generators for `SUBSTREAMS` disjoint substreams of one seed, each
/// 2^128 draws apart.
pub fn substreams(seed: u64) -> Vec<Xoshiro256PlusPlus> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    (0..SUBSTREAMS)
        .map(|_| {
            let current = rng.clone();
            rng.jump();
            current
        })
        .collect()
}

/// Sample counts per substream, in substream order.
pub fn split_samples(samples: u64) -> Vec<u64> {
    let k = SUBSTREAMS as u64;
    (0..k).map(|i| samples / k + u64::from(i < samples % k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// 𝓑 as the fraction of independent triples with X > max{Y, Z}.
pub fn b_montecarlo(p: &ParamSet, samples: u64, seed: u64) -> Result<MCEstimate> {
    if samples == 0 {
        return Err(Error::Domain("Monte Carlo needs at least one sample".into()));
    }
    let x = (gamma(p.lambda)?, gamma(p.lambda_prime)?);
    let y = (gamma(p.mu)?, gamma(p.mu_prime)?);
    let z = (gamma(p.nu)?, gamma(p.nu_prime)?);
    let hits: u64 = substreams(seed)
        .into_par_iter()
        .zip(split_samples(samples))
        .map(|(mut rng, n)| {
            let mut hits = 0u64;
            for _ in 0..n {
                let lx = beta_log_odds(&x.0, &x.1, &mut rng);
                let ly = beta_log_odds(&y.0, &y.1, &mut rng);
                let lz = beta_log_odds(&z.0, &z.1, &mut rng);
                hits += u64::from(lx > ly && lx > lz);
            }
            hits
        })
        .sum();
    let estimate = hits as f64 / samples as f64;
    let stderr = (estimate * (1.0 - estimate) / samples as f64).sqrt();
    Ok(MCEstimate { estimate, stderr, samples, seed })
}
