//! Cross-route and identity checks over parameter grids.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::integrals::{
    b_auto, b_case1, b_case2, b_case3, b_case4, b_general, b_lambda_prime_one, b_nu_prime_one, b_series_4f3,
    b_series_c, exact_result, moment_max, prob_exceeds, BResult, MethodTag, ParamSet,
};
use crate::oracles::b_quadrature;
use crate::special::positive_integer;

/// Tolerances for [`run`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Cyclicity and min–max duality.
    pub identity: f64,
    /// Moment identity.
    pub moment: f64,
    /// Every route against quadrature.
    pub oracle: f64,
    /// Closed special cases against the general route.
    pub cases: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { identity: 1e-9, moment: 1e-10, oracle: 1e-8, cases: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub params: [f64; 6],
    /// Absolute deviation from the identity; infinite (null in JSON) when
    /// a route failed.
    #[serde(with = "infinite_as_null")]
    pub deviation: f64,
    pub tol: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, p: &ParamSet, deviation: f64, tol: f64) -> Self {
        Check { name: name.into(), params: p.as_array(), deviation, tol, passed: deviation <= tol, detail: None }
    }

    fn from_result(name: impl Into<String>, p: &ParamSet, tol: f64, deviation: Result<f64>) -> Self {
        match deviation {
            Ok(d) => Check::new(name, p, d, tol),
            Err(e) => Check {
                detail: Some(e.to_string()),
                ..Check::new(name, p, f64::INFINITY, tol)
            },
        }
    }
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub grid_size: usize,
    pub checks: Vec<Check>,
    pub failures: usize,
    pub passed: bool,
}

impl Report {
    fn new(seed: u64, grid_size: usize, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| {
            let by_params = a.params.iter().zip(&b.params).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne());
            by_params.unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.name.cmp(&b.name))
        });
        let failures = checks.iter().filter(|c| !c.passed).count();
        Report { seed, grid_size, checks, failures, passed: failures == 0 }
    }

    /// Largest deviation among checks whose name starts with `prefix`.
    pub fn worst(&self, prefix: &str) -> Option<&Check> {
        self.checks
            .iter()
            .filter(|c| c.name.starts_with(prefix))
            .max_by(|a, b| a.deviation.total_cmp(&b.deviation))
    }
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// `count` parameter sets with components log-uniform in [0.1, 20].
pub fn random_params(seed: u64, count: usize) -> Vec<ParamSet> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a = std::array::from_fn(|_| log_uniform(&mut rng, 0.1, 20.0));
            ParamSet::from_array(a).expect("positive components")
        })
        .collect()
}

/// The fixed 50-point grid for route-versus-quadrature checks: 20 generic
/// points, 10 with integer μ′ and ν′, 10 with integer λ′, 10 all-integer.
pub fn fixed_grid() -> Vec<ParamSet> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0x5eed_0b7a);
    let mut out = Vec::with_capacity(50);
    for i in 0..50 {
        let mut a: [f64; 6] = std::array::from_fn(|_| log_uniform(&mut rng, 0.1, 20.0));
        match i / 10 {
            2 => {
                a[3] = rng.gen_range(1..=8) as f64;
                a[5] = rng.gen_range(1..=8) as f64;
            }
            3 => a[1] = rng.gen_range(1..=8) as f64,
            4 => a = std::array::from_fn(|_| rng.gen_range(1..=4) as f64),
            _ => {}
        }
        out.push(ParamSet::from_array(a).expect("positive components"));
    }
    out
}

fn value(r: Result<BResult>) -> Result<f64> {
    r.map(|b| b.value)
}

/// Swap (bit-exact), cyclicity, min–max duality and the moment identity at `p`.
pub fn identity_checks(p: &ParamSet, tol: &Tolerances) -> Vec<Check> {
    let b = |q: &ParamSet| value(b_auto(q, None));
    let mut out = Vec::with_capacity(4);

    let swap = (|| Ok(if b(p)?.to_bits() == b(&p.swapped())?.to_bits() { 0.0 } else { f64::INFINITY }))();
    out.push(Check::from_result("identity/swap", p, 0.0, swap));

    let cyc = (|| {
        let c1 = p.cycled();
        Ok((b(p)? + b(&c1)? + b(&c1.cycled())? - 1.0).abs())
    })();
    out.push(Check::from_result("identity/cyclicity", p, tol.identity, cyc));

    let dual = (|| {
        let r = p.reflected();
        let rhs = 1.0 - prob_exceeds(r.lambda, r.lambda_prime, r.mu, r.mu_prime)?
            - prob_exceeds(r.lambda, r.lambda_prime, r.nu, r.nu_prime)?
            + b(&r)?;
        Ok((b(p)? - rhs).abs())
    })();
    out.push(Check::from_result("identity/duality", p, tol.identity, dual));

    let moment = (|| {
        let q = ParamSet { lambda_prime: 1.0, ..*p };
        let m = moment_max(p.lambda, p.mu, p.mu_prime, p.nu, p.nu_prime)?;
        Ok((m + b_general(&q)?.value - 1.0).abs())
    })();
    out.push(Check::from_result("identity/moment", p, tol.moment, moment));
    out
}

/// Every route that applies at `p`, by name, with its result. `auto` is the
/// dispatcher.
pub fn applicable_routes(p: &ParamSet) -> Vec<(&'static str, Result<f64>)> {
    let mut out = vec![(MethodTag::KdfClosedForm.name(), value(b_general(p)))];
    let int = |v: f64| positive_integer(v).is_some();
    if int(p.mu_prime) && int(p.nu_prime) {
        out.push((MethodTag::Series4f3.name(), value(b_series_4f3(p))));
    }
    if int(p.lambda_prime) {
        out.push((MethodTag::SeriesC.name(), value(b_series_c(p))));
    }
    if p.nu_prime == 1.0 {
        out.push((MethodTag::NuPrimeOne.name(), value(b_nu_prime_one(p.lambda, p.lambda_prime, p.mu, p.mu_prime, p.nu))));
    }
    if p.lambda_prime == 1.0 {
        out.push((MethodTag::LambdaPrimeOne.name(), value(b_lambda_prime_one(p.lambda, p.mu, p.mu_prime, p.nu, p.nu_prime))));
    }
    if let Some(ip) = p.to_integers() {
        out.push((MethodTag::ExactRational.name(), Ok(exact_result(&ip).value)));
    }
    let unit = p.lambda == 1.0 && p.lambda_prime == 1.0;
    if unit && p.mu == p.mu_prime && p.nu == p.nu_prime {
        out.push((MethodTag::SpecialCase1.name(), b_case1(p.mu, p.nu)));
    }
    if unit && p.mu_prime == p.mu + 1.0 && p.nu_prime == p.nu + 1.0 {
        out.push((MethodTag::SpecialCase2.name(), b_case2(p.mu, p.nu)));
    }
    if unit && p.mu == p.nu && p.mu_prime == p.nu_prime {
        out.push((MethodTag::SpecialCase3.name(), b_case3(p.mu, p.mu_prime)));
    }
    if p.mu_prime == 0.5 && p.nu_prime == 0.5 && p.mu == p.nu {
        out.push((MethodTag::SpecialCase4.name(), b_case4(p.lambda, p.lambda_prime, p.mu)));
    }
    out.push(("auto", value(b_auto(p, None))));
    out
}

/// Each applicable route against tanh-sinh quadrature.
pub fn oracle_checks(p: &ParamSet, tol: &Tolerances) -> Vec<Check> {
    let reference = b_quadrature(p, 1e-12).map(|q| q.value);
    applicable_routes(p)
        .into_iter()
        .map(|(tag, v)| {
            let deviation = match (reference.as_ref(), v.as_ref()) {
                (Ok(r), Ok(v)) => Ok((v - r).abs()),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            };
            Check::from_result(format!("oracle/{tag}"), p, tol.oracle, deviation)
        })
        .collect()
}

/// Closed special cases against the general route on `count` random
/// instances each, shape parameters log-uniform in [0.1, 20].
pub fn case_checks(seed: u64, count: usize, tol: &Tolerances) -> Vec<Check> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut jobs: Vec<(&'static str, ParamSet)> = Vec::with_capacity(4 * count);
    for _ in 0..count {
        let mut r = || log_uniform(&mut rng, 0.1, 20.0);
        let (a, b, c) = (r(), r(), r());
        let set = |v: [f64; 6]| ParamSet::from_array(v).expect("positive components");
        jobs.push(("case/1", set([1.0, 1.0, a, a, b, b])));
        jobs.push(("case/2", set([1.0, 1.0, a, a + 1.0, b, b + 1.0])));
        jobs.push(("case/3", set([1.0, 1.0, a, b, a, b])));
        jobs.push(("case/4", set([a, b, c, 0.5, c, 0.5])));
    }
    jobs.par_iter()
        .map(|(name, p)| {
            let closed = match *name {
                "case/1" => b_case1(p.mu, p.nu),
                "case/2" => b_case2(p.mu, p.nu),
                "case/3" => b_case3(p.mu, p.mu_prime),
                _ => b_case4(p.lambda, p.lambda_prime, p.mu),
            };
            let deviation = (|| Ok((closed? - b_general(p)?.value).abs()))();
            Check::from_result(*name, p, tol.cases, deviation)
        })
        .collect()
}

/// Identity checks on `grid_size` random sets from `seed`, every route
/// against quadrature on the fixed grid, and `grid_size` instances of each
/// closed case. Checks are sorted by parameter tuple, then name.
pub fn run(grid_size: usize, seed: u64, tol: &Tolerances) -> Report {
    let random = random_params(seed, grid_size);
    let mut checks: Vec<Check> = random.par_iter().flat_map_iter(|p| identity_checks(p, tol)).collect();
    checks.extend(fixed_grid().par_iter().flat_map_iter(|p| oracle_checks(p, tol)).collect::<Vec<_>>());
    checks.extend(case_checks(seed, grid_size, tol));
    Report::new(seed, grid_size, checks)
}
