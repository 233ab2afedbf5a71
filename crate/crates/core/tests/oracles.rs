use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use betamax::combinatorics::{b_exact_rational, rational_to_f64, IntParamSet};
use betamax::integrals::{b_general, bb22_moment};
use betamax::oracles::{b_montecarlo, b_quadrature, sample_beta, sample_beta_order_statistic};
use betamax::ParamSet;

// Kolmogorov critical value c(α) = sqrt(−ln(α/2)/2) at α = 1e-6.
fn ks_critical() -> f64 {
    (-(0.5e-6f64).ln() / 2.0).sqrt()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn ks_uniform(sample: &[f64]) -> f64 {
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max)
}

fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn uniform_betas_pass_ks() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
    let n = 100_000;
    let xs = sorted((0..n).map(|_| sample_beta(1.0, 1.0, &mut rng).unwrap()).collect());
    let d = ks_uniform(&xs);
    assert!(d < ks_critical() / (n as f64).sqrt(), "D = {d}");
}

#[test]
fn order_statistics_match_gamma_ratios() {
    let n = 100_000;
    for (seed, (m, mp)) in [(1, 1), (2, 3), (3, 1), (4, 4), (1, 5)].into_iter().enumerate() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed as u64);
        let a = sorted((0..n).map(|_| sample_beta_order_statistic(m, mp, &mut rng).unwrap()).collect());
        let b = sorted((0..n).map(|_| sample_beta(m as f64, mp as f64, &mut rng).unwrap()).collect());
        let d = ks_two_sample(&a, &b);
        let critical = ks_critical() * (2.0 / n as f64).sqrt();
        assert!(d < critical, "({m},{mp}): D = {d}, critical {critical}");
    }
}

#[test]
fn beta_mean() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
    let n = 1_000_000;
    let mean = (0..n).map(|_| sample_beta(2.0, 3.0, &mut rng).unwrap()).sum::<f64>() / n as f64;
    // Var Beta(2,3) = 6 / (25 · 6)
    let sigma = (0.04f64 / n as f64).sqrt();
    assert!((mean - 0.4).abs() < 4.0 * sigma, "{mean}");
}

#[test]
fn montecarlo_examples() {
    for (p, exact) in [([1.0; 6], 1.0 / 3.0), ([1.0, 1.0, 1.0, 2.0, 1.0, 2.0], 8.0 / 15.0)] {
        let est = b_montecarlo(&ParamSet::from_array(p).unwrap(), 200_000, 11).unwrap();
        assert!((est.estimate - exact).abs() < 4.0 * est.stderr, "{est:?}");
    }
}

#[test]
fn cyclic_estimates_sum_to_one() {
    let [l, lp, m, mp, n, np] = [0.7, 2.5, 1.9, 0.4, 3.1, 1.2];
    let triples = [[l, lp, m, mp, n, np], [m, mp, n, np, l, lp], [n, np, l, lp, m, mp]];
    let (mut total, mut var) = (0.0, 0.0);
    for (seed, p) in triples.into_iter().enumerate() {
        let est = b_montecarlo(&ParamSet::from_array(p).unwrap(), 200_000, seed as u64).unwrap();
        total += est.estimate;
        var += est.stderr * est.stderr;
    }
    assert!((total - 1.0).abs() < 4.0 * var.sqrt(), "{total}");
}

#[test]
fn quadrature_matches_exact_rationals() {
    let mut worst = 0.0f64;
    for code in 0..4096u32 {
        let v: Vec<u64> = (0..6).map(|i| u64::from((code >> (2 * i)) & 3) + 1).collect();
        let p = IntParamSet::new(v[0], v[1], v[2], v[3], v[4], v[5]).unwrap();
        let exact = rational_to_f64(&b_exact_rational(&p));
        let q = b_quadrature(&p.to_params(), 1e-11).unwrap();
        worst = worst.max((q.value - exact).abs());
    }
    assert!(worst <= 1e-9, "{worst}");
}

#[test]
fn quadrature_swap_is_bit_exact() {
    for p in [[0.5, 0.5, 1.0, 1.0, 1.0, 1.0], [2.3, 0.7, 1.1, 4.0, 0.3, 2.2], [1.0, 9.0, 0.2, 0.2, 7.0, 3.0]] {
        let a = b_quadrature(&ParamSet::from_array(p).unwrap(), 1e-12).unwrap();
        let b = b_quadrature(&ParamSet::from_array([p[0], p[1], p[4], p[5], p[2], p[3]]).unwrap(), 1e-12).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}

#[test]
fn quadrature_handles_endpoint_singularities() {
    let p = ParamSet::new(0.5, 0.5, 1.0, 1.0, 1.0, 1.0).unwrap();
    let q = b_quadrature(&p, 1e-12).unwrap();
    let g = b_general(&p).unwrap();
    assert!((q.value - g.value).abs() < 1e-8, "{} vs {}", q.value, g.value);
}

// E[W^λ] = ∫ t^λ 6 f(t) F(t) (1 − F(t)) dt for the median of three
// Beta(a,b) variables, with the integer-shape CDF written as a binomial tail
// and the integral done by composite Simpson.
fn median_moment(lambda: f64, a: u32, b: u32) -> f64 {
    let n = a + b - 1;
    let binom = |k: u32| (0..k).fold(1.0, |c, i| c * f64::from(n - i) / f64::from(i + 1));
    let norm = 1.0 / (f64::from(a) * binom(a)); // 1/B(a,b) = a C(n, a)
    let cdf = |t: f64| (a..=n).map(|j| binom(j) * t.powi(j as i32) * (1.0 - t).powi((n - j) as i32)).sum::<f64>();
    let f = |t: f64| {
        let big_f = cdf(t);
        let density = t.powi(a as i32 - 1) * (1.0 - t).powi(b as i32 - 1) / norm;
        t.powf(lambda) * 6.0 * density * big_f * (1.0 - big_f)
    };
    let steps = 20_000;
    let h = 1.0 / f64::from(steps);
    let mut sum = f(0.0) + f(1.0);
    for i in 1..steps {
        sum += f(f64::from(i) * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

#[test]
fn median_moments_match_direct_integration() {
    for (lambda, a, b) in [(1.0, 1, 1), (2.0, 1, 1), (1.5, 2, 3), (0.5, 3, 2), (3.0, 4, 1)] {
        let direct = median_moment(lambda, a, b);
        let got = bb22_moment(lambda, f64::from(a), f64::from(b)).unwrap();
        assert!((got - direct).abs() < 1e-8, "({lambda},{a},{b}): {got} vs {direct}");
    }
    // median of three uniforms has mean 1/2
    assert!((bb22_moment(1.0, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
}
