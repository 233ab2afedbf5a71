use proptest::prelude::*;

use betamax::combinatorics::rational_to_f64;
use betamax::hyper::{dixon_contiguous_m1_p1, kdf, pfq, whipple_contiguous_0_m1, whipple_contiguous_m1_p1, KdfSpec, PfqSpec};
use betamax::integrals::{b_lambda_prime_one, c_function};
use betamax::special::ln_beta;
use betamax::{BigInt, BigRational};

// Σ|t_k| of a unit-argument series: the scale rounding errors are measured on
// when the sum itself cancels.
fn abs_sum(num: &[f64], den: &[f64]) -> f64 {
    let (mut term, mut sum) = (1.0f64, 1.0f64);
    for k in 0..200_000 {
        let k = k as f64;
        term *= num.iter().map(|a| a + k).product::<f64>() / (den.iter().map(|b| b + k).product::<f64>() * (k + 1.0));
        sum += term.abs();
        if term == 0.0 {
            break;
        }
    }
    sum
}

fn close(closed: f64, direct: f64, num: &[f64], den: &[f64]) -> bool {
    (closed - direct).abs() <= 1e-12 * direct.abs() + 1e-15 * abs_sum(num, den)
}

fn eighths(k: i64) -> BigRational {
    BigRational::new(BigInt::from(k), BigInt::from(8))
}

// Σ_{k=0}^{n} Π(a_i)_k / Π(b_j)_k z^k / k! in exact arithmetic
fn exact_sum(num: &[BigRational], den: &[BigRational], z: &BigRational, n: u64) -> BigRational {
    let mut term = BigRational::from_integer(1.into());
    let mut sum = term.clone();
    for k in 0..n {
        let kk = BigRational::from_integer(BigInt::from(k));
        for a in num {
            term *= a + &kk;
        }
        for b in den {
            term /= b + &kk;
        }
        term = term * z / (kk + BigRational::from_integer(1.into()));
        sum += &term;
    }
    sum
}

fn shape() -> impl Strategy<Value = f64> {
    (0.1f64.ln()..20f64.ln()).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn terminating_series_match_exact_sums(
        n in 0u64..14,
        num in prop::collection::vec(1i64..64, 0..3),
        den in prop::collection::vec(1i64..64, 1..3),
        z in prop::sample::select(vec![-8i64, -4, 4, 8]),
    ) {
        let mut num_f: Vec<f64> = vec![-(n as f64)];
        num_f.extend(num.iter().map(|&k| k as f64 / 8.0));
        let den_f: Vec<f64> = den.iter().map(|&k| k as f64 / 8.0).collect();
        let z_f = z as f64 / 8.0;
        let mut num_q = vec![BigRational::from_integer(BigInt::from(-(n as i64)))];
        num_q.extend(num.iter().map(|&k| eighths(k)));
        let den_q: Vec<BigRational> = den.iter().map(|&k| eighths(k)).collect();
        let exact_q = exact_sum(&num_q, &den_q, &eighths(z), n);
        let exact = rational_to_f64(&exact_q);
        let v = pfq(&PfqSpec::new(&num_f, &den_f, z_f)).unwrap();
        prop_assert!(v.terminated);
        // Sums that cancel to exactly zero leave rounding noise far below the terms.
        let slack = if exact_q == BigRational::from_integer(0.into()) { 1e-25 } else { 0.0 };
        prop_assert!((v.value - exact).abs() <= 1e-13 * exact.abs() + slack, "{} vs {}", v.value, exact);
    }

    #[test]
    fn unit_lambda_prime_never_stalls(l in shape(), m in shape(), mp in shape(), n in shape(), np in shape()) {
        let r = b_lambda_prime_one(l, m, mp, n, np).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.value));
    }

    // Plain diagonal summation decays like k^(-1-μ′-ν′), so small primes run
    // out of cell budget; that regime is the shifted route's job. Where the
    // cells cancel beyond double-double reach, both routes say so in their
    // error estimates.
    #[test]
    fn double_series_matches_iterated_form(l in shape(), lp in 1u32..=30, m in shape(), mp in 2.0f64..20.0, n in shape(), np in 2.0f64..20.0) {
        let lp = f64::from(lp);
        let iterated = c_function(l, lp, m, mp, n, np).unwrap();
        let spec = KdfSpec::c_series(l, lp, m, mp, n, np);
        let pre = ln_beta(l + m + n, mp).unwrap().exp() / (l * n);
        let double = kdf(&spec).unwrap();
        let (a, b) = (double.value * pre, iterated.value);
        let bound = 1e-10 * b.abs() + double.abs_error_estimate * pre + iterated.abs_error_estimate;
        prop_assert!((a - b).abs() <= bound, "{} vs {} (bound {:e})", a, b, bound);
    }

    #[test]
    fn contiguous_whipple_m1_p1(a in -2.0f64..2.0, c in 1.2f64..4.0, e in 0.2f64..3.0) {
        let (b, f) = (1.0 - a, 2.0 * c - e);
        prop_assume!(f > 0.2);
        let closed = whipple_contiguous_m1_p1(a, b, c, e, f).unwrap();
        let direct = pfq(&PfqSpec::unit(&[a, b, c], &[e, f])).unwrap().value;
        prop_assert!(close(closed, direct, &[a, b, c], &[e, f]), "{} vs {}", closed, direct);
    }

    #[test]
    fn contiguous_whipple_0_m1(a in -2.0f64..2.0, c in 0.2f64..4.0, e in 0.2f64..3.0) {
        let (b, f) = (-a, 2.0 * c + 1.0 - e);
        prop_assume!(f > 0.2);
        let closed = whipple_contiguous_0_m1(a, b, c, e, f).unwrap();
        let direct = pfq(&PfqSpec::unit(&[a, b, c], &[e, f])).unwrap().value;
        prop_assert!(close(closed, direct, &[a, b, c], &[e, f]), "{} vs {}", closed, direct);
    }

    #[test]
    fn contiguous_dixon(a in 1.0f64..5.0, b in -0.8f64..0.8, c in -0.8f64..0.8) {
        let (e, f) = (a - b, a - c + 1.0);
        prop_assume!(a - 2.0 * b - 2.0 * c + 1.0 > 0.5);
        let closed = dixon_contiguous_m1_p1(a, b, c).unwrap();
        let direct = pfq(&PfqSpec::unit(&[a, b, c], &[e, f])).unwrap().value;
        prop_assert!(close(closed, direct, &[a, b, c], &[e, f]), "{} vs {}", closed, direct);
    }
}
