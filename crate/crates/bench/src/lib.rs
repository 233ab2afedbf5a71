//! Parameter sets shared by the benchmarks.

use betamax::ParamSet;

/// Named points that exercise each route: generic reals, integer primes,
/// a large λ′ with a large A = λ+μ+ν, and small shapes near the endpoints.
pub fn fixtures() -> Vec<(&'static str, ParamSet)> {
    let p = |a: [f64; 6]| ParamSet::from_array(a).expect("positive");
    vec![
        ("generic", p([2.3, 1.7, 0.8, 3.1, 1.4, 2.2])),
        ("integer_primes", p([2.5, 3.5, 1.5, 4.0, 0.7, 3.0])),
        ("large", p([15.0, 18.5, 12.0, 6.3, 17.0, 0.4])),
        ("small", p([0.15, 0.2, 0.3, 0.12, 0.25, 0.18])),
    ]
}
