use betamax::verify::{run, Tolerances};

/// The full identity and oracle battery over 100 seeds; about ten minutes
/// on one core.
#[test]
#[ignore]
fn hundred_seeds() {
    let tol = Tolerances::default();
    let mut failed = Vec::new();
    for seed in 0..100 {
        let report = run(200, seed, &tol);
        failed.extend(report.checks.into_iter().filter(|c| !c.passed).map(|c| (seed, c)));
    }
    assert!(failed.is_empty(), "{failed:#?}");
}
