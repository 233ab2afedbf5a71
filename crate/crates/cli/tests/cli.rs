use std::process::{Command, Output};
use std::time::Instant;

use betamax::verify::Report;
use betamax::{BResult, ExitTimeReport, MethodTag};
use betamax_cli::args::{ExitArgs, ProbArgs, TableArgs, VerifyArgs};
use betamax_cli::commands::{parse_envelope, CountResult, ExactResult, ProbResult, TableResult};
use betamax_cli::output::{to_json, Envelope};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn betamax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_betamax")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json<I: DeserializeOwned, R: DeserializeOwned>(args: &[&str]) -> Envelope<I, R> {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = betamax(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    parse_envelope(&stdout(&out)).expect("envelope parses")
}

fn assert_round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(x: &T) {
    let text = to_json(x);
    let back: T = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, x);
    assert_eq!(to_json(&back), text);
}

fn triple(env: &Envelope<ProbArgs, ProbResult>) -> &BResult {
    match &env.result {
        ProbResult::Triple(b) => b,
        ProbResult::Pair(_) => panic!("expected a triple result"),
    }
}

#[test]
fn golden_tables() {
    for name in ["t11mmnn", "t11mm1nn1", "t11mnmn"] {
        let start = Instant::now();
        let out = betamax(&["table", name, "--max", "6"]);
        assert!(out.status.success());
        let golden = std::fs::read_to_string(format!("{}/../core/tests/golden/{name}.csv", env!("CARGO_MANIFEST_DIR"))).unwrap();
        assert_eq!(stdout(&out), golden, "{name}");
        assert!(start.elapsed().as_secs_f64() < 5.0);

        let env: Envelope<TableArgs, TableResult> = json(&["table", name]);
        assert_eq!(env.result.csv, golden);
        assert_round_trip(&env);
    }
}

#[test]
fn prob_examples() {
    let env: Envelope<ProbArgs, ProbResult> = json(&["prob", "--params", "1,1,1,1,1,1"]);
    assert_eq!(env.command, "prob");
    assert!((triple(&env).value - 1.0 / 3.0).abs() < 1e-15);
    assert_round_trip(&env);

    let env: Envelope<ProbArgs, ProbResult> = json(&["prob", "--params", "1,1,2,2,2,2", "--method", "exact"]);
    let b = triple(&env);
    assert_eq!(b.method, MethodTag::ExactRational);
    assert_eq!(b.diagnostics.exact.as_deref(), Some("13/35"));
    let text = stdout(&betamax(&["prob", "--params", "1,1,2,2,2,2", "--method", "exact"]));
    assert!(text.contains("13/35"), "{text}");

    let kdf: Envelope<ProbArgs, ProbResult> = json(&["prob", "--params", "1,1,1,0.5,1,0.5", "--method", "kdf"]);
    let quad: Envelope<ProbArgs, ProbResult> = json(&["prob", "--params", "1,1,1,0.5,1,0.5", "--method", "quadrature"]);
    assert_eq!(triple(&kdf).method, MethodTag::KdfClosedForm);
    assert!((triple(&kdf).value - triple(&quad).value).abs() < 1e-8);
    assert_round_trip(&kdf);

    let pair: Envelope<ProbArgs, ProbResult> = json(&["prob", "--pair", "1,1,1,2"]);
    match pair.result {
        ProbResult::Pair(p) => assert!((p.value - 2.0 / 3.0).abs() < 1e-15),
        ProbResult::Triple(_) => panic!("expected a pair result"),
    }
}

#[test]
fn monte_carlo_is_seeded() {
    let args = ["prob", "--params", "1,1,1,2,1,2", "--method", "mc", "--samples", "20000", "--seed", "5"];
    let a = stdout(&betamax(&args));
    assert_eq!(a, stdout(&betamax(&args)));
    let env: Envelope<ProbArgs, ProbResult> = json(&args);
    let b = triple(&env);
    assert!((b.value - 8.0 / 15.0).abs() < 4.0 * b.abs_error_estimate);
}

#[test]
fn exit_example() {
    let env: Envelope<ExitArgs, ExitTimeReport> = json(&["exit", "--M", "2", "--N", "2", "--m", "1", "--n", "1"]);
    assert_eq!(env.result.analytic_mean.to_string(), "8/3");
    assert!((env.result.simulated_mean - 8.0 / 3.0).abs() < 4.0 * env.result.simulated_stderr);
    assert_round_trip(&env);
}

#[test]
fn exact_payloads_print_rationals() {
    let env: Envelope<serde_json::Value, ExactResult> = json(&["inner", "--m", "2", "--n", "3"]);
    assert_eq!(env.result.exact.to_string(), "8/21");
    assert_round_trip(&env.result);
    let env: Envelope<serde_json::Value, CountResult> = json(&["count", "--params", "1,1,2,2,2,2", "--bruteforce"]);
    assert_eq!(env.result.count, "52");
    assert_eq!(env.result.bruteforce.as_deref(), Some("52"));
    assert_eq!(env.result.probability.to_string(), "13/35");
    let raw = stdout(&betamax(&["--json", "count", "--params", "1,1,2,2,2,2"]));
    assert!(raw.contains(r#""probability":"13/35""#), "{raw}");
}

#[test]
fn verify_passes_and_is_deterministic() {
    let env: Envelope<VerifyArgs, Report> = json(&["verify", "--grid-size", "50", "--seed", "7"]);
    assert!(env.result.passed);
    assert_eq!(env.result.failures, 0);
    let sorted = env.result.checks.windows(2).all(|w| w[0].params.partial_cmp(&w[1].params) != Some(std::cmp::Ordering::Greater));
    assert!(sorted, "checks are ordered by parameter tuple");
    assert_round_trip(&env);
    let again: Envelope<VerifyArgs, Report> = json(&["verify", "--grid-size", "50", "--seed", "7"]);
    assert_eq!(again, env);
}

#[test]
fn verify_failure_exits_4() {
    // no route can agree with quadrature to 1e-30
    let out = betamax(&["verify", "--grid-size", "1", "--seed", "1", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).trim_end().ends_with("FAIL"));
}

#[test]
fn exit_codes() {
    assert_eq!(betamax(&["prob", "--params", "1,1,1"]).status.code(), Some(2));
    assert_eq!(betamax(&["prob", "--params", "1,1,-1,1,1,1"]).status.code(), Some(2));
    assert_eq!(betamax(&["prob", "--params", "x"]).status.code(), Some(2));
    assert_eq!(betamax(&["prob"]).status.code(), Some(2));
    assert_eq!(betamax(&["prob", "--params", "1,1,1.5,1,1,1", "--method", "exact"]).status.code(), Some(2));
    assert_eq!(betamax(&["exit", "--M", "2", "--N", "2", "--m", "3", "--n", "1"]).status.code(), Some(2));
    // non-integer primes make the 4F3 cells non-terminating
    let out = betamax(&["prob", "--params", "1,1,1,0.5,1,0.5", "--method", "series4f3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("numerical failure"));
}
