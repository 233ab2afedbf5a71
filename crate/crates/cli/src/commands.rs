use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use betamax::combinatorics::{self, rational_to_f64, t_count, t_count_bruteforce};
use betamax::integrals::{self, b_auto, b_general, b_series_4f3, exact_result, Diagnostics};
use betamax::oracles::{b_montecarlo, b_quadrature};
use betamax::verify::{self, Report, Tolerances};
use betamax::walks::{simulate_conditioned, WalkConfig};
use betamax::{BResult, BigRational, Error, ExitTimeReport, IntParamSet, MethodTag, ParamSet};

use crate::args::*;
use crate::output::{to_json, Envelope};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameters outside the domain; exit code 2.
    Usage(String),
    /// A route failed or missed its tolerance; exit code 3.
    Numerical(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(m) | Error::Constraint(m) => CliError::Usage(m),
            e => CliError::Numerical(e),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Text for stdout and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

/// Human-readable rendering of a payload.
pub trait Render {
    fn render(&self) -> String;
}

fn emit<I: Serialize, R: Serialize + Render>(command: &str, inputs: &I, result: &R, json: bool) -> String {
    if json {
        let mut s = to_json(&Envelope::new(command, inputs, result));
        s.push('\n');
        s
    } else {
        result.render()
    }
}

fn lines(rows: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in rows {
        writeln!(out, "{k:<20}{v}").unwrap();
    }
    out
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let json = cli.json;
    let ok = |stdout| Ok(Outcome { stdout, code: 0 });
    match &cli.command {
        Command::Prob(a) => ok(emit("prob", a, &prob(a)?, json)),
        Command::Moment(a) => ok(emit("moment", a, &moment(a)?, json)),
        Command::Inner(a) => ok(emit("inner", a, &inner(a)?, json)),
        Command::Count(a) => ok(emit("count", a, &count(a)?, json)),
        Command::Table(a) => ok(emit("table", a, &table(a)?, json)),
        Command::Sequence(a) => ok(emit("sequence", a, &sequence(a)?, json)),
        Command::Exit(a) => ok(emit("exit", a, &exit(a)?, json)),
        Command::Verify(a) => {
            let report = verify_cmd(a)?;
            let code = if report.passed { 0 } else { 4 };
            Ok(Outcome { stdout: emit("verify", a, &report, json), code })
        }
    }
}

fn param_set(v: &[f64]) -> CliResult<ParamSet> {
    let a: [f64; 6] = v
        .try_into()
        .map_err(|_| CliError::Usage(format!("--params takes 6 values λ,λ′,μ,μ′,ν,ν′, got {}", v.len())))?;
    Ok(ParamSet::from_array(a)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbResult {
    Triple(BResult),
    Pair(PairResult),
}

impl Render for ProbResult {
    fn render(&self) -> String {
        match self {
            ProbResult::Pair(p) => lines(&[("value", p.value.to_string())]),
            ProbResult::Triple(b) => {
                let mut rows = vec![("value", b.value.to_string())];
                if let Some(exact) = &b.diagnostics.exact {
                    rows.push(("exact", exact.clone()));
                }
                rows.push(("method", b.method.to_string()));
                rows.push(("abs_error_estimate", format!("{:e}", b.abs_error_estimate)));
                if b.diagnostics.terms > 0 {
                    rows.push(("terms", b.diagnostics.terms.to_string()));
                }
                if b.diagnostics.evaluations > 0 {
                    rows.push(("evaluations", b.diagnostics.evaluations.to_string()));
                }
                if b.diagnostics.reduced_accuracy {
                    rows.push(("note", "a parameter is below 1e-3; accuracy reduced".into()));
                }
                lines(&rows)
            }
        }
    }
}

fn estimate(method: MethodTag, value: f64, error: f64, evaluations: usize) -> BResult {
    BResult {
        value,
        method,
        abs_error_estimate: error,
        diagnostics: Diagnostics { evaluations, ..Default::default() },
    }
}

pub fn prob(a: &ProbArgs) -> CliResult<ProbResult> {
    if let Some(pair) = &a.pair {
        let [l, lp, m, mp]: [f64; 4] = pair
            .as_slice()
            .try_into()
            .map_err(|_| CliError::Usage(format!("--pair takes 4 values λ,λ′,μ,μ′, got {}", pair.len())))?;
        if a.method != Method::Auto {
            return Err(CliError::Usage("--pair supports only --method auto".into()));
        }
        return Ok(ProbResult::Pair(PairResult { value: integrals::prob_exceeds(l, lp, m, mp)? }));
    }
    let p = param_set(a.params.as_deref().unwrap_or_default())?;
    let r = match a.method {
        Method::Auto => b_auto(&p, None)?,
        Method::Kdf => b_general(&p)?,
        Method::Series4f3 => b_series_4f3(&p)?,
        Method::Exact => {
            let ip = p
                .to_integers()
                .ok_or_else(|| CliError::Usage("--method exact needs positive integer parameters".into()))?;
            exact_result(&ip)
        }
        Method::Quadrature => {
            let q = b_quadrature(&p, a.tol)?;
            estimate(MethodTag::Quadrature, q.value, q.abs_error_estimate, q.evaluations)
        }
        Method::Mc => {
            let m = b_montecarlo(&p, a.samples, a.seed)?;
            estimate(MethodTag::MonteCarlo, m.estimate, m.stderr, m.samples as usize)
        }
    };
    Ok(ProbResult::Triple(r))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueResult {
    pub value: f64,
}

impl Render for ValueResult {
    fn render(&self) -> String {
        lines(&[("value", self.value.to_string())])
    }
}

pub fn moment(a: &MomentArgs) -> CliResult<ValueResult> {
    let [l, m, mp, n, np]: [f64; 5] = a
        .params
        .as_slice()
        .try_into()
        .map_err(|_| CliError::Usage(format!("--params takes 5 values λ,μ,μ′,ν,ν′, got {}", a.params.len())))?;
    Ok(ValueResult { value: integrals::moment_max(l, m, mp, n, np)? })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    #[serde(with = "combinatorics::rational_string")]
    pub exact: BigRational,
    pub value: f64,
}

impl Render for ExactResult {
    fn render(&self) -> String {
        lines(&[("exact", self.exact.to_string()), ("value", self.value.to_string())])
    }
}

pub fn inner(a: &InnerArgs) -> CliResult<ExactResult> {
    let exact = integrals::pm_inner(a.m, a.n)?;
    Ok(ExactResult { value: rational_to_f64(&exact), exact })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    /// Decimal digits; counts outgrow every JSON number type.
    pub count: String,
    #[serde(with = "combinatorics::rational_string")]
    pub probability: BigRational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bruteforce: Option<String>,
}

impl Render for CountResult {
    fn render(&self) -> String {
        let mut rows = vec![("count", self.count.clone()), ("probability", self.probability.to_string())];
        if let Some(b) = &self.bruteforce {
            rows.push(("bruteforce", b.clone()));
        }
        lines(&rows)
    }
}

pub fn count(a: &CountArgs) -> CliResult<CountResult> {
    let arr: [u64; 6] = a
        .params
        .as_slice()
        .try_into()
        .map_err(|_| CliError::Usage(format!("--params takes 6 integers ℓ,ℓ′,m,m′,n,n′, got {}", a.params.len())))?;
    let p = IntParamSet::from_array(arr)?;
    let bruteforce = if a.bruteforce {
        Some(t_count_bruteforce(&p)?.to_string())
    } else {
        None
    };
    Ok(CountResult {
        count: t_count(&p)?.to_string(),
        probability: combinatorics::b_exact_rational(&p),
        bruteforce,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableResult {
    pub kind: TableName,
    pub max: u64,
    pub csv: String,
}

impl Render for TableResult {
    fn render(&self) -> String {
        self.csv.clone()
    }
}

pub fn table(a: &TableArgs) -> CliResult<TableResult> {
    let t = combinatorics::table(a.kind.into(), a.max)?;
    Ok(TableResult { kind: a.kind, max: a.max, csv: t.to_csv() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceResult {
    pub kind: SequenceName,
    pub terms: Vec<String>,
}

impl Render for SequenceResult {
    fn render(&self) -> String {
        self.terms.join(", ") + "\n"
    }
}

pub fn sequence(a: &SequenceArgs) -> CliResult<SequenceResult> {
    let terms = combinatorics::sequence(a.kind.into(), a.terms)?;
    Ok(SequenceResult { kind: a.kind, terms: terms.iter().map(ToString::to_string).collect() })
}

impl Render for ExitTimeReport {
    fn render(&self) -> String {
        lines(&[
            ("analytic_mean", format!("{} ≈ {}", self.analytic_mean, rational_to_f64(&self.analytic_mean))),
            ("simulated_mean", format!("{} ± {}", self.simulated_mean, self.simulated_stderr)),
            ("samples", self.samples.to_string()),
            ("seed", self.seed.to_string()),
        ])
    }
}

pub fn exit(a: &ExitArgs) -> CliResult<ExitTimeReport> {
    let cfg = WalkConfig::new(a.east, a.north, a.m, a.n)?;
    Ok(simulate_conditioned(&cfg, a.samples, a.seed)?)
}

impl Render for Report {
    fn render(&self) -> String {
        let mut groups: Vec<&str> = self.checks.iter().map(|c| c.name.as_str()).collect();
        groups.sort_unstable();
        groups.dedup();
        let mut out = String::new();
        for g in groups {
            let of: Vec<_> = self.checks.iter().filter(|c| c.name == g).collect();
            let worst = of.iter().map(|c| c.deviation).fold(0.0, f64::max);
            let failed = of.iter().filter(|c| !c.passed).count();
            let status = if failed == 0 { "PASS".to_string() } else { format!("FAIL ({failed})") };
            writeln!(out, "{g:<28}{:>5} checks  worst {worst:<10.3e} tol {:<8.1e} {status}", of.len(), of[0].tol).unwrap();
        }
        for c in self.checks.iter().filter(|c| !c.passed) {
            writeln!(out, "failed {} at {:?}: deviation {:e}{}", c.name, c.params, c.deviation, c.detail.as_ref().map(|d| format!(" ({d})")).unwrap_or_default()).unwrap();
        }
        writeln!(out, "{}", if self.passed { "PASS" } else { "FAIL" }).unwrap();
        out
    }
}

pub fn verify_cmd(a: &VerifyArgs) -> CliResult<Report> {
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", a.tol)));
    }
    let tol = Tolerances { oracle: a.tol, ..Tolerances::default() };
    Ok(verify::run(a.grid_size, a.seed, &tol))
}

/// Parse an envelope printed with `--json`.
pub fn parse_envelope<I: DeserializeOwned, R: DeserializeOwned>(text: &str) -> serde_json::Result<Envelope<I, R>> {
    crate::output::from_json(text)
}
