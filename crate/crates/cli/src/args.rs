use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use betamax::combinatorics::{SequenceKind, TableKind};

#[derive(Debug, Parser)]
#[command(name = "betamax", version, about = "Euler transforms of products of incomplete beta functions")]
pub struct Cli {
    /// Print a JSON envelope instead of the human-readable report.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// 𝓑(λ,λ′,μ,μ′,ν,ν′) = P(X > max{Y, Z}), or P(X > Y) with --pair.
    Prob(ProbArgs),
    /// E[max{Y, Z}^λ] for independent Y ~ Beta(μ,μ′), Z ~ Beta(ν,ν′).
    Moment(MomentArgs),
    /// ⟨p_m, p_n⟩ = ∫₀¹ I(m,m;t) I(n,n;t) dt, exactly.
    Inner(InnerArgs),
    /// Number of X/Y/Z strings counted by T(ℓ,ℓ′,m,m′,n,n′).
    Count(CountArgs),
    /// One of the tabulated families of T, as CSV.
    Table(TableArgs),
    /// Integer sequences read off the tables.
    Sequence(SequenceArgs),
    /// Expected exit time of a conditioned lattice walk.
    Exit(ExitArgs),
    /// Cross-route and identity checks on a random grid.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Auto,
    Kdf,
    Series4f3,
    Exact,
    Quadrature,
    Mc,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ProbArgs {
    /// λ,λ′,μ,μ′,ν,ν′
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "pair", required_unless_present = "pair")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,

    /// λ,λ′,μ,μ′ for P(X > Y) alone.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<Vec<f64>>,

    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,

    /// Absolute tolerance for --method quadrature.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,

    /// Sample count for --method mc.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,

    /// Seed for --method mc.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MomentArgs {
    /// λ,μ,μ′,ν,ν′
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct InnerArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CountArgs {
    /// ℓ,ℓ′,m,m′,n,n′ as positive integers.
    #[arg(long, value_delimiter = ',', required = true)]
    pub params: Vec<u64>,

    /// Also count by enumerating every string (L+M+N ≤ 18).
    #[arg(long)]
    pub bruteforce: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableName {
    T11mmnn,
    T11mm1nn1,
    T11mnmn,
}

impl From<TableName> for TableKind {
    fn from(t: TableName) -> Self {
        match t {
            TableName::T11mmnn => TableKind::T11mmnn,
            TableName::T11mm1nn1 => TableKind::T11mm1nn1,
            TableName::T11mnmn => TableKind::T11mnmn,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub kind: TableName,

    /// Last row, m+n.
    #[arg(long, default_value_t = 6)]
    pub max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceName {
    /// n(3n+1)/2
    Pentagonal,
    /// T(1,1,n,n,n,n)
    IidDiag,
    /// T(1,1,n,n+1,n,n+1)
    Mm1Diag,
    /// 2n C(2n,n−1)
    OneN,
    /// C(2n,n)
    CentralBinomial,
}

impl From<SequenceName> for SequenceKind {
    fn from(s: SequenceName) -> Self {
        match s {
            SequenceName::Pentagonal => SequenceKind::Pentagonal,
            SequenceName::IidDiag => SequenceKind::IidDiag,
            SequenceName::Mm1Diag => SequenceKind::Mm1Diag,
            SequenceName::OneN => SequenceKind::OneN,
            SequenceName::CentralBinomial => SequenceKind::CentralBinomial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SequenceArgs {
    #[arg(value_enum)]
    pub kind: SequenceName,

    #[arg(long, default_value_t = 5)]
    pub terms: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ExitArgs {
    /// Total east steps.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub east: u64,
    /// Total north steps.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub north: u64,
    #[arg(long = "m")]
    pub m: u64,
    #[arg(long = "n")]
    pub n: u64,

    /// Simulated walks.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Random parameter sets for the identity checks.
    #[arg(long, default_value_t = 200)]
    pub grid_size: usize,

    #[arg(long, default_value_t = 7)]
    pub seed: u64,

    /// Tolerance for route-versus-quadrature agreement.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}
