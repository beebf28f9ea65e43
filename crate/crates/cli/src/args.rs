use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "switchfn", version, about = "Switch functions orthogonal to function families")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the payload here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Polynomials 1, t, …, t^(n-1).
    Poly(ClosedForm),
    /// Even polynomials 1, t², …, t^(2n-2).
    Evenpoly(ClosedForm),
    /// sin(kπt/2) for k = 1..n.
    Sine(ClosedForm),
    /// Multistart Newton on the functions of a spec file.
    Generic(Generic),
    /// Two-switch sweep for a positive f1 and any f2 with λ = 1 - 2/k.
    Twoswitch(TwoSwitch),
    /// Sample the pairing map over the two-switch triangle.
    PsiScan(PsiScan),
    /// Closed-form determinants against LU.
    Det(Det),
    /// Recompute the residuals of a JSON payload.
    Verify(Verify),
}

#[derive(Debug, Args)]
pub struct ClosedForm {
    #[arg(short = 'n', long = "n")]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Power-sum target; ignored when --lambda is given.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Generic {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub starts: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct TwoSwitch {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct PsiScan {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 40)]
    pub grid: usize,
    /// Mark λ(∫f1, ∫f2).
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Emit SVG instead of the --format payload.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetKind {
    #[value(name = "K", alias = "k")]
    K,
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "A", alias = "a")]
    A,
}

#[derive(Debug, Args)]
pub struct Det {
    #[arg(value_enum)]
    pub kind: DetKind,
    #[arg(short = 'n', long = "n")]
    pub n: Option<usize>,
    #[arg(short = 'm', long = "m")]
    pub m: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Verify {
    /// JSON payload from a compute command.
    pub input: PathBuf,
}
