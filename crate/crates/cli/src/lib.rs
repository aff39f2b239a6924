//! The `heunc` command line.
//!
//! ```text
//! heunc eval   --alpha A --beta B --gamma G --delta D --eta E --z Z [--deriv n]
//! heunc coeffs --alpha A --beta B --gamma G --delta D --eta E --order M [--format csv]
//! heunc poly   --alpha A --beta B --gamma G --N n [--k k] [--format csv]
//! heunc verify --identity all --random 20 --seed 42
//! ```
//!
//! Complex values are written `a`, `a+bi` or `a-bi`. Output is one JSON
//! record on stdout unless `--format csv` is given. Exit status is 0 on
//! success, 1 when a verification fails and 2 on usage or domain errors.

pub mod commands;
pub mod complex;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heunc::{Complex64, HeunError, Mutation};
use thiserror::Error;

use crate::complex::parse_complex;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Overrides the default series truncation cap of `eval`.
pub const MAX_TERMS_ENV: &str = "HEUNC_MAX_TERMS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{kind}: {0}", kind = .0.kind())]
    Domain(#[from] HeunError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Process-level inputs that do not come from flags.
#[derive(Clone, Debug, Default)]
pub struct Runtime {
    /// Value of `HEUNC_MAX_TERMS`, if set.
    pub max_terms_env: Option<String>,
    /// Corrupts the verified identities; only reachable through the library.
    pub mutation: Mutation,
}

impl Runtime {
    pub fn from_env() -> Self {
        Self {
            max_terms_env: std::env::var(MAX_TERMS_ENV).ok(),
            mutation: Mutation::None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "heunc", version, about = "Confluent Heun functions, polynomials and identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate HeunC (and optionally a derivative) at a point inside the disk.
    Eval(EvalArgs),
    /// Dump the Taylor coefficients v_0..v_M.
    Coeffs(CoeffsArgs),
    /// Determinant, spectrum and polynomial solutions for degree N.
    Poly(PolyArgs),
    /// Run identity checks on given or random parameters.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub gamma: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub delta: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub eta: Complex64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Complex64,
    /// Also evaluate the n-th derivative.
    #[arg(long)]
    pub deriv: Option<usize>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Series truncation cap; defaults to $HEUNC_MAX_TERMS, then 10000.
    #[arg(long)]
    pub max_terms: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Highest coefficient index M.
    #[arg(long)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub gamma: Complex64,
    /// Polynomial degree.
    #[arg(long = "N", value_name = "N")]
    pub degree: u32,
    /// Report only the k-th root (1-based, roots sorted by real then imaginary part).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IdentityArg {
    Basic,
    FourTerm,
    Chain,
    HighOde,
    Darboux,
    Selfadjoint,
    Swap,
    EigenShift,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub identity: IdentityArg,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub gamma: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub delta: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub eta: Option<Complex64>,
    /// Number of random parameter sets drawn from |Re|,|Im| <= 2.
    #[arg(long, value_name = "TRIALS", conflicts_with_all = ["alpha", "beta", "gamma", "delta", "eta"])]
    pub random: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Derivative order for basic, four-term, chain and high-ode.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Polynomial degree for darboux.
    #[arg(long = "N", value_name = "N", default_value_t = 0)]
    pub degree: u32,
    /// Series truncation order.
    #[arg(long = "M", value_name = "M", default_value_t = 60)]
    pub truncation: usize,
    /// Random test series per commutation check.
    #[arg(long, default_value_t = 8)]
    pub series: usize,
    /// Eigenvalue for eigen-shift.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0.5-0.25i")]
    pub lambda: Complex64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, rt: &Runtime, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{rendered}");
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let result = match cli.command {
        Command::Eval(a) => commands::eval(&a, rt, out),
        Command::Coeffs(a) => commands::coeffs(&a, out),
        Command::Poly(a) => commands::poly(&a, out),
        Command::Verify(a) => commands::verify(&a, rt, out),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
