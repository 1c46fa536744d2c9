//! The `smallpoints` command line.
//!
//! Exit codes: 0 ok, 1 parse or invalid input, 2 search space too large,
//! 3 point off the curve, 4 inconclusive, 5 violation.

mod commands;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::algebraic::AlgebraicError;
use crate::dynamics::DynamicsError;
use crate::elliptic::EllipticError;
use crate::equidist::EquidistError;
use crate::semiabelian::SemiabelianError;

pub use commands::{EquidistArgs, ExploreArgs, HeightArgs, NfuncArgs, OrbitArgs, PropCheckArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_SEARCH_SPACE: i32 = 2;
pub const EXIT_OFF_CURVE: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;
pub const EXIT_VIOLATION: i32 = 5;

/// Default tolerance for canonical heights.
pub const DEFAULT_HEIGHT_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "smallpoints",
    version,
    about = "Heights, small-point dynamics and equidistribution on E x G_m^n"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Tolerance for canonical heights.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Iteration cap for the N-function.
    #[arg(long, global = true)]
    pub cap: Option<u32>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Directory for output files.
    #[arg(long, short = 'o', global = true)]
    pub out_dir: Option<PathBuf>,
    /// Seed for generated samples.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON file with defaults for the options above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weil, naive, canonical and product heights.
    Height(HeightArgs),
    /// The N-function of a system at given points.
    Nfunc(NfuncArgs),
    /// Galois-orbit angle statistics for a family of numbers.
    Equidist(EquidistArgs),
    /// Runs a comparison-check scenario.
    PropCheck(PropCheckArgs),
    /// Bounded search for small points on a curve relation.
    Explore(ExploreArgs),
    /// Dumps the conjugates of an algebraic number.
    Orbit(OrbitArgs),
}

/// Settings file accepted by `--config`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub cap: Option<u32>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Global options after merging the config file with the flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// Explicit tolerance; commands fall back to their own default.
    pub tol: Option<f64>,
    pub cap: u32,
    pub format: Format,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Settings {
    pub fn resolve(g: &GlobalArgs) -> Result<Settings, CliError> {
        let file = match &g.config {
            Some(p) => {
                let text = read_file(p)?;
                serde_json::from_str::<ExperimentConfig>(&text)
                    .map_err(|e| CliError::parse(format!("{}: {e}", p.display())))?
            }
            None => ExperimentConfig::default(),
        };
        let s = Settings {
            tol: g.tol.or(file.tol),
            cap: g.cap.or(file.cap).unwrap_or(crate::dynamics::DEFAULT_CAP),
            format: g.format.or(file.format).unwrap_or(Format::Text),
            out_dir: g.out_dir.clone().or(file.out_dir),
            seed: g.seed.or(file.seed).unwrap_or(0),
        };
        if let Some(t) = s.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::parse(format!("--tol must be > 0, got {t}")));
            }
        }
        if s.cap < 1 {
            return Err(CliError::parse("--cap must be >= 1"));
        }
        Ok(s)
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        CliError::new(EXIT_PARSE, message)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn algebraic_code(e: &AlgebraicError) -> i32 {
    match e {
        AlgebraicError::NonConvergence { .. } | AlgebraicError::IrreducibilityUnverified { .. } => EXIT_INCONCLUSIVE,
        _ => EXIT_PARSE,
    }
}

fn elliptic_code(e: &EllipticError) -> i32 {
    match e {
        EllipticError::OffCurve(_) => EXIT_OFF_CURVE,
        EllipticError::PrecisionLimit { .. } | EllipticError::TorsionSearch(_) => EXIT_INCONCLUSIVE,
        _ => EXIT_PARSE,
    }
}

fn semiabelian_code(e: &SemiabelianError) -> i32 {
    match e {
        SemiabelianError::SearchSpace { .. } => EXIT_SEARCH_SPACE,
        SemiabelianError::OffVariety(_) => EXIT_OFF_CURVE,
        SemiabelianError::Elliptic(e) => elliptic_code(e),
        SemiabelianError::Algebraic(e) => algebraic_code(e),
        _ => EXIT_PARSE,
    }
}

impl From<AlgebraicError> for CliError {
    fn from(e: AlgebraicError) -> Self {
        CliError::new(algebraic_code(&e), e.to_string())
    }
}

impl From<EllipticError> for CliError {
    fn from(e: EllipticError) -> Self {
        CliError::new(elliptic_code(&e), e.to_string())
    }
}

impl From<SemiabelianError> for CliError {
    fn from(e: SemiabelianError) -> Self {
        CliError::new(semiabelian_code(&e), e.to_string())
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        let code = match &e {
            DynamicsError::Elliptic(x) => elliptic_code(x),
            DynamicsError::Semiabelian(x) => semiabelian_code(x),
            DynamicsError::Algebraic(x) => algebraic_code(x),
            _ => EXIT_PARSE,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<EquidistError> for CliError {
    fn from(e: EquidistError) -> Self {
        let code = match &e {
            EquidistError::Unresolved { .. } => EXIT_INCONCLUSIVE,
            _ => EXIT_PARSE,
        };
        CliError::new(code, e.to_string())
    }
}

/// What a command produced: the text for stdout and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_PARSE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> Outcome {
    let result = Settings::resolve(&cli.global).and_then(|s| match &cli.command {
        Command::Height(a) => commands::height(a, &s),
        Command::Nfunc(a) => commands::nfunc(a, &s),
        Command::Equidist(a) => commands::equidist(a, &s),
        Command::PropCheck(a) => commands::prop_check(a, &s),
        Command::Explore(a) => commands::explore(a, &s),
        Command::Orbit(a) => commands::orbit(a, &s),
    });
    match result {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", e.message),
        },
    }
}

fn read_file(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::parse(format!("{}: {e}", p.display())))
}

/// The argument itself when it looks like inline JSON, else the file it names.
fn json_arg(arg: &str) -> Result<String, CliError> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') || t.starts_with('"') {
        Ok(arg.to_string())
    } else {
        read_file(Path::new(arg))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T, CliError> {
    let text = json_arg(arg)?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{what}: {e}")))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialise");
    s.push('\n');
    s
}

fn write_out(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::parse(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    std::fs::write(&p, bytes).map_err(|e| CliError::parse(format!("{}: {e}", p.display())))
}
