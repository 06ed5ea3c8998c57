//! `doublepass` command-line frontend.
//!
//! Exit codes: 0 success, 1 verification failure or numerical failure,
//! 2 protocol precondition violated, 3 inconsistent probabilities for an
//! inverter, 64 usage or configuration error, 74 I/O error.

pub mod config;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use doublepass::harness::{self, write_csv, HarnessError, MeasurementRecord, ProtocolKind, Settings, Suite};
use doublepass::inversion::{Estimate, InversionError, NoiseSlack};
use doublepass::{su2, su3};

use config::{RunConfig, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "doublepass", version, about = "Double-pass estimation of single-pass transition probabilities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one protocol and print its record as CSV.
    Simulate(RunArgs),
    /// Run a protocol over the configured sweep and write the CSV.
    Sweep(RunArgs),
    /// Apply an inversion formula to given probabilities.
    Invert(InvertArgs),
    /// Check a registered invariant over seeded random profiles.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; defaults to the config `output` or standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Protocol whose relation to invert, e.g. stirap-detuned.
    pub relation: String,
    /// Single double-pass return probability Q.
    #[arg(long = "double")]
    pub double: Option<f64>,
    /// Averaged return probability Qbar.
    #[arg(long = "average")]
    pub average: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub slack: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: String,
    #[arg(long, default_value_t = 500)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Optional JSON document with tolerance overrides only.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Error carrying its exit code and a diagnostic for standard error.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let code = match e {
            HarnessError::Precondition(_) => EXIT_PRECONDITION,
            HarnessError::Inversion { .. } => EXIT_INCONSISTENT,
            HarnessError::Drive(_) | HarnessError::Sweep(_) => EXIT_USAGE,
            HarnessError::Evolve(_) => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<InversionError> for Failure {
    fn from(e: InversionError) -> Self {
        Self {
            code: EXIT_INCONSISTENT,
            message: e.to_string(),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("doublepass: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Simulate(args) => simulate(&args),
        Command::Sweep(args) => sweep(&args),
        Command::Invert(args) => invert(&args),
        Command::Verify(args) => verify(&args),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: invalid config: {e}", path.display())))
}

fn load(args: &RunArgs) -> Result<(RunConfig, Settings), Failure> {
    let config: RunConfig = read_json(&args.config)?;
    let settings = config.settings().map_err(Failure::usage)?;
    Ok((config, settings))
}

fn output_path(cli: &Option<PathBuf>, config: &Option<String>) -> Option<PathBuf> {
    cli.clone().or_else(|| config.as_ref().map(PathBuf::from))
}

/// Writes to `path`, or to standard output when it is `None`.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::io(p, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| Failure::io(Path::new("<stdout>"), e))
        }
    }
}

fn csv_bytes(records: &[MeasurementRecord]) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).map_err(|e| Failure {
        code: EXIT_IO,
        message: e.to_string(),
    })?;
    Ok(buf)
}

fn simulate(args: &RunArgs) -> Result<i32, Failure> {
    let (config, settings) = load(args)?;
    if config.sweep.is_some() {
        return Err(Failure::usage("simulate takes a config without a sweep block; use `sweep`"));
    }
    let profile = config.profile.build().map_err(|e| Failure::usage(e.to_string()))?;
    let record = harness::run_protocol(config.protocol, &profile, &settings)?;
    emit(output_path(&args.out, &config.output).as_deref(), &csv_bytes(&[record])?)?;
    Ok(EXIT_OK)
}

fn sweep(args: &RunArgs) -> Result<i32, Failure> {
    let (config, settings) = load(args)?;
    let profile = config.profile.build().map_err(|e| Failure::usage(e.to_string()))?;
    let spec = config
        .sweep_spec(profile)
        .ok_or_else(|| Failure::usage("sweep needs a `sweep` block in the config"))?;
    harness::check_preconditions(config.protocol, &profile)?;
    let records = harness::sweep(&spec, &settings)?;
    emit(output_path(&args.out, &config.output).as_deref(), &csv_bytes(&records)?)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct InvertReport {
    relation: &'static str,
    p: f64,
    lower_root: f64,
    clamped: bool,
}

fn required(value: Option<f64>, flag: &str, relation: ProtocolKind) -> Result<f64, Failure> {
    value.ok_or_else(|| Failure::usage(format!("{relation} needs --{flag}")))
}

fn invert(args: &InvertArgs) -> Result<i32, Failure> {
    let relation: ProtocolKind = args.relation.parse().map_err(|e: String| {
        let names: Vec<&str> = ProtocolKind::ALL.iter().map(|k| k.name()).collect();
        Failure::usage(format!("{e}; expected one of {}", names.join(", ")))
    })?;
    let slack = match args.slack {
        Some(s) if s.is_finite() && s >= 0.0 => NoiseSlack(s),
        Some(s) => return Err(Failure::usage(format!("--slack must be finite and non-negative, got {s}"))),
        None => NoiseSlack::default(),
    };
    let double = || required(args.double, "double", relation);
    let average = || required(args.average, "average", relation);
    let q = || required(args.q, "q", relation);
    let estimate: Estimate<f64> = match relation {
        ProtocolKind::TwoStateGeneral => su2::invert_p_general(average()?, slack)?,
        ProtocolKind::TwoStateRap => su2::invert_p_rap(double()?, slack)?,
        ProtocolKind::TwoStateConstDetuning => su2::invert_p_const_detuning(double()?, slack)?,
        ProtocolKind::StirapResonantCase1 => su3::invert_case1(double()?, q()?, slack)?,
        ProtocolKind::StirapResonantCase2 => su3::invert_case2(double()?, slack)?,
        ProtocolKind::StirapDetuned => su3::invert_detuned(average()?, q()?, slack)?,
        ProtocolKind::ThreeStateGeneral => {
            su3::invert_general(average()?, q()?, required(args.r, "r", relation)?, slack)?
        }
    };
    let report = InvertReport {
        relation: relation.name(),
        p: estimate.p,
        lower_root: estimate.lower_root,
        clamped: estimate.clamped,
    };
    emit(args.out.as_deref(), &json_bytes(&report))?;
    Ok(EXIT_OK)
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

fn verify(args: &VerifyArgs) -> Result<i32, Failure> {
    let suite: Suite = args.suite.parse().map_err(|e: String| {
        let mut names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        names.extend(Suite::ALIASES.iter().map(|(a, _)| *a));
        Failure::usage(format!("{e}; expected one of {}", names.join(", ")))
    })?;
    let settings = match &args.config {
        Some(path) => read_json::<Tolerances>(path)?.settings().map_err(Failure::usage)?,
        None => Settings::default(),
    };
    let report = harness::verify(suite, args.draws, args.seed, &settings);
    emit(args.out.as_deref(), &json_bytes(&report))?;
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILURE })
}
