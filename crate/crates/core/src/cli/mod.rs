//! Command-line front end: `semiodm eval|verify|compare`.
//!
//! Exit codes: 0 success, 1 failed verification (or compare tolerance),
//! 2 configuration error, 3 domain error during evaluation.

pub mod config;
pub mod run;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::Error;
use config::{ConfigError, Format, RunConfig};
use run::{coordinate_names, difference, evaluate, Table, VALUE_COLUMNS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "semiodm", version, about = "Semiclassical one-body density matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one method on the configured grid.
    Eval(Common),
    /// Run a verification suite and print a JSON report.
    Verify {
        /// bessel, gradients, laplace, symmetrize, hermiticity, oracle or all
        #[arg(default_value = "all")]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate two methods on the same grid and report their differences.
    Compare(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a config value, e.g. `--set context.mu=40.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long)]
    pub skip_forbidden: bool,
    /// Omit the timestamp so identical configs give identical bytes.
    #[arg(long)]
    pub no_header_time: bool,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

enum Failure {
    Config(String),
    Domain(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::ModelUnsupported(_) | Error::DimensionMismatch { .. } => {
                Self::Config(e.to_string())
            }
            _ => Self::Domain(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Config(format!("cannot write output: {e}"))
    }
}

/// A closed downstream pipe (e.g. `| head`) is not an error.
fn finish(r: io::Result<()>) -> Result<(), Failure> {
    match r {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn load(common: &Common) -> Result<RunConfig, Failure> {
    let path = common.config.as_ref().ok_or_else(|| Failure::Config("--config FILE is required".into()))?;
    let mut cfg = RunConfig::load(path, &common.set)?;
    if let Some(f) = common.format {
        cfg.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if let Some(p) = &common.out {
        cfg.output.path = Some(p.clone());
    }
    cfg.skip_forbidden |= common.skip_forbidden;
    cfg.output.header_time &= !common.no_header_time;
    Ok(cfg)
}

fn sink<'a>(cfg: &RunConfig, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, Failure> {
    Ok(match &cfg.output.path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Config(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(stdout),
    })
}

fn stamp(cfg: &RunConfig) -> Option<String> {
    cfg.output.header_time.then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

fn value_columns(prefix: &str) -> Vec<String> {
    VALUE_COLUMNS.iter().map(|c| format!("{prefix}{c}")).collect()
}

fn cmd_eval(common: &Common, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = load(common)?;
    let rows = evaluate(&cfg, cfg.method, cfg.skip_forbidden)?;
    let table = Table::from_rows(coordinate_names(cfg.grid.mode, cfg.context.d), &rows, &value_columns(""));
    let mut out = sink(&cfg, stdout)?;
    finish(
        table
            .write(&mut out, cfg.output.format, json!({ "config": cfg, "command": "eval" }), stamp(&cfg))
            .and_then(|_| out.flush()),
    )?;
    Ok(EXIT_OK)
}

fn cmd_compare(common: &Common, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = load(common)?;
    let methods = cfg.methods(true)?;
    let pair = [methods[0], methods[1]];
    let a = evaluate(&cfg, pair[0], cfg.skip_forbidden)?;
    let b = evaluate(&cfg, pair[1], cfg.skip_forbidden)?;
    let (rows, summary) = difference(&a, &b, pair);
    let table = Table::from_rows(coordinate_names(cfg.grid.mode, cfg.context.d), &rows, &value_columns("diff_"));
    let meta = json!({ "config": cfg, "command": "compare", "summary": summary });
    let to_file = cfg.output.path.is_some();
    let mut out = sink(&cfg, &mut *stdout)?;
    finish(table.write(&mut out, cfg.output.format, meta, stamp(&cfg)).and_then(|_| out.flush()))?;
    drop(out);
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    if to_file {
        finish(writeln!(stdout, "{text}"))?;
    } else {
        finish(writeln!(stderr, "{text}"))?;
    }
    let tolerance = cfg.compare.as_ref().and_then(|c| c.tolerance);
    Ok(match tolerance {
        Some(t) if !(summary.max_relative <= t) => EXIT_VERIFY_FAILED,
        _ => EXIT_OK,
    })
}

fn cmd_verify(suite: &str, common: &Common, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let reports = crate::suites::run(suite)?;
    let passed = reports.iter().all(|r| r.passed);
    let doc = json!({ "suite": suite, "passed": passed, "reports": reports });
    let text = serde_json::to_string_pretty(&doc).expect("report serializes");
    match &common.out {
        Some(p) => {
            std::fs::write(p, text + "\n").map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display())))?
        }
        None => finish(writeln!(stdout, "{text}"))?,
    }
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// Parses `args` (including the program name) and runs the command with
/// the given output streams, returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_CONFIG
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Eval(c) => cmd_eval(c, stdout),
        Command::Compare(c) => cmd_compare(c, stdout, stderr),
        Command::Verify { suite, common } => cmd_verify(suite, common, stdout),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Config(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_DOMAIN
        }
    }
}

/// [`run`] on the process's standard streams.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run(args, &mut io::stdout().lock(), &mut io::stderr().lock())
}
