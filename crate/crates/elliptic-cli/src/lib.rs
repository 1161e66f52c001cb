//! `ellfrob`: configuration, subcommands and machine-readable output.

pub mod cache;
pub mod commands;
pub mod config;
pub mod json;
pub mod verify;

use clap::Parser;
use config::{Cli, Command, ConfigError, Precision, RunConfig};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Malformed configuration: exit status 2.
    Config(ConfigError),
    /// A computation failed; `stage` names the module that reported it.
    Failed { stage: &'static str, message: String },
    Io(String),
}

impl CliError {
    pub fn failed(stage: &'static str, e: impl fmt::Display) -> Self {
        CliError::Failed { stage, message: e.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "invalid configuration: {e}"),
            CliError::Failed { stage, message } => write!(f, "{stage}: {message}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

/// Result of one subcommand.
pub struct Output {
    pub json: Value,
    pub text: String,
    /// Text exchange file, written to --out (or stdout without --json and --out).
    pub artifact: Option<String>,
    /// False when a verification failed; the exit status is then 1.
    pub ok: bool,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Describe => "describe",
        Command::Coxeter => "coxeter",
        Command::Triplet => "triplet",
        Command::Invariants { .. } => "invariants",
        Command::Frobenius => "frobenius",
        Command::Verify { .. } => "verify",
        Command::Expand { .. } => "expand",
    }
}

macro_rules! at_precision {
    ($cfg:expr, $f:ident($($arg:expr),*)) => {
        match $cfg.precision {
            Precision::Single => commands::$f::<f32>($($arg),*),
            Precision::Double => commands::$f::<f64>($($arg),*),
            Precision::DoubleDouble => commands::$f::<elliptic::DoubleDouble>($($arg),*),
        }
    };
}

fn execute(cli: &Cli) -> Result<(RunConfig, Output), CliError> {
    let mut input = None;
    if let Command::Expand { file } = &cli.command {
        let text = std::fs::read_to_string(file).map_err(|e| ConfigError::Input(format!("cannot read {}: {e}", file.display())))?;
        input = Some(text);
    }
    let file_type = input.as_deref().and_then(|t| t.lines().find_map(|l| l.trim().strip_prefix("type ")).map(str::trim));
    let cfg = RunConfig::from_opts(&cli.opts, file_type)?;
    let out = match &cli.command {
        Command::Describe => commands::describe(&cfg),
        Command::Coxeter => commands::coxeter(&cfg),
        Command::Triplet => commands::triplet(&cfg),
        Command::Invariants { good } => at_precision!(cfg, invariants(&cfg, *good)),
        Command::Frobenius => at_precision!(cfg, frobenius(&cfg)),
        Command::Verify { skip_drift } => at_precision!(cfg, verify(&cfg, !*skip_drift)),
        Command::Expand { .. } => at_precision!(cfg, expand(&cfg, input.as_deref().unwrap_or(""))),
    }?;
    Ok((cfg, out))
}

fn emit(cli: &Cli, cfg: &RunConfig, out: Output) -> Result<(), CliError> {
    let envelope = json!({
        "schema": json::SCHEMA,
        "command": command_name(&cli.command),
        "config": cfg.to_json(),
        "ok": out.ok,
        "result": out.json,
    });
    let main = if cfg.json { serde_json::to_string_pretty(&envelope).expect("JSON values serialize") + "\n" } else { out.text };
    let write = |path: &std::path::Path, s: &str| std::fs::write(path, s).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())));
    match (&cfg.out, out.artifact) {
        (Some(p), Some(a)) => {
            write(p, &a)?;
            print!("{main}");
        }
        (Some(p), None) => write(p, &main)?,
        (None, Some(a)) if !cfg.json => print!("{a}"),
        (None, _) => print!("{main}"),
    }
    Ok(())
}

/// Runs the command line `args` (program name first) and returns the exit status:
/// 0 success, 1 failed computation or verification, 2 malformed configuration.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok((cfg, out)) => {
            let ok = out.ok;
            if let Err(e) = emit(&cli, &cfg, out) {
                eprintln!("error: {e}");
                return e.exit_code();
            }
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
