//! Command-line driver: scenario configuration, file outputs and the
//! verification suite.

pub mod commands;
pub mod config;
pub mod report;
pub mod verify;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{ConfigError, Scenario, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(name = "qscatter", version, about = "q-deformed scattering on the braided line")]
pub struct Cli {
    /// Scenario JSON; every field is optional.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding the configured one.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Restrict a command to one family, variant, geometry or check group.
    #[arg(long, global = true)]
    pub only: Option<String>,
    /// Also build the truncated q-exponential basis.
    #[arg(long, global = true)]
    pub qexp: bool,
    /// Print the default configuration and exit.
    #[arg(long)]
    pub print_defaults: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Eigenbases of both geometries and their spectra.
    Basis,
    /// Free propagator kernel dumps.
    Propagate,
    /// Resolvent-route S- and T-matrices over the eps sweep.
    Scatter,
    /// Interaction-picture S-matrices, coefficients and drift.
    Dyson,
    /// Run the invariant suite.
    Verify,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numeric(qscatter::Error),
    Io(PathBuf, std::io::Error),
    /// Names of failed checks.
    Checks(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Checks(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(..) => 4,
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> String {
        let v = match self {
            CliError::Config(e) => serde_json::json!({"error": "config", "field": e.field, "message": e.message}),
            CliError::Numeric(e) => serde_json::json!({"error": "numeric", "message": e.to_string()}),
            CliError::Io(p, e) => serde_json::json!({"error": "io", "path": p.display().to_string(), "message": e.to_string()}),
            CliError::Checks(names) => serde_json::json!({"error": "check", "failed": names}),
        };
        v.to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<qscatter::Error> for CliError {
    fn from(e: qscatter::Error) -> Self {
        CliError::Numeric(e)
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    if cli.print_defaults {
        print!("{}", ScenarioConfig::default().to_json());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(ConfigError {
            field: "command".into(),
            message: "expected one of basis, propagate, scatter, dyson, verify".into(),
        }
        .into());
    };
    let config = match &cli.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&config.out));
    let only = cli.only.as_deref();
    commands::check_only(command, only)?;
    let scenario = Scenario::build(&config)?;
    let mut sink = commands::Output::new(out)?;
    match command {
        Command::Basis => commands::basis::run(&scenario, only, cli.qexp, &mut sink)?,
        Command::Propagate => commands::propagate::run(&scenario, only, &mut sink)?,
        Command::Scatter => commands::scatter::run(&scenario, only, &mut sink)?,
        Command::Dyson => commands::dyson::run(&scenario, only, &mut sink)?,
        Command::Verify => commands::verify(&scenario, only, &mut sink)?,
    }
    for f in &sink.written {
        println!("{f}");
    }
    Ok(())
}
