//! Subcommands that write files into the output directory.

pub mod basis;
pub mod dyson;
pub mod propagate;
pub mod scatter;

use std::path::PathBuf;

use qscatter::scattering::SFamily;
use qscatter::{Geometry, KernelVariant, SMatrixFamily};

use crate::config::{ConfigError, Scenario};
use crate::report::Status;
use crate::{verify as suite, CliError, Command};

/// Collects the files a command writes, in order.
pub struct Output {
    pub dir: PathBuf,
    pub written: Vec<String>,
}

impl Output {
    pub fn new(dir: PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(dir.clone(), e))?;
        Ok(Self {
            dir,
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Io(path.clone(), e))?;
        self.written.push(path.display().to_string());
        Ok(())
    }

    pub fn write_json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
        self.write(name, &text)
    }
}

/// File-name form of a family or variant label: `~S2-'` becomes
/// `tilde_S2_minus_prime`.
pub fn slug(label: &str) -> String {
    let mut out = String::new();
    for c in label.chars() {
        match c {
            '~' => out.push_str("tilde_"),
            '*' => out.push_str("_star"),
            '\'' => out.push_str("_prime"),
            '+' => out.push_str("_plus"),
            '-' => out.push_str("_minus"),
            c if c.is_ascii_alphanumeric() => out.push(c),
            _ => out.push('_'),
        }
    }
    out
}

pub fn all_sfamilies() -> Vec<SFamily> {
    SMatrixFamily::ALL
        .iter()
        .flat_map(|&f| [SFamily::plain(f), SFamily::tilde(f)])
        .collect()
}

pub fn all_variants() -> Vec<KernelVariant> {
    [Geometry::G1, Geometry::G2]
        .into_iter()
        .flat_map(KernelVariant::all_for)
        .collect()
}

fn accepted_only(command: Command) -> Vec<String> {
    match command {
        Command::Basis => vec!["G1".into(), "G2".into()],
        Command::Propagate => all_variants().iter().map(|v| v.to_string()).collect(),
        Command::Scatter => all_sfamilies().iter().map(|f| f.to_string()).collect(),
        Command::Dyson => SMatrixFamily::ALL.iter().map(|&f| SFamily::plain(f).to_string()).collect(),
        Command::Verify => suite::GROUPS.iter().map(|g| g.to_string()).collect(),
    }
}

/// Rejects an `--only` value the command does not know.
pub fn check_only(command: Command, only: Option<&str>) -> Result<(), ConfigError> {
    let Some(o) = only else { return Ok(()) };
    let accepted = accepted_only(command);
    if accepted.iter().any(|a| a == o) {
        Ok(())
    } else {
        Err(ConfigError {
            field: "only".into(),
            message: format!("unknown selector {o:?}; expected one of {}", accepted.join(", ")),
        })
    }
}

pub fn selected(only: Option<&str>, label: &str) -> bool {
    only.is_none_or(|o| o == label)
}

/// Eps-sweep index used in file names.
pub fn eps_tag(k: usize) -> String {
    format!("eps{k}")
}

pub fn verify(scn: &Scenario, only: Option<&str>, out: &mut Output) -> Result<(), CliError> {
    let report = suite::run(scn, only);
    out.write("report.json", &report.to_json())?;
    for c in &report.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ExpectedFail => "XFAIL",
        };
        println!("{tag} {} measured={:.3e} tolerance={:.3e}", c.name, c.measured, c.tolerance);
    }
    let failed: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Checks(failed))
    }
}
