//! Run reports and the exit-code taxonomy shared by every command.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use stableset::SolveStatus;

/// Process exit codes. Every command maps its outcome onto this table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exit {
    /// Verified result: independent witness, clean fit or verification.
    Ok,
    /// Unexpected internal error.
    Internal,
    /// Bad flags, unreadable or unparsable input.
    Usage,
    /// No recognized set: fractional runs, unconfirmed sweeps.
    Unconfirmed,
    /// Empty polytope or infeasible fitting model.
    Infeasible,
    /// A solver stopped short: iteration or node budget, numerical failure.
    NotConverged,
    /// Parameters violate rows of the fitting model.
    Violations,
}

impl Exit {
    pub fn code(self) -> u8 {
        match self {
            Exit::Ok => 0,
            Exit::Internal => 1,
            Exit::Usage => 2,
            Exit::Unconfirmed => 3,
            Exit::Infeasible => 4,
            Exit::NotConverged => 5,
            Exit::Violations => 6,
        }
    }

    pub fn of_solve(s: SolveStatus) -> Exit {
        match s {
            SolveStatus::IntegerFound => Exit::Ok,
            SolveStatus::Fractional => Exit::Unconfirmed,
            SolveStatus::Infeasible | SolveStatus::InfeasibleFit => Exit::Infeasible,
            SolveStatus::NotConverged | SolveStatus::NumericalFailure => Exit::NotConverged,
            SolveStatus::Failed => Exit::Internal,
        }
    }
}

/// Input errors exit with [`Exit::Usage`]; anything else is internal.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

/// Reads a file and records its SHA-256 under `role`.
pub fn read_input(path: &Path, role: &str, digests: &mut BTreeMap<String, String>) -> Result<String, InputError> {
    let bytes = std::fs::read(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    digests.insert(role.to_string(), format!("sha256:{}", hex::encode(Sha256::digest(&bytes))));
    String::from_utf8(bytes).map_err(|_| InputError(format!("{}: not UTF-8 text", path.display())))
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
}

/// What every command prints: the command line, digests of its input
/// files, a status word, the outcome payload and timings.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: BTreeMap<String, String>,
    pub status: String,
    pub exit_code: u8,
    pub outcome: serde_json::Value,
    pub timings: Timings,
    /// `key=value` lines for the text format.
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl RunReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str(&format!("status={}\n", self.status));
        for (role, d) in &self.inputs {
            out.push_str(&format!("input.{role}={d}\n"));
        }
        out.push_str(&format!("command={}\n", self.command.join(" ")));
        out.push_str(&format!("seconds={:.3}\n", self.timings.total_seconds));
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
