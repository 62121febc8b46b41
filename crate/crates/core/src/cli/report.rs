//! Check reports shared by every subcommand.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::GravError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The check could not run; `error_code` says why.
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_code: Option<&'static str>,
    #[serde(skip)]
    exit_code: i32,
}

impl Check {
    /// Passes when `measured ≤ tolerance` (NaN fails).
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64, note: impl Into<String>) -> Self {
        let status = if measured <= tolerance { Status::Pass } else { Status::Fail };
        Self {
            name: name.into(),
            status,
            measured: Some(measured),
            tolerance: Some(tolerance),
            note: note.into(),
            error_code: None,
            exit_code: 0,
        }
    }

    /// Passes when `pass` holds; `measured` is informational.
    pub fn holds(name: impl Into<String>, pass: bool, measured: Option<f64>, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            measured,
            tolerance: None,
            note: note.into(),
            error_code: None,
            exit_code: 0,
        }
    }

    pub fn error(name: impl Into<String>, err: &GravError) -> Self {
        Self {
            name: name.into(),
            status: Status::Error,
            measured: None,
            tolerance: None,
            note: err.to_string(),
            error_code: Some(err.code()),
            exit_code: err.exit_code(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub d: usize,
    pub checks: Vec<Check>,
    /// Free-form result lines (tables, degree lines, fitted values).
    pub lines: Vec<String>,
    /// Files written under the output directory.
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn new(command: &str, seed: u64, d: usize) -> Self {
        Self { command: command.into(), seed, d, checks: Vec::new(), lines: Vec::new(), artifacts: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Runs `f` and records its check, or the error it returned.
    pub fn run(&mut self, name: &str, f: impl FnOnce() -> crate::Result<Check>) {
        let c = f().unwrap_or_else(|e| Check::error(name, &e));
        self.push(c);
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// 0 when every check passes; otherwise the code of the first errored
    /// check, or 1 for a plain failure.
    pub fn exit_code(&self) -> i32 {
        if let Some(c) = self.checks.iter().find(|c| c.status == Status::Error) {
            return c.exit_code;
        }
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "gravham {} (d = {}, seed = {})", self.command, self.d, self.seed);
        for l in &self.lines {
            let _ = writeln!(s, "  {l}");
        }
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            let _ = write!(s, "{status:<5} {}", c.name);
            if let Some(m) = c.measured {
                let _ = write!(s, "  measured {m:.3e}");
            }
            if let Some(t) = c.tolerance {
                let _ = write!(s, "  tol {t:.1e}");
            }
            if let Some(code) = c.error_code {
                let _ = write!(s, "  [{code}]");
            }
            if !c.note.is_empty() {
                let _ = write!(s, "  ({})", c.note);
            }
            s.push('\n');
        }
        for a in &self.artifacts {
            let _ = writeln!(s, "wrote {a}");
        }
        let _ = writeln!(s, "exit {}", self.exit_code());
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        let mut r = Report::new("t", 7, 4);
        r.push(Check::at_most("a", 1e-12, 1e-10, ""));
        assert_eq!(r.exit_code(), 0);
        r.push(Check::at_most("b", f64::NAN, 1e-10, ""));
        assert_eq!(r.exit_code(), 1);
        r.run("c", || Err(GravError::DimensionTooSmall { d: 2, min: 3 }));
        assert_eq!(r.exit_code(), 2);
        assert!(r.to_text().contains("ERROR c"));
        assert!(r.to_json().contains("\"error_code\": \"DimensionTooSmall\""));
    }
}
