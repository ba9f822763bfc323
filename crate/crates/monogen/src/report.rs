use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use monogen_core::Check;
use serde::{Deserialize, Serialize};

use crate::io::{self, Format};
use crate::{Error, ExperimentConfig};

pub const TOOL: &str = "monogen";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// The merged configuration the run actually used.
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    /// Command-specific results (winding reports, Betti numbers, ...).
    pub results: serde_json::Value,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
    pub passed: bool,
}

impl RunReport {
    pub fn new(command: &str, config: ExperimentConfig) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            config,
            checks: Vec::new(),
            results: serde_json::Value::Null,
            outputs: Vec::new(),
            wall_clock_seconds: 0.0,
            passed: true,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    /// Human-readable table of the checks.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
        for c in &self.checks {
            let tol = c.tolerance.filter(|_| !c.expected.starts_with(['<', '>'])).map(|t| format!("  (tol {t:e})")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{} {:width$}  computed {}  expected {}{tol}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.computed,
                c.expected,
            );
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(
            out,
            "{}: {} checks, {failed} failed, {:.3} s",
            self.command,
            self.checks.len(),
            self.wall_clock_seconds
        );
        out
    }

    /// Writes `<command>.report.json` and `<command>.checks.<fmt>` into
    /// `dir`, returning the report path.
    pub fn write(&mut self, dir: &Path, format: Format) -> Result<PathBuf, Error> {
        let checks = dir.join(format!("{}.checks.{}", self.command, format.extension()));
        io::write_records(&checks, &self.checks, format)?;
        let path = dir.join(format!("{}.report.json", self.command));
        self.outputs.push(checks);
        self.outputs.push(path.clone());
        io::write_json(&path, self)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_checks() {
        let mut r = RunReport::new("x", ExperimentConfig::default());
        r.push(Check::exact("a", 1, 1));
        assert_eq!(r.exit_code(), 0);
        r.push(Check::within("b", 1.0, 1.5, 0.1));
        assert_eq!(r.exit_code(), 1);
        r.push(Check::exact("c", 2, 2));
        assert_eq!(r.exit_code(), 1);
        assert!(r.table().contains("FAIL b"));
    }
}
