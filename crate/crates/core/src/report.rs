//! Verification reports: one check per line in text form, or a JSON document
//! `{version, seed, suites}`.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub const REPORT_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl CheckStatus {
    pub fn label(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub expected: String,
    pub actual: String,
    pub precision_digits: u32,
    pub elapsed_ms: u64,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: impl Into<String>, actual: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            expected: expected.into(),
            actual: actual.into(),
            precision_digits: 1,
            elapsed_ms: 0,
        }
    }

    /// Pass when the rendered values agree.
    pub fn eq(name: impl Into<String>, expected: impl Into<String>, actual: impl Into<String>) -> Self {
        let (e, a) = (expected.into(), actual.into());
        let ok = e == a;
        Check::new(name, e, a, ok)
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: CheckStatus::Skipped,
            expected: String::new(),
            actual: reason.into(),
            precision_digits: 0,
            elapsed_ms: 0,
        }
    }

    pub fn with_precision(mut self, digits: u32) -> Self {
        self.precision_digits = digits;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// Runs `f`, stamping every returned check with the elapsed time.
pub fn timed<F: FnOnce() -> Vec<Check>>(f: F) -> Vec<Check> {
    let start = Instant::now();
    let mut checks = f();
    let ms = start.elapsed().as_millis() as u64;
    for c in &mut checks {
        c.elapsed_ms = ms;
    }
    checks
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub prime: u32,
    pub checks: Vec<Check>,
    pub overall: CheckStatus,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, prime: u32, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let overall = if checks.iter().all(|c| c.status != CheckStatus::Fail) {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        SuiteReport { suite: suite.into(), prime, checks, overall }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn new(seed: u64, suites: Vec<SuiteReport>) -> Self {
        Report { version: REPORT_VERSION.to_string(), seed, suites }
    }

    pub fn all_pass(&self) -> bool {
        self.suites.iter().all(|s| s.overall == CheckStatus::Pass)
    }

    pub fn suite(&self, name: &str, prime: u32) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == name && s.prime == prime)
    }

    /// Zeroes timings so reports can be compared byte for byte.
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        for s in &mut out.suites {
            for c in &mut s.checks {
                c.elapsed_ms = 0;
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let _ = writeln!(out, "== {} (p = {}): {}", s.suite, s.prime, s.overall.label());
            for c in &s.checks {
                let _ = write!(out, "[{}] {}: {}", c.status.label(), c.name, c.actual);
                if c.status == CheckStatus::Fail {
                    let _ = write!(out, " (expected {})", c.expected);
                }
                out.push('\n');
            }
        }
        let passed: usize = self.suites.iter().map(|s| s.checks.iter().filter(|c| c.passed()).count()).sum();
        let total: usize = self.suites.iter().map(|s| s.checks.iter().filter(|c| c.status != CheckStatus::Skipped).count()).sum();
        let _ = writeln!(out, "{passed}/{total} checks passed (seed {})", self.seed);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_ignores_skipped() {
        let s = SuiteReport::new("x", 3, vec![Check::eq("b", "1", "1"), Check::skipped("a", "not run")]);
        assert_eq!(s.overall, CheckStatus::Pass);
        assert_eq!(s.checks[0].name, "a");
        let s = SuiteReport::new("x", 3, vec![Check::eq("b", "1", "2")]);
        assert_eq!(s.overall, CheckStatus::Fail);
    }

    #[test]
    fn json_round_trip() {
        let r = Report::new(7, vec![SuiteReport::new("x", 5, vec![Check::eq("c", "v3 * alpha^116", "v3 * alpha^116")])]);
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_json().contains("\"status\": \"pass\""));
    }
}
