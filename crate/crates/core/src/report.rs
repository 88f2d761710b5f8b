//! Identity-check reports. Every checker evaluates all basis tuples and
//! records each failure with its witness instead of stopping at the first.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub witness: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub identity: String,
    pub tested: usize,
    pub failures: Vec<Failure>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Record one evaluated case; a mismatch is stored with its witness.
    pub fn compare<T: PartialEq + fmt::Display>(&mut self, witness: &[&str], lhs: &T, rhs: &T) -> bool {
        self.tested += 1;
        if lhs == rhs {
            return true;
        }
        self.failures.push(Failure {
            witness: witness.iter().map(|s| s.to_string()).collect(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        });
        false
    }

    /// Record a pass/fail case with free-form sides.
    pub fn record(&mut self, witness: &[&str], ok: bool, lhs: impl Into<String>, rhs: impl Into<String>) -> bool {
        self.tested += 1;
        if !ok {
            self.failures.push(Failure {
                witness: witness.iter().map(|s| s.to_string()).collect(),
                lhs: lhs.into(),
                rhs: rhs.into(),
            });
        }
        ok
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub subject: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Report {
        Report { subject: subject.into(), checks: Vec::new(), notes: Vec::new() }
    }

    /// Start a new named identity and return it for recording cases.
    pub fn begin(&mut self, identity: &str) -> &mut Check {
        self.checks.push(Check { identity: identity.to_string(), tested: 0, failures: Vec::new() });
        self.checks.last_mut().unwrap()
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn has_note(&self, note: &str) -> bool {
        self.notes.iter().any(|n| n == note)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failure_count(&self) -> usize {
        self.checks.iter().map(|c| c.failures.len()).sum()
    }

    pub fn failed_identities(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.identity.as_str()).collect()
    }

    pub fn get(&self, identity: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.identity == identity)
    }

    /// True when the named identity was evaluated and failed.
    pub fn fails(&self, identity: &str) -> bool {
        self.get(identity).map_or(false, |c| !c.passed())
    }

    /// Merge another report's checks, prefixing identities.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            if !prefix.is_empty() {
                c.identity = format!("{prefix}/{}", c.identity);
            }
            self.checks.push(c);
        }
        self.notes.extend(other.notes);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.subject, if self.passed() { "ok" } else { "FAILED" })?;
        for c in &self.checks {
            let status = if c.passed() { "pass" } else { "FAIL" };
            let noun = if c.tested == 1 { "case" } else { "cases" };
            writeln!(f, "  {status} {} ({} {noun})", c.identity, c.tested)?;
            for fl in &c.failures {
                writeln!(f, "    at ({}): {} != {}", fl.witness.join(","), fl.lhs, fl.rhs)?;
            }
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
