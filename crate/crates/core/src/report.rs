//! Clause-by-clause verification results shared by every verifier.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// The outcome of checking an explicit witness. Verified iff every clause
/// passes; a failing clause is a refutation of the witness, not of the
/// property.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Verification {
    pub clauses: Vec<Clause>,
}

impl Verification {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clause(&mut self, name: &str, pass: bool, detail: impl Into<String>) -> &mut Self {
        self.clauses.push(Clause {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
        self
    }

    pub fn is_verified(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Clause> + '_ {
        self.clauses.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }

    pub fn absorb(&mut self, prefix: &str, other: Verification) {
        for c in other.clauses {
            self.clauses.push(Clause {
                name: alloc::format!("{prefix}.{}", c.name),
                ..c
            });
        }
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            writeln!(f, "{mark} {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}
