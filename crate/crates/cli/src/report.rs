//! Reports: a verdict, its clauses, notes and provenance.

use std::fmt::Write as _;

use coarsekit_core::Verification;
use sha2::{Digest, Sha256};

use crate::doc::{ClauseDoc, Document, InputDigest, Provenance, ReportDoc, Verdict, VERSION};

pub fn digest(role: &str, path: &str, bytes: &[u8]) -> InputDigest {
    InputDigest {
        role: role.into(),
        path: path.into(),
        sha256: hex::encode(Sha256::digest(bytes)),
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    pub clauses: Vec<ClauseDoc>,
    pub notes: Vec<String>,
    pub data: Option<serde_json::Value>,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
}

impl Report {
    pub fn new(command: impl Into<String>, verdict: Verdict) -> Self {
        Report {
            command: command.into(),
            verdict,
            clauses: Vec::new(),
            notes: Vec::new(),
            data: None,
            inputs: Vec::new(),
            seed: None,
        }
    }

    /// Verified iff every clause passes, refuted otherwise.
    pub fn verification(command: impl Into<String>, v: &Verification) -> Self {
        let verdict = if v.is_verified() {
            Verdict::Verified
        } else {
            Verdict::Refuted
        };
        let mut r = Report::new(command, verdict);
        r.absorb("", v);
        r
    }

    pub fn absorb(&mut self, prefix: &str, v: &Verification) {
        for c in &v.clauses {
            self.clauses.push(ClauseDoc {
                name: format!("{prefix}{}", c.name),
                pass: c.pass,
                detail: c.detail.clone(),
            });
        }
    }

    pub fn clause(
        &mut self,
        name: impl Into<String>,
        pass: bool,
        detail: impl Into<String>,
    ) -> &mut Self {
        self.clauses.push(ClauseDoc {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn to_doc(&self) -> ReportDoc {
        ReportDoc {
            kind: "report".into(),
            version: VERSION.into(),
            command: self.command.clone(),
            verdict: self.verdict,
            clauses: self.clauses.clone(),
            notes: self.notes.clone(),
            data: self.data.clone(),
            provenance: Provenance {
                tool_version: env!("CARGO_PKG_VERSION").into(),
                inputs: self.inputs.clone(),
                seed: self.seed,
            },
        }
    }

    pub fn structured(&self) -> String {
        crate::doc::emit_document(&Document::Report(self.to_doc()))
    }

    pub fn text(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Verified => "verified",
            Verdict::Refuted => "refuted",
            Verdict::UndecidedAtTruncation => "undecided at truncation",
        };
        let mut out = format!("{}: {verdict}\n", self.command);
        for c in &self.clauses {
            let mark = if c.pass { "pass" } else { "FAIL" };
            let _ = writeln!(out, "  {mark}  {}: {}", c.name, c.detail);
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        if let Some(data) = &self.data {
            let body = serde_json::to_string_pretty(data).expect("json values serialize");
            let _ = writeln!(out, "  data:");
            for line in body.lines() {
                let _ = writeln!(out, "    {line}");
            }
        }
        out
    }
}
