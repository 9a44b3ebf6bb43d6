//! Audits of a frozen run snapshot, and brute-force oracles for the finite
//! type calculus.
//!
//! Every audit is a pure function of a [`RunSnapshot`]; the host adapter is
//! rebuilt from its recorded name and used only as an oracle for `A`.

mod ac;
mod action;
mod faults;
mod forcing;
mod genericity;
mod minimality;
mod oracles;
mod uniqueness;
mod view;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::io::RunSnapshot;

pub use ac::audit_ac_props;
pub use action::WordAction;
pub use faults::{inject, Fault, FAULTS};
pub use forcing::{forcing_certificates, plain_generic, ForcingCase};
pub use genericity::audit_genericity;
pub use minimality::audit_minimality;
pub use oracles::{oracle_suite, oracle_suite_with, Calculus};
pub use uniqueness::{audit_uniqueness, rigidity_check};
pub use view::View;

/// One failed check with the smallest evidence found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub clause: String,
    pub elements: Vec<String>,
    pub relations: Vec<String>,
    pub detail: String,
}

impl Failure {
    pub fn new(clause: &str, detail: impl Into<String>) -> Self {
        Failure {
            clause: clause.to_string(),
            elements: vec![],
            relations: vec![],
            detail: detail.into(),
        }
    }

    pub fn with_elements(mut self, els: impl IntoIterator<Item = String>) -> Self {
        self.elements.extend(els);
        self
    }

    pub fn with_relations(mut self, rels: impl IntoIterator<Item = String>) -> Self {
        self.relations.extend(rels);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub audit: String,
    pub stages: (u32, u32),
    pub checks: u64,
    pub failures: Vec<Failure>,
    pub pending: Vec<String>,
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn new(audit: &str, stages: (u32, u32)) -> Self {
        AuditReport {
            audit: audit.to_string(),
            stages,
            checks: 0,
            failures: vec![],
            pending: vec![],
            notes: vec![],
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Counts one check, recording `f` if it failed.
    pub fn check(&mut self, ok: bool, f: impl FnOnce() -> Failure) {
        self.checks += 1;
        if !ok {
            self.failures.push(f());
        }
    }

    pub fn fail(&mut self, f: Failure) {
        self.checks += 1;
        self.failures.push(f);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Ac,
    Minimality,
    Genericity,
    Uniqueness,
    Oracles,
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "all" => Suite::All,
            "ac" => Suite::Ac,
            "minimality" => Suite::Minimality,
            "genericity" => Suite::Genericity,
            "uniqueness" => Suite::Uniqueness,
            "oracles" => Suite::Oracles,
            _ => return Err(format!("unknown suite {s}")),
        })
    }
}

/// Oracle suite size used by [`run_suite`].
pub const ORACLE_N_MAX: usize = 3;

/// Runs the audits named by `suite` on a snapshot.
pub fn run_suite(snap: &RunSnapshot, suite: Suite) -> Vec<AuditReport> {
    let mut out = vec![];
    let want = |s: Suite| suite == Suite::All || suite == s;
    if want(Suite::Ac) {
        out.push(audit_ac_props(snap));
    }
    if want(Suite::Minimality) {
        out.push(audit_minimality(snap));
    }
    if want(Suite::Genericity) {
        out.push(audit_genericity(snap, snap.config.support_bound));
    }
    if want(Suite::Uniqueness) {
        out.push(audit_uniqueness(snap));
    }
    if want(Suite::Oracles) {
        out.push(oracle_suite(ORACLE_N_MAX));
    }
    out
}
