//! Run artifacts and poset exchange formats.
//!
//! A [`RunSnapshot`] is everything audits read: elements with provenance and
//! recorded footprints, the full strict-order table, the `N` truncation with
//! its certificates, and the stage and task ledgers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{
    Foot, Point, RunConfig, RunOutcome, StageRoute, StarClaim, Support, TaskRecord,
};
use crate::moiety::{Certificates, MoietyHandle, Sort};
use crate::poset::{ElemId, FinitePoset, PosetError};
use crate::types::{LimitDescriptor, LimitMode};

pub const SNAPSHOT_FORMAT: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("corrupt artifact: {0}")]
    CorruptArtifact(String),
    #[error("stage {stage} out of range (last frozen stage is {last})")]
    StageOutOfRange { stage: u32, last: u32 },
    #[error(transparent)]
    Poset(#[from] PosetError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub label: String,
    pub point: Point,
    pub stage: u32,
    pub support: Option<Support>,
    /// Recorded `m⁻ ∩ S`.
    pub low_s: Foot,
    /// Recorded `m⁺ ∩ S`.
    pub up_s: Foot,
    pub a0_cert: Vec<u64>,
    pub c_cert: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub index: u32,
    #[serde(flatten)]
    pub route: StageRoute,
    pub rep: Option<Point>,
    pub frozen_at: usize,
    pub complete: bool,
    pub members: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoietyRecord {
    pub chi: Vec<Sort>,
    pub lt: Vec<(ElemId, ElemId)>,
    /// `N` node of `s_j`, by `j`.
    pub s_nodes: Vec<ElemId>,
    pub handles: Vec<MoietyHandle>,
    pub certificates: Certificates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSnapshot {
    pub format: u32,
    pub config: RunConfig,
    pub host: String,
    pub mode: LimitMode,
    pub descriptor: LimitDescriptor,
    pub window: Vec<Point>,
    pub elements: Vec<ElementRecord>,
    /// `(i, j)` with `elements[i] < elements[j]`.
    pub lt: Vec<(usize, usize)>,
    pub stages: Vec<StageRecord>,
    pub tasks: Vec<TaskRecord>,
    pub star_claims: Vec<StarClaim>,
    pub moiety: MoietyRecord,
    pub fingerprints: Vec<MoietyHandle>,
    pub exhausted: bool,
}

impl RunSnapshot {
    pub fn capture(out: &RunOutcome) -> Self {
        let u = &out.universe;
        let elements = u
            .elements()
            .iter()
            .map(|&p| ElementRecord {
                label: p.to_string(),
                point: p,
                stage: u.stage_of(p),
                support: u.support(p).cloned(),
                low_s: u.low_s(p),
                up_s: u.up_s(p),
                a0_cert: u.a0_cert(p).into_iter().collect(),
                c_cert: u.c_cert(p).map(|c| c.into_iter().collect()),
            })
            .collect();
        let stages = u
            .stages()
            .iter()
            .map(|s| StageRecord {
                index: s.index,
                route: s.route,
                rep: s.rep,
                frozen_at: s.frozen_at,
                complete: s.complete,
                members: u.materialized_orbit(s.index),
            })
            .collect();
        let e = u.engine();
        RunSnapshot {
            format: SNAPSHOT_FORMAT,
            config: out.config.clone(),
            host: u.host().name(),
            mode: out.mode,
            descriptor: u.descriptor(),
            window: out.window.clone(),
            elements,
            lt: u.lt_index_pairs(u.elements().len()),
            stages,
            tasks: out.tasks.clone(),
            star_claims: out.star_claims.clone(),
            moiety: MoietyRecord {
                chi: e.chi().to_vec(),
                lt: e.lt_pairs_upto(e.len()),
                s_nodes: e.n1_points().to_vec(),
                handles: e.handles().to_vec(),
                certificates: e.certificates(),
            },
            fingerprints: u.fingerprint_set().iter().copied().collect(),
            exhausted: out.exhausted,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshot serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, IoError> {
        let snap: RunSnapshot =
            serde_json::from_str(s).map_err(|e| IoError::CorruptArtifact(e.to_string()))?;
        if snap.format != SNAPSHOT_FORMAT {
            return Err(IoError::CorruptArtifact(format!(
                "unsupported format {}",
                snap.format
            )));
        }
        let n = snap.elements.len();
        if snap.lt.iter().any(|&(i, j)| i >= n || j >= n) {
            return Err(IoError::CorruptArtifact(
                "order table index out of range".into(),
            ));
        }
        Ok(snap)
    }

    pub fn last_stage(&self) -> u32 {
        self.stages.len().saturating_sub(1) as u32
    }

    /// Number of elements in the truncation frozen at `stage`.
    pub fn stage_len(&self, stage: u32) -> Result<usize, IoError> {
        self.stages
            .get(stage as usize)
            .map(|s| s.frozen_at)
            .ok_or(IoError::StageOutOfRange {
                stage,
                last: self.last_stage(),
            })
    }

    /// The truncation frozen at `stage`, with element ids equal to positions.
    pub fn stage_poset(&self, stage: u32) -> Result<FinitePoset, IoError> {
        let n = self.stage_len(stage)?;
        let pairs: Vec<(ElemId, ElemId)> = self
            .lt
            .iter()
            .filter(|&&(i, j)| i < n && j < n)
            .map(|&(i, j)| (i as ElemId, j as ElemId))
            .collect();
        Ok(FinitePoset::transitive_close(
            (0..n as ElemId).collect(),
            &pairs,
        )?)
    }
}

/// Exchange format for a finite poset: ids, optional labels, Hasse edges and
/// optional sort labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<ElemId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    pub lt: Vec<(ElemId, ElemId)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<BTreeMap<ElemId, String>>,
}

impl PosetJson {
    pub fn from_poset(p: &FinitePoset) -> Self {
        PosetJson {
            elements: p.elements().to_vec(),
            labels: vec![],
            lt: p.hasse_edges(),
            chi: None,
        }
    }

    pub fn to_poset(&self) -> Result<FinitePoset, IoError> {
        Ok(FinitePoset::transitive_close(
            self.elements.clone(),
            &self.lt,
        )?)
    }
}

fn sort_of(p: Point) -> &'static str {
    match p {
        Point::A(_) => "A",
        Point::R(_) => "R",
        Point::S(_) => "S",
        Point::T(_) => "T",
        Point::C(_) => "C",
    }
}

/// JSON truncation of a run at `stage`, with element sorts.
pub fn export_json(snap: &RunSnapshot, stage: u32) -> Result<PosetJson, IoError> {
    let p = snap.stage_poset(stage)?;
    let n = p.len();
    let els = &snap.elements[..n];
    Ok(PosetJson {
        elements: p.elements().to_vec(),
        labels: els.iter().map(|e| e.label.clone()).collect(),
        lt: p.hasse_edges(),
        chi: Some(
            els.iter()
                .enumerate()
                .map(|(i, e)| (i as ElemId, sort_of(e.point).to_string()))
                .collect(),
        ),
    })
}

/// Hasse diagram of the truncation at `stage`, colored by sort.
pub fn export_dot(snap: &RunSnapshot, stage: u32) -> Result<String, IoError> {
    let p = snap.stage_poset(stage)?;
    let mut out = String::from("digraph P {\n  rankdir=BT;\n  node [style=filled];\n");
    for (i, e) in snap.elements[..p.len()].iter().enumerate() {
        let (color, shape) = match e.point {
            Point::A(_) => ("lightgray", "ellipse"),
            Point::R(_) => ("salmon", "box"),
            Point::S(_) => ("lightblue", "box"),
            Point::T(_) => ("palegreen", "diamond"),
            Point::C(_) => ("khaki", "ellipse"),
        };
        let _ = writeln!(
            out,
            "  n{i} [label=\"{} ({})\", fillcolor={color}, shape={shape}];",
            e.label, e.stage
        );
    }
    for (x, y) in p.hasse_edges() {
        let _ = writeln!(out, "  n{x} -> n{y};");
    }
    out.push_str("}\n");
    Ok(out)
}
