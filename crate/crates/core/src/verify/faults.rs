use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::View;
use crate::chain::{Foot, Point, StarKind};
use crate::io::RunSnapshot;
use crate::moiety::HandleKind;

/// A seeded violation written into a copy of a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// One `s < m` pair of the order table is reversed.
    FlippedRelation,
    /// One recorded `m⁻ ∩ S` is replaced by another moiety.
    ForgedFingerprint,
    /// The support of a stabilizer-controlled point loses its atoms.
    BrokenStabilizer,
    /// `r₀` is put above every materialized point of `V_p`.
    FullVpBelow,
}

/// The three violation classes each audit is expected to catch.
pub const FAULTS: [Fault; 3] = [
    Fault::FlippedRelation,
    Fault::ForgedFingerprint,
    Fault::BrokenStabilizer,
];

impl Fault {
    /// Audit expected to report the fault.
    pub fn audit(self) -> &'static str {
        match self {
            Fault::FlippedRelation | Fault::ForgedFingerprint => "ac_props",
            Fault::BrokenStabilizer => "uniqueness",
            Fault::FullVpBelow => "minimality",
        }
    }
}

fn flip(snap: &mut RunSnapshot) -> bool {
    let k = snap.lt.iter().rposition(|&(i, j)| {
        snap.elements[i].point.is_s() && matches!(snap.elements[j].point, Point::C(_))
    });
    let Some(k) = k else { return false };
    let (i, j) = snap.lt[k];
    snap.lt[k] = (j, i);
    true
}

fn forge(snap: &mut RunSnapshot) -> bool {
    let (target, forged) = {
        let v = View::new(snap);
        let sigma: Vec<_> = snap
            .moiety
            .handles
            .iter()
            .copied()
            .filter(|h| h.kind == HandleKind::Sigma)
            .collect();
        let mut found = None;
        'outer: for i in (0..v.len()).rev() {
            let Some(h) = snap.elements[i].low_s.as_handle() else {
                continue;
            };
            for &h2 in &sigma {
                if h2 != h && v.s_points().any(|(j, _)| v.member(h, j) != v.member(h2, j)) {
                    found = Some((
                        i,
                        Foot::Parts {
                            points: BTreeSet::new(),
                            handles: [h2].into(),
                        },
                    ));
                    break 'outer;
                }
            }
            let outside = v.s_points().find(|&(j, _)| !v.member(h, j));
            if let Some((j, _)) = outside {
                found = Some((
                    i,
                    Foot::Parts {
                        points: [j].into(),
                        handles: BTreeSet::new(),
                    },
                ));
                break;
            }
        }
        match found {
            Some(f) => f,
            None => return false,
        }
    };
    snap.elements[target].low_s = forged;
    true
}

fn break_stabilizer(snap: &mut RunSnapshot) -> bool {
    let point = {
        let v = View::new(snap);
        let Some(host) = v.host.as_deref() else {
            return false;
        };
        let moved =
            |a: u64| (0..host.generator_count()).any(|g| host.apply_generator(g, false, a) != a);
        let claims = || {
            snap.star_claims
                .iter()
                .filter(|c| c.atoms.iter().any(|&a| moved(a)))
        };
        let claim = claims()
            .find(|c| c.kind == StarKind::Atom)
            .or_else(|| claims().next());
        match claim {
            Some(c) => c.point,
            None => return false,
        }
    };
    let Some(e) = snap.elements.iter_mut().find(|e| e.point == point) else {
        return false;
    };
    let Some(s) = e.support.as_mut() else {
        return false;
    };
    let atom = |p: &Point| matches!(p, Point::A(_) | Point::T(_));
    let before = s.u.len() + s.w.len();
    s.u.retain(|p| !atom(p));
    s.w.retain(|p| !atom(p));
    s.u.len() + s.w.len() < before
}

fn full_vp_below(snap: &mut RunSnapshot) -> bool {
    let (r0, below) = {
        let v = View::new(snap);
        let Some(r0) = v.pos(Point::R(0)) else {
            return false;
        };
        let below: Vec<usize> = (0..v.len())
            .filter(|&k| match v.point(k) {
                Point::A(a) => v.in_v(a) == Some(true) && !v.lt(k, r0),
                _ => false,
            })
            .collect();
        (r0, below)
    };
    if below.is_empty() {
        return false;
    }
    snap.lt.extend(below.into_iter().map(|k| (k, r0)));
    snap.elements[r0].c_cert = None;
    true
}

/// A copy of `snap` carrying `fault`, or `None` if the snapshot has no
/// place to put it.
pub fn inject(snap: &RunSnapshot, fault: Fault) -> Option<RunSnapshot> {
    let mut out = snap.clone();
    let done = match fault {
        Fault::FlippedRelation => flip(&mut out),
        Fault::ForgedFingerprint => forge(&mut out),
        Fault::BrokenStabilizer => break_stabilizer(&mut out),
        Fault::FullVpBelow => full_vp_below(&mut out),
    };
    done.then_some(out)
}
