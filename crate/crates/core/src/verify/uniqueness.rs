use std::collections::{BTreeSet, HashMap};

use super::{AuditReport, Failure, View, WordAction};
use crate::chain::{Point, StageRoute, TaskKind, TaskStatus};
use crate::io::RunSnapshot;
use crate::moiety::HandleKind;
use crate::poset::{ElemId, FinitePoset, Relation};

/// Largest `n` for which `R_n ∪ S_n` is checked.
pub const RIGIDITY_MAX: usize = 7;
const AUTOMORPHISM_BOUND: usize = 16;

fn q_typed(v: &View, i: usize) -> bool {
    (0..v.len()).all(|k| match v.point(k) {
        Point::A(a) => {
            let want = if v.in_v(a) == Some(true) {
                Relation::Lt
            } else {
                Relation::Inc
            };
            v.rel(k, i) == want
        }
        _ => true,
    })
}

fn s_identification(v: &View, r: &mut AuditReport) {
    let budget = v.snap.config.stage_budget as usize;
    let breakers: HashMap<Point, usize> = v
        .snap
        .tasks
        .iter()
        .filter(|t| t.task.kind == TaskKind::Pair)
        .filter_map(|t| t.task.breaks.map(|m| (m, t.index)))
        .collect();
    for i in 0..v.len() {
        let e = &v.snap.elements[i];
        if !matches!(e.point, Point::C(_)) || !e.low_s.is_empty() || !e.up_s.is_empty() {
            continue;
        }
        if !q_typed(v, i) {
            continue;
        }
        let Some(&ti) = breakers.get(&e.point) else {
            r.fail(
                Failure::new("S-identification", "q-typed point off S with no (c)-task")
                    .with_elements([v.label(i)]),
            );
            continue;
        };
        let t = &v.snap.tasks[ti];
        if ti >= budget || (v.snap.exhausted && t.status == TaskStatus::Pending) {
            r.pending
                .push(format!("minimality breaker #{ti} for {}", v.label(i)));
            continue;
        }
        let ok = t.status == TaskStatus::Done
            && t.witness
                .and_then(|w| v.pos(w))
                .is_some_and(|n| v.lt(n, i) && q_typed(v, n));
        r.check(ok, || {
            Failure::new(
                "S-identification",
                format!("(c)-task #{ti} has no q-typed point below"),
            )
            .with_elements([v.label(i)])
        });
    }
}

/// Relation of two base points as `M₀` defines it.
fn base_rel(v: &View, x: Point, y: Point) -> Option<Relation> {
    use Point::*;
    use Relation::*;
    Some(match (x, y) {
        (A(a), A(b)) => v.host_rel(a, b)?,
        (A(a), R(_)) => {
            if v.in_v(a)? {
                Inc
            } else {
                Gt
            }
        }
        (A(a), S(_)) => {
            if v.in_v(a)? {
                Lt
            } else {
                Inc
            }
        }
        (A(a), T(b)) => {
            if v.in_v(a)? && (a == b || v.host_rel(a, b)? == Lt) {
                Lt
            } else {
                Inc
            }
        }
        (R(i), S(j)) => {
            if i >= j as u64 {
                Lt
            } else {
                Inc
            }
        }
        (R(_), A(_)) | (S(_), A(_)) | (T(_), A(_)) | (S(_), R(_)) => base_rel(v, y, x)?.flip(),
        _ => Inc,
    })
}

fn base_relations(v: &View, r: &mut AuditReport) {
    let base: Vec<usize> = (0..v.len()).filter(|&i| v.point(i).is_base()).collect();
    for (x, &i) in base.iter().enumerate() {
        for &k in &base[x + 1..] {
            let want = base_rel(v, v.point(i), v.point(k));
            r.check(want == Some(v.rel(i, k)), || {
                Failure::new(
                    "R∪T-identification",
                    format!("base relation should be {want:?}"),
                )
                .with_elements([v.label(i), v.label(k)])
                .with_relations([v.lt_str(i, k)])
            });
        }
    }
}

/// Automorphism count of the recorded `R_n ∪ S_n`, or `None` if some point
/// is not materialized.
pub fn rigidity_check(v: &View, n: usize) -> Option<usize> {
    let pts: Vec<usize> = (0..n as u64)
        .map(|i| v.pos(Point::R(i)))
        .chain((0..n as u32).map(|j| v.pos(Point::S(j))))
        .collect::<Option<_>>()?;
    let ids: Vec<ElemId> = (0..pts.len() as ElemId).collect();
    let p = FinitePoset::from_fn(ids, |a, b| v.rel(pts[a as usize], pts[b as usize])).ok()?;
    p.automorphisms(AUTOMORPHISM_BOUND).ok().map(|a| a.len())
}

fn rigidity(v: &View, r: &mut AuditReport) {
    for n in 2..=RIGIDITY_MAX {
        match rigidity_check(v, n) {
            Some(count) => r.check(count == 1, || {
                Failure::new(
                    "rigidity",
                    format!("R_{n} ∪ S_{n} has {count} automorphisms"),
                )
            }),
            None => r.notes.push(format!("R_{n} ∪ S_{n} not materialized")),
        }
    }
}

fn separations(v: &View, r: &mut AuditReport) {
    let handles = &v.snap.moiety.handles;
    let certs: HashMap<_, _> = v
        .snap
        .moiety
        .certificates
        .separations
        .iter()
        .map(|&(a, b, s)| ((a, b), s))
        .collect();
    for &h1 in handles {
        for &h2 in handles {
            if h1 == h2 || h1.kind != h2.kind {
                continue;
            }
            let contained = match h1.kind {
                HandleKind::Sigma => {
                    h1.generator == h2.generator || v.n_lt(h1.generator, h2.generator)
                }
                HandleKind::SigmaPrime => {
                    h1.generator == h2.generator || v.n_lt(h2.generator, h1.generator)
                }
            };
            if contained {
                continue;
            }
            let ok = certs
                .get(&(h1, h2))
                .is_some_and(|&s| v.member_node(h1, s) && !v.member_node(h2, s));
            r.check(ok, || {
                Failure::new(
                    "separation",
                    format!("no recorded point of {h1:?} outside {h2:?}"),
                )
            });
        }
    }
}

fn star(v: &View, r: &mut AuditReport) {
    let Some(host) = v.host.as_deref() else {
        r.fail(Failure::new(
            "star",
            format!("no oracle for host {}", v.snap.host),
        ));
        return;
    };
    let bound = v.snap.config.word_bound;
    r.notes.push(format!(
        "(⋆) tested with generator words up to length {bound}"
    ));
    let claimed: BTreeSet<u32> = v.snap.star_claims.iter().map(|c| c.stage).collect();
    for st in &v.snap.stages {
        if matches!(st.route, StageRoute::EnoughAps2 { .. }) {
            r.check(claimed.contains(&st.index), || {
                Failure::new(
                    "star",
                    format!("stage {} has no stabilizer claim", st.index),
                )
            });
        }
    }
    let mut act = WordAction::new(v.snap, host);
    let words = act.words(bound);
    let mut memo = HashMap::new();
    for c in &v.snap.star_claims {
        let Some(i) = v.pos(c.point) else {
            r.fail(Failure::new(
                "star",
                format!("claimed point {} missing", c.point),
            ));
            continue;
        };
        for w in &words {
            memo.clear();
            let fixes_atoms = act.fixes_atoms(w, &c.atoms);
            let fixes_point = act.image(w, c.point, &mut memo) == c.point;
            r.check(fixes_atoms == fixes_point, || {
                Failure::new(
                    "star",
                    format!(
                        "word {:?}: fixes A₀ = {:?} is {fixes_atoms}, fixes point is {fixes_point}",
                        w.0, c.atoms
                    ),
                )
                .with_elements([v.label(i)])
            });
        }
    }
}

/// The finite content of the uniqueness argument: identification of `S` and
/// `R ∪ T`, rigidity of `R_n ∪ S_n`, separation certificates and the
/// stabilizer condition on every stabilizer-controlled stage.
pub fn audit_uniqueness(snap: &RunSnapshot) -> AuditReport {
    let v = View::new(snap);
    let mut r = AuditReport::new("uniqueness", (0, snap.last_stage()));
    s_identification(&v, &mut r);
    base_relations(&v, &mut r);
    rigidity(&v, &mut r);
    separations(&v, &mut r);
    star(&v, &mut r);
    r
}
