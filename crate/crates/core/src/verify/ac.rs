use std::collections::{BTreeSet, HashMap};

use super::{AuditReport, Failure, View, WordAction};
use crate::chain::{Foot, Point};
use crate::io::RunSnapshot;
use crate::moiety::HandleKind;
use crate::poset::Relation;

const TRANSITIVITY_WINDOW: usize = 200;

fn foot_str(f: &Foot) -> String {
    match f {
        Foot::All => "S".into(),
        Foot::Parts { points, handles } => {
            let mut parts: Vec<String> = points.iter().map(|j| format!("s{j}")).collect();
            parts.extend(
                handles
                    .iter()
                    .map(|h| format!("{:?}({})", h.kind, h.generator)),
            );
            format!("{{{}}}", parts.join(", "))
        }
    }
}

fn footprints(v: &View, r: &mut AuditReport) {
    for i in 0..v.len() {
        let e = &v.snap.elements[i];
        if e.point.is_s() {
            continue;
        }
        for (j, s) in v.s_points() {
            let below = v.lt(s, i);
            r.check(below == v.foot_contains(&e.low_s, j), || {
                Failure::new(
                    "footprint",
                    format!("recorded m⁻ ∩ S = {}", foot_str(&e.low_s)),
                )
                .with_elements([v.label(i), v.label(s)])
                .with_relations([v.lt_str(s, i)])
            });
            let above = v.lt(i, s);
            r.check(above == v.foot_contains(&e.up_s, j), || {
                Failure::new(
                    "footprint",
                    format!("recorded m⁺ ∩ S = {}", foot_str(&e.up_s)),
                )
                .with_elements([v.label(i), v.label(s)])
                .with_relations([v.lt_str(i, s)])
            });
        }
    }
}

fn stabilizers(v: &View, r: &mut AuditReport) {
    let Some(host) = v.host.as_deref() else {
        r.fail(Failure::new(
            "i",
            format!("no oracle for host {}", v.snap.host),
        ));
        return;
    };
    let bound = v.snap.config.word_bound;
    let mut act = WordAction::new(v.snap, host);
    let mut memo = HashMap::new();
    for w in act.words(bound) {
        memo.clear();
        for i in 0..v.len() {
            let e = &v.snap.elements[i];
            if !act.fixes_atoms(&w, &e.a0_cert) {
                continue;
            }
            let img = act.image(&w, e.point, &mut memo);
            r.check(img == e.point, || {
                Failure::new(
                    "i",
                    format!(
                        "word {:?} fixes A₀ = {:?} but moves the point",
                        w.0, e.a0_cert
                    ),
                )
                .with_elements([v.label(i)])
            });
        }
    }
}

fn in_rt_up(v: &View, i: usize) -> bool {
    v.in_s_up(i)
        || (0..v.len()).any(|k| matches!(v.point(k), Point::R(_) | Point::T(_)) && v.le(k, i))
}

fn lower_certs(v: &View, r: &mut AuditReport) {
    let a_pos: Vec<(u64, usize)> = (0..v.len())
        .filter_map(|k| match v.point(k) {
            Point::A(a) => Some((a, k)),
            _ => None,
        })
        .collect();
    for i in 0..v.len() {
        if v.point(i).is_s() || !v.in_s_down(i) {
            continue;
        }
        let e = &v.snap.elements[i];
        let Some(c) = &e.c_cert else {
            r.fail(
                Failure::new("ii", "no recorded C for a point of S⁻ \\ S")
                    .with_elements([v.label(i)]),
            );
            continue;
        };
        for &cv in c {
            r.check(v.in_v(cv) == Some(true), || {
                Failure::new("ii", format!("a{cv} of C is not in V_p")).with_elements([v.label(i)])
            });
        }
        for &(a, k) in &a_pos {
            if v.in_v(a) != Some(true) {
                continue;
            }
            let in_m = v.le(k, i);
            let in_c = c
                .iter()
                .any(|&cv| cv == a || v.host_rel(a, cv) == Some(Relation::Lt));
            r.check(in_m == in_c, || {
                Failure::new(
                    "ii",
                    format!("m⁻ ∩ V_p and C⁻ ∩ V_p disagree at a{a}; C = {c:?}"),
                )
                .with_elements([v.label(i), v.label(k)])
                .with_relations([v.lt_str(k, i)])
            });
        }
    }
}

fn moiety_shapes(v: &View, r: &mut AuditReport) {
    for i in 0..v.len() {
        let e = &v.snap.elements[i];
        if e.point.is_s() {
            continue;
        }
        if !in_rt_up(v, i) {
            let ok = match &e.up_s {
                Foot::All => true,
                f => f
                    .as_handle()
                    .is_some_and(|h| h.kind == HandleKind::SigmaPrime),
            };
            r.check(ok, || {
                Failure::new(
                    "iii",
                    format!("m⁺ ∩ S = {} is neither S nor in Σ′", foot_str(&e.up_s)),
                )
                .with_elements([v.label(i)])
            });
        }
        let ok = e.low_s.is_empty()
            || e.low_s
                .as_handle()
                .is_some_and(|h| h.kind == HandleKind::Sigma);
        r.check(ok, || {
            Failure::new(
                "iv",
                format!("m⁻ ∩ S = {} is neither ∅ nor in Σ", foot_str(&e.low_s)),
            )
            .with_elements([v.label(i)])
        });
    }
}

fn s_plus(v: &View, r: &mut AuditReport) {
    let ups: Vec<usize> = (0..v.len()).filter(|&i| v.in_s_up(i)).collect();
    for &i in &ups {
        if v.point(i).is_s() {
            continue;
        }
        for n in v.orbit_of(i) {
            if n != i {
                r.check(v.rel(i, n) == Relation::Inc, || {
                    Failure::new("v", "comparable orbit-mates in S⁺")
                        .with_elements([v.label(i), v.label(n)])
                        .with_relations([v.lt_str(i, n)])
                });
            }
        }
    }
    let bits: Vec<_> = ups.iter().map(|&i| v.low_s_bits(i)).collect();
    let seps: BTreeSet<_> = v
        .snap
        .moiety
        .certificates
        .separations
        .iter()
        .map(|&(a, b, _)| (a, b))
        .collect();
    for x in 0..ups.len() {
        for y in x + 1..ups.len() {
            let (i, k) = (ups[x], ups[y]);
            let (si, sk) = (v.snap.elements[i].stage, v.snap.elements[k].stage);
            if si == sk && si != 0 {
                continue;
            }
            if bits[x] != bits[y] {
                r.checks += 1;
                continue;
            }
            let (fi, fk) = (&v.snap.elements[i].low_s, &v.snap.elements[k].low_s);
            let certified = match (fi.as_handle(), fk.as_handle()) {
                (Some(h1), Some(h2)) if h1 != h2 => {
                    seps.contains(&(h1, h2)) || seps.contains(&(h2, h1))
                }
                _ => false,
            };
            r.check(certified, || {
                Failure::new("vi", "equal m⁻ ∩ S across orbits, no separating point")
                    .with_elements([v.label(i), v.label(k)])
            });
        }
    }
}

fn fingerprint_count(v: &View, r: &mut AuditReport) {
    let prints: BTreeSet<String> = v
        .snap
        .elements
        .iter()
        .filter(|e| !e.point.is_s() && !e.low_s.is_empty())
        .map(|e| foot_str(&e.low_s))
        .collect();
    let stages = v.snap.stages.len();
    r.check(prints.len() < stages.max(1), || {
        Failure::new(
            "*",
            format!(
                "{} distinct fingerprints over {} stages",
                prints.len(),
                stages
            ),
        )
    });
}

fn order_scan(v: &View, r: &mut AuditReport) {
    for &(i, j) in &v.snap.lt {
        r.check(i != j && !v.lt(j, i), || {
            Failure::new("order", "irreflexivity or antisymmetry fails")
                .with_elements([v.label(i), v.label(j)])
                .with_relations([format!("{} < {}", v.label(i), v.label(j))])
        });
    }
    let n = v.len().min(TRANSITIVITY_WINDOW);
    for i in 0..n {
        for j in 0..n {
            if !v.lt(i, j) {
                continue;
            }
            for k in 0..n {
                if v.lt(j, k) {
                    r.check(v.lt(i, k), || {
                        Failure::new("order", "transitivity fails")
                            .with_elements([v.label(i), v.label(j), v.label(k)])
                            .with_relations([v.lt_str(i, j), v.lt_str(j, k), v.lt_str(i, k)])
                    });
                }
            }
        }
    }
}

/// Properties of acceptable chains over every materialized element, plus
/// consistency of recorded footprints with the order table.
pub fn audit_ac_props(snap: &RunSnapshot) -> AuditReport {
    let v = View::new(snap);
    let mut r = AuditReport::new("ac_props", (0, snap.last_stage()));
    r.notes.push(format!(
        "stabilizers tested with generator words up to length {}",
        snap.config.word_bound
    ));
    r.notes.push(format!(
        "transitivity scanned on the first {} elements",
        v.len().min(TRANSITIVITY_WINDOW)
    ));
    footprints(&v, &mut r);
    stabilizers(&v, &mut r);
    lower_certs(&v, &mut r);
    moiety_shapes(&v, &mut r);
    s_plus(&v, &mut r);
    fingerprint_count(&v, &mut r);
    order_scan(&v, &mut r);
    r
}
