use super::{AuditReport, Failure, View};
use crate::chain::{Foot, Point};
use crate::io::RunSnapshot;
use crate::poset::Relation;

/// How far the adapter oracle is searched for `a ∈ V_p \ C⁻`.
const ORACLE_SEARCH: u64 = 4096;

fn finite(f: &Foot) -> bool {
    f.is_finite()
}

/// Points of `S` are minimal among points of type `q`, and `R ∪ T` is the
/// set of minimal points with finite intersection with `S`.
pub fn audit_minimality(snap: &RunSnapshot) -> AuditReport {
    let v = View::new(snap);
    let mut r = AuditReport::new("minimality", (0, snap.last_stage()));
    r.notes
        .push("type q membership evaluated on the A-truncation: CONSISTENT-AT-TRUNCATION".into());
    let Some(host) = v.host.as_deref() else {
        r.fail(Failure::new(
            "oracle",
            format!("no oracle for host {}", snap.host),
        ));
        return r;
    };
    let a_pos: Vec<(u64, usize)> = (0..v.len())
        .filter_map(|k| match v.point(k) {
            Point::A(a) => Some((a, k)),
            _ => None,
        })
        .collect();

    // (i): every m below some s is refuted as q-typed by its recorded C
    for i in 0..v.len() {
        if v.point(i).is_s() {
            continue;
        }
        let Some((_, s)) = v.s_points().find(|&(_, s)| v.lt(i, s)) else {
            continue;
        };
        let e = &snap.elements[i];
        let Some(c) = &e.c_cert else {
            r.fail(
                Failure::new("i", "point below S with no finite C certificate")
                    .with_elements([v.label(i), v.label(s)])
                    .with_relations([v.lt_str(i, s)]),
            );
            continue;
        };
        let in_c_down = |a: u64| {
            c.iter()
                .any(|&cv| cv == a || host.rel(a, cv) == Relation::Lt)
        };
        let mut ok = c.iter().all(|&cv| v.in_v(cv) == Some(true));
        let mut bad = vec![];
        for &(a, k) in &a_pos {
            if v.in_v(a) == Some(true) && v.le(k, i) != in_c_down(a) {
                ok = false;
                bad.push(v.lt_str(k, i));
            }
        }
        r.check(ok, || {
            Failure::new("i", format!("C = {c:?} does not describe m⁻ ∩ V_p"))
                .with_elements([v.label(i), v.label(s)])
                .with_relations(bad)
        });
        let outside = (0..ORACLE_SEARCH).find(|&a| v.in_v(a) == Some(true) && !in_c_down(a));
        r.check(outside.is_some(), || {
            Failure::new(
                "i",
                format!("no a ∈ V_p outside C⁻ below a{ORACLE_SEARCH}; C = {c:?}"),
            )
            .with_elements([v.label(i), v.label(s)])
        });
    }

    // (ii): minimal points with finite S-footprint are exactly R ∪ T
    let fin: Vec<usize> = (0..v.len())
        .filter(|&i| {
            let e = &snap.elements[i];
            finite(&e.low_s) && finite(&e.up_s)
        })
        .collect();
    for &i in &fin {
        // s_j > r_j holds for every s_j, materialized or not
        let minimal = !v.point(i).is_s() && !fin.iter().any(|&k| v.lt(k, i));
        let rt = matches!(v.point(i), Point::R(_) | Point::T(_));
        r.check(minimal == rt, || {
            let why = if rt {
                "point of R ∪ T is not minimal"
            } else {
                "minimal point outside R ∪ T"
            };
            let below: Vec<String> = fin
                .iter()
                .filter(|&&k| v.lt(k, i))
                .map(|&k| v.lt_str(k, i))
                .collect();
            Failure::new("ii", why)
                .with_elements([v.label(i)])
                .with_relations(below)
        });
    }
    for i in 0..v.len() {
        if matches!(v.point(i), Point::R(_) | Point::T(_)) {
            r.check(fin.contains(&i), || {
                Failure::new("ii", "point of R ∪ T with infinite S-footprint")
                    .with_elements([v.label(i)])
            });
        }
    }
    r
}
