use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AuditReport, Failure};
use crate::poset::{ElemId, ElementSet, FinitePoset, Relation};

/// Largest support enqueued by [`plain_generic`].
pub const PLAIN_SUPPORT: usize = 3;

/// One `(v, m, m′)` configuration and the separating triple it forces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForcingCase {
    pub v: ElemId,
    pub m: ElemId,
    pub image: ElemId,
    /// `true` for `m ⊥ v`, `false` for `m < v`.
    pub incomparable: bool,
    pub u: Vec<ElemId>,
    pub inc: Vec<ElemId>,
    pub witness: Option<ElemId>,
}

fn partial_valid(p: &FinitePoset, u: &[ElemId], v: &[ElemId], w: &[ElemId]) -> bool {
    let all: Vec<ElemId> = u.iter().chain(v).chain(w).copied().collect();
    let set: ElementSet = all.iter().copied().collect();
    set.len() == all.len()
        && u.iter().all(|&a| w.iter().all(|&b| p.lt(a, b)))
        && v.iter().all(|&b| u.iter().all(|&a| !p.lt(b, a)))
        && v.iter().all(|&b| w.iter().all(|&c| !p.lt(c, b)))
}

fn witness(p: &FinitePoset, u: &[ElemId], v: &[ElemId], w: &[ElemId]) -> Option<ElemId> {
    p.elements().iter().copied().find(|&n| {
        u.iter().all(|&a| p.lt(a, n))
            && v.iter().all(|&b| p.rel(b, n) == Ok(Relation::Inc))
            && w.iter().all(|&c| p.lt(n, c))
    })
}

type Partial = (Vec<ElemId>, Vec<ElemId>, Vec<ElemId>);

/// Valid partial triples whose support contains `x` and lies in `0..=x`.
fn tasks_for(p: &FinitePoset, x: ElemId) -> Vec<Partial> {
    let older: Vec<ElemId> = (0..x).collect();
    let mut supports: Vec<Vec<ElemId>> = vec![vec![x]];
    for (i, &a) in older.iter().enumerate() {
        supports.push(vec![a, x]);
        if PLAIN_SUPPORT >= 3 {
            for &b in &older[i + 1..] {
                supports.push(vec![a, b, x]);
            }
        }
    }
    let mut out = vec![];
    for s in supports {
        for mut code in 0..3usize.pow(s.len() as u32) {
            let (mut u, mut v, mut w) = (vec![], vec![], vec![]);
            for &a in &s {
                match code % 3 {
                    0 => u.push(a),
                    1 => v.push(a),
                    _ => w.push(a),
                }
                code /= 3;
            }
            if partial_valid(p, &u, &v, &w) {
                out.push((u, v, w));
            }
        }
    }
    out
}

/// A truncation of the generic poset: witnesses for valid triples of support
/// at most [`PLAIN_SUPPORT`] are added first-in first-out until `n` points
/// exist. Each new point's triples are queued in a seeded order.
pub fn plain_generic(n: usize, seed: u64) -> FinitePoset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = FinitePoset::antichain(vec![0]).expect("one point");
    let mut queue: VecDeque<Partial> = VecDeque::new();
    let mut expanded = 0;
    while p.len() < n {
        let Some((u, v, w)) = queue.pop_front() else {
            let mut batch = tasks_for(&p, expanded);
            batch.shuffle(&mut rng);
            queue.extend(batch);
            expanded += 1;
            continue;
        };
        if witness(&p, &u, &v, &w).is_some() {
            continue;
        }
        let below = p.down_closure(&u.iter().copied().collect()).expect("known");
        let above = p.up_closure(&w.iter().copied().collect()).expect("known");
        let id = p.len() as ElemId;
        p = p
            .with_point(id, &below, &above)
            .expect("valid triple realizes");
    }
    p
}

/// The separating triple for `f(m) = m′`, read as `(U, V, ∅)`.
fn separating(p: &FinitePoset, v: ElemId, m: ElemId, m2: ElemId, incomparable: bool) -> Partial {
    let down = p.lt(m2, m);
    match (incomparable, down) {
        (true, false) => (vec![v, m], vec![m2], vec![]),
        (true, true) => (vec![v, m2], vec![m], vec![]),
        (false, false) => (vec![m], vec![m2, v], vec![]),
        (false, true) => (vec![m2], vec![m, v], vec![]),
    }
}

/// Sampled configurations with `m ⊥ v` (or `m < v`) and `m′ ≠ m` on the
/// same side of `v`, `samples` of each kind, in seeded order.
pub fn forcing_cases(p: &FinitePoset, v: ElemId, samples: usize, seed: u64) -> Vec<ForcingCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![];
    for incomparable in [true, false] {
        let side: Vec<ElemId> = p
            .elements()
            .iter()
            .copied()
            .filter(|&m| {
                m != v
                    && if incomparable {
                        p.rel(m, v) == Ok(Relation::Inc)
                    } else {
                        p.lt(m, v)
                    }
            })
            .collect();
        let mut pairs: Vec<(ElemId, ElemId)> = side
            .iter()
            .flat_map(|&m| side.iter().filter(move |&&x| x != m).map(move |&x| (m, x)))
            .collect();
        pairs.shuffle(&mut rng);
        for (m, m2) in pairs.into_iter().take(samples) {
            let (u, inc, w) = separating(p, v, m, m2, incomparable);
            let wit = witness(p, &u, &inc, &w);
            out.push(ForcingCase {
                v,
                m,
                image: m2,
                incomparable,
                u,
                inc,
                witness: wit,
            });
        }
    }
    out
}

/// Checks that every sampled configuration has a valid separating triple,
/// witnessed in the truncation or small enough to be queued, and that the
/// witness refutes `f(m) = m′` for any `f` fixing the witness.
pub fn forcing_certificates(p: &FinitePoset, v: ElemId, samples: usize, seed: u64) -> AuditReport {
    let mut r = AuditReport::new("forcing", (0, 0));
    let cases = forcing_cases(p, v, samples, seed);
    for split in [true, false] {
        let n = cases.iter().filter(|c| c.incomparable == split).count();
        let name = if split { "m ⊥ v" } else { "m < v" };
        r.check(n > 0, || {
            Failure::new("sample", format!("no configuration with {name}"))
        });
        r.notes.push(format!("{n} configurations with {name}"));
    }
    let mut queued = 0;
    for c in &cases {
        let label = format!("v={} m={} m′={}", c.v, c.m, c.image);
        r.check(partial_valid(p, &c.u, &c.inc, &[]), || {
            Failure::new(
                "triple",
                format!("({:?}, {:?}, ∅) is not valid", c.u, c.inc),
            )
            .with_elements([label.clone()])
        });
        r.check(c.u.len() + c.inc.len() <= PLAIN_SUPPORT, || {
            Failure::new("triple", "support too large to be queued").with_elements([label.clone()])
        });
        let Some(n) = c.witness else {
            queued += 1;
            continue;
        };
        let (moved, stays) = if p.lt(c.image, c.m) {
            (c.image, c.m)
        } else {
            (c.m, c.image)
        };
        let fixed_by_v = if c.incomparable {
            p.lt(c.v, n)
        } else {
            p.rel(c.v, n) == Ok(Relation::Inc)
        };
        r.check(
            fixed_by_v && p.lt(moved, n) && p.rel(stays, n) == Ok(Relation::Inc),
            || {
                Failure::new("witness", format!("witness {n} does not separate"))
                    .with_elements([label.clone()])
            },
        );
    }
    r.notes.push(format!(
        "{} witnessed in the truncation, {queued} queued",
        cases.len() - queued
    ));
    r
}
