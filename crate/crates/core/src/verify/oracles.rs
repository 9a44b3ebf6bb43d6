use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AuditReport, Failure};
use crate::poset::{enumerate_posets, ElementSet, FinitePoset, Relation};
use crate::types::{
    all_valid_triples, inc_valid, is_valid_triple, join, lambda_set, ll, lt_valid, meet, mu_set,
    op_type, realize, shift_up, type_of, TypeError, ValidTriple,
};

type Pred1 = fn(&FinitePoset, &ValidTriple) -> Result<bool, TypeError>;
type Pred2 = fn(&ValidTriple, &ValidTriple) -> Result<bool, TypeError>;
type Op2 = fn(&ValidTriple, &ValidTriple) -> Result<ValidTriple, TypeError>;

/// The calculus under test. Tests swap in perturbed formulas to check that
/// mismatches are caught.
#[derive(Clone, Copy)]
pub struct Calculus {
    pub is_valid: Pred1,
    pub lt_valid: Pred2,
    pub inc_valid: Pred2,
    pub meet: Op2,
    pub join: Op2,
}

impl Default for Calculus {
    fn default() -> Self {
        Calculus {
            is_valid: is_valid_triple,
            lt_valid,
            inc_valid,
            meet,
            join,
        }
    }
}

const OPEN_SAMPLES: usize = 1000;
const SAMPLE_SEED: u64 = 0x5eed;

/// Dense strict-order matrix of `host` padded with `extra` new points.
fn padded(host: &FinitePoset, extra: usize) -> Vec<Vec<bool>> {
    let n = host.len();
    let mut m = vec![vec![false; n + extra]; n + extra];
    for (i, row) in m.iter_mut().enumerate().take(n) {
        for (j, cell) in row.iter_mut().enumerate().take(n) {
            *cell = i != j && host.rel_at(i, j) == Relation::Lt;
        }
    }
    m
}

fn is_strict_order(m: &[Vec<bool>]) -> bool {
    let n = m.len();
    for i in 0..n {
        if m[i][i] {
            return false;
        }
        for j in 0..n {
            if m[i][j] {
                if m[j][i] {
                    return false;
                }
                for k in 0..n {
                    if m[j][k] && !m[i][k] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn place(host: &FinitePoset, m: &mut [Vec<bool>], e: usize, t: &ValidTriple) {
    for (i, &a) in host.elements().iter().enumerate() {
        match t.rel_of(a) {
            Some(Relation::Lt) => m[i][e] = true,
            Some(Relation::Gt) => m[e][i] = true,
            _ => {}
        }
    }
}

/// Whether some one-point extension realizes `t`.
fn one_point(host: &FinitePoset, t: &ValidTriple) -> bool {
    let n = host.len();
    let mut m = padded(host, 1);
    place(host, &mut m, n, t);
    is_strict_order(&m)
}

/// Whether points `b`, `c` of types `p`, `q` can coexist with `b rel c`.
fn two_point(host: &FinitePoset, p: &ValidTriple, q: &ValidTriple, rel: Relation) -> bool {
    let n = host.len();
    let mut m = padded(host, 2);
    place(host, &mut m, n, p);
    place(host, &mut m, n + 1, q);
    match rel {
        Relation::Lt => m[n][n + 1] = true,
        Relation::Gt => m[n + 1][n] = true,
        Relation::Inc => {}
    }
    is_strict_order(&m)
}

fn host_cert(host: &FinitePoset) -> Vec<String> {
    host.lt_pairs()
        .into_iter()
        .map(|(x, y)| format!("{x} < {y}"))
        .collect()
}

fn triple_str(t: &ValidTriple) -> String {
    let s = |e: &ElementSet| {
        e.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    format!("({{{}}}, {{{}}}, {{{}}})", s(&t.u), s(&t.v), s(&t.w))
}

fn all_partitions(host: &FinitePoset) -> Vec<ValidTriple> {
    let n = host.len();
    let mut out = vec![];
    for mut code in 0..3usize.pow(n as u32) {
        let mut t =
            ValidTriple::from_parts(ElementSet::new(), ElementSet::new(), ElementSet::new());
        for &a in host.elements() {
            match code % 3 {
                0 => t.u.insert(a),
                1 => t.v.insert(a),
                _ => t.w.insert(a),
            };
            code /= 3;
        }
        out.push(t);
    }
    out
}

fn check_host(r: &mut AuditReport, c: &Calculus, host: &FinitePoset) {
    let cert = || host_cert(host);
    for t in all_partitions(host) {
        let got = (c.is_valid)(host, &t).unwrap_or(false);
        let want = one_point(host, &t);
        r.check(got == want, || {
            Failure::new("valid_triple", format!("formula {got}, extension {want}"))
                .with_elements([triple_str(&t)])
                .with_relations(cert())
        });
    }
    let ts = all_valid_triples(host);
    let k = ts.len();
    // brute-force ≪-or-equal, by two-point extensions
    let mut le = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            let lt = two_point(host, &ts[i], &ts[j], Relation::Lt);
            let inc = two_point(host, &ts[i], &ts[j], Relation::Inc);
            le[i][j] = i == j || lt;
            let got_lt = (c.lt_valid)(&ts[i], &ts[j]).unwrap_or(!lt);
            r.check(got_lt == lt, || {
                Failure::new("lt_valid", format!("formula {got_lt}, extension {lt}"))
                    .with_elements([triple_str(&ts[i]), triple_str(&ts[j])])
                    .with_relations(cert())
            });
            let got_inc = (c.inc_valid)(&ts[i], &ts[j]).unwrap_or(!inc);
            r.check(got_inc == inc, || {
                Failure::new("inc_valid", format!("formula {got_inc}, extension {inc}"))
                    .with_elements([triple_str(&ts[i]), triple_str(&ts[j])])
                    .with_relations(cert())
            });
        }
    }
    let bound = |lower: bool, i: usize, j: usize| -> Option<usize> {
        let below = |x: usize, y: usize| if lower { le[x][y] } else { le[y][x] };
        let cands: Vec<usize> = (0..k).filter(|&x| below(x, i) && below(x, j)).collect();
        cands
            .iter()
            .copied()
            .find(|&x| cands.iter().all(|&y| below(y, x)))
    };
    for i in 0..k {
        for j in 0..k {
            for (name, op, lower) in [("meet", c.meet, true), ("join", c.join, false)] {
                let got = op(&ts[i], &ts[j]).ok();
                let want = bound(lower, i, j).map(|x| ts[x].clone());
                r.check(got == want, || {
                    Failure::new(
                        name,
                        format!(
                            "formula {}, brute force {}",
                            got.as_ref().map(triple_str).unwrap_or("none".into()),
                            want.as_ref().map(triple_str).unwrap_or("none".into())
                        ),
                    )
                    .with_elements([triple_str(&ts[i]), triple_str(&ts[j])])
                    .with_relations(cert())
                });
            }
        }
    }
    // ≪ is a strict order
    for p in &ts {
        r.check(!ll(p, p).unwrap_or(true), || {
            Failure::new("ll_irreflexive", "p ≪ p").with_elements([triple_str(p)])
        });
        for q in &ts {
            let pq = ll(p, q).unwrap_or(false);
            let qp = ll(q, p).unwrap_or(false);
            r.check(!(pq && qp), || {
                Failure::new("ll_antisymmetric", "p ≪ q ≪ p")
                    .with_elements([triple_str(p), triple_str(q)])
            });
            if pq {
                for x in &ts {
                    if ll(q, x).unwrap_or(false) {
                        r.check(ll(p, x).unwrap_or(false), || {
                            Failure::new("ll_transitive", "p ≪ q ≪ x but not p ≪ x")
                                .with_elements([triple_str(p), triple_str(q), triple_str(x)])
                        });
                    }
                }
            }
        }
    }
    // realize / read back
    let fresh = host.elements().iter().copied().max().map_or(0, |m| m + 1);
    let dom: Vec<u32> = host.elements().to_vec();
    for t in &ts {
        let back = realize(host, t, fresh).and_then(|e| type_of(&e, fresh, &dom));
        r.check(back.as_ref() == Ok(t), || {
            Failure::new("round_trip", "type of the realized point differs")
                .with_elements([triple_str(t)])
        });
    }
    // order reversal over the opposite host
    let op = host.opposite();
    for p in &ts {
        for q in &ts {
            let a = ll(p, q).unwrap_or(false);
            let b = ll(&op_type(q), &op_type(p)).unwrap_or(false);
            r.check(a == b, || {
                Failure::new("op_reversal", format!("p ≪ q is {a}, op q ≪ op p is {b}"))
                    .with_elements([triple_str(p), triple_str(q)])
                    .with_relations(host_cert(&op))
            });
        }
    }
    // σ⁺ : λ → μ
    let lam = lambda_set(host);
    let mu = mu_set(host);
    let imgs: Vec<ValidTriple> = lam.iter().filter_map(|p| shift_up(p).ok()).collect();
    let mut sorted_imgs = imgs.clone();
    sorted_imgs.sort_by_key(triple_str);
    sorted_imgs.dedup();
    let mut sorted_mu = mu.clone();
    sorted_mu.sort_by_key(triple_str);
    r.check(imgs.len() == lam.len() && sorted_imgs == sorted_mu, || {
        Failure::new("shift_bijection", "σ⁺ is not a bijection λ → μ").with_relations(cert())
    });
    for (i, p) in lam.iter().enumerate() {
        for (j, q) in lam.iter().enumerate() {
            if ll(p, q).unwrap_or(false) && i < imgs.len() && j < imgs.len() {
                r.check(ll(&imgs[i], &imgs[j]).unwrap_or(false), || {
                    Failure::new("shift_monotone", "σ⁺ does not preserve ≪")
                        .with_elements([triple_str(p), triple_str(q)])
                        .with_relations(cert())
                });
            }
        }
    }
}

fn sample_opens(r: &mut AuditReport, c: &Calculus, hosts: &[FinitePoset]) {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut done = 0;
    while done < OPEN_SAMPLES {
        let host = hosts.choose(&mut rng).expect("hosts");
        let mut open =
            ValidTriple::from_parts(ElementSet::new(), ElementSet::new(), ElementSet::new());
        for &a in host.elements() {
            match rng.gen_range(0..4) {
                0 => open.u.insert(a),
                1 => open.v.insert(a),
                2 => open.w.insert(a),
                _ => false,
            };
        }
        let inside: Vec<ValidTriple> = all_valid_triples(host)
            .into_iter()
            .filter(|t| t.in_basic_open(&open))
            .collect();
        if inside.is_empty() {
            continue;
        }
        done += 1;
        let p = inside.choose(&mut rng).expect("nonempty");
        let q = inside.choose(&mut rng).expect("nonempty");
        for (name, op) in [("open_meet", c.meet), ("open_join", c.join)] {
            let ok = op(p, q).map(|m| m.in_basic_open(&open)).unwrap_or(false);
            r.check(ok, || {
                Failure::new(name, "result leaves the basic open")
                    .with_elements([triple_str(&open), triple_str(p), triple_str(q)])
                    .with_relations(host_cert(host))
            });
        }
    }
}

/// Exhaustive equivalences for the finite calculus over all labeled posets
/// of size at most `n_max`, plus sampled basic-open closure.
pub fn oracle_suite(n_max: usize) -> AuditReport {
    oracle_suite_with(n_max, &Calculus::default())
}

pub fn oracle_suite_with(n_max: usize, c: &Calculus) -> AuditReport {
    let mut r = AuditReport::new("oracles", (0, 0));
    let n_max = n_max.min(4);
    r.notes.push(format!("labeled posets up to size {n_max}"));
    let mut largest = vec![];
    for n in 0..=n_max {
        let hosts: Vec<FinitePoset> = match enumerate_posets(n) {
            Ok(it) => it.collect(),
            Err(e) => {
                r.fail(Failure::new("enumeration", e.to_string()));
                continue;
            }
        };
        r.notes.push(format!("size {n}: {} posets", hosts.len()));
        for host in &hosts {
            check_host(&mut r, c, host);
        }
        if n == n_max {
            largest = hosts;
        }
    }
    if !largest.is_empty() {
        sample_opens(&mut r, c, &largest);
        r.notes.push(format!("{OPEN_SAMPLES} sampled basic opens"));
    }
    r
}
