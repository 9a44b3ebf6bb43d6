//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the type calculus under test.

#![allow(dead_code)]

use forge_core::poset::{ElemId, FinitePoset, Relation};
use forge_core::types::{CofinalityAdapter, ValidTriple};

/// Whether a boolean `<` matrix is irreflexive, antisymmetric and transitive.
pub fn is_strict_order(lt: &[Vec<bool>]) -> bool {
    let n = lt.len();
    for i in 0..n {
        if lt[i][i] {
            return false;
        }
        for j in 0..n {
            if lt[i][j] && lt[j][i] {
                return false;
            }
            if lt[i][j] {
                for k in 0..n {
                    if lt[j][k] && !lt[i][k] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn host_matrix(host: &FinitePoset, extra: usize) -> Vec<Vec<bool>> {
    let n = host.len();
    let mut m = vec![vec![false; n + extra]; n + extra];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = i != j && host.rel_at(i, j) == Relation::Lt;
        }
    }
    m
}

/// Relation of element `a` to a type, from `a`'s side.
fn side(t: &ValidTriple, a: ElemId) -> Relation {
    if t.u.contains(a) {
        Relation::Lt
    } else if t.w.contains(a) {
        Relation::Gt
    } else {
        Relation::Inc
    }
}

fn place(m: &mut [Vec<bool>], host: &FinitePoset, t: &ValidTriple, x: usize) {
    for (i, &a) in host.elements().iter().enumerate() {
        match side(t, a) {
            Relation::Lt => m[i][x] = true,
            Relation::Gt => m[x][i] = true,
            Relation::Inc => {}
        }
    }
}

/// A one-point extension realizing `t` exists.
pub fn one_point(host: &FinitePoset, t: &ValidTriple) -> bool {
    let n = host.len();
    let mut m = host_matrix(host, 1);
    place(&mut m, host, t, n);
    is_strict_order(&m)
}

/// A two-point extension realizing `p` at `x` and `q` at `y` with `x rel y`
/// exists.
pub fn two_point(host: &FinitePoset, p: &ValidTriple, q: &ValidTriple, rel: Relation) -> bool {
    let n = host.len();
    let mut m = host_matrix(host, 2);
    place(&mut m, host, p, n);
    place(&mut m, host, q, n + 1);
    match rel {
        Relation::Lt => m[n][n + 1] = true,
        Relation::Gt => m[n + 1][n] = true,
        Relation::Inc => {}
    }
    is_strict_order(&m)
}

/// Every partition of the host into `(U, V, W)`, valid or not.
pub fn partitions(host: &FinitePoset) -> Vec<ValidTriple> {
    let els = host.elements();
    let mut out = vec![];
    for mut code in 0..3usize.pow(els.len() as u32) {
        let (mut u, mut v, mut w) = (vec![], vec![], vec![]);
        for &a in els {
            match code % 3 {
                0 => u.push(a),
                1 => v.push(a),
                _ => w.push(a),
            }
            code /= 3;
        }
        out.push(ValidTriple::from_parts(
            u.into_iter().collect(),
            v.into_iter().collect(),
            w.into_iter().collect(),
        ));
    }
    out
}

/// Valid triples by the one-point oracle.
pub fn oracle_types(host: &FinitePoset) -> Vec<ValidTriple> {
    partitions(host)
        .into_iter()
        .filter(|t| one_point(host, t))
        .collect()
}

/// `p ≪ q` or `p = q`, by the two-point oracle.
pub fn ll_or_eq(host: &FinitePoset, p: &ValidTriple, q: &ValidTriple) -> bool {
    p == q || two_point(host, p, q, Relation::Lt)
}

/// Greatest lower bound of `p`, `q` among `types`, by exhaustion.
pub fn brute_inf(
    host: &FinitePoset,
    types: &[ValidTriple],
    p: &ValidTriple,
    q: &ValidTriple,
) -> Option<ValidTriple> {
    let lower: Vec<&ValidTriple> = types
        .iter()
        .filter(|r| ll_or_eq(host, r, p) && ll_or_eq(host, r, q))
        .collect();
    lower
        .iter()
        .find(|r| lower.iter().all(|s| ll_or_eq(host, s, r)))
        .map(|r| (*r).clone())
}

pub fn brute_sup(
    host: &FinitePoset,
    types: &[ValidTriple],
    p: &ValidTriple,
    q: &ValidTriple,
) -> Option<ValidTriple> {
    let upper: Vec<&ValidTriple> = types
        .iter()
        .filter(|r| ll_or_eq(host, p, r) && ll_or_eq(host, q, r))
        .collect();
    upper
        .iter()
        .find(|r| upper.iter().all(|s| ll_or_eq(host, r, s)))
        .map(|r| (*r).clone())
}

/// Maximal elements of `{a < n | in_v(a)}` in the host order.
pub fn v_maximal(host: &dyn CofinalityAdapter, in_v: impl Fn(u64) -> bool, n: u64) -> Vec<u64> {
    let v: Vec<u64> = (0..n).filter(|&a| in_v(a)).collect();
    v.iter()
        .copied()
        .filter(|&a| !v.iter().any(|&b| host.rel(a, b) == Relation::Lt))
        .collect()
}

/// Truncation reading of "V is not finitely generated as a down-set": the
/// maximal points of `V ∩ A_n` keep changing as `n` grows.
pub fn looks_upper(host: &dyn CofinalityAdapter, in_v: impl Fn(u64) -> bool) -> bool {
    let small = v_maximal(host, &in_v, 64);
    let large = v_maximal(host, &in_v, 256);
    small != large
}

/// Distinct (below, above) counts for every point: a sufficient certificate
/// that a finite order is rigid.
pub fn signatures_distinct(n: usize, lt: impl Fn(usize, usize) -> bool) -> bool {
    let mut sig: Vec<(usize, usize)> = (0..n)
        .map(|i| {
            (
                (0..n).filter(|&j| lt(j, i)).count(),
                (0..n).filter(|&j| lt(i, j)).count(),
            )
        })
        .collect();
    sig.sort_unstable();
    sig.windows(2).all(|w| w[0] != w[1])
}

/// Automorphism count by backtracking over partial permutations.
pub fn brute_automorphisms(n: usize, lt: impl Fn(usize, usize) -> bool) -> usize {
    fn rec(
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        n: usize,
        lt: &dyn Fn(usize, usize) -> bool,
    ) -> usize {
        let k = perm.len();
        if k == n {
            return 1;
        }
        let mut count = 0;
        for c in 0..n {
            if used[c] {
                continue;
            }
            if (0..k).all(|i| lt(i, k) == lt(perm[i], c) && lt(k, i) == lt(c, perm[i])) {
                used[c] = true;
                perm.push(c);
                count += rec(perm, used, n, lt);
                perm.pop();
                used[c] = false;
            }
        }
        count
    }
    rec(&mut vec![], &mut vec![false; n], n, &lt)
}
