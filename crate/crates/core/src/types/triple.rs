//! Valid triples over a finite host and the ≪ order on them.

use serde::{Deserialize, Serialize};

use super::TypeError;
use crate::poset::{ElemId, ElementSet, FinitePoset, Relation};

/// An external type over a host, given by the elements below it (`U`),
/// incomparable to it (`V`) and above it (`W`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ValidTriple {
    #[serde(rename = "U")]
    pub u: ElementSet,
    #[serde(rename = "V")]
    pub v: ElementSet,
    #[serde(rename = "W")]
    pub w: ElementSet,
}

impl ValidTriple {
    /// Builds a triple without checking validity.
    pub fn from_parts(u: ElementSet, v: ElementSet, w: ElementSet) -> Self {
        ValidTriple { u, v, w }
    }

    /// Builds a triple and checks it is valid over `host`.
    pub fn new(
        host: &FinitePoset,
        u: ElementSet,
        v: ElementSet,
        w: ElementSet,
    ) -> Result<Self, TypeError> {
        let t = ValidTriple { u, v, w };
        if is_valid_triple(host, &t)? {
            Ok(t)
        } else {
            Err(TypeError::InvalidTriple)
        }
    }

    /// The type incomparable to everything.
    pub fn isolated(host: &FinitePoset) -> Self {
        ValidTriple {
            u: ElementSet::new(),
            v: host.elements().iter().copied().collect(),
            w: ElementSet::new(),
        }
    }

    pub fn domain(&self) -> ElementSet {
        self.u.union(&self.v).union(&self.w)
    }

    /// Relation of the realizing point to `a`, seen from `a`.
    pub fn rel_of(&self, a: ElemId) -> Option<Relation> {
        if self.u.contains(a) {
            Some(Relation::Lt)
        } else if self.w.contains(a) {
            Some(Relation::Gt)
        } else if self.v.contains(a) {
            Some(Relation::Inc)
        } else {
            None
        }
    }

    /// Restriction `p|_{sub}`.
    pub fn restrict(&self, sub: &ElementSet) -> ValidTriple {
        ValidTriple {
            u: self.u.intersection(sub),
            v: self.v.intersection(sub),
            w: self.w.intersection(sub),
        }
    }

    /// Membership in the basic open set `⟨U₀, V₀, W₀⟩`.
    pub fn in_basic_open(&self, open: &ValidTriple) -> bool {
        open.u.is_subset(&self.u) && open.v.is_subset(&self.v) && open.w.is_subset(&self.w)
    }

    pub fn is_in_lambda(&self) -> bool {
        self.u.is_empty()
    }

    pub fn is_in_mu(&self) -> bool {
        self.w.is_empty()
    }

    /// Image under an element map (used for group actions on parameters).
    pub fn map(&self, mut f: impl FnMut(ElemId) -> ElemId) -> ValidTriple {
        ValidTriple {
            u: self.u.iter().map(&mut f).collect(),
            v: self.v.iter().map(&mut f).collect(),
            w: self.w.iter().map(&mut f).collect(),
        }
    }
}

fn check_partition(host: &FinitePoset, t: &ValidTriple) -> Result<(), TypeError> {
    let total = t.u.len() + t.v.len() + t.w.len();
    let dom = t.domain();
    if total != dom.len() || dom.len() != host.len() || dom.iter().any(|x| !host.contains(x)) {
        return Err(TypeError::NotAPartition);
    }
    Ok(())
}

/// Set-level validity: `U < W`, nothing in `U` above anything in `V`,
/// nothing in `W` below anything in `V`.
pub fn is_valid_triple(host: &FinitePoset, t: &ValidTriple) -> Result<bool, TypeError> {
    check_partition(host, t)?;
    for u in t.u.iter() {
        for w in t.w.iter() {
            if !host.lt(u, w) {
                return Ok(false);
            }
        }
        for v in t.v.iter() {
            if host.lt(v, u) {
                return Ok(false);
            }
        }
    }
    for w in t.w.iter() {
        for v in t.v.iter() {
            if host.lt(w, v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A one-point extension of `host` whose new point `id` has type `t`.
pub fn realize(host: &FinitePoset, t: &ValidTriple, id: ElemId) -> Result<FinitePoset, TypeError> {
    if !is_valid_triple(host, t)? {
        return Err(TypeError::InvalidTriple);
    }
    Ok(host.with_point(id, &t.u, &t.w)?)
}

/// `tp(e / host)` read back from a poset containing `host ∪ {e}`.
pub fn type_of(poset: &FinitePoset, e: ElemId, host: &[ElemId]) -> Result<ValidTriple, TypeError> {
    let mut t = ValidTriple::from_parts(ElementSet::new(), ElementSet::new(), ElementSet::new());
    for &a in host {
        match poset.rel(a, e)? {
            Relation::Lt => t.u.insert(a),
            Relation::Gt => t.w.insert(a),
            Relation::Inc => t.v.insert(a),
        };
    }
    Ok(t)
}

/// Every valid triple over a finite host, in a fixed deterministic order.
pub fn all_valid_triples(host: &FinitePoset) -> Vec<ValidTriple> {
    let n = host.len();
    let els = host.elements();
    let mut out = Vec::new();
    for mut code in 0..3usize.pow(n as u32) {
        let mut t =
            ValidTriple::from_parts(ElementSet::new(), ElementSet::new(), ElementSet::new());
        for &a in els {
            match code % 3 {
                0 => t.u.insert(a),
                1 => t.v.insert(a),
                _ => t.w.insert(a),
            };
            code /= 3;
        }
        if is_valid_triple(host, &t).unwrap_or(false) {
            out.push(t);
        }
    }
    out
}

fn same_host(p: &ValidTriple, q: &ValidTriple) -> Result<(), TypeError> {
    if p.domain() == q.domain() {
        Ok(())
    } else {
        Err(TypeError::HostMismatch)
    }
}

/// Points of types `p`, `q` can coexist with `p`'s point strictly below `q`'s.
pub fn lt_valid(p: &ValidTriple, q: &ValidTriple) -> Result<bool, TypeError> {
    same_host(p, q)?;
    Ok(p.u.is_subset(&q.u) && p.v.is_subset(&q.u.union(&q.v)))
}

/// Points of types `p`, `q` can coexist incomparably.
pub fn inc_valid(p: &ValidTriple, q: &ValidTriple) -> Result<bool, TypeError> {
    same_host(p, q)?;
    Ok(p.u.is_disjoint(&q.w) && q.u.is_disjoint(&p.w))
}

pub fn gt_valid(p: &ValidTriple, q: &ValidTriple) -> Result<bool, TypeError> {
    lt_valid(q, p)
}

/// The strict order `p ≪ q`.
pub fn ll(p: &ValidTriple, q: &ValidTriple) -> Result<bool, TypeError> {
    Ok(p != q && lt_valid(p, q)?)
}

pub fn meet(p: &ValidTriple, q: &ValidTriple) -> Result<ValidTriple, TypeError> {
    same_host(p, q)?;
    let v =
        p.v.intersection(&q.v)
            .union(&p.v.intersection(&q.u))
            .union(&q.v.intersection(&p.u));
    Ok(ValidTriple {
        u: p.u.intersection(&q.u),
        v,
        w: p.w.union(&q.w),
    })
}

pub fn join(p: &ValidTriple, q: &ValidTriple) -> Result<ValidTriple, TypeError> {
    same_host(p, q)?;
    let v =
        p.v.intersection(&q.v)
            .union(&p.v.intersection(&q.w))
            .union(&q.v.intersection(&p.w));
    Ok(ValidTriple {
        u: p.u.union(&q.u),
        v,
        w: p.w.intersection(&q.w),
    })
}

/// Types below-or-incomparable to every host element.
pub fn lambda_set(host: &FinitePoset) -> Vec<ValidTriple> {
    all_valid_triples(host)
        .into_iter()
        .filter(ValidTriple::is_in_lambda)
        .collect()
}

/// Types above-or-incomparable to every host element.
pub fn mu_set(host: &FinitePoset) -> Vec<ValidTriple> {
    all_valid_triples(host)
        .into_iter()
        .filter(ValidTriple::is_in_mu)
        .collect()
}

/// `(∅, V, W) ↦ (V, W, ∅)`.
pub fn shift_up(p: &ValidTriple) -> Result<ValidTriple, TypeError> {
    if !p.is_in_lambda() {
        return Err(TypeError::NotInLambda);
    }
    Ok(ValidTriple {
        u: p.v.clone(),
        v: p.w.clone(),
        w: ElementSet::new(),
    })
}

/// Inverse of [`shift_up`].
pub fn shift_down(p: &ValidTriple) -> Result<ValidTriple, TypeError> {
    if !p.is_in_mu() {
        return Err(TypeError::NotInMu);
    }
    Ok(ValidTriple {
        u: ElementSet::new(),
        v: p.u.clone(),
        w: p.v.clone(),
    })
}

/// The same type read over the opposite host: `(W, V, U)`.
pub fn op_type(p: &ValidTriple) -> ValidTriple {
    ValidTriple {
        u: p.w.clone(),
        v: p.v.clone(),
        w: p.u.clone(),
    }
}

/// Metric on types: `1/(m+1)` where `m` is the index of the first
/// enumerated element on which `p` and `q` disagree; `0` when they agree.
pub fn type_distance(p: &ValidTriple, q: &ValidTriple, enumeration: &[ElemId]) -> f64 {
    match first_difference(p, q, enumeration) {
        None => 0.0,
        Some(m) => 1.0 / (m as f64 + 1.0),
    }
}

/// Index of the first enumerated element on which `p` and `q` disagree.
pub fn first_difference(p: &ValidTriple, q: &ValidTriple, enumeration: &[ElemId]) -> Option<usize> {
    enumeration.iter().position(|&a| p.rel_of(a) != q.rel_of(a))
}
