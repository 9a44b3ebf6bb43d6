//! Finite strict partial orders.
//!
//! A [`FinitePoset`] records, for every pair of distinct elements, one of the
//! three relations `Lt`, `Gt` or `Inc`. Relations are stored in a dense
//! upper-triangular table and the value is immutable once built.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque element identifier.
pub type ElemId = u32;

/// Default size bound for brute-force automorphism enumeration.
pub const DEFAULT_AUTOMORPHISM_BOUND: usize = 10;

/// Largest `n` accepted by [`enumerate_posets`].
pub const MAX_ENUMERATION_SIZE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "LT")]
    Lt,
    #[serde(rename = "GT")]
    Gt,
    #[serde(rename = "INC")]
    Inc,
}

impl Relation {
    pub fn flip(self) -> Relation {
        match self {
            Relation::Lt => Relation::Gt,
            Relation::Gt => Relation::Lt,
            Relation::Inc => Relation::Inc,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Lt => "<",
            Relation::Gt => ">",
            Relation::Inc => "⊥",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("cycle detected: closure forces {0} < {0}")]
    CycleDetected(ElemId),
    #[error("unknown element {0}")]
    UnknownElement(ElemId),
    #[error("duplicate element {0}")]
    DuplicateElement(ElemId),
    #[error("size {size} exceeds bound {bound}")]
    SizeBound { size: usize, bound: usize },
    #[error("relation table is not transitive at ({0}, {1}, {2})")]
    NotTransitive(ElemId, ElemId, ElemId),
}

/// A finite set of element ids of some host poset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementSet(pub BTreeSet<ElemId>);

impl ElementSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, id: ElemId) -> bool {
        self.0.contains(&id)
    }

    pub fn insert(&mut self, id: ElemId) -> bool {
        self.0.insert(id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ElemId> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        ElementSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        ElementSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &ElementSet) -> ElementSet {
        ElementSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &ElementSet) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

impl FromIterator<ElemId> for ElementSet {
    fn from_iter<I: IntoIterator<Item = ElemId>>(iter: I) -> Self {
        ElementSet(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[ElemId; N]> for ElementSet {
    fn from(ids: [ElemId; N]) -> Self {
        ids.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    elements: Vec<ElemId>,
    index: HashMap<ElemId, usize>,
    // rel(i, j) for i < j, row-major upper triangle
    table: Vec<Relation>,
}

fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl FinitePoset {
    /// The antichain on `elements`.
    pub fn antichain(elements: Vec<ElemId>) -> Result<Self, PosetError> {
        let mut index = HashMap::with_capacity(elements.len());
        for (i, &e) in elements.iter().enumerate() {
            if index.insert(e, i).is_some() {
                return Err(PosetError::DuplicateElement(e));
            }
        }
        let n = elements.len();
        Ok(FinitePoset {
            elements,
            index,
            table: vec![Relation::Inc; n * n.saturating_sub(1) / 2],
        })
    }

    /// Builds a poset from an explicit relation function, validating transitivity.
    pub fn from_fn<F>(elements: Vec<ElemId>, mut rel: F) -> Result<Self, PosetError>
    where
        F: FnMut(ElemId, ElemId) -> Relation,
    {
        let mut p = Self::antichain(elements)?;
        let n = p.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let r = rel(p.elements[i], p.elements[j]);
                p.table[tri_index(n, i, j)] = r;
            }
        }
        p.check_transitive()?;
        Ok(p)
    }

    /// Like [`FinitePoset::from_fn`] without the cubic transitivity scan; the
    /// caller guarantees the relation is already a strict order.
    pub fn from_fn_unchecked<F>(elements: Vec<ElemId>, mut rel: F) -> Result<Self, PosetError>
    where
        F: FnMut(ElemId, ElemId) -> Relation,
    {
        let mut p = Self::antichain(elements)?;
        let n = p.len();
        for i in 0..n {
            for j in (i + 1)..n {
                p.table[tri_index(n, i, j)] = rel(p.elements[i], p.elements[j]);
            }
        }
        Ok(p)
    }

    /// Smallest strict order on `elements` containing every `(x, y)` as `x < y`.
    pub fn transitive_close(
        elements: Vec<ElemId>,
        pairs: &[(ElemId, ElemId)],
    ) -> Result<Self, PosetError> {
        let mut p = Self::antichain(elements)?;
        let n = p.len();
        let mut reach = vec![false; n * n];
        for &(x, y) in pairs {
            let i = p.idx(x)?;
            let j = p.idx(y)?;
            if i == j {
                return Err(PosetError::CycleDetected(x));
            }
            reach[i * n + j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i * n + k] {
                    for j in 0..n {
                        if reach[k * n + j] {
                            reach[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            if reach[i * n + i] {
                return Err(PosetError::CycleDetected(p.elements[i]));
            }
            for j in (i + 1)..n {
                p.table[tri_index(n, i, j)] = match (reach[i * n + j], reach[j * n + i]) {
                    (true, false) => Relation::Lt,
                    (false, true) => Relation::Gt,
                    (false, false) => Relation::Inc,
                    (true, true) => return Err(PosetError::CycleDetected(p.elements[i])),
                };
            }
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ElemId] {
        &self.elements
    }

    pub fn contains(&self, id: ElemId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn idx(&self, id: ElemId) -> Result<usize, PosetError> {
        self.index
            .get(&id)
            .copied()
            .ok_or(PosetError::UnknownElement(id))
    }

    /// Relation between the elements at positions `i` and `j` (`i != j`).
    pub fn rel_at(&self, i: usize, j: usize) -> Relation {
        let n = self.len();
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.table[tri_index(n, i, j)],
            std::cmp::Ordering::Greater => self.table[tri_index(n, j, i)].flip(),
            std::cmp::Ordering::Equal => panic!("relation of an element to itself is undefined"),
        }
    }

    pub fn rel(&self, x: ElemId, y: ElemId) -> Result<Relation, PosetError> {
        let i = self.idx(x)?;
        let j = self.idx(y)?;
        if i == j {
            return Err(PosetError::UnknownElement(x));
        }
        Ok(self.rel_at(i, j))
    }

    pub fn lt(&self, x: ElemId, y: ElemId) -> bool {
        x != y && matches!(self.rel(x, y), Ok(Relation::Lt))
    }

    pub fn le(&self, x: ElemId, y: ElemId) -> bool {
        x == y || self.lt(x, y)
    }

    /// Full O(n³) transitivity scan.
    pub fn check_transitive(&self) -> Result<(), PosetError> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                if i == j || self.rel_at(i, j) != Relation::Lt {
                    continue;
                }
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    if self.rel_at(j, k) == Relation::Lt && self.rel_at(i, k) != Relation::Lt {
                        return Err(PosetError::NotTransitive(
                            self.elements[i],
                            self.elements[j],
                            self.elements[k],
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn closure(&self, q: &ElementSet, want: Relation) -> Result<ElementSet, PosetError> {
        let qi = q
            .iter()
            .map(|x| self.idx(x))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = q.clone();
        for (i, &v) in self.elements.iter().enumerate() {
            if out.contains(v) {
                continue;
            }
            if qi.iter().any(|&w| self.rel_at(i, w) == want) {
                out.insert(v);
            }
        }
        Ok(out)
    }

    /// `{v | ∃ w ∈ q, v ≤ w}`.
    pub fn down_closure(&self, q: &ElementSet) -> Result<ElementSet, PosetError> {
        self.closure(q, Relation::Lt)
    }

    /// `{v | ∃ w ∈ q, v ≥ w}`.
    pub fn up_closure(&self, q: &ElementSet) -> Result<ElementSet, PosetError> {
        self.closure(q, Relation::Gt)
    }

    pub fn opposite(&self) -> FinitePoset {
        FinitePoset {
            elements: self.elements.clone(),
            index: self.index.clone(),
            table: self.table.iter().map(|r| r.flip()).collect(),
        }
    }

    /// Restriction to a subset of the elements, in host order.
    pub fn restrict(&self, keep: &ElementSet) -> Result<FinitePoset, PosetError> {
        for x in keep.iter() {
            self.idx(x)?;
        }
        let positions: Vec<usize> = (0..self.len())
            .filter(|&i| keep.contains(self.elements[i]))
            .collect();
        let elements = positions.iter().map(|&i| self.elements[i]).collect();
        let mut p = Self::antichain(elements)?;
        let n = p.len();
        for a in 0..n {
            for b in (a + 1)..n {
                p.table[tri_index(n, a, b)] = self.rel_at(positions[a], positions[b]);
            }
        }
        Ok(p)
    }

    /// Adds one new element with the given strict down-set and up-set.
    ///
    /// Everything not listed is incomparable to the new point. Fails if the
    /// result is not transitive.
    pub fn with_point(
        &self,
        id: ElemId,
        below: &ElementSet,
        above: &ElementSet,
    ) -> Result<FinitePoset, PosetError> {
        if self.contains(id) {
            return Err(PosetError::DuplicateElement(id));
        }
        for x in below.iter().chain(above.iter()) {
            self.idx(x)?;
        }
        let mut elements = self.elements.clone();
        elements.push(id);
        FinitePoset::from_fn(elements, |x, y| {
            if y == id {
                if below.contains(x) {
                    Relation::Lt
                } else if above.contains(x) {
                    Relation::Gt
                } else {
                    Relation::Inc
                }
            } else {
                self.rel(x, y).expect("known elements")
            }
        })
    }

    /// Covering pairs `(x, y)` with `x < y` and nothing strictly between.
    pub fn hasse_edges(&self) -> Vec<(ElemId, ElemId)> {
        let n = self.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || self.rel_at(i, j) != Relation::Lt {
                    continue;
                }
                let covered = (0..n).any(|k| {
                    k != i
                        && k != j
                        && self.rel_at(i, k) == Relation::Lt
                        && self.rel_at(k, j) == Relation::Lt
                });
                if !covered {
                    edges.push((self.elements[i], self.elements[j]));
                }
            }
        }
        edges
    }

    /// All strict comparabilities `(x, y)` with `x < y`.
    pub fn lt_pairs(&self) -> Vec<(ElemId, ElemId)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.rel_at(i, j) == Relation::Lt {
                    out.push((self.elements[i], self.elements[j]));
                }
            }
        }
        out
    }

    /// Minimal elements of a subset.
    pub fn minimal_in(&self, q: &ElementSet) -> Result<ElementSet, PosetError> {
        let mut out = ElementSet::new();
        for x in q.iter() {
            let mut minimal = true;
            for y in q.iter() {
                if y != x && self.rel(y, x)? == Relation::Lt {
                    minimal = false;
                    break;
                }
            }
            if minimal {
                out.insert(x);
            }
        }
        Ok(out)
    }

    /// Relation-preserving bijections, as image vectors in element order.
    ///
    /// The identity is always first.
    pub fn automorphisms(&self, bound: usize) -> Result<Vec<Vec<ElemId>>, PosetError> {
        let n = self.len();
        if n > bound {
            return Err(PosetError::SizeBound { size: n, bound });
        }
        let signature: Vec<(usize, usize)> = (0..n)
            .map(|i| {
                let below = (0..n)
                    .filter(|&j| j != i && self.rel_at(j, i) == Relation::Lt)
                    .count();
                let above = (0..n)
                    .filter(|&j| j != i && self.rel_at(i, j) == Relation::Lt)
                    .count();
                (below, above)
            })
            .collect();
        let mut out = Vec::new();
        let mut image = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.extend_automorphism(0, &signature, &mut image, &mut used, &mut out);
        Ok(out
            .into_iter()
            .map(|img| img.into_iter().map(|j| self.elements[j]).collect())
            .collect())
    }

    fn extend_automorphism(
        &self,
        i: usize,
        signature: &[(usize, usize)],
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = self.len();
        if i == n {
            out.push(image.clone());
            return;
        }
        // try i itself first so the identity comes out first
        let candidates = std::iter::once(i).chain((0..n).filter(|&c| c != i));
        for c in candidates {
            if used[c] || signature[c] != signature[i] {
                continue;
            }
            let consistent = (0..i).all(|j| self.rel_at(j, i) == self.rel_at(image[j], c));
            if !consistent {
                continue;
            }
            image[i] = c;
            used[c] = true;
            self.extend_automorphism(i + 1, signature, image, used, out);
            used[c] = false;
            image[i] = usize::MAX;
        }
    }
}

/// All labeled posets on the elements `0..n`, each exactly once.
pub fn enumerate_posets(n: usize) -> Result<impl Iterator<Item = FinitePoset>, PosetError> {
    if n > MAX_ENUMERATION_SIZE {
        return Err(PosetError::SizeBound {
            size: n,
            bound: MAX_ENUMERATION_SIZE,
        });
    }
    let pairs = n * n.saturating_sub(1) / 2;
    let total = 3usize.pow(pairs as u32);
    let elements: Vec<ElemId> = (0..n as ElemId).collect();
    Ok((0..total).filter_map(move |mut code| {
        let mut p = FinitePoset::antichain(elements.clone()).expect("distinct ids");
        for slot in p.table.iter_mut() {
            *slot = match code % 3 {
                0 => Relation::Inc,
                1 => Relation::Lt,
                _ => Relation::Gt,
            };
            code /= 3;
        }
        p.check_transitive().ok().map(|_| p)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: u32) -> FinitePoset {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        FinitePoset::transitive_close((0..n).collect(), &pairs).unwrap()
    }

    #[test]
    fn transitive_close_chain() {
        let p = chain(3);
        assert_eq!(p.rel(0, 1).unwrap(), Relation::Lt);
        assert_eq!(p.rel(0, 2).unwrap(), Relation::Lt);
        assert_eq!(p.rel(2, 0).unwrap(), Relation::Gt);
    }

    #[test]
    fn transitive_close_empty_pairs() {
        let p = FinitePoset::transitive_close(vec![0, 1], &[]).unwrap();
        assert_eq!(p.rel(0, 1).unwrap(), Relation::Inc);
    }

    #[test]
    fn transitive_close_cycle() {
        let err = FinitePoset::transitive_close(vec![0, 1], &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, PosetError::CycleDetected(_)));
    }

    #[test]
    fn closures() {
        let p = chain(3);
        assert_eq!(p.down_closure(&[1].into()).unwrap(), [0, 1].into());
        assert_eq!(p.up_closure(&[1].into()).unwrap(), [1, 2].into());
        assert!(p.down_closure(&ElementSet::new()).unwrap().is_empty());
        let a = FinitePoset::antichain(vec![0, 1]).unwrap();
        assert_eq!(a.down_closure(&[0].into()).unwrap(), [0].into());
        assert_eq!(
            p.down_closure(&[7].into()).unwrap_err(),
            PosetError::UnknownElement(7)
        );
    }

    #[test]
    fn opposite_chain_and_antichain() {
        let p = chain(2);
        let op = p.opposite();
        assert_eq!(op.rel(1, 0).unwrap(), Relation::Lt);
        let a = FinitePoset::antichain(vec![0, 1, 2]).unwrap();
        assert_eq!(a.opposite(), a);
        assert_eq!(p.opposite().opposite(), p);
    }

    #[test]
    fn automorphisms_small() {
        assert_eq!(chain(3).automorphisms(10).unwrap(), vec![vec![0, 1, 2]]);
        let a = FinitePoset::antichain(vec![0, 1, 2]).unwrap();
        let auts = a.automorphisms(10).unwrap();
        assert_eq!(auts.len(), 6);
        assert_eq!(auts[0], vec![0, 1, 2]);
        let big = FinitePoset::antichain((0..11).collect()).unwrap();
        assert!(matches!(
            big.automorphisms(10),
            Err(PosetError::SizeBound { .. })
        ));
    }

    #[test]
    fn enumerate_counts() {
        let counts: Vec<usize> = (0..=4)
            .map(|n| enumerate_posets(n).unwrap().count())
            .collect();
        assert_eq!(counts, vec![1, 1, 3, 19, 219]);
        assert!(enumerate_posets(6).is_err());
    }

    #[test]
    fn with_point_rejects_intransitive() {
        let p = chain(2);
        // new point above 0 but below... nothing; fine
        assert!(p.with_point(9, &[0].into(), &ElementSet::new()).is_ok());
        // below 0 but above 1 is a cycle through 0 < 1
        assert!(p.with_point(9, &[1].into(), &[0].into()).is_err());
        // above 1 but not above 0 breaks transitivity
        let q = p.with_point(9, &[1].into(), &ElementSet::new());
        assert!(q.is_err());
    }

    #[test]
    fn hasse_of_chain() {
        assert_eq!(chain(3).hasse_edges(), vec![(0, 1), (1, 2)]);
    }
}
