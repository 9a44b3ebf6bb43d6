//! The three-sorted auxiliary structure `N` and the moiety families it defines.
//!
//! `N₁` is an antichain identified with `S`. A point `z ∈ N₂` names the moiety
//! `z⁻ ∩ N₁ ∈ Σ` and a point `y ∈ N₀` names `y⁺ ∩ N₁ ∈ Σ′`. Set relations
//! between moieties are read off the order of `N`; certificate points keep
//! that reading exact as `N` grows.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::{ElemId, FinitePoset, PosetError, Relation};

/// Sort label `χ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Sort {
    N0,
    N1,
    N2,
}

impl From<Sort> for u8 {
    fn from(s: Sort) -> u8 {
        match s {
            Sort::N0 => 0,
            Sort::N1 => 1,
            Sort::N2 => 2,
        }
    }
}

impl TryFrom<u8> for Sort {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            0 => Ok(Sort::N0),
            1 => Ok(Sort::N1),
            2 => Ok(Sort::N2),
            _ => Err(format!("bad sort {v}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HandleKind {
    Sigma,
    SigmaPrime,
}

/// An intensional reference to a moiety.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MoietyHandle {
    pub kind: HandleKind,
    pub generator: ElemId,
}

impl MoietyHandle {
    pub fn sigma(generator: ElemId) -> Self {
        MoietyHandle {
            kind: HandleKind::Sigma,
            generator,
        }
    }

    pub fn sigma_prime(generator: ElemId) -> Self {
        MoietyHandle {
            kind: HandleKind::SigmaPrime,
            generator,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoietyError {
    #[error("request inconsistent with the sort conditions: {0}")]
    InconsistentWithK(String),
    #[error("unknown element {0}")]
    UnknownElement(ElemId),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("forced moiety {0:?} is in the avoid set")]
    ForcedZConflictsAvoid(MoietyHandle),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A finite poset with a sort label per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KStructure {
    pub poset: FinitePoset,
    pub chi: BTreeMap<ElemId, Sort>,
}

/// Checks the sort conditions: sorts partition the domain, `N₁` is an
/// antichain, and no point lies below a point of a smaller sort.
pub fn k_check(k: &KStructure) -> bool {
    let els = k.poset.elements();
    if els.len() != k.chi.len() || els.iter().any(|e| !k.chi.contains_key(e)) {
        return false;
    }
    for i in 0..els.len() {
        for j in 0..els.len() {
            if i == j || k.poset.rel_at(i, j) != Relation::Lt {
                continue;
            }
            let (a, b) = (k.chi[&els[i]], k.chi[&els[j]]);
            if a > b || (a == Sort::N1 && b == Sort::N1) {
                return false;
            }
        }
    }
    true
}

/// A one-point extension request: the new point goes above `below`, below
/// `above`, and must end up incomparable to everything in `incomparable`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GrowRequest {
    pub below: Vec<ElemId>,
    pub above: Vec<ElemId>,
    pub incomparable: Vec<ElemId>,
}

/// Constraints of a sandwich query.
///
/// For `Sigma`: `C ∪ ⋃u ⊆ Z ⊆ ⋂w` and `Z ∩ (D ∪ ⋃v) = ∅`, with `u`, `w` in Σ and
/// `v` in Σ′. For `SigmaPrime` the roles of `u` and `w` swap:
/// `C ∪ ⋃w ⊆ Z ⊆ ⋂u`, with `u`, `w` in Σ′ and `v` in Σ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZQuery {
    pub kind: HandleKind,
    pub u: Vec<MoietyHandle>,
    pub v: Vec<MoietyHandle>,
    pub w: Vec<MoietyHandle>,
    pub c: Vec<ElemId>,
    pub d: Vec<ElemId>,
    pub avoid: Vec<MoietyHandle>,
}

impl ZQuery {
    pub fn empty(kind: HandleKind) -> Self {
        ZQuery {
            kind,
            u: vec![],
            v: vec![],
            w: vec![],
            c: vec![],
            d: vec![],
            avoid: vec![],
        }
    }

    /// Handles whose union must lie inside `Z`.
    pub fn inner(&self) -> &[MoietyHandle] {
        match self.kind {
            HandleKind::Sigma => &self.u,
            HandleKind::SigmaPrime => &self.w,
        }
    }

    /// Handles whose intersection must contain `Z`.
    pub fn outer(&self) -> &[MoietyHandle] {
        match self.kind {
            HandleKind::Sigma => &self.w,
            HandleKind::SigmaPrime => &self.u,
        }
    }
}

/// One round of the coinfiniteness agenda.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgendaTick {
    pub handle: MoietyHandle,
    pub in_point: ElemId,
    pub out_point: ElemId,
}

/// Certificates recorded by the engine.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificates {
    /// `(h1, h2, s)` with `s ∈ h1 \ h2`, for every ordered pair of distinct
    /// same-kind handles where `h1 ⊄ h2` in the order of `N`.
    pub separations: Vec<(MoietyHandle, MoietyHandle, ElemId)>,
    /// `(y, z, s)` with `y < s < z`, for every `y ∈ N₀`, `z ∈ N₂` with `y < z`.
    pub witnesses: Vec<(ElemId, ElemId, ElemId)>,
    pub agenda: Vec<AgendaTick>,
}

/// Owner of `N`.
#[derive(Debug, Clone)]
pub struct MoietyEngine {
    sorts: Vec<Sort>,
    down: Vec<FixedBitSet>,
    up: Vec<FixedBitSet>,
    n1_mask: FixedBitSet,
    n1: Vec<ElemId>,
    n1_index: BTreeMap<ElemId, u32>,
    handles: Vec<MoietyHandle>,
    separations: BTreeMap<(MoietyHandle, MoietyHandle), ElemId>,
    witnesses: BTreeMap<(ElemId, ElemId), ElemId>,
    agenda: Vec<AgendaTick>,
    agenda_cursor: usize,
    rng: ChaCha8Rng,
}

impl MoietyEngine {
    pub fn new(seed: u64) -> Self {
        MoietyEngine {
            sorts: vec![],
            down: vec![],
            up: vec![],
            n1_mask: FixedBitSet::new(),
            n1: vec![],
            n1_index: BTreeMap::new(),
            handles: vec![],
            separations: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            agenda: vec![],
            agenda_cursor: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn len(&self) -> usize {
        self.sorts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorts.is_empty()
    }

    pub fn sort(&self, x: ElemId) -> Result<Sort, MoietyError> {
        self.sorts
            .get(x as usize)
            .copied()
            .ok_or(MoietyError::UnknownElement(x))
    }

    pub fn lt(&self, x: ElemId, y: ElemId) -> bool {
        self.down
            .get(y as usize)
            .is_some_and(|d| d.contains(x as usize))
    }

    pub fn le(&self, x: ElemId, y: ElemId) -> bool {
        x == y || self.lt(x, y)
    }

    pub fn rel(&self, x: ElemId, y: ElemId) -> Relation {
        if self.lt(x, y) {
            Relation::Lt
        } else if self.lt(y, x) {
            Relation::Gt
        } else {
            Relation::Inc
        }
    }

    /// `N₁` points in mint order; the `j`-th is `s_j`.
    pub fn n1_points(&self) -> &[ElemId] {
        &self.n1
    }

    pub fn s_index(&self, x: ElemId) -> Option<u32> {
        self.n1_index.get(&x).copied()
    }

    pub fn handles(&self) -> &[MoietyHandle] {
        &self.handles
    }

    fn check_known(&self, x: ElemId) -> Result<(), MoietyError> {
        if (x as usize) < self.sorts.len() {
            Ok(())
        } else {
            Err(MoietyError::UnknownElement(x))
        }
    }

    fn check_handle(&self, h: MoietyHandle) -> Result<(), MoietyError> {
        let want = match h.kind {
            HandleKind::Sigma => Sort::N2,
            HandleKind::SigmaPrime => Sort::N0,
        };
        if self.sort(h.generator)? != want {
            return Err(MoietyError::PreconditionViolated(format!(
                "{h:?} does not name a generator of the right sort"
            )));
        }
        Ok(())
    }

    /// Whether the `N₁` point `s` lies in the moiety named by `h`.
    pub fn member(&self, h: MoietyHandle, s: ElemId) -> Result<bool, MoietyError> {
        if self.sort(s)? != Sort::N1 {
            return Err(MoietyError::UnknownElement(s));
        }
        Ok(match h.kind {
            HandleKind::Sigma => self.lt(s, h.generator),
            HandleKind::SigmaPrime => self.lt(h.generator, s),
        })
    }

    /// Materialized members of `h`, as a bitset over element ids.
    pub fn members(&self, h: MoietyHandle) -> FixedBitSet {
        let mut m = match h.kind {
            HandleKind::Sigma => self.down[h.generator as usize].clone(),
            HandleKind::SigmaPrime => self.up[h.generator as usize].clone(),
        };
        m.grow(self.len());
        m.intersect_with(&self.n1_mask);
        m
    }

    /// `h1 ⊆ h2` for same-kind handles, read off the order of `N`.
    pub fn contains(&self, h1: MoietyHandle, h2: MoietyHandle) -> bool {
        debug_assert_eq!(h1.kind, h2.kind);
        match h1.kind {
            HandleKind::Sigma => self.le(h1.generator, h2.generator),
            HandleKind::SigmaPrime => self.le(h2.generator, h1.generator),
        }
    }

    /// Whether handles of opposite kinds share a point of `S`.
    pub fn meets(&self, a: MoietyHandle, b: MoietyHandle) -> bool {
        match (a.kind, b.kind) {
            (HandleKind::SigmaPrime, HandleKind::Sigma) => self.lt(a.generator, b.generator),
            (HandleKind::Sigma, HandleKind::SigmaPrime) => self.lt(b.generator, a.generator),
            // same kind: only materialized points can tell
            _ => {
                let mut m = self.members(a);
                m.intersect_with(&self.members(b));
                m.minimum().is_some()
            }
        }
    }

    /// Adds one point of sort `sort` realizing `req`.
    pub fn grow(&mut self, sort: Sort, req: &GrowRequest) -> Result<ElemId, MoietyError> {
        let n = self.len();
        let mut d = FixedBitSet::with_capacity(n + 1);
        let mut e = FixedBitSet::with_capacity(n + 1);
        for &b in &req.below {
            self.check_known(b)?;
            d.insert(b as usize);
            d.union_with(&self.down[b as usize]);
        }
        for &a in &req.above {
            self.check_known(a)?;
            e.insert(a as usize);
            e.union_with(&self.up[a as usize]);
        }
        for &b in &req.below {
            for &a in &req.above {
                if !self.lt(b, a) {
                    return Err(MoietyError::InconsistentWithK(format!(
                        "{b} is not below {a}"
                    )));
                }
            }
        }
        for x in d.ones() {
            let s = self.sorts[x];
            let ok = match sort {
                Sort::N0 | Sort::N1 => s == Sort::N0,
                Sort::N2 => true,
            };
            if !ok {
                return Err(MoietyError::InconsistentWithK(format!(
                    "{x} of sort {s:?} cannot lie below a point of sort {sort:?}"
                )));
            }
        }
        for x in e.ones() {
            let s = self.sorts[x];
            let ok = match sort {
                Sort::N0 => true,
                Sort::N1 | Sort::N2 => s == Sort::N2,
            };
            if !ok {
                return Err(MoietyError::InconsistentWithK(format!(
                    "{x} of sort {s:?} cannot lie above a point of sort {sort:?}"
                )));
            }
        }
        for &x in &req.incomparable {
            self.check_known(x)?;
            if d.contains(x as usize) || e.contains(x as usize) {
                return Err(MoietyError::InconsistentWithK(format!(
                    "{x} would be comparable to the new point"
                )));
            }
        }
        let id = n as ElemId;
        for x in d.ones() {
            self.up[x].grow(n + 1);
            self.up[x].insert(n);
        }
        for x in e.ones() {
            self.down[x].grow(n + 1);
            self.down[x].insert(n);
        }
        self.sorts.push(sort);
        self.down.push(d);
        self.up.push(e);
        self.n1_mask.grow(n + 1);
        if sort == Sort::N1 {
            self.n1_mask.insert(n);
            self.n1_index.insert(id, self.n1.len() as u32);
            self.n1.push(id);
        }
        Ok(id)
    }

    fn gens_of(&self, sort: Sort) -> Vec<ElemId> {
        self.handles
            .iter()
            .filter(|h| {
                (h.kind == HandleKind::SigmaPrime && sort == Sort::N0)
                    || (h.kind == HandleKind::Sigma && sort == Sort::N2)
            })
            .map(|h| h.generator)
            .collect()
    }

    /// Mints an `N₁` point with relations chosen at random subject to the
    /// forced and forbidden generators.
    pub fn mint_point(
        &mut self,
        forced_below: &[ElemId],
        forced_above: &[ElemId],
        forbid_below: &[ElemId],
        forbid_above: &[ElemId],
    ) -> Result<ElemId, MoietyError> {
        let mut below: Vec<ElemId> = forced_below.to_vec();
        let mut pool = self.gens_of(Sort::N0);
        pool.shuffle(&mut self.rng);
        for x in pool {
            if below.contains(&x) || !self.rng.gen_bool(0.5) {
                continue;
            }
            let blocked = forbid_below.iter().any(|&f| self.le(f, x))
                || forced_above.iter().any(|&a| !self.lt(x, a));
            if !blocked {
                below.push(x);
            }
        }
        let mut above: Vec<ElemId> = forced_above.to_vec();
        let mut pool = self.gens_of(Sort::N2);
        pool.shuffle(&mut self.rng);
        for z in pool {
            if above.contains(&z) || !self.rng.gen_bool(0.5) {
                continue;
            }
            let blocked = forbid_above.iter().any(|&f| self.le(z, f))
                || below.iter().any(|&b| !self.lt(b, z));
            if !blocked {
                above.push(z);
            }
        }
        let req = GrowRequest {
            below,
            above,
            incomparable: forbid_below.iter().chain(forbid_above).copied().collect(),
        };
        self.grow(Sort::N1, &req)
    }

    /// A fresh `S` point under the default genericity policy.
    pub fn mint_generic(&mut self) -> Result<ElemId, MoietyError> {
        self.mint_point(&[], &[], &[], &[])
    }

    fn check_query(&self, q: &ZQuery) -> Result<(), MoietyError> {
        let other = match q.kind {
            HandleKind::Sigma => HandleKind::SigmaPrime,
            HandleKind::SigmaPrime => HandleKind::Sigma,
        };
        for h in q.u.iter().chain(&q.w).chain(&q.avoid) {
            self.check_handle(*h)?;
            if h.kind != q.kind {
                return Err(MoietyError::PreconditionViolated(format!(
                    "{h:?} has the wrong kind"
                )));
            }
        }
        for h in &q.v {
            self.check_handle(*h)?;
            if h.kind != other {
                return Err(MoietyError::PreconditionViolated(format!(
                    "{h:?} has the wrong kind"
                )));
            }
        }
        for &s in q.c.iter().chain(&q.d) {
            if self.sort(s)? != Sort::N1 {
                return Err(MoietyError::PreconditionViolated(format!(
                    "{s} is not in S"
                )));
            }
        }
        let fail = |m: String| Err(MoietyError::PreconditionViolated(m));
        // lower side ⊆ every outer handle
        for &o in q.outer() {
            for &c in &q.c {
                if !self.member(o, c)? {
                    return fail(format!("{c} is not in {o:?}"));
                }
            }
            for &i in q.inner() {
                if !self.contains(i, o) {
                    return fail(format!("{i:?} is not contained in {o:?}"));
                }
            }
        }
        // lower side disjoint from D ∪ ⋃v
        for &c in &q.c {
            if q.d.contains(&c) {
                return fail(format!("{c} is in both C and D"));
            }
            for &v in &q.v {
                if self.member(v, c)? {
                    return fail(format!("{c} is in {v:?}"));
                }
            }
        }
        for &i in q.inner() {
            for &d in &q.d {
                if self.member(i, d)? {
                    return fail(format!("{d} is in {i:?}"));
                }
            }
            for &v in &q.v {
                if self.meets(i, v) {
                    return fail(format!("{i:?} meets {v:?}"));
                }
            }
        }
        Ok(())
    }

    /// Finds a moiety sandwiched as described by `q`, minting a fresh
    /// generator unless the constraints force an existing one.
    pub fn find_z(&mut self, q: &ZQuery) -> Result<MoietyHandle, MoietyError> {
        self.check_query(q)?;
        if let Some(&forced) = q.inner().iter().find(|h| q.outer().contains(h)) {
            if q.avoid.contains(&forced) {
                return Err(MoietyError::ForcedZConflictsAvoid(forced));
            }
            return Ok(forced);
        }
        let inner_gens = q.inner().iter().map(|h| h.generator);
        let outer_gens: Vec<ElemId> = q.outer().iter().map(|h| h.generator).collect();
        let incomparable: Vec<ElemId> =
            q.d.iter()
                .copied()
                .chain(q.v.iter().map(|h| h.generator))
                .collect();
        let (sort, req) = match q.kind {
            HandleKind::Sigma => (
                Sort::N2,
                GrowRequest {
                    below: q.c.iter().copied().chain(inner_gens).collect(),
                    above: outer_gens,
                    incomparable,
                },
            ),
            HandleKind::SigmaPrime => (
                Sort::N0,
                GrowRequest {
                    below: outer_gens,
                    above: q.c.iter().copied().chain(inner_gens).collect(),
                    incomparable,
                },
            ),
        };
        let g = self
            .grow(sort, &req)
            .map_err(|e| MoietyError::PreconditionViolated(e.to_string()))?;
        let h = MoietyHandle {
            kind: q.kind,
            generator: g,
        };
        self.handles.push(h);
        self.certify(h)?;
        Ok(h)
    }

    /// Records separation and witness certificates for a new handle, and
    /// gives it one in-point and one out-point.
    fn certify(&mut self, h: MoietyHandle) -> Result<(), MoietyError> {
        let peers: Vec<MoietyHandle> = self
            .handles
            .iter()
            .copied()
            .filter(|o| *o != h && o.kind == h.kind)
            .collect();
        for o in peers {
            self.ensure_separation(h, o)?;
            self.ensure_separation(o, h)?;
        }
        let related: Vec<(ElemId, ElemId)> = self
            .handles
            .iter()
            .filter(|o| o.kind != h.kind)
            .map(|o| match h.kind {
                HandleKind::Sigma => (o.generator, h.generator),
                HandleKind::SigmaPrime => (h.generator, o.generator),
            })
            .filter(|&(y, z)| self.lt(y, z))
            .collect();
        for (y, z) in related {
            self.ensure_witness(y, z)?;
        }
        self.agenda_tick_for(h)?;
        Ok(())
    }

    /// Makes sure some `s ∈ h1 \ h2` is recorded when `h1 ⊄ h2`.
    pub fn ensure_separation(
        &mut self,
        h1: MoietyHandle,
        h2: MoietyHandle,
    ) -> Result<Option<ElemId>, MoietyError> {
        if self.contains(h1, h2) {
            return Ok(None);
        }
        if let Some(&s) = self.separations.get(&(h1, h2)) {
            return Ok(Some(s));
        }
        let mut diff = self.members(h1);
        diff.difference_with(&self.members(h2));
        let s = match diff.minimum() {
            Some(s) => s as ElemId,
            None => match h1.kind {
                HandleKind::Sigma => self.grow(
                    Sort::N1,
                    &GrowRequest {
                        below: vec![],
                        above: vec![h1.generator],
                        incomparable: vec![h2.generator],
                    },
                )?,
                HandleKind::SigmaPrime => self.grow(
                    Sort::N1,
                    &GrowRequest {
                        below: vec![h1.generator],
                        above: vec![],
                        incomparable: vec![h2.generator],
                    },
                )?,
            },
        };
        self.separations.insert((h1, h2), s);
        Ok(Some(s))
    }

    /// Makes sure some `s` with `y < s < z` is recorded.
    pub fn ensure_witness(&mut self, y: ElemId, z: ElemId) -> Result<ElemId, MoietyError> {
        if let Some(&s) = self.witnesses.get(&(y, z)) {
            return Ok(s);
        }
        let mut both = self.up[y as usize].clone();
        both.grow(self.len());
        both.intersect_with(&self.down[z as usize]);
        both.intersect_with(&self.n1_mask);
        let s = match both.minimum() {
            Some(s) => s as ElemId,
            None => self.grow(
                Sort::N1,
                &GrowRequest {
                    below: vec![y],
                    above: vec![z],
                    incomparable: vec![],
                },
            )?,
        };
        self.witnesses.insert((y, z), s);
        Ok(s)
    }

    fn agenda_tick_for(&mut self, h: MoietyHandle) -> Result<AgendaTick, MoietyError> {
        let g = [h.generator];
        let (in_point, out_point) = match h.kind {
            HandleKind::Sigma => (
                self.mint_point(&[], &g, &[], &[])?,
                self.mint_point(&[], &[], &[], &g)?,
            ),
            HandleKind::SigmaPrime => (
                self.mint_point(&g, &[], &[], &[])?,
                self.mint_point(&[], &[], &g, &[])?,
            ),
        };
        let t = AgendaTick {
            handle: h,
            in_point,
            out_point,
        };
        self.agenda.push(t);
        Ok(t)
    }

    /// Next round-robin step of the coinfiniteness agenda; `None` when there
    /// are no handles yet.
    pub fn agenda_tick(&mut self) -> Result<Option<AgendaTick>, MoietyError> {
        if self.handles.is_empty() {
            return Ok(None);
        }
        let h = self.handles[self.agenda_cursor % self.handles.len()];
        self.agenda_cursor += 1;
        self.agenda_tick_for(h).map(Some)
    }

    pub fn certificates(&self) -> Certificates {
        Certificates {
            separations: self
                .separations
                .iter()
                .map(|(&(a, b), &s)| (a, b, s))
                .collect(),
            witnesses: self
                .witnesses
                .iter()
                .map(|(&(y, z), &s)| (y, z, s))
                .collect(),
            agenda: self.agenda.clone(),
        }
    }

    /// A frozen copy of the current truncation.
    pub fn snapshot(&self) -> KStructure {
        let ids: Vec<ElemId> = (0..self.len() as ElemId).collect();
        let poset = FinitePoset::from_fn_unchecked(ids.clone(), |x, y| self.rel(x, y))
            .expect("ids are distinct");
        let chi = ids.iter().map(|&x| (x, self.sorts[x as usize])).collect();
        KStructure { poset, chi }
    }

    /// Sort labels in id order.
    pub fn chi(&self) -> &[Sort] {
        &self.sorts
    }

    /// All strict relations `x < y` among the first `n` elements.
    pub fn lt_pairs_upto(&self, n: usize) -> Vec<(ElemId, ElemId)> {
        let mut out = vec![];
        for y in 0..n.min(self.len()) {
            for x in self.down[y].ones().filter(|&x| x < n) {
                out.push((x as ElemId, y as ElemId));
            }
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(below: &[ElemId], above: &[ElemId]) -> GrowRequest {
        GrowRequest {
            below: below.to_vec(),
            above: above.to_vec(),
            incomparable: vec![],
        }
    }

    #[test]
    fn k_check_examples() {
        let empty = MoietyEngine::new(0).snapshot();
        assert!(k_check(&empty));

        let poset = FinitePoset::transitive_close(vec![0, 1], &[(0, 1)]).unwrap();
        let chi = [(0, Sort::N1), (1, Sort::N1)].into_iter().collect();
        assert!(!k_check(&KStructure { poset, chi }));

        let poset = FinitePoset::transitive_close(vec![0, 1], &[(1, 0)]).unwrap();
        let chi = [(0, Sort::N0), (1, Sort::N1)].into_iter().collect();
        assert!(!k_check(&KStructure { poset, chi }));
    }

    #[test]
    fn grow_examples() {
        let mut e = MoietyEngine::new(1);
        let s0 = e.grow(Sort::N1, &req(&[], &[])).unwrap();
        let s1 = e.grow(Sort::N1, &req(&[], &[])).unwrap();
        assert!(matches!(
            e.grow(Sort::N1, &req(&[], &[s0])),
            Err(MoietyError::InconsistentWithK(_))
        ));
        let z = e
            .grow(
                Sort::N2,
                &GrowRequest {
                    below: vec![s0],
                    above: vec![],
                    incomparable: vec![s1],
                },
            )
            .unwrap();
        assert!(e.lt(s0, z));
        assert_eq!(e.rel(s1, z), Relation::Inc);
        assert!(k_check(&e.snapshot()));
    }

    #[test]
    fn find_z_examples() {
        let mut e = MoietyEngine::new(2);
        let s0 = e.mint_generic().unwrap();
        let s1 = e.mint_generic().unwrap();
        let fresh = e.find_z(&ZQuery::empty(HandleKind::Sigma)).unwrap();
        assert_eq!(fresh.kind, HandleKind::Sigma);

        let mut q = ZQuery::empty(HandleKind::Sigma);
        q.c = vec![s0];
        q.d = vec![s1];
        let h = e.find_z(&q).unwrap();
        assert!(e.member(h, s0).unwrap());
        assert!(!e.member(h, s1).unwrap());

        let mut q = ZQuery::empty(HandleKind::Sigma);
        q.u = vec![h];
        q.w = vec![h];
        q.c = vec![s0];
        assert_eq!(e.find_z(&q).unwrap(), h);
        q.avoid = vec![h];
        assert_eq!(e.find_z(&q), Err(MoietyError::ForcedZConflictsAvoid(h)));

        let mut q = ZQuery::empty(HandleKind::Sigma);
        q.avoid = vec![h];
        let h2 = e.find_z(&q).unwrap();
        assert_ne!(h2, h);
        let certs = e.certificates();
        assert!(certs
            .separations
            .iter()
            .any(|&(a, b, _)| (a, b) == (h2, h) || (a, b) == (h, h2)));
        assert!(k_check(&e.snapshot()));
    }

    #[test]
    fn separations_match_order() {
        let mut e = MoietyEngine::new(3);
        for _ in 0..4 {
            e.mint_generic().unwrap();
        }
        let a = e.find_z(&ZQuery::empty(HandleKind::SigmaPrime)).unwrap();
        let mut q = ZQuery::empty(HandleKind::SigmaPrime);
        q.w = vec![a];
        let b = e.find_z(&q).unwrap();
        assert!(e.contains(a, b));
        assert!(!e.contains(b, a));
        let certs = e.certificates();
        let sep = certs
            .separations
            .iter()
            .find(|&&(x, y, _)| (x, y) == (b, a))
            .unwrap()
            .2;
        assert!(e.member(b, sep).unwrap() && !e.member(a, sep).unwrap());
    }

    #[test]
    fn precondition_violation() {
        let mut e = MoietyEngine::new(4);
        let s0 = e.mint_generic().unwrap();
        let mut q = ZQuery::empty(HandleKind::Sigma);
        q.c = vec![s0];
        q.d = vec![s0];
        assert!(matches!(
            e.find_z(&q),
            Err(MoietyError::PreconditionViolated(_))
        ));
    }
}
