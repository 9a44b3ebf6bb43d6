use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{ChainError, Foot, Point, Support};
use crate::moiety::{HandleKind, MoietyEngine, MoietyHandle};
use crate::poset::Relation;
use crate::types::{is_upper_limit, CofinalityAdapter, LimitDescriptor};

/// A constructed point: its stage and canonical support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constructed {
    pub stage: u32,
    pub support: Support,
}

/// Why a stage was added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum StageRoute {
    Base,
    /// An (a)-task through the one-step witness construction.
    EnoughAps {
        task: usize,
    },
    /// Step `step` of `steps` of an (a)-task through the stabilizer-controlled
    /// witness construction.
    EnoughAps2 {
        task: usize,
        step: u32,
        steps: u32,
    },
    /// A (c)-task realizing an acceptable pair.
    AcceptablePair {
        task: usize,
    },
}

impl StageRoute {
    pub fn label(&self) -> &'static str {
        match self {
            StageRoute::Base => "base",
            StageRoute::EnoughAps { .. } => "a:enough_aps",
            StageRoute::EnoughAps2 { .. } => "a:enough_aps2",
            StageRoute::AcceptablePair { .. } => "c:acceptable_pair",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub index: u32,
    pub route: StageRoute,
    pub rep: Option<Point>,
    /// Interned orbit members discovered so far.
    pub orbit: BTreeSet<u32>,
    /// Orbit members whose generator images are not yet explored.
    pub frontier: VecDeque<u32>,
    pub complete: bool,
    /// Number of materialized elements when the stage was frozen.
    pub frozen_at: usize,
}

/// The append-only universe `M₀ ⊆ M₁ ⊆ …` with its `G`-action.
#[derive(Debug)]
pub struct StagedUniverse {
    host: Box<dyn CofinalityAdapter>,
    p: LimitDescriptor,
    pub(super) engine: MoietyEngine,
    constructed: Vec<Constructed>,
    intern: HashMap<(u32, Support), u32>,
    elements: Vec<Point>,
    position: HashMap<Point, usize>,
    pub(super) stages: Vec<Stage>,
    next_a: u64,
    next_r: u64,
    pub(super) fingerprints: BTreeSet<MoietyHandle>,
    rel_memo: RefCell<HashMap<(Point, Point), Relation>>,
    up_memo: RefCell<HashMap<u32, Foot>>,
    low_memo: RefCell<HashMap<u32, Foot>>,
    act_memo: HashMap<(usize, bool, u32), u32>,
}

impl StagedUniverse {
    /// `M₀` over `host` for the upper-limit type `p`; materializes
    /// `a_0`, `r_0`, `s_0`.
    pub fn build_m0(
        host: Box<dyn CofinalityAdapter>,
        p: LimitDescriptor,
        seed: u64,
    ) -> Result<Self, ChainError> {
        if !is_upper_limit(host.as_ref(), &p)? {
            return Err(ChainError::WrongLimitMode);
        }
        let mut u = StagedUniverse {
            host,
            p,
            engine: MoietyEngine::new(seed),
            constructed: vec![],
            intern: HashMap::new(),
            elements: vec![],
            position: HashMap::new(),
            stages: vec![Stage {
                index: 0,
                route: StageRoute::Base,
                rep: None,
                orbit: BTreeSet::new(),
                frontier: VecDeque::new(),
                complete: true,
                frozen_at: 0,
            }],
            next_a: 0,
            next_r: 0,
            fingerprints: BTreeSet::new(),
            rel_memo: RefCell::new(HashMap::new()),
            up_memo: RefCell::new(HashMap::new()),
            low_memo: RefCell::new(HashMap::new()),
            act_memo: HashMap::new(),
        };
        u.tick()?;
        u.stages[0].frozen_at = u.elements.len();
        Ok(u)
    }

    pub fn host(&self) -> &dyn CofinalityAdapter {
        self.host.as_ref()
    }

    pub fn descriptor(&self) -> LimitDescriptor {
        self.p
    }

    pub fn engine(&self) -> &MoietyEngine {
        &self.engine
    }

    pub fn elements(&self) -> &[Point] {
        &self.elements
    }

    pub fn position(&self, x: Point) -> Option<usize> {
        self.position.get(&x).copied()
    }

    pub fn is_materialized(&self, x: Point) -> bool {
        self.position.contains_key(&x)
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn constructed(&self, id: u32) -> &Constructed {
        &self.constructed[id as usize]
    }

    pub fn constructed_count(&self) -> usize {
        self.constructed.len()
    }

    pub fn fingerprint_set(&self) -> &BTreeSet<MoietyHandle> {
        &self.fingerprints
    }

    /// `a ∈ V_p`.
    pub fn in_v(&self, a: u64) -> bool {
        self.p.in_v(self.host.as_ref(), a)
    }

    /// `N` id of `s_j`.
    pub fn s_node(&self, j: u32) -> u32 {
        self.engine.n1_points()[j as usize]
    }

    pub fn stage_of(&self, x: Point) -> u32 {
        match x {
            Point::C(id) => self.constructed[id as usize].stage,
            _ => 0,
        }
    }

    pub fn support(&self, x: Point) -> Option<&Support> {
        match x {
            Point::C(id) => Some(&self.constructed[id as usize].support),
            _ => None,
        }
    }

    fn push_element(&mut self, x: Point) {
        if !self.position.contains_key(&x) {
            self.position.insert(x, self.elements.len());
            self.elements.push(x);
        }
    }

    /// Registers every `N₁` point of the engine as an element of `S`.
    pub fn sync_s(&mut self) {
        let n = self.engine.n1_points().len() as u32;
        for j in 0..n {
            self.push_element(Point::S(j));
        }
    }

    fn ensure_s(&mut self, count: u32) -> Result<(), ChainError> {
        while (self.engine.n1_points().len() as u32) < count {
            self.engine.mint_generic()?;
        }
        self.sync_s();
        Ok(())
    }

    /// Makes `x` (and everything its description mentions) an element.
    pub fn materialize(&mut self, x: Point) -> Result<(), ChainError> {
        if self.is_materialized(x) {
            return Ok(());
        }
        match x {
            Point::A(_) => {}
            Point::T(a) => {
                if !self.in_v(a) {
                    return Err(ChainError::UnknownElement(x));
                }
                self.materialize(Point::A(a))?;
            }
            Point::R(i) => self.ensure_s(i as u32 + 1)?,
            Point::S(j) => self.ensure_s(j + 1)?,
            Point::C(id) => {
                let pts: Vec<Point> = self
                    .constructed
                    .get(id as usize)
                    .ok_or(ChainError::UnknownElement(x))?
                    .support
                    .points()
                    .collect();
                for q in pts {
                    self.materialize(q)?;
                }
            }
        }
        self.push_element(x);
        Ok(())
    }

    /// One materialization tick: the next `a` (with `t_a` when `a ∈ V_p`),
    /// the next `r` and a fresh generic `s`.
    pub fn tick(&mut self) -> Result<(), ChainError> {
        while self.is_materialized(Point::A(self.next_a)) {
            self.next_a += 1;
        }
        let a = self.next_a;
        self.materialize(Point::A(a))?;
        if self.in_v(a) {
            self.materialize(Point::T(a))?;
        }
        while self.is_materialized(Point::R(self.next_r)) {
            self.next_r += 1;
        }
        self.materialize(Point::R(self.next_r))?;
        self.engine.mint_generic()?;
        self.sync_s();
        Ok(())
    }

    // ---- order ----

    fn base_rel(&self, x: Point, y: Point) -> Relation {
        use Point::*;
        use Relation::*;
        match (x, y) {
            (A(a), A(b)) => self.host.rel(a, b),
            (A(a), R(_)) => {
                if self.in_v(a) {
                    Inc
                } else {
                    Gt
                }
            }
            (A(a), S(_)) => {
                if self.in_v(a) {
                    Lt
                } else {
                    Inc
                }
            }
            (A(a), T(b)) => {
                if self.in_v(a) && (a == b || self.host.rel(a, b) == Lt) {
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
            (R(_), A(_)) | (S(_), A(_)) | (T(_), A(_)) | (S(_), R(_)) => self.base_rel(y, x).flip(),
            _ => Inc,
        }
    }

    /// Relation of `x` to `y`; `x ≠ y`.
    pub fn rel(&self, x: Point, y: Point) -> Relation {
        if x == y {
            return Relation::Inc;
        }
        if let Some(&r) = self.rel_memo.borrow().get(&(x, y)) {
            return r;
        }
        let (sx, sy) = (self.stage_of(x), self.stage_of(y));
        let r = if x.is_base() && y.is_base() {
            self.base_rel(x, y)
        } else if sx < sy {
            self.rel_to_descriptor(x, y)
        } else if sx > sy {
            self.rel_to_descriptor(y, x).flip()
        } else {
            self.same_stage_rel(x, y)
        };
        let mut memo = self.rel_memo.borrow_mut();
        memo.insert((x, y), r);
        memo.insert((y, x), r.flip());
        r
    }

    pub fn lt(&self, x: Point, y: Point) -> bool {
        self.rel(x, y) == Relation::Lt
    }

    pub fn le(&self, x: Point, y: Point) -> bool {
        x == y || self.lt(x, y)
    }

    /// `x ∈ Z⁻` for a `Σ` moiety `Z`.
    pub fn below_moiety(&self, x: Point, z: MoietyHandle) -> bool {
        if let Point::S(j) = x {
            return self.engine.member(z, self.s_node(j)).unwrap_or(false);
        }
        match self.up_s(x) {
            Foot::All => true,
            Foot::Parts { points, handles } => {
                points
                    .iter()
                    .any(|&j| self.engine.member(z, self.s_node(j)).unwrap_or(false))
                    || handles.iter().any(|&h| self.engine.meets(h, z))
            }
        }
    }

    /// `x ∈ Y⁺` for a `Σ′` moiety `Y`.
    pub fn above_moiety(&self, x: Point, y: MoietyHandle) -> bool {
        if let Point::S(j) = x {
            return self.engine.member(y, self.s_node(j)).unwrap_or(false);
        }
        match self.low_s(x) {
            Foot::All => true,
            Foot::Parts { points, handles } => {
                points
                    .iter()
                    .any(|&j| self.engine.member(y, self.s_node(j)).unwrap_or(false))
                    || handles.iter().any(|&h| self.engine.meets(y, h))
            }
        }
    }

    /// Relation of an earlier point `x` to the constructed `y`, read off `y`'s
    /// support.
    fn rel_to_descriptor(&self, x: Point, y: Point) -> Relation {
        let s = self.support(y).expect("constructed").clone();
        if s.u.iter().any(|&u| self.le(x, u)) || s.z.is_some_and(|z| self.below_moiety(x, z)) {
            Relation::Lt
        } else if s.w.iter().any(|&w| self.le(w, x)) || s.y.is_some_and(|h| self.above_moiety(x, h))
        {
            Relation::Gt
        } else {
            Relation::Inc
        }
    }

    /// `W_x⁺ ∩ U_y⁻ ≠ ∅` over the previous stage.
    fn meets_through(&self, sx: &Support, sy: &Support) -> bool {
        let via_w = sx.w.iter().any(|&w| {
            sy.u.iter().any(|&u| self.le(w, u)) || sy.z.is_some_and(|z| self.below_moiety(w, z))
        });
        via_w
            || sx.y.is_some_and(|h| {
                sy.u.iter().any(|&u| self.above_moiety(u, h))
                    || sy.z.is_some_and(|z| self.engine.meets(h, z))
            })
    }

    fn same_stage_rel(&self, x: Point, y: Point) -> Relation {
        let sx = self.support(x).expect("constructed").clone();
        let sy = self.support(y).expect("constructed").clone();
        if self.meets_through(&sx, &sy) {
            Relation::Lt
        } else if self.meets_through(&sy, &sx) {
            Relation::Gt
        } else {
            Relation::Inc
        }
    }

    // ---- footprints on S ----

    fn simplify(&self, points: BTreeSet<u32>, handles: BTreeSet<MoietyHandle>) -> Foot {
        let keep: BTreeSet<MoietyHandle> = handles
            .iter()
            .copied()
            .filter(|&h| {
                !handles
                    .iter()
                    .any(|&h2| h2 != h && h2.kind == h.kind && self.engine.contains(h, h2))
            })
            .collect();
        let points = points
            .into_iter()
            .filter(|&j| {
                !keep
                    .iter()
                    .any(|&h| self.engine.member(h, self.s_node(j)).unwrap_or(false))
            })
            .collect();
        Foot::Parts {
            points,
            handles: keep,
        }
    }

    pub(super) fn union_feet(
        &self,
        feet: impl IntoIterator<Item = Foot>,
        extra: Option<MoietyHandle>,
    ) -> Foot {
        let mut points = BTreeSet::new();
        let mut handles: BTreeSet<MoietyHandle> = extra.into_iter().collect();
        for f in feet {
            match f {
                Foot::All => return Foot::All,
                Foot::Parts {
                    points: p,
                    handles: h,
                } => {
                    points.extend(p);
                    handles.extend(h);
                }
            }
        }
        self.simplify(points, handles)
    }

    /// `x⁺ ∩ S` (for `x ∉ S`; for `s ∈ S` the singleton).
    pub fn up_s(&self, x: Point) -> Foot {
        match x {
            Point::A(a) => {
                if self.in_v(a) {
                    Foot::All
                } else {
                    Foot::empty()
                }
            }
            Point::R(i) => Foot::Parts {
                points: (0..=i as u32).collect(),
                handles: BTreeSet::new(),
            },
            Point::S(j) => Foot::Parts {
                points: [j].into(),
                handles: BTreeSet::new(),
            },
            Point::T(_) => Foot::empty(),
            Point::C(id) => {
                if let Some(f) = self.up_memo.borrow().get(&id) {
                    return f.clone();
                }
                let s = self.constructed[id as usize].support.clone();
                let f = self.union_feet(s.w.iter().map(|&w| self.up_s(w)), s.y);
                self.up_memo.borrow_mut().insert(id, f.clone());
                f
            }
        }
    }

    /// `x⁻ ∩ S` (for `x ∉ S`; for `s ∈ S` the singleton).
    pub fn low_s(&self, x: Point) -> Foot {
        match x {
            Point::A(_) | Point::R(_) | Point::T(_) => Foot::empty(),
            Point::S(j) => Foot::Parts {
                points: [j].into(),
                handles: BTreeSet::new(),
            },
            Point::C(id) => {
                if let Some(f) = self.low_memo.borrow().get(&id) {
                    return f.clone();
                }
                let s = self.constructed[id as usize].support.clone();
                let f = self.union_feet(s.u.iter().map(|&u| self.low_s(u)), s.z);
                self.low_memo.borrow_mut().insert(id, f.clone());
                f
            }
        }
    }

    /// `x ∈ (R ∪ T)⁺`.
    pub fn in_rt_up(&self, x: Point) -> bool {
        match x {
            Point::R(_) | Point::T(_) | Point::S(_) => true,
            Point::A(a) => !self.in_v(a),
            Point::C(id) => {
                let s = &self.constructed[id as usize].support;
                s.z.is_some() || s.u.iter().any(|&u| self.in_rt_up(u))
            }
        }
    }

    /// `x ∈ S⁺`.
    pub fn in_s_up(&self, x: Point) -> bool {
        x.is_s() || !self.low_s(x).is_empty()
    }

    /// `x ∈ S⁻`.
    pub fn in_s_down(&self, x: Point) -> bool {
        match x {
            Point::S(_) | Point::R(_) => true,
            _ => !self.up_s(x).is_empty(),
        }
    }

    // ---- certificates ----

    /// Finite `A₀` whose pointwise stabilizer fixes `x`.
    pub fn a0_cert(&self, x: Point) -> BTreeSet<u64> {
        match x {
            Point::A(a) | Point::T(a) => [a].into(),
            Point::R(_) | Point::S(_) => BTreeSet::new(),
            Point::C(id) => self.constructed[id as usize]
                .support
                .points()
                .filter(|q| !q.is_s())
                .flat_map(|q| self.a0_cert(q))
                .collect(),
        }
    }

    /// For `x ∈ S⁻ \ S`: finite `C ⊆ V_p` with `x⁻ ∩ V_p = C⁻ ∩ V_p`.
    pub fn c_cert(&self, x: Point) -> Option<BTreeSet<u64>> {
        match x {
            Point::A(a) if self.in_v(a) => Some([a].into()),
            Point::R(_) => Some(BTreeSet::new()),
            Point::C(id) if self.in_s_down(x) => {
                let s = &self.constructed[id as usize].support;
                if s.z.is_some() {
                    return None;
                }
                let mut out = BTreeSet::new();
                for &u in &s.u {
                    out.extend(self.c_cert(u)?);
                }
                Some(out)
            }
            _ => None,
        }
    }

    // ---- G-action ----

    pub fn generator_count(&self) -> usize {
        self.host.generator_count()
    }

    /// Image of `x` under generator `g` (or its inverse); constructed images
    /// are interned but not materialized.
    pub fn apply_gen(&mut self, g: usize, inverse: bool, x: Point) -> Point {
        match x {
            Point::A(a) => Point::A(self.host.apply_generator(g, inverse, a)),
            Point::T(a) => Point::T(self.host.apply_generator(g, inverse, a)),
            Point::R(_) | Point::S(_) => x,
            Point::C(id) => {
                if let Some(&img) = self.act_memo.get(&(g, inverse, id)) {
                    return Point::C(img);
                }
                let c = self.constructed[id as usize].clone();
                let u: Vec<Point> = c
                    .support
                    .u
                    .iter()
                    .map(|&q| self.apply_gen(g, inverse, q))
                    .collect();
                let w: Vec<Point> = c
                    .support
                    .w
                    .iter()
                    .map(|&q| self.apply_gen(g, inverse, q))
                    .collect();
                let sup = self.canonicalize(Support::new(u, c.support.z, w, c.support.y));
                let img = self.intern(c.stage, sup);
                self.act_memo.insert((g, inverse, id), img);
                self.act_memo.insert((g, !inverse, img), id);
                Point::C(img)
            }
        }
    }

    /// Drops redundant generators so that equal types get equal supports.
    pub fn canonicalize(&self, s: Support) -> Support {
        let u: BTreeSet<Point> =
            s.u.iter()
                .copied()
                .filter(|&x| {
                    !s.u.iter().any(|&x2| x2 != x && self.lt(x, x2))
                        && !s.z.is_some_and(|z| self.below_moiety(x, z))
                })
                .collect();
        let w: BTreeSet<Point> =
            s.w.iter()
                .copied()
                .filter(|&x| {
                    !s.w.iter().any(|&x2| x2 != x && self.lt(x2, x))
                        && !s.y.is_some_and(|y| self.above_moiety(x, y))
                })
                .collect();
        Support {
            u,
            z: s.z,
            w,
            y: s.y,
        }
    }

    pub(super) fn intern(&mut self, stage: u32, s: Support) -> u32 {
        if let Some(&id) = self.intern.get(&(stage, s.clone())) {
            return id;
        }
        let id = self.constructed.len() as u32;
        self.constructed.push(Constructed {
            stage,
            support: s.clone(),
        });
        self.intern.insert((stage, s), id);
        if let Some(st) = self.stages.get_mut(stage as usize) {
            st.orbit.insert(id);
        }
        id
    }

    /// Opens a new stage whose orbit representative has support `s`.
    pub(super) fn open_stage(
        &mut self,
        route: StageRoute,
        s: Support,
    ) -> Result<Point, ChainError> {
        let index = self.stages.len() as u32;
        self.stages.push(Stage {
            index,
            route,
            rep: None,
            orbit: BTreeSet::new(),
            frontier: VecDeque::new(),
            complete: false,
            frozen_at: 0,
        });
        let id = self.intern(index, s);
        let rep = Point::C(id);
        self.materialize(rep)?;
        if let Some(h) = self.low_s(rep).as_handle() {
            if h.kind == HandleKind::Sigma {
                self.fingerprints.insert(h);
            }
        }
        let st = &mut self.stages[index as usize];
        st.rep = Some(rep);
        st.frontier.push_back(id);
        Ok(rep)
    }

    /// Explores up to `budget` generator images in the orbit of a stage;
    /// returns how many new points were materialized.
    pub fn expand_orbit(&mut self, stage: u32, budget: usize) -> Result<usize, ChainError> {
        let gens = self.generator_count();
        let mut added = 0;
        while added < budget {
            let Some(c) = self.stages[stage as usize].frontier.pop_front() else {
                break;
            };
            for g in 0..gens {
                for inverse in [false, true] {
                    let img = self.apply_gen(g, inverse, Point::C(c));
                    if !self.is_materialized(img) {
                        self.materialize(img)?;
                        if let Point::C(id) = img {
                            self.stages[stage as usize].frontier.push_back(id);
                        }
                        added += 1;
                    }
                }
            }
        }
        let st = &mut self.stages[stage as usize];
        st.complete = st.frontier.is_empty();
        Ok(added)
    }

    /// Closes the current stage for reading.
    pub fn freeze(&mut self) {
        let n = self.elements.len();
        if let Some(st) = self.stages.last_mut() {
            st.frozen_at = n;
        }
    }

    pub fn last_stage(&self) -> u32 {
        self.stages.len() as u32 - 1
    }

    /// Stages whose orbits still have unexplored images.
    pub fn incomplete_stages(&self) -> Vec<u32> {
        self.stages
            .iter()
            .filter(|s| !s.complete)
            .map(|s| s.index)
            .collect()
    }

    /// Materialized members of the orbit of a stage.
    pub fn materialized_orbit(&self, stage: u32) -> Vec<Point> {
        self.stages[stage as usize]
            .orbit
            .iter()
            .map(|&id| Point::C(id))
            .filter(|&x| self.is_materialized(x))
            .collect()
    }

    /// Relation table of the first `n` elements, as `(i, j)` index pairs with
    /// `elements[i] < elements[j]`.
    pub fn lt_index_pairs(&self, n: usize) -> Vec<(usize, usize)> {
        let els = &self.elements[..n.min(self.elements.len())];
        let mut out = vec![];
        for i in 0..els.len() {
            for j in 0..els.len() {
                if i != j && self.lt(els[i], els[j]) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// `S` index by engine node, for every materialized `s`.
    pub fn s_index_map(&self) -> BTreeMap<u32, u32> {
        self.engine
            .n1_points()
            .iter()
            .enumerate()
            .map(|(j, &n)| (n, j as u32))
            .collect()
    }
}
