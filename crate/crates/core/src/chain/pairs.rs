use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::universe::StageRoute;
use super::{ChainError, Foot, Point, StagedUniverse, Support};
use crate::moiety::{HandleKind, MoietyHandle, ZQuery};
use crate::poset::Relation;

/// A pair `(U, W)` given by finite parts plus at most one moiety on each
/// side (`Z ∈ Σ` joins `U`, `Y ∈ Σ′` joins `W`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AcceptablePair(pub Support);

impl AcceptablePair {
    pub fn finite(u: impl IntoIterator<Item = Point>, w: impl IntoIterator<Item = Point>) -> Self {
        AcceptablePair(Support::new(u, None, w, None))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    /// Some member of `U` is not below some member of `W`.
    Ac1 { detail: String },
    /// `U⁻ ∩ S` is nonempty but not a single `Σ` moiety.
    Ac3NotSigma,
    /// `U⁻ ∩ S` repeats the fingerprint of an existing point.
    Ac3Repeated { handle: MoietyHandle },
    /// `U⁻ ∩ (R ∪ T) = ∅` but `W⁺ ∩ S` is neither `S` nor a `Σ′` moiety.
    Ac4,
    /// A support point is not an element yet.
    Unknown { point: Point },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarKind {
    /// `G_e = G_a` for a single atom.
    Atom,
    /// `G_e = G_{A₀}`.
    Atoms,
}

/// A stabilizer claim recorded by the stabilizer-controlled witness routine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarClaim {
    pub stage: u32,
    pub point: Point,
    pub kind: StarKind,
    pub atoms: Vec<u64>,
}

fn handle_of(f: &Foot) -> Option<MoietyHandle> {
    f.as_handle()
}

impl StagedUniverse {
    fn u_below_w(&self, u: Point, w: Point) -> bool {
        self.lt(u, w)
    }

    fn u_below_y(&self, u: Point, y: MoietyHandle) -> bool {
        match self.up_s(u) {
            Foot::All => true,
            Foot::Parts { handles, .. } => handles
                .iter()
                .any(|&h| h.kind == HandleKind::SigmaPrime && self.engine.contains(y, h)),
        }
    }

    fn z_below_w(&self, z: MoietyHandle, w: Point) -> bool {
        match self.low_s(w) {
            Foot::All => true,
            Foot::Parts { handles, .. } => handles
                .iter()
                .any(|&h| h.kind == HandleKind::Sigma && self.engine.contains(z, h)),
        }
    }

    /// `U⁻ ∩ S` of a support.
    pub fn support_low_s(&self, s: &Support) -> Foot {
        let feet: Vec<Foot> = s.u.iter().map(|&u| self.low_s(u)).collect();
        self.union_feet(feet, s.z)
    }

    /// `W⁺ ∩ S` of a support.
    pub fn support_up_s(&self, s: &Support) -> Foot {
        let feet: Vec<Foot> = s.w.iter().map(|&w| self.up_s(w)).collect();
        self.union_feet(feet, s.y)
    }

    /// All violated acceptability conditions of `pair` over the current chain.
    pub fn violations(&self, pair: &AcceptablePair) -> Vec<Violation> {
        let s = &pair.0;
        let mut out = vec![];
        for p in s.points() {
            if !self.is_materialized(p) {
                out.push(Violation::Unknown { point: p });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for &u in &s.u {
            for &w in &s.w {
                if !self.u_below_w(u, w) {
                    out.push(Violation::Ac1 {
                        detail: format!("{u} is not below {w}"),
                    });
                }
            }
            if let Some(y) = s.y {
                if !self.u_below_y(u, y) {
                    out.push(Violation::Ac1 {
                        detail: format!("{u} is not below the upper moiety"),
                    });
                }
            }
        }
        if let Some(z) = s.z {
            for &w in &s.w {
                if !self.z_below_w(z, w) {
                    out.push(Violation::Ac1 {
                        detail: format!("lower moiety is not below {w}"),
                    });
                }
            }
            if s.y.is_some() {
                out.push(Violation::Ac1 {
                    detail: "lower and upper moieties together".into(),
                });
            }
        }
        let low = self.support_low_s(s);
        if !low.is_empty() {
            match handle_of(&low) {
                Some(h) if h.kind == HandleKind::Sigma => {
                    if self.fingerprints.contains(&h) {
                        out.push(Violation::Ac3Repeated { handle: h });
                    }
                }
                _ => out.push(Violation::Ac3NotSigma),
            }
        }
        let meets_rt = s.z.is_some() || s.u.iter().any(|&u| self.in_rt_up(u));
        if !meets_rt {
            let ok = match self.support_up_s(s) {
                Foot::All => true,
                f => handle_of(&f).is_some_and(|h| h.kind == HandleKind::SigmaPrime),
            };
            if !ok {
                out.push(Violation::Ac4);
            }
        }
        out
    }

    pub fn is_acceptable(&self, pair: &AcceptablePair) -> bool {
        self.violations(pair).is_empty()
    }

    /// Relation of `x` to a realization of `τ(U, W)`: `Lt` on `U⁻`, `Gt` on
    /// `W⁺`, `Inc` elsewhere.
    pub fn tau_rel(&self, pair: &AcceptablePair, x: Point) -> Relation {
        let s = &pair.0;
        if s.u.iter().any(|&u| self.le(x, u)) || s.z.is_some_and(|z| self.below_moiety(x, z)) {
            Relation::Lt
        } else if s.w.iter().any(|&w| self.le(w, x)) || s.y.is_some_and(|y| self.above_moiety(x, y))
        {
            Relation::Gt
        } else {
            Relation::Inc
        }
    }

    /// Whether `(U₀, V₀, W₀)` of elements is a valid finite triple.
    pub fn is_valid_finite_triple(&self, u0: &[Point], v0: &[Point], w0: &[Point]) -> bool {
        let all: Vec<Point> = u0.iter().chain(v0).chain(w0).copied().collect();
        let distinct: BTreeSet<Point> = all.iter().copied().collect();
        distinct.len() == all.len()
            && all.iter().all(|&p| self.is_materialized(p))
            && u0.iter().all(|&u| w0.iter().all(|&w| self.lt(u, w)))
            && v0
                .iter()
                .all(|&v| !u0.iter().any(|&u| self.le(v, u)) && !w0.iter().any(|&w| self.le(w, v)))
    }

    /// `U₀⁻ ∩ S ≠ ∅`.
    pub fn meets_s_below(&self, u0: &[Point]) -> bool {
        u0.iter().any(|&u| self.in_s_up(u))
    }

    fn sigma_handle(&self, f: Foot, what: &str) -> Result<Option<MoietyHandle>, ChainError> {
        if f.is_empty() {
            return Ok(None);
        }
        handle_of(&f)
            .map(Some)
            .ok_or_else(|| ChainError::PreconditionViolated(format!("{what} is not a moiety")))
    }

    fn finite_nodes(&self, f: &Foot, what: &str) -> Result<Vec<u32>, ChainError> {
        f.finite_points()
            .map(|ps| ps.iter().map(|&j| self.s_node(j)).collect())
            .ok_or_else(|| ChainError::PreconditionViolated(format!("{what} is not finite")))
    }

    /// An acceptable pair whose type lies in `⟨U₀, V₀, W₀⟩`, adding a fresh
    /// moiety when needed.
    pub fn enough_aps(
        &mut self,
        u0: &[Point],
        v0: &[Point],
        w0: &[Point],
    ) -> Result<AcceptablePair, ChainError> {
        if !self.is_valid_finite_triple(u0, v0, w0) {
            return Err(ChainError::NotAValidTriple(format!(
                "{u0:?} / {v0:?} / {w0:?}"
            )));
        }
        let pair = if self.meets_s_below(u0) {
            let mut q = ZQuery::empty(HandleKind::Sigma);
            for &u in u0 {
                match u {
                    Point::S(j) => q.c.push(self.s_node(j)),
                    _ => {
                        if let Some(h) = self.sigma_handle(self.low_s(u), "u⁻ ∩ S")? {
                            q.u.push(h);
                        }
                    }
                }
            }
            for &v in v0 {
                let f = self.up_s(v);
                if self.in_rt_up(v) {
                    q.d.extend(self.finite_nodes(&f, "v⁺ ∩ S")?);
                } else if let Some(h) = self.sigma_handle(f, "v⁺ ∩ S")? {
                    q.v.push(h);
                }
            }
            for &w in w0 {
                match self.sigma_handle(self.low_s(w), "w⁻ ∩ S")? {
                    Some(h) => q.w.push(h),
                    None => {
                        return Err(ChainError::PreconditionViolated(format!(
                            "{w} is not above S"
                        )))
                    }
                }
            }
            q.avoid = self.fingerprints.iter().copied().collect();
            let z = self.engine.find_z(&q)?;
            self.sync_s();
            AcceptablePair(Support::new(
                u0.iter().copied(),
                Some(z),
                w0.iter().copied(),
                None,
            ))
        } else {
            let direct = AcceptablePair::finite(u0.iter().copied(), w0.iter().copied());
            let all_above = w0.iter().any(|&w| self.up_s(w) == Foot::All);
            if u0.iter().any(|&u| self.in_rt_up(u)) || all_above {
                direct
            } else {
                let mut q = ZQuery::empty(HandleKind::SigmaPrime);
                for &u in u0 {
                    match self.up_s(u) {
                        Foot::All => {}
                        f => {
                            if let Some(h) = self.sigma_handle(f, "u⁺ ∩ S")? {
                                q.u.push(h);
                            }
                        }
                    }
                }
                for &v in v0 {
                    match v {
                        Point::S(j) => q.d.push(self.s_node(j)),
                        _ => {
                            if let Some(h) = self.sigma_handle(self.low_s(v), "v⁻ ∩ S")? {
                                q.v.push(h);
                            }
                        }
                    }
                }
                for &w in w0 {
                    let f = self.up_s(w);
                    if self.in_rt_up(w) {
                        q.c.extend(self.finite_nodes(&f, "w⁺ ∩ S")?);
                    } else if let Some(h) = self.sigma_handle(f, "w⁺ ∩ S")? {
                        q.w.push(h);
                    }
                }
                let y = self.engine.find_z(&q)?;
                self.sync_s();
                AcceptablePair(Support::new(
                    u0.iter().copied(),
                    None,
                    w0.iter().copied(),
                    Some(y),
                ))
            }
        };
        let v = self.violations(&pair);
        if v.is_empty() {
            Ok(pair)
        } else {
            Err(ChainError::NotAcceptable(v))
        }
    }

    /// `B ∗ (U, W)`: opens a stage for the orbit of `τ(U, W)` and explores up
    /// to `orbit_budget` orbit images. Returns the representative.
    pub fn extend(
        &mut self,
        pair: &AcceptablePair,
        route: StageRoute,
        orbit_budget: usize,
    ) -> Result<Point, ChainError> {
        let v = self.violations(pair);
        if !v.is_empty() {
            return Err(ChainError::NotAcceptable(v));
        }
        let support = self.canonicalize(pair.0.clone());
        let rep = self.open_stage(route, support)?;
        let stage = self.last_stage();
        self.expand_orbit(stage, orbit_budget)?;
        self.freeze();
        Ok(rep)
    }

    /// `t′_a`: `t_a` for `a ∈ V_p`, else `a`.
    pub fn t_prime(&self, a: u64) -> Point {
        if self.in_v(a) {
            Point::T(a)
        } else {
            Point::A(a)
        }
    }

    /// A finite `A₀` with `G_{A₀} ⊆ G_{U₀ ∪ W₀}`.
    pub fn a0_of(&self, pts: &[Point]) -> Vec<u64> {
        let set: BTreeSet<u64> = pts.iter().flat_map(|&p| self.a0_cert(p)).collect();
        set.into_iter().collect()
    }

    /// Realizes `⟨U₀, V₀, W₀⟩` (with `U₀⁻ ∩ S ≠ ∅`) through `d + 2` stages
    /// whose stabilizers are controlled; returns `e_0 … e_{d+1}`.
    pub fn enough_aps2(
        &mut self,
        u0: &[Point],
        v0: &[Point],
        w0: &[Point],
        task: usize,
        orbit_budget: usize,
    ) -> Result<(Vec<Point>, Vec<StarClaim>), ChainError> {
        if !self.is_valid_finite_triple(u0, v0, w0) {
            return Err(ChainError::NotAValidTriple(format!(
                "{u0:?} / {v0:?} / {w0:?}"
            )));
        }
        if !self.meets_s_below(u0) {
            return Err(ChainError::PreconditionViolated("U₀⁻ ∩ S is empty".into()));
        }
        let s0 = Point::S(0);
        let both: Vec<Point> = u0.iter().chain(w0).copied().collect();
        let atoms = self.a0_of(&both);
        let d = atoms.len() as u32;
        let steps = d + 2;
        let mut es = vec![];
        let mut claims = vec![];
        for (i, &a) in atoms.iter().enumerate() {
            let t = self.t_prime(a);
            self.materialize(t)?;
            let pair = self.enough_aps(&[t, s0], &[], &[])?;
            let route = StageRoute::EnoughAps2 {
                task,
                step: i as u32,
                steps,
            };
            let e = self.extend(&pair, route, orbit_budget)?;
            claims.push(StarClaim {
                stage: self.last_stage(),
                point: e,
                kind: StarKind::Atom,
                atoms: vec![a],
            });
            es.push(e);
        }
        let mut ud: Vec<Point> = u0.to_vec();
        ud.extend(es.iter().copied());
        let pair = self.enough_aps(&ud, &[], &[])?;
        let ed = self.extend(
            &pair,
            StageRoute::EnoughAps2 {
                task,
                step: d,
                steps,
            },
            orbit_budget,
        )?;
        claims.push(StarClaim {
            stage: self.last_stage(),
            point: ed,
            kind: StarKind::Atoms,
            atoms: atoms.clone(),
        });
        es.push(ed);
        let mut wd = vec![ed];
        wd.extend(w0.iter().copied());
        let pair = self.enough_aps(u0, v0, &wd)?;
        let last = self.extend(
            &pair,
            StageRoute::EnoughAps2 {
                task,
                step: d + 1,
                steps,
            },
            orbit_budget,
        )?;
        claims.push(StarClaim {
            stage: self.last_stage(),
            point: last,
            kind: StarKind::Atoms,
            atoms,
        });
        es.push(last);
        Ok((es, claims))
    }
}
