use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;

use crate::chain::{Foot, Point};
use crate::io::RunSnapshot;
use crate::moiety::{HandleKind, MoietyHandle};
use crate::poset::{ElemId, Relation};
use crate::types::{adapter_by_name, CofinalityAdapter};

/// Indexed read-only access to a snapshot.
pub struct View<'a> {
    pub snap: &'a RunSnapshot,
    pub host: Option<Box<dyn CofinalityAdapter>>,
    pos: HashMap<Point, usize>,
    below: Vec<FixedBitSet>,
    n_below: Vec<FixedBitSet>,
    /// Positions of `S` elements, by `S` index.
    s_pos: BTreeMap<u32, usize>,
}

impl<'a> View<'a> {
    pub fn new(snap: &'a RunSnapshot) -> Self {
        let n = snap.elements.len();
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for &(i, j) in &snap.lt {
            below[j].insert(i);
        }
        let nn = snap.moiety.chi.len();
        let mut n_below = vec![FixedBitSet::with_capacity(nn); nn];
        for &(x, y) in &snap.moiety.lt {
            if (x as usize) < nn && (y as usize) < nn {
                n_below[y as usize].insert(x as usize);
            }
        }
        let pos = snap
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.point, i))
            .collect();
        let s_pos = snap
            .elements
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match e.point {
                Point::S(j) => Some((j, i)),
                _ => None,
            })
            .collect();
        View {
            snap,
            host: adapter_by_name(&snap.host),
            pos,
            below,
            n_below,
            s_pos,
        }
    }

    pub fn len(&self) -> usize {
        self.snap.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snap.elements.is_empty()
    }

    pub fn point(&self, i: usize) -> Point {
        self.snap.elements[i].point
    }

    pub fn label(&self, i: usize) -> String {
        self.snap.elements[i].label.clone()
    }

    pub fn pos(&self, p: Point) -> Option<usize> {
        self.pos.get(&p).copied()
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.below[j].contains(i)
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        i == j || self.lt(i, j)
    }

    pub fn rel(&self, i: usize, j: usize) -> Relation {
        if self.lt(i, j) {
            Relation::Lt
        } else if self.lt(j, i) {
            Relation::Gt
        } else {
            Relation::Inc
        }
    }

    pub fn below(&self, j: usize) -> &FixedBitSet {
        &self.below[j]
    }

    pub fn lt_str(&self, i: usize, j: usize) -> String {
        let r = match self.rel(i, j) {
            Relation::Lt => "<",
            Relation::Gt => ">",
            Relation::Inc => "⊥",
        };
        format!("{} {r} {}", self.label(i), self.label(j))
    }

    /// Materialized `S`, as `(j, position)`.
    pub fn s_points(&self) -> impl Iterator<Item = (u32, usize)> + '_ {
        self.s_pos.iter().map(|(&j, &i)| (j, i))
    }

    pub fn n_lt(&self, x: ElemId, y: ElemId) -> bool {
        self.n_below
            .get(y as usize)
            .is_some_and(|b| b.contains(x as usize))
    }

    pub fn s_node(&self, j: u32) -> Option<ElemId> {
        self.snap.moiety.s_nodes.get(j as usize).copied()
    }

    /// `s_j ∈ h`, read off the `N` table.
    pub fn member(&self, h: MoietyHandle, j: u32) -> bool {
        self.s_node(j).is_some_and(|s| self.member_node(h, s))
    }

    /// Whether the `N` node `s` lies in `h`.
    pub fn member_node(&self, h: MoietyHandle, s: ElemId) -> bool {
        match h.kind {
            HandleKind::Sigma => self.n_lt(s, h.generator),
            HandleKind::SigmaPrime => self.n_lt(h.generator, s),
        }
    }

    pub fn foot_contains(&self, f: &Foot, j: u32) -> bool {
        match f {
            Foot::All => true,
            Foot::Parts { points, handles } => {
                points.contains(&j) || handles.iter().any(|&h| self.member(h, j))
            }
        }
    }

    pub fn in_v(&self, a: u64) -> Option<bool> {
        self.host
            .as_deref()
            .map(|h| self.snap.descriptor.in_v(h, a))
    }

    pub fn host_rel(&self, a: u64, b: u64) -> Option<Relation> {
        self.host.as_deref().map(|h| h.rel(a, b))
    }

    /// `m ∈ S⁺` on the truncation.
    pub fn in_s_up(&self, i: usize) -> bool {
        self.point(i).is_s() || self.s_points().any(|(_, s)| self.lt(s, i))
    }

    /// `m ∈ S⁻` on the truncation.
    pub fn in_s_down(&self, i: usize) -> bool {
        self.point(i).is_s() || self.s_points().any(|(_, s)| self.lt(i, s))
    }

    /// `m ⁻ ∩ S` on the truncation, as a bitset over `S` indices.
    pub fn low_s_bits(&self, i: usize) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.s_pos.len() + 1);
        for (j, s) in self.s_points() {
            if self.lt(s, i) || s == i {
                out.grow(j as usize + 1);
                out.insert(j as usize);
            }
        }
        out
    }

    /// Stage members (materialized orbit) of the stage of element `i`.
    pub fn orbit_of(&self, i: usize) -> Vec<usize> {
        let st = self.snap.elements[i].stage;
        if st == 0 {
            return vec![i];
        }
        self.snap.stages[st as usize]
            .members
            .iter()
            .filter_map(|&p| self.pos(p))
            .collect()
    }
}
