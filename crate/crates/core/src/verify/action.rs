use std::collections::{HashMap, HashSet};

use crate::chain::{Point, Support};
use crate::io::RunSnapshot;
use crate::types::{words_up_to, CofinalityAdapter, GenWord};

/// The action of generator words on recorded elements, computed structurally:
/// a constructed point is identified by its stage and support, so its image
/// is the point with the same stage and the image support.
pub struct WordAction<'a> {
    host: &'a dyn CofinalityAdapter,
    intern: HashMap<(u32, Support), Point>,
    stage: HashMap<Point, u32>,
    support: HashMap<Point, Support>,
    next: u32,
}

impl<'a> WordAction<'a> {
    pub fn new(snap: &RunSnapshot, host: &'a dyn CofinalityAdapter) -> Self {
        let mut intern = HashMap::new();
        let mut stage = HashMap::new();
        let mut support = HashMap::new();
        let mut next = 0;
        for e in &snap.elements {
            if let (Point::C(id), Some(s)) = (e.point, &e.support) {
                intern.insert((e.stage, s.clone()), e.point);
                stage.insert(e.point, e.stage);
                support.insert(e.point, s.clone());
                next = next.max(id + 1);
            }
        }
        WordAction {
            host,
            intern,
            stage,
            support,
            next,
        }
    }

    /// Words of length `1..=bound`.
    pub fn words(&self, bound: usize) -> Vec<GenWord> {
        words_up_to(self.host.generator_count(), bound)
    }

    /// Image of `p` under `w`; `memo` caches images for this word.
    pub fn image(&mut self, w: &GenWord, p: Point, memo: &mut HashMap<Point, Point>) -> Point {
        match p {
            Point::A(a) => Point::A(w.apply(self.host, a)),
            Point::T(a) => Point::T(w.apply(self.host, a)),
            Point::R(_) | Point::S(_) => p,
            Point::C(_) => {
                if let Some(&q) = memo.get(&p) {
                    return q;
                }
                let Some(s) = self.support.get(&p).cloned() else {
                    return p;
                };
                let st = self.stage[&p];
                let u: Vec<Point> = s.u.iter().map(|&x| self.image(w, x, memo)).collect();
                let ws: Vec<Point> = s.w.iter().map(|&x| self.image(w, x, memo)).collect();
                let img = Support::new(u, s.z, ws, s.y);
                let q = match self.intern.get(&(st, img.clone())) {
                    Some(&q) => q,
                    None => {
                        let q = Point::C(self.next);
                        self.next += 1;
                        self.intern.insert((st, img.clone()), q);
                        self.stage.insert(q, st);
                        self.support.insert(q, img);
                        q
                    }
                };
                memo.insert(p, q);
                q
            }
        }
    }

    pub fn fixes_atoms(&self, w: &GenWord, atoms: &[u64]) -> bool {
        atoms.iter().all(|&a| w.apply(self.host, a) == a)
    }

    /// Words grouped by identical action on the listed atoms and points;
    /// returns one representative per class.
    pub fn distinct_words(
        &mut self,
        bound: usize,
        atoms: &[u64],
        points: &[Point],
    ) -> Vec<GenWord> {
        let mut seen = HashSet::new();
        let mut out = vec![GenWord::identity()];
        let mut memo = HashMap::new();
        let id_key: Vec<Point> = atoms
            .iter()
            .map(|&a| Point::A(a))
            .chain(points.iter().copied())
            .collect();
        seen.insert(id_key);
        for w in self.words(bound) {
            memo.clear();
            let key: Vec<Point> = atoms
                .iter()
                .map(|&a| Point::A(w.apply(self.host, a)))
                .chain(points.iter().map(|&p| self.image(&w, p, &mut memo)))
                .collect();
            if seen.insert(key) {
                out.push(w);
            }
        }
        out
    }
}
