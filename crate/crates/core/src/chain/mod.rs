//! The staged construction `M₀ ⊆ M₁ ⊆ …`.
//!
//! Points of `M₀ = A ∪ R ∪ S ∪ T` are addressed by index. A constructed point
//! is identified by its stage and the canonical support `(U, W)` of its type;
//! its relations to every other point, present or future, are computed from
//! that support.

mod pairs;
mod scheduler;
mod universe;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moiety::{MoietyError, MoietyHandle};
use crate::types::TypeError;

pub use pairs::{AcceptablePair, StarClaim, StarKind, Violation};
pub use scheduler::{
    run_scheduler, RunConfig, RunOutcome, Task, TaskKind, TaskRecord, TaskStatus,
    DEFAULT_TASK_WINDOW,
};
pub use universe::{Constructed, Stage, StageRoute, StagedUniverse};

/// A point of the universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Point {
    /// `a_i` of the host.
    A(u64),
    /// `r_i`.
    R(u64),
    /// `s_j`, the `j`-th point of `N₁`.
    S(u32),
    /// `t_a` for `a ∈ V_p`.
    T(u64),
    /// A constructed point, by interned id.
    C(u32),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::A(i) => write!(f, "a{i}"),
            Point::R(i) => write!(f, "r{i}"),
            Point::S(j) => write!(f, "s{j}"),
            Point::T(a) => write!(f, "t{a}"),
            Point::C(c) => write!(f, "e{c}"),
        }
    }
}

impl Point {
    pub fn is_s(&self) -> bool {
        matches!(self, Point::S(_))
    }

    pub fn is_base(&self) -> bool {
        !matches!(self, Point::C(_))
    }
}

/// Support of a type `τ(U, W)`: finite parts plus at most one moiety on
/// each side.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Support {
    pub u: BTreeSet<Point>,
    pub z: Option<MoietyHandle>,
    pub w: BTreeSet<Point>,
    pub y: Option<MoietyHandle>,
}

impl Support {
    pub fn new(
        u: impl IntoIterator<Item = Point>,
        z: Option<MoietyHandle>,
        w: impl IntoIterator<Item = Point>,
        y: Option<MoietyHandle>,
    ) -> Self {
        Support {
            u: u.into_iter().collect(),
            z,
            w: w.into_iter().collect(),
            y,
        }
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.u.iter().chain(self.w.iter()).copied()
    }
}

/// Intersection of a point's up- or down-set with `S`, described finitely.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Foot {
    /// All of `S`.
    All,
    /// A union of finitely many points (by `S` index) and moieties.
    Parts {
        points: BTreeSet<u32>,
        handles: BTreeSet<MoietyHandle>,
    },
}

impl Foot {
    pub fn empty() -> Self {
        Foot::Parts {
            points: BTreeSet::new(),
            handles: BTreeSet::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Foot::Parts { points, handles } if points.is_empty() && handles.is_empty())
    }

    /// Whether the set is finite (no moiety and not all of `S`).
    pub fn is_finite(&self) -> bool {
        matches!(self, Foot::Parts { handles, .. } if handles.is_empty())
    }

    /// The single moiety this set equals, if it is one.
    pub fn as_handle(&self) -> Option<MoietyHandle> {
        match self {
            Foot::Parts { points, handles } if points.is_empty() && handles.len() == 1 => {
                handles.iter().next().copied()
            }
            _ => None,
        }
    }

    pub fn finite_points(&self) -> Option<&BTreeSet<u32>> {
        match self {
            Foot::Parts { points, handles } if handles.is_empty() => Some(points),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("limit descriptor is not an upper limit")]
    WrongLimitMode,
    #[error("pair is not acceptable: {0:?}")]
    NotAcceptable(Vec<Violation>),
    #[error("not a valid triple: {0}")]
    NotAValidTriple(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("unknown element {0}")]
    UnknownElement(Point),
    #[error("stage budget exhausted after {0} stages")]
    BudgetExhausted(u32),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Moiety(#[from] MoietyError),
    #[error(transparent)]
    Type(#[from] TypeError),
}
