use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::pairs::{AcceptablePair, StarClaim};
use super::universe::{StageRoute, StagedUniverse};
use super::{ChainError, Point, Support};
use crate::types::limits::resolve_upper_limit;
use crate::types::{adapter_by_name, LimitMode};

/// Number of leading `M₀` elements whose finite triples and pairs seed the
/// task queue.
pub const DEFAULT_TASK_WINDOW: usize = 6;

/// Stages allowed per unit of stage budget before the run is cut off.
const STAGE_CAP_FACTOR: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub adapter: String,
    /// Number of queued tasks that must be completed.
    pub stage_budget: u32,
    /// Orbit images explored per stage per epoch.
    pub orbit_budget: usize,
    pub support_bound: usize,
    /// Generator-word length used by stabilizer audits.
    pub word_bound: usize,
    pub seed: u64,
    pub task_window: usize,
}

impl RunConfig {
    pub fn new(adapter: &str, stage_budget: u32, seed: u64) -> Self {
        RunConfig {
            adapter: adapter.to_string(),
            stage_budget,
            orbit_budget: 64,
            support_bound: 3,
            word_bound: 6,
            seed,
            task_window: DEFAULT_TASK_WINDOW,
        }
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        let bad = |m: &str| Err(ChainError::BadConfig(m.to_string()));
        if self.stage_budget == 0 {
            return bad("stage budget must be positive");
        }
        if self.orbit_budget == 0 {
            return bad("orbit budget must be positive");
        }
        if self.support_bound == 0 {
            return bad("support bound must be positive");
        }
        if self.word_bound == 0 {
            return bad("word bound must be positive");
        }
        if self.task_window == 0 {
            return bad("task window must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    /// Witness a finite valid triple `(U₀, V₀, W₀)`.
    Triple,
    /// Realize `τ(U₀, W₀)` for a finite acceptable pair with `U₀⁻ ∩ S = ∅`.
    Pair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub kind: TaskKind,
    pub u: Vec<Point>,
    pub v: Vec<Point>,
    pub w: Vec<Point>,
    /// Set for pair tasks scheduled to break minimality of this point.
    pub breaks: Option<Point>,
}

impl Task {
    pub fn size(&self) -> usize {
        self.u.len() + self.v.len() + self.w.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TaskStatus {
    /// Completed by new stages.
    Done,
    /// Not reached within the budget.
    Pending,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub index: usize,
    pub task: Task,
    /// Last stage frozen when the task was enqueued.
    pub enqueued_at: u32,
    pub status: TaskStatus,
    pub stages: Vec<u32>,
    pub witness: Option<Point>,
    pub note: Option<String>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub mode: LimitMode,
    pub universe: StagedUniverse,
    pub window: Vec<Point>,
    pub tasks: Vec<TaskRecord>,
    pub star_claims: Vec<StarClaim>,
    /// Set when the hard stage cap stopped the run early, or the orbit
    /// budget left some stage orbit incomplete.
    pub exhausted: bool,
}

/// All ways to assign each window element to `U`, `V`, `W` or nothing, with
/// at most `bound` assigned, smallest first.
fn assignments(window: &[Point], bound: usize) -> Vec<(Vec<Point>, Vec<Point>, Vec<Point>)> {
    let n = window.len();
    let mut out = vec![];
    let total = 4usize.pow(n as u32);
    for code in 0..total {
        let (mut u, mut v, mut w) = (vec![], vec![], vec![]);
        let mut c = code;
        for &p in window {
            match c % 4 {
                1 => u.push(p),
                2 => v.push(p),
                3 => w.push(p),
                _ => {}
            }
            c /= 4;
        }
        if u.len() + v.len() + w.len() <= bound {
            out.push((u, v, w));
        }
    }
    out.sort_by_key(|(u, v, w)| u.len() + v.len() + w.len());
    out
}

struct Scheduler {
    uni: StagedUniverse,
    tasks: Vec<TaskRecord>,
    seen: BTreeSet<Task>,
    claims: Vec<StarClaim>,
    scanned: usize,
    orbit_budget: usize,
}

impl PartialOrd for Task {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Task {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.kind as u8, &self.u, &self.v, &self.w, &self.breaks).cmp(&(
            other.kind as u8,
            &other.u,
            &other.v,
            &other.w,
            &other.breaks,
        ))
    }
}

impl Scheduler {
    fn enqueue(&mut self, task: Task) {
        if self.seen.insert(task.clone()) {
            let index = self.tasks.len();
            self.tasks.push(TaskRecord {
                index,
                task,
                enqueued_at: self.uni.last_stage(),
                status: TaskStatus::Pending,
                stages: vec![],
                witness: None,
                note: None,
            });
        }
    }

    /// Materialization tick, one coinfiniteness step and orbit completion.
    fn epoch(&mut self) -> Result<(), ChainError> {
        self.uni.tick()?;
        self.uni.engine.agenda_tick()?;
        self.uni.sync_s();
        for st in self.uni.incomplete_stages() {
            self.uni.expand_orbit(st, self.orbit_budget)?;
        }
        Ok(())
    }

    fn run_task(&mut self, i: usize) -> Result<(), ChainError> {
        let t = self.tasks[i].task.clone();
        let before = self.uni.last_stage();
        let result: Result<Point, ChainError> = match t.kind {
            TaskKind::Triple => {
                if self.uni.meets_s_below(&t.u) {
                    self.uni
                        .enough_aps2(&t.u, &t.v, &t.w, i, self.orbit_budget)
                        .map(|(es, claims)| {
                            self.claims.extend(claims);
                            *es.last().expect("at least two stages")
                        })
                } else {
                    self.uni.enough_aps(&t.u, &t.v, &t.w).and_then(|pair| {
                        self.uni
                            .extend(&pair, StageRoute::EnoughAps { task: i }, self.orbit_budget)
                    })
                }
            }
            TaskKind::Pair => {
                let pair = AcceptablePair(Support::new(t.u.clone(), None, t.w.clone(), None));
                self.uni.extend(
                    &pair,
                    StageRoute::AcceptablePair { task: i },
                    self.orbit_budget,
                )
            }
        };
        let rec = &mut self.tasks[i];
        rec.stages = (before + 1..=self.uni.last_stage()).collect();
        match result {
            Ok(x) => {
                rec.status = TaskStatus::Done;
                rec.witness = Some(x);
            }
            Err(ChainError::Moiety(e)) => return Err(ChainError::Moiety(e)),
            Err(e) => {
                rec.status = TaskStatus::Failed;
                rec.note = Some(e.to_string());
            }
        }
        Ok(())
    }

    /// `m ⊥ S` and `m` has type `q` over the materialized part of `A`.
    fn q_typed_off_s(&self, m: Point) -> bool {
        if self.uni.in_s_up(m) || self.uni.in_s_down(m) {
            return false;
        }
        self.uni.elements().iter().all(|&x| match x {
            Point::A(a) => {
                let r = self.uni.rel(x, m);
                if self.uni.in_v(a) {
                    r == crate::poset::Relation::Lt
                } else {
                    r == crate::poset::Relation::Inc
                }
            }
            _ => true,
        })
    }

    /// Enqueues follow-up tasks for elements materialized since the last scan.
    fn scan_new(&mut self) {
        let n = self.uni.elements().len();
        let fresh: Vec<Point> = self.uni.elements()[self.scanned..n].to_vec();
        self.scanned = n;
        for m in fresh {
            let Point::C(id) = m else { continue };
            let stage = self.uni.stage_of(m);
            if self.uni.stages()[stage as usize].rep == Some(m) {
                self.enqueue(Task {
                    kind: TaskKind::Triple,
                    u: vec![m],
                    v: vec![],
                    w: vec![],
                    breaks: None,
                });
                self.enqueue(Task {
                    kind: TaskKind::Triple,
                    u: vec![],
                    v: vec![m],
                    w: vec![],
                    breaks: None,
                });
            }
            if self.q_typed_off_s(m) {
                let s = self.uni.constructed(id).support.clone();
                let mut w: Vec<Point> = s.w.into_iter().collect();
                w.push(m);
                self.enqueue(Task {
                    kind: TaskKind::Pair,
                    u: s.u.into_iter().collect(),
                    v: vec![],
                    w,
                    breaks: Some(m),
                });
            }
        }
    }
}

/// Builds `M₀` over the named adapter and works through the task queue in
/// FIFO order until `stage_budget` tasks are processed.
pub fn run_scheduler(config: &RunConfig) -> Result<RunOutcome, ChainError> {
    config.validate()?;
    let adapter = adapter_by_name(&config.adapter)
        .ok_or_else(|| ChainError::BadConfig(format!("unknown adapter {}", config.adapter)))?;
    let (host, p, mode) = resolve_upper_limit(adapter)?;
    let mut uni = StagedUniverse::build_m0(host, p, config.seed)?;
    while uni.elements().len() < config.task_window {
        uni.tick()?;
    }
    uni.stages[0].frozen_at = uni.elements().len();
    let window: Vec<Point> = uni.elements()[..config.task_window].to_vec();
    let scanned = uni.elements().len();
    let mut sch = Scheduler {
        uni,
        tasks: vec![],
        seen: BTreeSet::new(),
        claims: vec![],
        scanned,
        orbit_budget: config.orbit_budget,
    };

    let mut pairs = vec![];
    for (u, v, w) in assignments(&window, config.support_bound) {
        let size = u.len() + v.len() + w.len();
        if sch.uni.is_valid_finite_triple(&u, &v, &w) {
            pairs.push((
                size,
                Task {
                    kind: TaskKind::Triple,
                    u: u.clone(),
                    v: v.clone(),
                    w: w.clone(),
                    breaks: None,
                },
            ));
        }
        if v.is_empty() && !sch.uni.meets_s_below(&u) {
            let pair = AcceptablePair::finite(u.iter().copied(), w.iter().copied());
            if sch.uni.is_acceptable(&pair) {
                pairs.push((
                    size,
                    Task {
                        kind: TaskKind::Pair,
                        u,
                        v: vec![],
                        w,
                        breaks: None,
                    },
                ));
            }
        }
    }
    pairs.sort_by_key(|(size, t)| (*size, t.kind as u8));
    for (_, t) in pairs {
        sch.enqueue(t);
    }

    let cap = config.stage_budget.saturating_mul(STAGE_CAP_FACTOR);
    let mut exhausted = false;
    let mut i = 0;
    while i < sch.tasks.len() && i < config.stage_budget as usize {
        if sch.uni.last_stage() >= cap {
            exhausted = true;
            break;
        }
        sch.epoch()?;
        sch.run_task(i)?;
        sch.scan_new();
        i += 1;
    }
    // an orbit left open by the orbit budget is not a G-poset stage yet
    exhausted |= !sch.uni.incomplete_stages().is_empty();
    sch.uni.freeze();
    Ok(RunOutcome {
        config: config.clone(),
        mode,
        universe: sch.uni,
        window,
        tasks: sch.tasks,
        star_claims: sch.claims,
        exhausted,
    })
}
