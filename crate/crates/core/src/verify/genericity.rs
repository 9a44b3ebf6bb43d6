use super::{AuditReport, Failure, View};
use crate::chain::{TaskKind, TaskRecord, TaskStatus};
use crate::io::RunSnapshot;
use crate::poset::Relation;

fn task_str(t: &TaskRecord) -> String {
    let s = |v: &[crate::chain::Point]| {
        v.iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let kind = match t.task.kind {
        TaskKind::Triple => "a",
        TaskKind::Pair => "c",
    };
    format!(
        "#{} ({kind}) ({{{}}}, {{{}}}, {{{}}})",
        t.index,
        s(&t.task.u),
        s(&t.task.v),
        s(&t.task.w)
    )
}

fn check_triple(v: &View, r: &mut AuditReport, t: &TaskRecord, m: usize) {
    let task = &t.task;
    let mut bad = vec![];
    for (set, want) in [
        (&task.u, Relation::Lt),
        (&task.v, Relation::Inc),
        (&task.w, Relation::Gt),
    ] {
        for &p in set {
            match v.pos(p) {
                Some(i) if i != m && v.rel(i, m) == want => {}
                Some(i) => bad.push(v.lt_str(i, m)),
                None => bad.push(format!("{p} missing")),
            }
        }
    }
    r.check(bad.is_empty(), || {
        Failure::new("a", "witness type is outside the basic open")
            .with_elements([task_str(t), v.label(m)])
            .with_relations(bad)
    });
}

fn check_pair(v: &View, r: &mut AuditReport, t: &TaskRecord, m: usize) {
    let task = &t.task;
    let us: Vec<usize> = task.u.iter().filter_map(|&p| v.pos(p)).collect();
    let ws: Vec<usize> = task.w.iter().filter_map(|&p| v.pos(p)).collect();
    if us.len() != task.u.len() || ws.len() != task.w.len() {
        r.fail(Failure::new("c", "support point missing").with_elements([task_str(t)]));
        return;
    }
    let mut bad = vec![];
    for x in 0..v.len() {
        if x == m || v.snap.elements[x].stage > t.enqueued_at {
            continue;
        }
        let want = if us.iter().any(|&u| v.le(x, u)) {
            Relation::Lt
        } else if ws.iter().any(|&w| v.le(w, x)) {
            Relation::Gt
        } else {
            Relation::Inc
        };
        if v.rel(x, m) != want {
            bad.push(v.lt_str(x, m));
        }
    }
    r.check(bad.is_empty(), || {
        Failure::new("c", "witness does not realize τ(U, W) over its stage")
            .with_elements([task_str(t), v.label(m)])
            .with_relations(bad)
    });
}

/// Every queued task below the budget has a recorded witness of the right
/// type; tasks past the budget are pending.
pub fn audit_genericity(snap: &RunSnapshot, support_bound: usize) -> AuditReport {
    let v = View::new(snap);
    let mut r = AuditReport::new("genericity", (0, snap.last_stage()));
    let budget = snap.config.stage_budget as usize;
    r.notes.push(format!(
        "support bound {support_bound}, stage budget {budget}"
    ));
    for t in &snap.tasks {
        if t.task.kind == TaskKind::Triple && t.task.size() > support_bound {
            continue;
        }
        if t.index >= budget || (snap.exhausted && t.status == TaskStatus::Pending) {
            r.pending.push(task_str(t));
            continue;
        }
        match (t.status, t.witness.and_then(|w| v.pos(w))) {
            (TaskStatus::Done, Some(m)) => match t.task.kind {
                TaskKind::Triple => check_triple(&v, &mut r, t, m),
                TaskKind::Pair => check_pair(&v, &mut r, t, m),
            },
            (status, _) => r.fail(
                Failure::new(
                    "ledger",
                    format!(
                        "task below budget is {status:?}: {}",
                        t.note.clone().unwrap_or_default()
                    ),
                )
                .with_elements([task_str(t)]),
            ),
        }
    }
    r
}
