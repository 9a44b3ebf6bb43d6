//! The ten acceptance criteria, one pass/fail line each.

mod common;

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use forge_core::chain::{run_scheduler, Point, RunConfig};
use forge_core::io::RunSnapshot;
use forge_core::moiety::{k_check, HandleKind, MoietyEngine, MoietyError, MoietyHandle, ZQuery};
use forge_core::poset::{enumerate_posets, ElemId, ElementSet, FinitePoset, Relation};
use forge_core::types::{
    adapter_by_name, fixed_limit, inc_valid, is_upper_limit, is_valid_triple, join, lt_valid, meet,
    resolve_upper_limit, LimitMode, ValidTriple, BUILTIN_ADAPTERS,
};
use forge_core::verify::{
    audit_ac_props, audit_genericity, audit_minimality, audit_uniqueness, forcing_certificates,
    inject, plain_generic, rigidity_check, AuditReport, Fault, View, FAULTS,
};

type Outcome = Result<String, String>;

fn hosts_upto(n: usize) -> Vec<FinitePoset> {
    (0..=n).flat_map(|k| enumerate_posets(k).unwrap()).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn one_point_validity() -> Outcome {
    let hosts: Vec<FinitePoset> = enumerate_posets(4).unwrap().collect();
    ensure(hosts.len() == 219, || {
        format!("{} labeled 4-posets", hosts.len())
    })?;
    let mut checked = 0;
    for h in &hosts {
        for t in common::partitions(h) {
            let got = is_valid_triple(h, &t).map_err(|e| e.to_string())?;
            ensure(got == common::one_point(h, &t), || {
                format!(
                    "host {:?}, triple {t:?}: library says {got}",
                    h.hasse_edges()
                )
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} partitions"))
}

fn two_point_validity() -> Outcome {
    let mut checked = 0;
    for h in hosts_upto(4) {
        let types = common::oracle_types(&h);
        for p in &types {
            for q in &types {
                let lt = lt_valid(p, q).map_err(|e| e.to_string())?;
                let inc = inc_valid(p, q).map_err(|e| e.to_string())?;
                ensure(lt == common::two_point(&h, p, q, Relation::Lt), || {
                    format!("lt_valid({p:?}, {q:?}) = {lt} over {:?}", h.hasse_edges())
                })?;
                ensure(inc == common::two_point(&h, p, q, Relation::Inc), || {
                    format!("inc_valid({p:?}, {q:?}) = {inc} over {:?}", h.hasse_edges())
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} ordered type pairs"))
}

fn meet_join_and_opens() -> Outcome {
    let hosts = hosts_upto(4);
    let mut checked = 0;
    for h in &hosts {
        let types = common::oracle_types(h);
        for p in &types {
            for q in &types {
                let m = meet(p, q).map_err(|e| e.to_string())?;
                let j = join(p, q).map_err(|e| e.to_string())?;
                ensure(
                    Some(&m) == common::brute_inf(h, &types, p, q).as_ref(),
                    || format!("meet({p:?}, {q:?}) = {m:?}"),
                )?;
                ensure(
                    Some(&j) == common::brute_sup(h, &types, p, q).as_ref(),
                    || format!("join({p:?}, {q:?}) = {j:?}"),
                )?;
                checked += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let big: Vec<&FinitePoset> = hosts.iter().filter(|h| h.len() == 4).collect();
    let mut opens = 0;
    while opens < 1000 {
        let h = big.choose(&mut rng).unwrap();
        let (mut u, mut v, mut w) = (ElementSet::new(), ElementSet::new(), ElementSet::new());
        for &a in h.elements() {
            match rng.gen_range(0..4) {
                0 => u.insert(a),
                1 => v.insert(a),
                2 => w.insert(a),
                _ => false,
            };
        }
        let inside = |t: &ValidTriple| u.is_subset(&t.u) && v.is_subset(&t.v) && w.is_subset(&t.w);
        let members: Vec<ValidTriple> = common::oracle_types(h)
            .into_iter()
            .filter(|t| inside(t))
            .collect();
        if members.is_empty() {
            continue;
        }
        opens += 1;
        for p in &members {
            for q in &members {
                ensure(
                    inside(&meet(p, q).unwrap()) && inside(&join(p, q).unwrap()),
                    || format!("open ({u:?}, {v:?}, {w:?}) not closed at {p:?}, {q:?}"),
                )?;
            }
        }
    }
    Ok(format!("{checked} meet/join pairs, {opens} basic opens"))
}

fn limits() -> Outcome {
    let mut modes = vec![];
    for name in BUILTIN_ADAPTERS {
        let a = adapter_by_name(name).unwrap();
        let (p, mode) = fixed_limit(a.as_ref()).map_err(|e| format!("{name}: {e}"))?;
        ensure(p.is_generator_fixed(a.as_ref(), 512), || {
            format!("{name}: descriptor moved by a generator")
        })?;
        for g in 0..a.generator_count() {
            let moved = (0..512).all(|x| {
                p.in_v(a.as_ref(), x) == p.in_v(a.as_ref(), a.apply_generator(g, false, x))
            });
            ensure(moved, || format!("{name}: generator {g} moves V"))?;
        }
        let seen_upper = common::looks_upper(a.as_ref(), |x| p.in_v(a.as_ref(), x));
        ensure(seen_upper == (mode == LimitMode::Upper), || {
            format!("{name}: mode {mode:?} but truncation oracle says upper = {seen_upper}")
        })?;
        let (op, q, _) =
            resolve_upper_limit(adapter_by_name(name).unwrap()).map_err(|e| e.to_string())?;
        ensure(is_upper_limit(op.as_ref(), &q) == Ok(true), || {
            format!("{name}: resolved host not upper")
        })?;
        ensure(
            common::looks_upper(op.as_ref(), |x| q.in_v(op.as_ref(), x)),
            || format!("{name}: truncation oracle rejects the resolved descriptor"),
        )?;
        modes.push((name, mode));
    }
    let mode_of = |n: &str| modes.iter().find(|m| m.0 == n).map(|m| m.1);
    ensure(
        mode_of("chain-down") == Some(LimitMode::NeedsOpReduction),
        || "chain-down is not NEEDS_OP_REDUCTION".into(),
    )?;
    let op = adapter_by_name("chain-down^op").ok_or("no opposite adapter")?;
    let (_, op_mode) = fixed_limit(op.as_ref()).map_err(|e| e.to_string())?;
    ensure(op_mode == LimitMode::Upper, || {
        format!("chain-down^op gives {op_mode:?}")
    })?;
    let ups = modes.iter().filter(|m| m.1 == LimitMode::Upper).count();
    Ok(format!(
        "{ups} UPPER, {} NEEDS_OP_REDUCTION",
        modes.len() - ups
    ))
}

/// Every constraint of `q` on the answer `h`, read on the current `N₁`.
fn sandwich_holds(e: &MoietyEngine, q: &ZQuery, h: MoietyHandle) -> Result<(), String> {
    let m = |h: MoietyHandle, s: ElemId| e.member(h, s).unwrap();
    ensure(!q.avoid.contains(&h), || format!("{h:?} is avoided"))?;
    for &c in &q.c {
        ensure(m(h, c), || format!("C point {c} outside {h:?}"))?;
    }
    for &d in &q.d {
        ensure(!m(h, d), || format!("D point {d} inside {h:?}"))?;
    }
    for &s in e.n1_points() {
        let inz = m(h, s);
        for &i in q.inner() {
            ensure(!m(i, s) || inz, || format!("{s} ∈ {i:?} but not in {h:?}"))?;
        }
        for &o in q.outer() {
            ensure(!inz || m(o, s), || format!("{s} ∈ {h:?} but not in {o:?}"))?;
        }
        for &v in &q.v {
            ensure(!(inz && m(v, s)), || format!("{s} in both {h:?} and {v:?}"))?;
        }
    }
    Ok(())
}

fn random_query(e: &MoietyEngine, rng: &mut ChaCha8Rng) -> ZQuery {
    let kind = if rng.gen_bool(0.5) {
        HandleKind::Sigma
    } else {
        HandleKind::SigmaPrime
    };
    let same: Vec<MoietyHandle> = e
        .handles()
        .iter()
        .copied()
        .filter(|h| h.kind == kind)
        .collect();
    let other: Vec<MoietyHandle> = e
        .handles()
        .iter()
        .copied()
        .filter(|h| h.kind != kind)
        .collect();
    let pick = |pool: &[MoietyHandle], rng: &mut ChaCha8Rng| -> Vec<MoietyHandle> {
        let k = rng.gen_range(0..=2.min(pool.len()));
        pool.choose_multiple(rng, k).copied().collect()
    };
    let s = e.n1_points();
    let pick_s = |rng: &mut ChaCha8Rng| -> Vec<ElemId> {
        let k = rng.gen_range(0..=2);
        s.choose_multiple(rng, k).copied().collect()
    };
    let mut q = ZQuery::empty(kind);
    q.u = pick(&same, rng);
    q.w = pick(&same, rng);
    q.v = pick(&other, rng);
    q.c = pick_s(rng);
    q.d = pick_s(rng);
    if rng.gen_bool(0.3) {
        q.avoid = pick(&same, rng);
    }
    q
}

fn moiety_engine() -> Outcome {
    let mut e = MoietyEngine::new(11);
    for _ in 0..12 {
        e.mint_generic().unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut answered: Vec<(ZQuery, MoietyHandle)> = vec![];
    let mut rejected = 0;
    while answered.len() < 500 {
        let q = random_query(&e, &mut rng);
        match e.find_z(&q) {
            Ok(h) => {
                sandwich_holds(&e, &q, h)?;
                answered.push((q, h));
            }
            Err(MoietyError::PreconditionViolated(_))
            | Err(MoietyError::ForcedZConflictsAvoid(_)) => rejected += 1,
            Err(err) => return Err(format!("find_z: {err}")),
        }
        ensure(rejected < 100_000, || "query generator starved".into())?;
    }
    ensure(k_check(&e.snapshot()), || {
        "k_check after the queries".into()
    })?;
    for checkpoint in 0..3 {
        for step in 0..40 {
            if step % 2 == 0 {
                e.mint_generic().unwrap();
            } else {
                e.agenda_tick().unwrap();
            }
            ensure(k_check(&e.snapshot()), || {
                format!("k_check at checkpoint {checkpoint}, step {step}")
            })?;
        }
        for (q, h) in &answered {
            sandwich_holds(&e, q, *h).map_err(|m| format!("checkpoint {checkpoint}: {m}"))?;
        }
    }

    // multiplicity 3 with disjoint inner and outer handle sets
    let s = e.n1_points().to_vec();
    let mut base = ZQuery::empty(HandleKind::Sigma);
    base.c = vec![s[0]];
    base.d = vec![s[1]];
    let mut found = vec![];
    for _ in 0..3 {
        let mut q = base.clone();
        q.avoid = found.clone();
        let h = e.find_z(&q).map_err(|err| err.to_string())?;
        sandwich_holds(&e, &q, h)?;
        found.push(h);
    }
    let certs = e.certificates();
    for (i, &a) in found.iter().enumerate() {
        for &b in &found[i + 1..] {
            let sep = certs
                .separations
                .iter()
                .find(|&&(x, y, _)| (x, y) == (a, b) || (x, y) == (b, a));
            let ok =
                sep.is_some_and(|&(x, y, s)| e.member(x, s).unwrap() && !e.member(y, s).unwrap());
            ensure(ok, || format!("{a:?} and {b:?} have no separating point"))?;
        }
    }
    ensure(k_check(&e.snapshot()), || "k_check at the end".into())?;
    Ok(format!(
        "{} answered ({rejected} inconsistent skipped), |N| = {}",
        answered.len(),
        e.len()
    ))
}

fn audits() -> Outcome {
    let mut pending = 0;
    for name in BUILTIN_ADAPTERS {
        let out =
            run_scheduler(&RunConfig::new(name, 40, 7)).map_err(|e| format!("{name}: {e}"))?;
        ensure(!out.exhausted, || format!("{name}: budget exhausted"))?;
        let snap = RunSnapshot::capture(&out);
        let reports: [AuditReport; 4] = [
            audit_ac_props(&snap),
            audit_minimality(&snap),
            audit_genericity(&snap, 3),
            audit_uniqueness(&snap),
        ];
        for r in &reports {
            ensure(r.passed(), || {
                format!("{name} {}: {:?}", r.audit, r.failures.first())
            })?;
            pending += r.pending.len();
        }
    }
    Ok(format!(
        "6 adapters × 4 audits, {pending} pending beyond budget"
    ))
}

fn rigidity() -> Outcome {
    let out = run_scheduler(&RunConfig::new("antichain", 40, 7)).map_err(|e| e.to_string())?;
    let snap = RunSnapshot::capture(&out);
    let v = View::new(&snap);
    for n in 2..=7usize {
        let count = rigidity_check(&v, n).ok_or(format!("R_{n} ∪ S_{n} not materialized"))?;
        let pts: Vec<usize> = (0..n as u64)
            .map(|i| v.pos(Point::R(i)).unwrap())
            .chain((0..n as u32).map(|j| v.pos(Point::S(j)).unwrap()))
            .collect();
        let lt = |a: usize, b: usize| v.lt(pts[a], pts[b]);
        let brute = common::brute_automorphisms(2 * n, lt);
        ensure(count == 1 && brute == 1, || {
            format!("n = {n}: {count} automorphisms, brute force {brute}")
        })?;
        ensure(common::signatures_distinct(2 * n, lt), || {
            format!("n = {n}: repeated signatures")
        })?;
    }
    Ok("R_n ∪ S_n rigid for n = 2..7".into())
}

fn forcing() -> Outcome {
    let p = plain_generic(60, 7);
    ensure(p.len() == 60, || format!("{} points", p.len()))?;
    let score = |v: ElemId| {
        let below = p.elements().iter().filter(|&&m| p.lt(m, v)).count();
        let inc = p
            .elements()
            .iter()
            .filter(|&&m| m != v && p.rel(m, v) == Ok(Relation::Inc))
            .count();
        below.min(inc)
    };
    let v = p
        .elements()
        .iter()
        .copied()
        .max_by_key(|&v| (score(v), std::cmp::Reverse(v)))
        .unwrap();
    let r = forcing_certificates(&p, v, 20, 7);
    ensure(r.passed(), || format!("{:?}", r.failures.first()))?;
    let counts: Vec<&String> = r.notes.iter().take(2).collect();
    ensure(counts.iter().all(|n| n.starts_with("20 ")), || {
        format!("fewer than 20 samples per case: {counts:?}")
    })?;
    Ok(format!("v = {v}: {}", r.notes.join("; ")))
}

fn determinism_and_monotonicity() -> Outcome {
    for name in BUILTIN_ADAPTERS {
        let a =
            RunSnapshot::capture(&run_scheduler(&RunConfig::new(name, 40, 7)).unwrap()).to_json();
        let b =
            RunSnapshot::capture(&run_scheduler(&RunConfig::new(name, 40, 7)).unwrap()).to_json();
        ensure(a == b, || format!("{name}: builds differ"))?;
        let snap = RunSnapshot::from_json(&a).map_err(|e| e.to_string())?;
        let mut prev: Option<FinitePoset> = None;
        for k in 0..=snap.last_stage() {
            let cur = snap.stage_poset(k).map_err(|e| e.to_string())?;
            if let Some(p) = &prev {
                let n = p.len();
                ensure(
                    cur.len() >= n && cur.elements()[..n] == *p.elements(),
                    || format!("{name}: stage {k} drops elements"),
                )?;
                for i in 0..n {
                    for j in 0..n {
                        ensure(i == j || p.rel_at(i, j) == cur.rel_at(i, j), || {
                            format!("{name}: stage {k} changes an old relation")
                        })?;
                    }
                }
            }
            prev = Some(cur);
        }
    }
    // replay: a longer run extends the shorter one
    let short = RunSnapshot::capture(&run_scheduler(&RunConfig::new("two-chains", 20, 7)).unwrap());
    let long = RunSnapshot::capture(&run_scheduler(&RunConfig::new("two-chains", 21, 7)).unwrap());
    let n = short.stages.last().map(|s| s.frozen_at).unwrap_or(0);
    let frozen = |s: &RunSnapshot| {
        let mut lt: Vec<(usize, usize)> =
            s.lt.iter()
                .copied()
                .filter(|&(i, j)| i < n && j < n)
                .collect();
        lt.sort_unstable();
        (
            s.elements[..n].iter().map(|e| e.point).collect::<Vec<_>>(),
            lt,
        )
    };
    ensure(
        long.elements.len() >= n && frozen(&short) == frozen(&long),
        || "budget b + 1 does not extend budget b".into(),
    )?;
    Ok("6 adapters byte-identical, stage diffs additive, budget replay prefix-equal".into())
}

fn fault_injection() -> Outcome {
    let snap = RunSnapshot::capture(&run_scheduler(&RunConfig::new("antichain", 40, 7)).unwrap());
    let mut out = vec![];
    for f in FAULTS.into_iter().chain([Fault::FullVpBelow]) {
        let bad = inject(&snap, f).ok_or(format!("{f:?}: no site"))?;
        let r = match f.audit() {
            "ac_props" => audit_ac_props(&bad),
            "uniqueness" => audit_uniqueness(&bad),
            _ => audit_minimality(&bad),
        };
        let cert = r.failures.first().ok_or(format!("{f:?} not detected"))?;
        ensure(!cert.elements.is_empty(), || {
            format!("{f:?}: empty certificate")
        })?;
        out.push(format!("{f:?} → {} [{}]", r.audit, cert.clause));
    }
    Ok(out.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("1 one-point validity", one_point_validity, 10),
        ("2 two-point validity", two_point_validity, 60),
        ("3 meet/join and basic opens", meet_join_and_opens, 60),
        ("4 fixed limits", limits, 5),
        ("5 moiety engine", moiety_engine, 60),
        ("6 audits on 40-stage runs", audits, 300),
        ("7 rigidity of R_n ∪ S_n", rigidity, 10),
        ("8 forcing certificates", forcing, 30),
        (
            "9 determinism and monotonicity",
            determinism_and_monotonicity,
            60,
        ),
        ("10 fault injection", fault_injection, 30),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let t = Instant::now();
        let res = f();
        let took = t.elapsed();
        let slow = took > Duration::from_secs(limit);
        let line = match (&res, slow) {
            (Ok(msg), false) => format!("PASS {name} ({took:.2?}): {msg}"),
            (Ok(msg), true) => format!("FAIL {name} ({took:.2?} > {limit}s): {msg}"),
            (Err(msg), _) => format!("FAIL {name} ({took:.2?}): {msg}"),
        };
        if res.is_err() || slow {
            failed += 1;
        }
        println!("{line}");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
