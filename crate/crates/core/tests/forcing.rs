use forge_core::poset::{ElemId, FinitePoset, Relation};
use forge_core::verify::{forcing_certificates, plain_generic};

fn pick_v(p: &FinitePoset) -> ElemId {
    let score = |v: ElemId| {
        let below = p.elements().iter().filter(|&&m| p.lt(m, v)).count();
        let inc = p
            .elements()
            .iter()
            .filter(|&&m| m != v && p.rel(m, v) == Ok(Relation::Inc))
            .count();
        below.min(inc)
    };
    p.elements()
        .iter()
        .copied()
        .max_by_key(|&v| (score(v), std::cmp::Reverse(v)))
        .unwrap()
}

#[test]
fn sixty_point_truncation_forces_identity() {
    let t = std::time::Instant::now();
    let p = plain_generic(60, 7);
    assert_eq!(p.len(), 60);
    let v = pick_v(&p);
    let r = forcing_certificates(&p, v, 20, 7);
    eprintln!("{:?} {:?} {:?}", r.notes, r.failures, t.elapsed());
    assert!(r.passed());
}

#[test]
fn plain_generic_is_deterministic() {
    assert_eq!(plain_generic(30, 1), plain_generic(30, 1));
}
