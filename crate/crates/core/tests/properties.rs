mod common;

use proptest::prelude::*;

use forge_core::chain::{run_scheduler, RunConfig};
use forge_core::io::RunSnapshot;
use forge_core::moiety::{k_check, HandleKind, MoietyEngine, ZQuery};
use forge_core::poset::{ElemId, FinitePoset};
use forge_core::types::{
    all_valid_triples, is_valid_triple, join, lt_valid, meet, op_type, realize, shift_down,
    shift_up, type_of, ValidTriple, BUILTIN_ADAPTERS,
};

/// A random order on `0..n`, built from edges that respect the index order.
fn poset(max: usize) -> impl Strategy<Value = FinitePoset> {
    (0..=max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let mut pairs = vec![];
            for i in 0..n {
                for j in i + 1..n {
                    if bits[i * n + j] {
                        pairs.push((i as ElemId, j as ElemId));
                    }
                }
            }
            FinitePoset::transitive_close((0..n as ElemId).collect(), &pairs).unwrap()
        })
    })
}

fn matrix(p: &FinitePoset) -> Vec<Vec<bool>> {
    let n = p.len();
    (0..n)
        .map(|i| (0..n).map(|j| i != j && p.lt(p.elements()[i], p.elements()[j])).collect())
        .collect()
}

fn poset_and_types(max: usize) -> impl Strategy<Value = (FinitePoset, Vec<ValidTriple>)> {
    poset(max).prop_map(|p| {
        let t = all_valid_triples(&p);
        (p, t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transitive_close_is_the_least_strict_order(
        n in 0usize..8,
        bits in proptest::collection::vec(any::<bool>(), 64),
    ) {
        let pairs: Vec<(ElemId, ElemId)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| bits[i * 8 + j])
            .map(|(i, j)| (i as ElemId, j as ElemId))
            .collect();
        let p = FinitePoset::transitive_close((0..n as ElemId).collect(), &pairs).unwrap();
        let m = matrix(&p);
        prop_assert!(common::is_strict_order(&m));
        for &(x, y) in &pairs {
            prop_assert!(p.lt(x, y));
        }
        // every relation is a chain of given pairs
        for (x, y) in p.lt_pairs() {
            let mut seen = vec![x];
            let mut k = 0;
            while k < seen.len() {
                let a = seen[k];
                for &(s, t) in &pairs {
                    if s == a && !seen.contains(&t) {
                        seen.push(t);
                    }
                }
                k += 1;
            }
            prop_assert!(seen.contains(&y));
        }
    }

    #[test]
    fn valid_triples_agree_with_the_one_point_oracle(p in poset(6)) {
        let mut got = all_valid_triples(&p);
        let mut want = common::oracle_types(&p);
        got.sort_by_key(|t| format!("{t:?}"));
        want.sort_by_key(|t| format!("{t:?}"));
        prop_assert_eq!(got, want);
    }

    #[test]
    fn meet_and_join_are_valid_bounds(
        (p, types) in poset_and_types(5),
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
    ) {
        let a = i.get(&types);
        let b = j.get(&types);
        let m = meet(a, b).unwrap();
        let s = join(a, b).unwrap();
        prop_assert!(is_valid_triple(&p, &m).unwrap());
        prop_assert!(is_valid_triple(&p, &s).unwrap());
        for x in [a, b] {
            prop_assert!(m == *x || lt_valid(&m, x).unwrap());
            prop_assert!(s == *x || lt_valid(x, &s).unwrap());
        }
        prop_assert_eq!(meet(a, b).unwrap(), meet(b, a).unwrap());
        prop_assert_eq!(meet(a, a).unwrap(), a.clone());
        prop_assert_eq!(join(a, a).unwrap(), a.clone());
    }

    #[test]
    fn realized_points_have_their_type(
        (p, types) in poset_and_types(5),
        i in any::<prop::sample::Index>(),
    ) {
        let t = i.get(&types);
        let id = 100;
        let q = realize(&p, t, id).unwrap();
        prop_assert!(common::is_strict_order(&matrix(&q)));
        prop_assert_eq!(&type_of(&q, id, p.elements()).unwrap(), t);
    }

    #[test]
    fn opposite_types_are_valid_over_the_opposite_host(
        (p, types) in poset_and_types(5),
        i in any::<prop::sample::Index>(),
    ) {
        let t = i.get(&types);
        prop_assert!(is_valid_triple(&p.opposite(), &op_type(t)).unwrap());
        if t.is_in_lambda() {
            let up = shift_up(t).unwrap();
            prop_assert!(up.is_in_mu());
            prop_assert_eq!(&shift_down(&up).unwrap(), t);
        }
    }

    #[test]
    fn find_z_answers_respect_their_query(seed in 0u64..1000, picks in proptest::collection::vec(any::<u8>(), 6)) {
        let mut e = MoietyEngine::new(seed);
        for _ in 0..6 {
            e.mint_generic().unwrap();
        }
        let hs: Vec<_> = e.handles().iter().copied().filter(|h| h.kind == HandleKind::Sigma).collect();
        let pts = e.n1_points().to_vec();
        let mut q = ZQuery::empty(HandleKind::Sigma);
        if !hs.is_empty() {
            q.u = vec![hs[picks[0] as usize % hs.len()]];
            q.w = vec![hs[picks[1] as usize % hs.len()]];
        }
        if !pts.is_empty() {
            q.c = vec![pts[picks[2] as usize % pts.len()]];
            q.d = vec![pts[picks[3] as usize % pts.len()]];
        }
        if let Ok(h) = e.find_z(&q) {
            for _ in 0..20 {
                e.mint_generic().unwrap();
            }
            for &s in e.n1_points() {
                let inz = e.member(h, s).unwrap();
                for &i in q.inner() {
                    prop_assert!(!e.member(i, s).unwrap() || inz);
                }
                for &o in q.outer() {
                    prop_assert!(!inz || e.member(o, s).unwrap());
                }
            }
            for &c in &q.c {
                prop_assert!(e.member(h, c).unwrap());
            }
            for &d in &q.d {
                prop_assert!(!e.member(h, d).unwrap());
            }
        }
        prop_assert!(k_check(&e.snapshot()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn snapshots_round_trip_through_json(
        a in 0usize..BUILTIN_ADAPTERS.len(),
        stages in 1u32..16,
        seed in any::<u64>(),
    ) {
        let out = run_scheduler(&RunConfig::new(BUILTIN_ADAPTERS[a], stages, seed)).unwrap();
        let snap = RunSnapshot::capture(&out);
        let text = snap.to_json();
        let back = RunSnapshot::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        let last = back.stage_poset(back.last_stage()).unwrap();
        prop_assert!(common::is_strict_order(&matrix(&last)));
    }
}
