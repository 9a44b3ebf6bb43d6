use forge_core::chain::{run_scheduler, RunConfig};
use forge_core::io::RunSnapshot;
use forge_core::types::BUILTIN_ADAPTERS;
use forge_core::verify::{
    audit_ac_props, audit_minimality, audit_uniqueness, inject, Fault, FAULTS,
};

fn audit_for(f: Fault, snap: &RunSnapshot) -> forge_core::verify::AuditReport {
    match f.audit() {
        "ac_props" => audit_ac_props(snap),
        "uniqueness" => audit_uniqueness(snap),
        _ => audit_minimality(snap),
    }
}

#[test]
fn every_injected_fault_is_caught_where_it_can_be_placed() {
    let mut placed = vec![];
    for name in BUILTIN_ADAPTERS {
        let snap = RunSnapshot::capture(&run_scheduler(&RunConfig::new(name, 40, 7)).unwrap());
        for f in FAULTS.into_iter().chain([Fault::FullVpBelow]) {
            let Some(bad) = inject(&snap, f) else {
                continue;
            };
            placed.push(f);
            let r = audit_for(f, &bad);
            assert!(!r.passed(), "{name}: {f:?} not detected");
            assert!(r
                .failures
                .iter()
                .all(|x| !x.elements.is_empty() || !x.detail.is_empty()));
        }
    }
    for f in FAULTS {
        assert!(placed.contains(&f), "{f:?} never placed");
    }
}

#[test]
fn clean_snapshot_passes_the_fault_audits() {
    let snap = RunSnapshot::capture(&run_scheduler(&RunConfig::new("antichain", 20, 3)).unwrap());
    for f in FAULTS {
        assert!(audit_for(f, &snap).passed());
    }
}

#[test]
fn chain_adapters_have_no_stabilizer_site() {
    let snap = RunSnapshot::capture(&run_scheduler(&RunConfig::new("chain-up", 20, 7)).unwrap());
    assert!(inject(&snap, Fault::BrokenStabilizer).is_none());
}
