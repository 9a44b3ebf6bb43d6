use forge_core::chain::{run_scheduler, RunConfig};
use forge_core::io::RunSnapshot;
use forge_core::types::BUILTIN_ADAPTERS;
use forge_core::verify::{run_suite, Suite};

#[test]
fn forty_stage_runs_pass_all_audits() {
    let mut bad = vec![];
    for name in BUILTIN_ADAPTERS {
        let t = std::time::Instant::now();
        let out = run_scheduler(&RunConfig::new(name, 40, 7)).unwrap();
        let snap = RunSnapshot::capture(&out);
        for r in run_suite(&snap, Suite::All) {
            eprintln!(
                "{name} {}: {} checks, {} failures, {} pending, {:?}",
                r.audit,
                r.checks,
                r.failures.len(),
                r.pending.len(),
                t.elapsed()
            );
            for f in r.failures.iter().take(4) {
                eprintln!("    {f:?}");
            }
            if !r.passed() {
                bad.push(format!("{name}/{}", r.audit));
            }
        }
    }
    assert!(bad.is_empty(), "{bad:?}");
}
