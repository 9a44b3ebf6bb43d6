use std::path::PathBuf;
use std::process::{Command, Output};

fn forge(args: &[&str], seed: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_forge"));
    c.args(args).env_remove("FORGE_SEED");
    if let Some(s) = seed {
        c.env("FORGE_SEED", s);
    }
    c.output().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("forge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn build(adapter: &str, out: &PathBuf, extra: &[&str], seed: Option<&str>) -> Output {
    let mut args = vec!["build", "--adapter", adapter];
    args.extend_from_slice(extra);
    for (flag, default) in [("--stages", "12"), ("--seed", "7")] {
        if !extra.contains(&flag) {
            args.extend_from_slice(&[flag, default]);
        }
    }
    args.extend_from_slice(&["--out", out.to_str().unwrap()]);
    forge(&args, seed)
}

#[test]
fn builds_are_byte_identical_and_audit_clean() {
    let a = tmp("a.json");
    let b = tmp("b.json");
    assert_eq!(build("star", &a, &[], None).status.code(), Some(0));
    assert_eq!(build("star", &b, &[], None).status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let audit = forge(&["audit", "--run", a.to_str().unwrap()], None);
    assert_eq!(audit.status.code(), Some(0), "{}", String::from_utf8_lossy(&audit.stderr));
    let reports: serde_json::Value = serde_json::from_slice(&audit.stdout).unwrap();
    assert!(reports.as_array().is_some_and(|r| !r.is_empty()));
}

#[test]
fn forge_seed_overrides_the_flag() {
    let a = tmp("seed-flag.json");
    let b = tmp("seed-env.json");
    let c = tmp("seed-env-same.json");
    build("random-fixed-seed", &a, &[], None);
    build("random-fixed-seed", &b, &[], Some("99"));
    build("random-fixed-seed", &c, &["--seed", "99"], None);
    let read = |p: &PathBuf| std::fs::read(p).unwrap();
    assert_ne!(read(&a), read(&b));
    assert_eq!(read(&b), read(&c));
    let bad = build("random-fixed-seed", &a, &[], Some("nope"));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    let out = tmp("usage.json");
    assert_eq!(build("no-such-host", &out, &[], None).status.code(), Some(2));
    assert_eq!(build("antichain", &out, &["--orbit-budget", "0"], None).status.code(), Some(2));
    assert_eq!(forge(&["frobnicate"], None).status.code(), Some(2));
    let missing = tmp("missing.json");
    assert_eq!(forge(&["audit", "--run", missing.to_str().unwrap()], None).status.code(), Some(2));
    let corrupt = tmp("corrupt.json");
    std::fs::write(&corrupt, "{\"host\":").unwrap();
    assert_eq!(forge(&["export", "--run", corrupt.to_str().unwrap()], None).status.code(), Some(2));
    assert_eq!(build("antichain", &out, &[], None).status.code(), Some(0));
    let far = forge(&["export", "--run", out.to_str().unwrap(), "--stage", "9999"], None);
    assert_eq!(far.status.code(), Some(2));
    let suite = forge(&["audit", "--run", out.to_str().unwrap(), "--suite", "bogus"], None);
    assert_eq!(suite.status.code(), Some(2));
}

#[test]
fn small_orbit_budget_exhausts() {
    let out = tmp("exhausted.json");
    let r = build("antichain", &out, &["--orbit-budget", "1", "--stages", "40"], None);
    assert_eq!(r.status.code(), Some(3));
    assert!(out.exists());
}

#[test]
fn exports_dot_and_json() {
    let run = tmp("export.json");
    build("two-chains", &run, &[], None);
    let dot = forge(&["export", "--run", run.to_str().unwrap(), "--stage", "3"], None);
    assert_eq!(dot.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&dot.stdout).starts_with("digraph"));
    let json = forge(&["export", "--run", run.to_str().unwrap(), "--format", "json"], None);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn tampered_artifact_fails_the_audit() {
    let run = tmp("tampered.json");
    build("antichain", &run, &[], None);
    let mut v: serde_json::Value = serde_json::from_slice(&std::fs::read(&run).unwrap()).unwrap();
    let lt = v["lt"].as_array_mut().unwrap();
    let last = lt.pop().unwrap();
    lt.push(serde_json::json!([last[1], last[0]]));
    std::fs::write(&run, serde_json::to_vec(&v).unwrap()).unwrap();
    let r = forge(&["audit", "--run", run.to_str().unwrap()], None);
    assert_eq!(r.status.code(), Some(1), "{}", String::from_utf8_lossy(&r.stderr));
}
