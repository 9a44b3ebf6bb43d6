use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use forge_core::chain::{run_scheduler, ChainError, RunConfig};
use forge_core::io::{export_dot, export_json, RunSnapshot};
use forge_core::verify::{run_suite, Suite};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(name = "forge", version, about = "Staged builds of uniquely extensive embeddings into the generic poset")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scheduler and write a run artifact.
    Build(BuildArgs),
    /// Write one stage of a run as DOT or JSON.
    Export(ExportArgs),
    /// Run audit suites on a run artifact.
    Audit(AuditArgs),
}

#[derive(clap::Args)]
struct BuildArgs {
    #[arg(long)]
    adapter: String,
    /// Scheduler tasks processed.
    #[arg(long, default_value_t = 40)]
    stages: u32,
    /// Orbit members materialized per stage.
    #[arg(long, default_value_t = 64)]
    orbit_budget: usize,
    #[arg(long, default_value_t = 3)]
    support_bound: usize,
    /// Longest generator word used by stabilizer audits.
    #[arg(long, default_value_t = 6)]
    word_bound: usize,
    /// Overridden by FORGE_SEED.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "run.json")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(clap::Args)]
struct ExportArgs {
    #[arg(long, default_value = "run.json")]
    run: PathBuf,
    #[arg(long, value_enum, default_value = "dot")]
    format: Format,
    #[arg(long, default_value_t = 0)]
    stage: u32,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct AuditArgs {
    #[arg(long, default_value = "run.json")]
    run: PathBuf,
    #[arg(long, default_value = "all")]
    suite: Suite,
    /// Report file; defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("forge: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn write(out: Option<&Path>, text: &str) -> Result<(), ExitCode> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            // a closed pipe downstream is not an error
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<RunSnapshot, ExitCode> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    RunSnapshot::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn seed(flag: u64) -> Result<u64, ExitCode> {
    match std::env::var("FORGE_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| usage(format!("FORGE_SEED={s:?} is not a 64-bit integer"))),
        Err(_) => Ok(flag),
    }
}

fn build(a: BuildArgs) -> Result<ExitCode, ExitCode> {
    let mut config = RunConfig::new(&a.adapter, a.stages, seed(a.seed)?);
    config.orbit_budget = a.orbit_budget;
    config.support_bound = a.support_bound;
    config.word_bound = a.word_bound;
    let out = match run_scheduler(&config) {
        Ok(out) => out,
        Err(e @ ChainError::BadConfig(_)) => return Err(usage(e)),
        Err(e) => {
            eprintln!("forge: {e}");
            return Err(ExitCode::from(EXIT_FAIL));
        }
    };
    let snap = RunSnapshot::capture(&out);
    write(Some(&a.out), &snap.to_json())?;
    eprintln!(
        "{}: {} stages, {} elements, {} tasks -> {}",
        snap.host,
        snap.stages.len(),
        snap.elements.len(),
        snap.tasks.len(),
        a.out.display()
    );
    if snap.exhausted {
        eprintln!("forge: budget exhausted; partial artifact written");
        return Ok(ExitCode::from(EXIT_EXHAUSTED));
    }
    Ok(ExitCode::SUCCESS)
}

fn export(a: ExportArgs) -> Result<ExitCode, ExitCode> {
    let snap = load(&a.run)?;
    let text = match a.format {
        Format::Dot => export_dot(&snap, a.stage).map_err(usage)?,
        Format::Json => {
            let p = export_json(&snap, a.stage).map_err(usage)?;
            serde_json::to_string_pretty(&p).expect("poset serializes")
        }
    };
    write(a.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn audit(a: AuditArgs) -> Result<ExitCode, ExitCode> {
    let snap = load(&a.run)?;
    let reports = run_suite(&snap, a.suite);
    for r in &reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        eprintln!(
            "{status} {}: {} checks, {} failures, {} pending",
            r.audit,
            r.checks,
            r.failures.len(),
            r.pending.len()
        );
    }
    let text = serde_json::to_string_pretty(&reports).expect("reports serialize");
    write(a.out.as_deref(), &text)?;
    if reports.iter().all(|r| r.passed()) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_FAIL))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Build(a) => build(a),
        Command::Export(a) => export(a),
        Command::Audit(a) => audit(a),
    };
    res.unwrap_or_else(|code| code)
}
