//! Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use jsnorm_cli::suite::{determinism_cases, run_criterion, SuiteConfig, CRITERIA};
use jsnorm_core::reznichenko::{build, ReznParams};

/// Runs each determinism case twice through the real binary; returns the invocations whose
/// output or exit status differed.
fn binary_determinism() -> Result<Vec<String>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut differing = Vec::new();
    let mut cases = determinism_cases().map_err(|e| e.to_string())?;
    if let Some(first) = cases.first() {
        let mut suite = first.clone();
        suite.args = vec!["jsnorm".into(), "suite".into()];
        cases.push(suite);
    }
    for case in cases {
        for (name, text) in &case.files {
            std::fs::write(dir.path().join(name), text).map_err(|e| e.to_string())?;
        }
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_jsnorm"))
                .args(&case.args[1..])
                .current_dir(dir.path())
                .env_remove("JSNORM_BUDGET_OVERRIDE")
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (run()?, run()?);
        if a.stdout != b.stdout || a.status.code() != b.status.code() {
            differing.push(case.args[1..].join(" "));
        }
    }
    Ok(differing)
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let limits = [(1, Duration::from_secs(60)), (8, Duration::from_secs(30))];
    let mut all = true;
    for (id, name) in CRITERIA {
        let start = Instant::now();
        let c = run_criterion(id, &cfg);
        let elapsed = start.elapsed();
        let mut passed = c.passed;
        let mut notes = vec![format!("{:.1}s", elapsed.as_secs_f64())];
        match id {
            1 => {
                let limit = limits[0].1;
                passed &= elapsed < limit;
                notes.push(format!("limit {}s", limit.as_secs()));
            }
            8 => {
                let start = Instant::now();
                let built = build(&ReznParams::default()).is_ok();
                let t = start.elapsed();
                passed &= built && t < limits[1].1;
                notes.push(format!("default build {:.1}s, limit {}s", t.as_secs_f64(), limits[1].1.as_secs()));
            }
            10 => match binary_determinism() {
                Ok(d) => {
                    passed &= d.is_empty();
                    notes.push(format!("binary reruns differing: {d:?}"));
                }
                Err(e) => {
                    passed = false;
                    notes.push(format!("binary reruns failed: {e}"));
                }
            },
            _ => {}
        }
        all &= passed;
        println!(
            "criterion {id:>2} [{name}]: {} ({}) {}",
            if passed { "PASS" } else { "FAIL" },
            notes.join("; "),
            c.measured
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
