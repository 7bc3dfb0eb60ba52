//! Record every model response of a run as digest-keyed fixtures, replay the
//! run offline from them, then re-execute the traces against fresh
//! environments.
//!
//! cargo run --example record_replay

use std::fs::File;

use opinion_bench::harness::{replay_dir, run_benchmark, BackendKind, RunConfig};
use opinion_bench::housesim::{gen_tasks, write_tasks};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    write_tasks(&gen_tasks(5, 6)?, File::create(dir.path().join("house.jsonl"))?)?;
    let cfg_path = dir.path().join("record.toml");
    std::fs::write(
        &cfg_path,
        r#"
model = "copier"
environment = "house"
task_file = "house.jsonl"
first_n = 6
output_dir = "recorded"
opinion_k = 1

[backend]
kind = "copy"
record = true

[expert]
kind = "heuristic_house"
"#,
    )?;
    let rec = RunConfig::load(&cfg_path)?;
    let first = run_benchmark(&rec)?;

    let mut replay = rec.clone();
    replay.output_dir = dir.path().join("replayed");
    replay.backend.kind = BackendKind::Fixture;
    replay.backend.record = false;
    replay.backend.fixture_dir = Some(rec.output_dir.join("run-0/fixtures"));
    let second = run_benchmark(&replay)?;

    let same = ["run-0/traces", "run-0/results.jsonl", "report.md"].iter().all(|p| {
        let a = rec.output_dir.join(p);
        let b = replay.output_dir.join(p);
        if a.is_dir() {
            std::fs::read_dir(&a).unwrap().all(|e| {
                let name = e.unwrap().file_name();
                std::fs::read(a.join(&name)).ok() == std::fs::read(b.join(&name)).ok()
            })
        } else {
            std::fs::read(a).ok() == std::fs::read(b).ok()
        }
    });
    println!(
        "recorded success {:.3}, replayed success {:.3}, outputs identical: {same}",
        first.averaged.success_rate, second.averaged.success_rate
    );
    let s = replay_dir(rec.output_dir.join("run-0/traces"))?;
    println!("re-executed {} traces / {} steps, {} mismatches", s.traces, s.steps, s.mismatches.len());
    Ok(())
}
