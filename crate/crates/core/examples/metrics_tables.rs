//! Turning per-episode results into report rows: precision is conditional on
//! committing, household reward is a success count, undefined values print
//! as N/A.
//!
//! cargo run --example metrics_tables

use opinion_bench::agent::TerminalStatus;
use opinion_bench::harness::{
    average_runs, compute_metrics, render_agreement_csv, render_csv, render_markdown, EnvKind,
    EpisodeResult,
};

fn episodes(n: usize, successes: usize, committed: usize) -> Vec<EpisodeResult> {
    (0..n)
        .map(|i| EpisodeResult {
            task_id: format!("task-{i}"),
            success: i < successes,
            reward: if i < successes { 100.0 } else if i < committed { 50.0 } else { 0.0 },
            steps: 10,
            terminal: if i < committed { TerminalStatus::Completed } else { TerminalStatus::StepCap },
            agreement: Vec::new(),
            error: None,
        })
        .collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let shop = [
        compute_metrics(&episodes(50, 12, 34), EnvKind::Shop, "cautious buyer", 0)?,
        compute_metrics(&episodes(50, 3, 50), EnvKind::Shop, "always buys", 0)?,
        compute_metrics(&episodes(50, 0, 0), EnvKind::Shop, "never buys", 0)?,
        // Two runs averaged metric by metric.
        average_runs(&[
            compute_metrics(&episodes(50, 13, 43), EnvKind::Shop, "two runs", 1)?,
            compute_metrics(&episodes(50, 10, 39), EnvKind::Shop, "two runs", 1)?,
        ])?,
    ];
    print!("{}", render_markdown(&shop));
    println!();
    print!("{}", render_csv(&shop));
    println!();

    let house = [compute_metrics(&episodes(134, 65, 78), EnvKind::House, "household", 0)?];
    print!("{}", render_markdown(&house));
    println!();
    print!("{}", render_agreement_csv(&shop));
    Ok(())
}
