//! Benchmark orchestration: pick the first N tasks of a suite, run each as an
//! episode (possibly several times), persist traces and per-episode results,
//! and fold them into report tables.

mod config;
mod metrics;
mod replay;
mod report;
mod run;
mod suite;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{BackendKind, BackendSpec, EnvKind, ExpertSpec, RunConfig};
pub use metrics::{average_runs, compute_metrics, MetricsReport};
pub use replay::{replay_dir, ReplaySummary};
pub use report::{
    emit_report, load_results_dir, render_agreement_csv, render_csv, render_markdown, ReportFormat,
};
pub use run::{run_benchmark, BenchmarkOutput};
pub use suite::{select_tasks, Suite};

use crate::agent::TerminalStatus;
use crate::opinions::AgreementRecord;

/// Outcome of one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub task_id: String,
    pub success: bool,
    pub reward: f64,
    pub steps: usize,
    pub terminal: TerminalStatus,
    pub agreement: Vec<AgreementRecord>,
    /// Backend or setup error that ended the episode, if any.
    #[serde(default)]
    pub error: Option<String>,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("suite has {have} tasks, {want} requested")]
    NotEnoughTasks { have: usize, want: usize },
    #[error("no episode results")]
    EmptyResults,
    #[error("reports cover different episode counts: {0} vs {1}")]
    MismatchedRuns(usize, usize),
    #[error(transparent)]
    Shop(#[from] crate::shopsim::ShopError),
    #[error(transparent)]
    House(#[from] crate::housesim::HouseError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl HarnessError {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
