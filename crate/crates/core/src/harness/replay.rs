use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::{HarnessError, RunConfig, Suite};
use crate::agent::{read_trace, TraceLine};
use crate::env::Environment;
use crate::housesim::HouseEnv;
use crate::shopsim::ShopEnv;

/// What re-executing a directory of traces found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReplaySummary {
    pub traces: usize,
    pub steps: usize,
    pub successes: usize,
    /// `<task>:<step>` for every step whose observation differs.
    pub mismatches: Vec<String>,
}

impl ReplaySummary {
    pub fn is_faithful(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Re-run every command of `run-<r>/traces/*.jsonl` against a fresh
/// environment and compare observations. The suite comes from the
/// `config.json` two levels up.
pub fn replay_dir(trace_dir: impl AsRef<Path>) -> Result<ReplaySummary, HarnessError> {
    let trace_dir = trace_dir.as_ref();
    let cfg_path = trace_dir
        .parent()
        .and_then(Path::parent)
        .map(|p| p.join("config.json"))
        .ok_or_else(|| HarnessError::Config("trace dir has no enclosing output dir".into()))?;
    let text = fs::read_to_string(&cfg_path).map_err(|e| HarnessError::io(&cfg_path, e))?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", cfg_path.display())))?;
    let suite = Suite::load(&cfg)?;
    let ids = suite.task_ids();

    let mut files: Vec<PathBuf> = fs::read_dir(trace_dir)
        .map_err(|e| HarnessError::io(trace_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();

    let mut summary = ReplaySummary::default();
    for path in files {
        let task_id = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        let index = ids
            .iter()
            .position(|id| *id == task_id)
            .ok_or_else(|| HarnessError::Config(format!("trace {task_id} is not in the suite")))?;
        let file = fs::File::open(&path).map_err(|e| HarnessError::io(&path, e))?;
        let lines = read_trace(BufReader::new(file)).map_err(|e| HarnessError::io(&path, e))?;
        let max_steps = cfg.effective_max_steps();
        let success = match &suite {
            Suite::Shop { catalog, goals } => {
                let mut env = ShopEnv::reset(Arc::clone(catalog), goals[index].clone(), max_steps)?;
                replay_lines(&mut env, &task_id, &lines, &mut summary)
            }
            Suite::House { tasks } => {
                let inst = &tasks[index];
                let mut env =
                    HouseEnv::reset(Arc::new(inst.world.clone()), inst.task.clone(), max_steps)?;
                replay_lines(&mut env, &task_id, &lines, &mut summary)
            }
        };
        summary.traces += 1;
        summary.successes += usize::from(success);
    }
    Ok(summary)
}

fn replay_lines<E: Environment>(
    env: &mut E,
    task_id: &str,
    lines: &[TraceLine],
    summary: &mut ReplaySummary,
) -> bool {
    for line in lines {
        summary.steps += 1;
        let Some(cmd) = &line.command else { continue };
        let same = match env.dispatch(cmd) {
            Ok(obs) => obs == line.observation,
            // Unknown tools leave the environment untouched.
            Err(_) => line.error.is_some(),
        };
        if !same {
            summary.mismatches.push(format!("{task_id}:{}", line.index));
        }
    }
    env.outcome().success
}
