use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use tracing::{info, warn};

use super::{
    average_runs, compute_metrics, emit_report, BackendKind, EpisodeResult, HarnessError,
    MetricsReport, ReportFormat, RunConfig, Suite,
};
use crate::agent::{
    render_response, run_episode, write_trace, AgentConfig, CommandRequest, TerminalStatus,
    ThoughtRecord,
};
use crate::backends::{
    ContrarianAgent, CopySuggestionAgent, Fixture, HttpBackend, LlmBackend, ProseBackend,
    RecordingBackend, ScriptedBackend,
};
use crate::env::Environment;
use crate::experts::{house_provider, shop_provider};
use crate::housesim::{solve, HouseEnv, HouseState};
use crate::opinions::OpinionProvider;
use crate::shopsim::{oracle_commands, ShopEnv, BACK_TO_SEARCH};
use crate::text::derive_seed;

type Backend = Box<dyn LlmBackend + Send>;

/// Everything a finished benchmark produced.
#[derive(Debug, Clone)]
pub struct BenchmarkOutput {
    /// Per run, per task in suite order.
    pub runs: Vec<Vec<EpisodeResult>>,
    pub per_run: Vec<MetricsReport>,
    pub averaged: MetricsReport,
}

/// Run the configured suite `runs_to_average` times and write
/// `config.json`, `run-<r>/traces/<task>.jsonl`, `run-<r>/results.jsonl` and
/// the report files under `output_dir`.
///
/// Episode failures (bad fixtures, backend errors) become parse-dead results;
/// only I/O and config problems abort the suite.
pub fn run_benchmark(cfg: &RunConfig) -> Result<BenchmarkOutput, HarnessError> {
    cfg.validate()?;
    let suite = Suite::load(cfg)?;
    let ids = suite.task_ids();
    let http = match cfg.backend.kind {
        BackendKind::Http => Some(
            HttpBackend::new(cfg.backend.http.clone())
                .map_err(|e| HarnessError::Config(e.to_string()))?,
        ),
        _ => None,
    };
    let out = &cfg.output_dir;
    fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    let config_json = serde_json::to_string_pretty(cfg).expect("config serializes");
    write_file(&out.join("config.json"), config_json.as_bytes())?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;

    let mut runs = Vec::with_capacity(cfg.runs_to_average);
    let mut per_run = Vec::with_capacity(cfg.runs_to_average);
    for run in 0..cfg.runs_to_average {
        let run_dir = out.join(format!("run-{run}"));
        for sub in ["traces", "fixtures"] {
            if sub == "fixtures" && !cfg.backend.record {
                continue;
            }
            let d = run_dir.join(sub);
            fs::create_dir_all(&d).map_err(|e| HarnessError::io(&d, e))?;
        }
        info!(run, tasks = suite.len(), model = %cfg.model, "starting run");
        let results = pool.install(|| {
            (0..suite.len())
                .into_par_iter()
                .map(|i| run_task(cfg, &suite, &ids[i], i, run, &run_dir, http.as_ref()))
                .collect::<Result<Vec<_>, _>>()
        })?;
        let mut lines = Vec::new();
        for r in &results {
            serde_json::to_writer(&mut lines, r).expect("result serializes");
            lines.push(b'\n');
        }
        write_file(&run_dir.join("results.jsonl"), &lines)?;
        per_run.push(compute_metrics(
            &results,
            cfg.environment,
            &cfg.model,
            cfg.effective_k(),
        )?);
        runs.push(results);
    }
    let averaged = average_runs(&per_run)?;
    for format in [ReportFormat::Markdown, ReportFormat::Csv] {
        let (name, text) = emit_report(std::slice::from_ref(&averaged), format);
        write_file(&out.join(name), text.as_bytes())?;
    }
    let agreement = super::render_agreement_csv(std::slice::from_ref(&averaged));
    write_file(&out.join("agreement.csv"), agreement.as_bytes())?;
    Ok(BenchmarkOutput {
        runs,
        per_run,
        averaged,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

fn failed(task_id: &str, error: String) -> EpisodeResult {
    EpisodeResult {
        task_id: task_id.to_string(),
        success: false,
        reward: 0.0,
        steps: 0,
        terminal: TerminalStatus::ParseDead,
        agreement: Vec::new(),
        error: Some(error),
    }
}

fn run_task(
    cfg: &RunConfig,
    suite: &Suite,
    task_id: &str,
    index: usize,
    run: usize,
    run_dir: &Path,
    http: Option<&HttpBackend>,
) -> Result<EpisodeResult, HarnessError> {
    let seed = derive_seed(cfg.seed, &[index as u64, run as u64]);
    let max_steps = cfg.effective_max_steps();
    let trace_path = run_dir.join("traces").join(format!("{task_id}.jsonl"));
    let result = match suite {
        Suite::Shop { catalog, goals } => {
            let goal = &goals[index];
            let env = ShopEnv::reset(Arc::clone(catalog), goal.clone(), max_steps);
            let provider = cfg
                .expert
                .filter(|_| cfg.effective_k() > 0)
                .map(|e| shop_provider(e.kind, e.tier, seed))
                .transpose()
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            match env {
                Err(e) => failed(task_id, e.to_string()),
                Ok(mut env) => {
                    let backend = make_backend(
                        cfg,
                        task_id,
                        run_dir,
                        || oracle_commands(catalog, goal),
                        ShopEnv::command_for,
                        format!("search {}", goal.instruction),
                        vec![
                            format!("click {BACK_TO_SEARCH}"),
                            format!("search {}", goal.instruction),
                            "click nothing".to_string(),
                        ],
                        http,
                    )?;
                    episode(cfg, task_id, seed, &mut env, backend, provider, &trace_path)?
                }
            }
        }
        Suite::House { tasks } => {
            let inst = &tasks[index];
            let world = Arc::new(inst.world.clone());
            let env = HouseEnv::reset(Arc::clone(&world), inst.task.clone(), max_steps);
            let provider = cfg
                .expert
                .filter(|_| cfg.effective_k() > 0)
                .map(|e| house_provider(e.kind, seed))
                .transpose()
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            match env {
                Err(e) => failed(task_id, e.to_string()),
                Ok(mut env) => {
                    let backend = make_backend(
                        cfg,
                        task_id,
                        run_dir,
                        || solve(&world, &inst.task, &HouseState::initial(&world), max_steps),
                        HouseEnv::command_for,
                        "look".to_string(),
                        vec!["look".into(), "inventory".into(), "wait".into()],
                        http,
                    )?;
                    episode(cfg, task_id, seed, &mut env, backend, provider, &trace_path)?
                }
            }
        }
    };
    if let Some(err) = &result.error {
        warn!(task = task_id, run, error = %err, "episode ended abnormally");
    }
    Ok(result)
}

#[allow(clippy::too_many_arguments)]
fn make_backend(
    cfg: &RunConfig,
    task_id: &str,
    run_dir: &Path,
    plan: impl FnOnce() -> Option<Vec<String>>,
    to_command: fn(&str) -> CommandRequest,
    fallback: String,
    contrarian: Vec<String>,
    http: Option<&HttpBackend>,
) -> Result<Result<Backend, String>, HarnessError> {
    let kind = if cfg.expert_only {
        BackendKind::Copy
    } else {
        cfg.backend.kind
    };
    let inner: Backend = match kind {
        BackendKind::Copy => Box::new(CopySuggestionAgent::new(to_command, fallback)),
        BackendKind::Contrarian => Box::new(ContrarianAgent::new(to_command, contrarian)),
        BackendKind::Prose => Box::new(ProseBackend::new()),
        BackendKind::Http => Box::new(http.expect("http backend built for http runs").clone()),
        BackendKind::Oracle => match plan() {
            Some(actions) => Box::new(oracle_backend(&actions, to_command)),
            None => return Ok(Err(format!("no reference solution for {task_id}"))),
        },
        BackendKind::Fixture => {
            let dir = cfg.backend.fixture_dir.as_ref().expect("validated");
            let path = dir.join(format!("{task_id}.jsonl"));
            match Fixture::load(&path) {
                Ok(f) => Box::new(ScriptedBackend::new(f)),
                Err(e) => return Ok(Err(format!("{}: {e}", path.display()))),
            }
        }
    };
    if !cfg.backend.record {
        return Ok(Ok(inner));
    }
    let path: PathBuf = run_dir.join("fixtures").join(format!("{task_id}.jsonl"));
    let sink = File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
    Ok(Ok(Box::new(RecordingBackend::new(inner, BufWriter::new(sink)))))
}

/// Scripted responses that walk a known solution, one command per call.
pub(crate) fn oracle_backend(
    actions: &[String],
    to_command: fn(&str) -> CommandRequest,
) -> ScriptedBackend {
    let responses = actions.iter().enumerate().map(|(i, a)| {
        let thought = ThoughtRecord {
            text: format!("Step {} of the plan.", i + 1),
            reasoning: "The plan reaches the goal.".into(),
            plan: format!("- {a}"),
            criticism: String::new(),
        };
        render_response(&thought, &to_command(a))
    });
    ScriptedBackend::from_responses(responses)
}

fn episode<E: Environment>(
    cfg: &RunConfig,
    task_id: &str,
    seed: u64,
    env: &mut E,
    backend: Result<Backend, String>,
    mut provider: Option<Box<dyn OpinionProvider<E> + Send>>,
    trace_path: &Path,
) -> Result<EpisodeResult, HarnessError> {
    let mut backend = match backend {
        Ok(b) => b,
        Err(e) => {
            write_file(trace_path, b"")?;
            return Ok(failed(task_id, e));
        }
    };
    let mut agent = AgentConfig::new(env.instruction(), env.tools(), cfg.effective_max_steps())
        .with_opinions(cfg.effective_k());
    agent.backend_id = cfg.model.clone();
    agent.seed = seed;
    if let Some(c) = cfg.context_chars {
        agent.context_chars = c;
    }
    let provider = provider
        .as_deref_mut()
        .map(|p| p as &mut dyn OpinionProvider<E>);
    let trace = match run_episode(env, &mut backend, &agent, provider) {
        Ok(t) => t,
        Err(e) => {
            write_file(trace_path, b"")?;
            return Ok(failed(task_id, e.to_string()));
        }
    };
    let mut buf = BufWriter::new(File::create(trace_path).map_err(|e| HarnessError::io(trace_path, e))?);
    write_trace(&trace.steps, &mut buf).map_err(|e| HarnessError::io(trace_path, e))?;
    buf.flush().map_err(|e| HarnessError::io(trace_path, e))?;
    Ok(EpisodeResult {
        task_id: task_id.to_string(),
        success: trace.outcome.success,
        reward: trace.outcome.reward,
        steps: trace.steps.len(),
        terminal: trace.status,
        agreement: trace.agreement_records(),
        error: trace.error,
    })
}

