use serde::{Deserialize, Serialize};

use super::{
    build_prompt, parse_response, AgentConfig, AgentError, CommandRequest, ContextBuffer,
    ThoughtRecord, PARSE_RETRY_PROMPT, TRIGGER_PROMPT,
};
use crate::backends::{ChatMessage, LlmBackend, Role};
use crate::env::{Environment, Outcome};
use crate::opinions::{sample_topk, AgreementRecord, Opinion, OpinionProvider};

/// Why a step did not produce a normal environment transition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum StepMarker {
    /// Both the response and its single retry failed to parse.
    ParseFailure(String),
    /// The command named a tool the environment does not have.
    UnknownTool(String),
}

impl std::fmt::Display for StepMarker {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepMarker::ParseFailure(e) => write!(f, "parse failure: {e}"),
            StepMarker::UnknownTool(name) => write!(f, "unknown tool: {name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentStep {
    pub index: usize,
    pub prompt_snapshot: Vec<ChatMessage>,
    pub thought: Option<ThoughtRecord>,
    /// `None` marks a parse failure.
    pub command: Option<CommandRequest>,
    pub observation: String,
    pub opinions_shown: Vec<Opinion>,
    pub agreement: Option<AgreementRecord>,
    pub marker: Option<StepMarker>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalStatus {
    /// Purchase made (shop) or task finished (house).
    Completed,
    StepCap,
    /// No response could be used: every step failed to parse or the backend
    /// gave up.
    ParseDead,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub steps: Vec<AgentStep>,
    pub status: TerminalStatus,
    pub outcome: Outcome,
    /// Backend error that cut the episode short, if any.
    pub error: Option<String>,
}

impl EpisodeTrace {
    pub fn agreement_records(&self) -> Vec<AgreementRecord> {
        self.steps.iter().filter_map(|s| s.agreement.clone()).collect()
    }

    pub fn observations(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.observation.as_str()).collect()
    }
}

/// The message that opens every episode and is never evicted.
pub fn initial_message<E: Environment>(env: &E) -> ChatMessage {
    ChatMessage::human(format!("Instruction:\n{}", env.observation()))
}

/// Run one decision step: sample opinions, prompt, parse, dispatch.
///
/// A response that fails to parse is retried once with an error message; if
/// the retry also fails the step is consumed with a parse-failure marker.
pub fn run_step<E, B>(
    env: &mut E,
    backend: &mut B,
    config: &AgentConfig,
    ctx: &mut ContextBuffer,
    provider: Option<&mut (dyn OpinionProvider<E> + '_)>,
    index: usize,
) -> Result<AgentStep, AgentError>
where
    E: Environment,
    B: LlmBackend + ?Sized,
{
    if env.is_terminal() {
        return Err(AgentError::Terminal);
    }
    if index >= config.max_steps {
        return Err(AgentError::StepBudget(config.max_steps));
    }

    let opinions = match provider {
        Some(p) if config.opinion_k > 0 => {
            let ops = sample_topk(p, &*env, config.opinion_k);
            (!ops.is_empty()).then_some(ops)
        }
        _ => None,
    };
    let prompt = build_prompt(config, ctx, opinions.as_deref(), env.suggestion_style())?;

    let mut raw = backend.complete(&prompt)?;
    let mut parsed = parse_response(&raw);
    if let Err(err) = &parsed {
        let mut retry = prompt.clone();
        retry.push(ChatMessage::assistant(raw.clone()));
        retry.push(ChatMessage::human(format!(
            "{PARSE_RETRY_PROMPT}: {err}. {TRIGGER_PROMPT}"
        )));
        raw = backend.complete(&retry)?;
        parsed = parse_response(&raw);
    }

    let opinions_shown = opinions.unwrap_or_default();
    let step = match parsed {
        Err(err) => {
            let observation = format!("{PARSE_RETRY_PROMPT}: {err}.");
            ctx.push(Role::Assistant, raw);
            ctx.push(Role::Human, observation.clone());
            AgentStep {
                index,
                prompt_snapshot: prompt,
                thought: None,
                command: None,
                observation,
                opinions_shown,
                agreement: None,
                marker: Some(StepMarker::ParseFailure(err.to_string())),
            }
        }
        Ok((thought, command)) => {
            let (observation, marker) = match env.dispatch(&command) {
                Ok(obs) => (obs, None),
                Err(_) => {
                    let names: Vec<_> = config.tools.iter().map(|t| t.name.as_str()).collect();
                    (
                        format!(
                            "Unknown command '{}'. Available commands: {}.",
                            command.name,
                            names.join(", ")
                        ),
                        Some(StepMarker::UnknownTool(command.name.clone())),
                    )
                }
            };
            let agreement = (!opinions_shown.is_empty()).then(|| {
                AgreementRecord::new(
                    index,
                    env.action_of(&command),
                    opinions_shown.iter().map(|o| o.action.clone()).collect(),
                    env.agreement_mode(),
                )
            });
            ctx.push(Role::Assistant, raw);
            ctx.push(
                Role::Human,
                format!("Command {} returned: {}", command.name, observation),
            );
            AgentStep {
                index,
                prompt_snapshot: prompt,
                thought: Some(thought),
                command: Some(command),
                observation,
                opinions_shown,
                agreement,
                marker,
            }
        }
    };
    Ok(step)
}

/// Step until the environment is terminal or `max_steps` is reached.
///
/// Backend errors end the episode early; the trace records them rather than
/// propagating, so a benchmark suite never aborts on one bad episode.
pub fn run_episode<E, B>(
    env: &mut E,
    backend: &mut B,
    config: &AgentConfig,
    mut provider: Option<&mut (dyn OpinionProvider<E> + '_)>,
) -> Result<EpisodeTrace, AgentError>
where
    E: Environment,
    B: LlmBackend + ?Sized,
{
    config.validate()?;
    let mut ctx = ContextBuffer::new(initial_message(env), config.context_chars);
    let mut steps: Vec<AgentStep> = Vec::new();
    let mut error = None;
    while !env.is_terminal() && steps.len() < config.max_steps {
        match run_step(
            env,
            backend,
            config,
            &mut ctx,
            provider.as_deref_mut(),
            steps.len(),
        ) {
            Ok(step) => steps.push(step),
            Err(AgentError::Backend(e)) => {
                error = Some(e.to_string());
                break;
            }
            Err(other) => return Err(other),
        }
    }
    let outcome = env.outcome();
    let any_parsed = steps.iter().any(|s| s.command.is_some());
    let status = if outcome.completed {
        TerminalStatus::Completed
    } else if error.is_some() || !any_parsed {
        TerminalStatus::ParseDead
    } else {
        TerminalStatus::StepCap
    };
    Ok(EpisodeTrace {
        steps,
        status,
        outcome,
        error,
    })
}
