//! Auto-GPT style step loop.
//!
//! Each step the agent is shown its pinned goal, the tool catalog with
//! demonstrations, the recent history and, optionally, suggestions from an
//! expert policy. The language model answers with a JSON self-monologue
//! (`thoughts`) plus one `command`, which is dispatched to the environment.

mod context;
mod parse;
mod prompt;
mod runner;
mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use context::{ContextBuffer, DEFAULT_CONTEXT_CHARS};
pub use parse::{extract_json_objects, parse_response, render_response, ParseError};
pub use prompt::{build_prompt, system_message, PARSE_RETRY_PROMPT, TRIGGER_PROMPT};
pub use runner::{
    initial_message, run_episode, run_step, AgentStep, EpisodeTrace, StepMarker, TerminalStatus,
};
pub use trace::{read_trace, write_trace, TraceLine};

use crate::backends::BackendError;

/// A single observation → command demonstration shown alongside a tool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolDemo {
    pub observation: String,
    pub command: String,
}

/// One entry of the agent's action vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolSpec {
    pub name: String,
    pub description: String,
    pub demos: Vec<ToolDemo>,
}

impl ToolSpec {
    pub fn new(
        name: impl Into<String>,
        description: impl Into<String>,
        demos: Vec<ToolDemo>,
    ) -> Result<Self, ConfigError> {
        let spec = Self {
            name: name.into(),
            description: description.into(),
            demos,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.is_empty() || self.name.chars().any(char::is_whitespace) {
            return Err(ConfigError::BadToolName(self.name.clone()));
        }
        if self.demos.is_empty() || self.demos.len() > 3 {
            return Err(ConfigError::DemoCount {
                tool: self.name.clone(),
                count: self.demos.len(),
            });
        }
        Ok(())
    }
}

/// The self-monologue the model emits before each command.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThoughtRecord {
    pub text: String,
    pub reasoning: String,
    pub plan: String,
    pub criticism: String,
}

/// A parsed `command` object: `{"name": .., "args": {"tool_input": ..}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandRequest {
    pub name: String,
    pub tool_input: String,
}

impl CommandRequest {
    pub fn new(name: impl Into<String>, tool_input: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            tool_input: tool_input.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub goal: String,
    pub tools: Vec<ToolSpec>,
    pub max_steps: usize,
    /// Number of expert opinions per step; zero disables them.
    pub opinion_k: usize,
    pub backend_id: String,
    pub seed: u64,
    #[serde(default = "default_context_chars")]
    pub context_chars: usize,
}

fn default_context_chars() -> usize {
    DEFAULT_CONTEXT_CHARS
}

impl AgentConfig {
    pub fn new(goal: impl Into<String>, tools: Vec<ToolSpec>, max_steps: usize) -> Self {
        Self {
            goal: goal.into(),
            tools,
            max_steps,
            opinion_k: 0,
            backend_id: "scripted".into(),
            seed: 0,
            context_chars: DEFAULT_CONTEXT_CHARS,
        }
    }

    pub fn with_opinions(mut self, k: usize) -> Self {
        self.opinion_k = k;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_steps == 0 {
            return Err(ConfigError::ZeroSteps);
        }
        let mut seen = std::collections::BTreeSet::new();
        for tool in &self.tools {
            tool.validate()?;
            if !seen.insert(tool.name.as_str()) {
                return Err(ConfigError::DuplicateTool(tool.name.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("tool name {0:?} must be nonempty and contain no whitespace")]
    BadToolName(String),
    #[error("tool {tool} has {count} demos, expected 1 to 3")]
    DemoCount { tool: String, count: usize },
    #[error("tool {0} registered twice")]
    DuplicateTool(String),
    #[error("max_steps must be at least 1")]
    ZeroSteps,
    #[error("context buffer holds no initial goal message")]
    EmptyContext,
    #[error("{given} opinions exceed opinion_k = {k}")]
    TooManyOpinions { given: usize, k: usize },
    #[error("opinion list is present but empty")]
    EmptyOpinions,
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("backend failed: {0}")]
    Backend(#[from] BackendError),
    #[error("episode is already terminal")]
    Terminal,
    #[error("step budget of {0} exhausted")]
    StepBudget(usize),
}
