//! The interface the agent loop drives. Both simulators implement it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{CommandRequest, ToolSpec};
use crate::opinions::{AgreementMode, SuggestionStyle};

/// How an episode ended from the environment's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// The agent committed: a purchase (shop) or a finished task (house).
    pub completed: bool,
    pub success: bool,
    pub reward: f64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DispatchError {
    #[error("unknown command {0:?}")]
    UnknownTool(String),
}

pub trait Environment {
    /// Tools the agent may call, with demonstrations.
    fn tools(&self) -> Vec<ToolSpec>;

    /// The goal handed to the agent at the start of the episode.
    fn instruction(&self) -> String;

    /// The current page or room description, including the action list.
    fn observation(&self) -> String;

    /// Concrete actions executable right now, in canonical string form.
    fn valid_actions(&self) -> Vec<String>;

    /// Run a command. Invalid arguments are reported in-band in the returned
    /// observation; only an unknown tool name is an error.
    fn dispatch(&mut self, command: &CommandRequest) -> Result<String, DispatchError>;

    /// Canonical action string of a command, as used for agreement checks.
    fn action_of(&self, command: &CommandRequest) -> String;

    /// Inverse of [`Environment::action_of`].
    fn command_for(action: &str) -> CommandRequest
    where
        Self: Sized;

    fn is_terminal(&self) -> bool;

    fn steps_used(&self) -> usize;

    fn outcome(&self) -> Outcome;

    fn suggestion_style(&self) -> SuggestionStyle {
        SuggestionStyle::Plain
    }

    fn agreement_mode(&self) -> AgreementMode {
        AgreementMode::AnyMatch
    }
}
