//! Rule-driven stand-ins for a language model, used to exercise the agent
//! loop in closed form: an agent that always copies the first suggestion, one
//! that always avoids them, and one that never produces JSON.

use super::{BackendError, ChatMessage, LlmBackend, Role};
use crate::agent::{render_response, CommandRequest, ThoughtRecord};
use crate::opinions::parse_suggestions;
use crate::text::normalize_action;

fn last_human(messages: &[ChatMessage]) -> &str {
    messages
        .iter()
        .rev()
        .find(|m| m.role == Role::Human)
        .map(|m| m.content.as_str())
        .unwrap_or("")
}

fn respond(command: CommandRequest, reasoning: &str) -> String {
    let thought = ThoughtRecord {
        text: format!("I will run {} next.", command.name),
        reasoning: reasoning.to_string(),
        plan: "- act\n- observe".into(),
        criticism: "N/A".into(),
    };
    render_response(&thought, &command)
}

/// Always answers with prose and never with JSON.
#[derive(Debug, Clone, Default)]
pub struct ProseBackend {
    calls: usize,
}

impl ProseBackend {
    pub fn new() -> Self {
        Self::default()
    }
}

impl LlmBackend for ProseBackend {
    fn complete(&mut self, _messages: &[ChatMessage]) -> Result<String, BackendError> {
        self.calls += 1;
        Ok(format!(
            "I think we should search for the item first (attempt {}).",
            self.calls
        ))
    }
}

/// Closure-backed backend.
pub struct FnBackend<F>(pub F);

impl<F> LlmBackend for FnBackend<F>
where
    F: FnMut(&[ChatMessage]) -> Result<String, BackendError>,
{
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        (self.0)(messages)
    }
}

/// A fully suggestible agent: executes the first suggestion it is shown, or
/// `fallback` when the prompt carries none.
#[derive(Debug, Clone)]
pub struct CopySuggestionAgent {
    to_command: fn(&str) -> CommandRequest,
    fallback: String,
}

impl CopySuggestionAgent {
    pub fn new(to_command: fn(&str) -> CommandRequest, fallback: impl Into<String>) -> Self {
        Self {
            to_command,
            fallback: fallback.into(),
        }
    }
}

impl LlmBackend for CopySuggestionAgent {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        let suggestions = parse_suggestions(last_human(messages));
        let (action, why) = match suggestions.first() {
            Some(s) => (s.as_str(), "The suggestion looks right."),
            None => (self.fallback.as_str(), "No suggestion was given."),
        };
        Ok(respond((self.to_command)(action), why))
    }
}

/// Never follows a suggestion: runs the first of `candidates` that was not
/// suggested (the last candidate if all of them were).
#[derive(Debug, Clone)]
pub struct ContrarianAgent {
    to_command: fn(&str) -> CommandRequest,
    candidates: Vec<String>,
}

impl ContrarianAgent {
    pub fn new(to_command: fn(&str) -> CommandRequest, candidates: Vec<String>) -> Self {
        assert!(!candidates.is_empty(), "contrarian agent needs candidate actions");
        Self {
            to_command,
            candidates,
        }
    }
}

impl LlmBackend for ContrarianAgent {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        let shown: Vec<String> = parse_suggestions(last_human(messages))
            .iter()
            .map(|s| normalize_action(s))
            .collect();
        let action = self
            .candidates
            .iter()
            .find(|c| !shown.contains(&normalize_action(c)))
            .unwrap_or_else(|| self.candidates.last().expect("nonempty"));
        Ok(respond(
            (self.to_command)(action),
            "The suggestion does not fit the task.",
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::parse_response;
    use crate::opinions::{render_opinion_prompt, Opinion, SuggestionStyle};

    fn house_command(action: &str) -> CommandRequest {
        CommandRequest::new("alfworld_action", action)
    }

    fn prompt_with(ops: &[&str]) -> Vec<ChatMessage> {
        let ops: Vec<_> = ops.iter().map(|a| Opinion::new(*a)).collect();
        let rendered = render_opinion_prompt(&ops, SuggestionStyle::Bracketed).unwrap();
        vec![ChatMessage::human("goal"), ChatMessage::human(rendered.rendered)]
    }

    #[test]
    fn copy_agent_echoes_first_suggestion() {
        let mut agent = CopySuggestionAgent::new(house_command, "look");
        let raw = agent.complete(&prompt_with(&["go to shelf 2", "look"])).unwrap();
        assert_eq!(parse_response(&raw).unwrap().1.tool_input, "go to shelf 2");
        let raw = agent.complete(&[ChatMessage::human("no suggestions")]).unwrap();
        assert_eq!(parse_response(&raw).unwrap().1.tool_input, "look");
    }

    #[test]
    fn contrarian_avoids_every_suggestion() {
        let mut agent = ContrarianAgent::new(house_command, vec!["look".into(), "inventory".into()]);
        let raw = agent.complete(&prompt_with(&["LOOK"])).unwrap();
        assert_eq!(parse_response(&raw).unwrap().1.tool_input, "inventory");
        let raw = agent.complete(&prompt_with(&["go to shelf 1"])).unwrap();
        assert_eq!(parse_response(&raw).unwrap().1.tool_input, "look");
    }

    #[test]
    fn prose_never_parses() {
        let mut b = ProseBackend::new();
        for _ in 0..5 {
            assert!(parse_response(&b.complete(&[]).unwrap()).is_err());
        }
    }
}
