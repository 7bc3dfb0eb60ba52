use std::fmt::Write as _;

use super::{render_response, AgentConfig, CommandRequest, ConfigError, ContextBuffer, ThoughtRecord};
use crate::backends::ChatMessage;
use crate::opinions::{render_opinion_prompt, Opinion, SuggestionStyle};

/// The plain per-step trigger used when no opinions are shown.
pub const TRIGGER_PROMPT: &str =
    "Determine which next command to use, and respond using the JSON format specified above:";

/// Sent (and recorded as the observation) when a response cannot be parsed.
pub const PARSE_RETRY_PROMPT: &str = "Could not parse your response";

fn response_format() -> String {
    render_response(
        &ThoughtRecord {
            text: "thought".into(),
            reasoning: "reasoning".into(),
            plan: "- short bulleted\n- list that conveys\n- long-term plan".into(),
            criticism: "constructive self-criticism".into(),
        },
        &CommandRequest::new("command name", "input"),
    )
}

/// System message: goal, tool catalog with demonstrations in registration
/// order, and the JSON response format.
pub fn system_message(config: &AgentConfig) -> ChatMessage {
    let mut s = String::new();
    s.push_str(
        "You are an autonomous decision-making agent. Make every decision on your own, \
         without asking for help.\n\nGOALS:\n",
    );
    let _ = writeln!(s, "1. {}", config.goal);
    s.push_str("\nCOMMANDS:\n");
    for (i, tool) in config.tools.iter().enumerate() {
        let _ = writeln!(s, "{}. {}: {}", i + 1, tool.name, tool.description);
        for demo in &tool.demos {
            let _ = writeln!(s, "   Example observation: {}", demo.observation);
            let _ = writeln!(s, "   Example command: {}", demo.command);
        }
    }
    s.push_str("\nRESPONSE FORMAT:\nYou should only respond in JSON format as described below\n");
    s.push_str(&response_format());
    s.push_str("\nEnsure the response can be parsed by a strict JSON parser.");
    ChatMessage::system(s)
}

/// Assemble the full prompt for one decision.
///
/// Output is the system message, the context, and one closing human message:
/// either the plain trigger or the suggestion template followed by it.
pub fn build_prompt(
    config: &AgentConfig,
    ctx: &ContextBuffer,
    opinions: Option<&[Opinion]>,
    style: SuggestionStyle,
) -> Result<Vec<ChatMessage>, ConfigError> {
    if ctx.is_empty() {
        return Err(ConfigError::EmptyContext);
    }
    let closing = match opinions {
        None => TRIGGER_PROMPT.to_string(),
        Some([]) => return Err(ConfigError::EmptyOpinions),
        Some(ops) if ops.len() > config.opinion_k => {
            return Err(ConfigError::TooManyOpinions {
                given: ops.len(),
                k: config.opinion_k,
            })
        }
        Some(ops) => {
            let rendered = render_opinion_prompt(ops, style)
                .map_err(|_| ConfigError::EmptyOpinions)?
                .rendered;
            format!("{rendered} {TRIGGER_PROMPT}")
        }
    };
    let mut messages = Vec::with_capacity(ctx.len() + 2);
    messages.push(system_message(config));
    messages.extend(ctx.messages().iter().cloned());
    messages.push(ChatMessage::human(closing));
    Ok(messages)
}
