use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{AgentStep, CommandRequest, ThoughtRecord};
use crate::backends::ChatMessage;
use crate::opinions::Opinion;

/// One JSON-lines record of an episode trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLine {
    pub index: usize,
    pub prompt: Vec<ChatMessage>,
    pub thought: Option<ThoughtRecord>,
    pub command: Option<CommandRequest>,
    pub observation: String,
    pub opinions: Vec<Opinion>,
    pub agreed: Option<bool>,
    pub error: Option<String>,
}

impl From<&AgentStep> for TraceLine {
    fn from(step: &AgentStep) -> Self {
        Self {
            index: step.index,
            prompt: step.prompt_snapshot.clone(),
            thought: step.thought.clone(),
            command: step.command.clone(),
            observation: step.observation.clone(),
            opinions: step.opinions_shown.clone(),
            agreed: step.agreement.as_ref().map(|a| a.agreed),
            error: step.marker.as_ref().map(ToString::to_string),
        }
    }
}

pub fn write_trace<W: Write>(steps: &[AgentStep], mut out: W) -> std::io::Result<()> {
    for step in steps {
        serde_json::to_writer(&mut out, &TraceLine::from(step))?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_trace<R: BufRead>(reader: R) -> std::io::Result<Vec<TraceLine>> {
    let mut lines = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str(&line).map_err(|e| {
            std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("trace line {}: {e}", n + 1),
            )
        })?;
        lines.push(parsed);
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::StepMarker;

    #[test]
    fn trace_line_has_exactly_the_documented_fields() {
        let step = AgentStep {
            index: 0,
            prompt_snapshot: vec![ChatMessage::human("goal")],
            thought: None,
            command: None,
            observation: "Could not parse your response".into(),
            opinions_shown: vec![],
            agreement: None,
            marker: Some(StepMarker::ParseFailure("no JSON".into())),
        };
        let mut buf = Vec::new();
        write_trace(&[step], &mut buf).unwrap();
        let value: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let mut keys: Vec<_> = value.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            ["agreed", "command", "error", "index", "observation", "opinions", "prompt", "thought"]
        );
        let back = read_trace(buf.as_slice()).unwrap();
        assert_eq!(back[0].error.as_deref(), Some("parse failure: no JSON"));
    }
}
