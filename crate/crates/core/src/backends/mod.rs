//! Text-completion backends.
//!
//! [`ScriptedBackend`] replays fixtures without touching the network and is
//! what the tests and the acceptance suite run on. [`HttpBackend`] talks to a
//! chat-completion endpoint for live runs; [`RecordingBackend`] wraps any
//! backend and writes a replayable fixture as it goes.

mod agents;
mod http;
mod scripted;

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use agents::{ContrarianAgent, CopySuggestionAgent, FnBackend, ProseBackend};
pub use http::{BackendConfig, HttpBackend, WireFormat, DEFAULT_TEMPERATURE};
pub use scripted::{Fixture, FixtureEntry, Matcher, RecordingBackend, ScriptedBackend};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    Human,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::Human => "human",
            Role::Assistant => "assistant",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        Self {
            role,
            content: content.into(),
        }
    }

    pub fn system(content: impl Into<String>) -> Self {
        Self::new(Role::System, content)
    }

    pub fn human(content: impl Into<String>) -> Self {
        Self::new(Role::Human, content)
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self::new(Role::Assistant, content)
    }
}

/// SHA-256 over the concatenated `role:content` pairs, hex encoded.
pub fn prompt_digest(messages: &[ChatMessage]) -> String {
    let mut hasher = Sha256::new();
    for m in messages {
        hasher.update(m.role.as_str().as_bytes());
        hasher.update(b":");
        hasher.update(m.content.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BackendError {
    #[error("API key environment variable {0} is not set")]
    AuthMissing(String),
    #[error("request timed out after all retries")]
    Timeout,
    #[error("HTTP status {0} after all retries")]
    HttpStatus(u16),
    #[error("completion contained no choices or empty content")]
    EmptyCompletion,
    #[error("transport error: {0}")]
    Transport(String),
    #[error("could not decode response: {0}")]
    Decode(String),
    #[error("fixture exhausted after {0} responses")]
    FixtureExhausted(usize),
    #[error("no fixture entry for prompt digest {0}")]
    NoMatch(String),
    #[error("fixture sink write failed: {0}")]
    Sink(String),
    #[error("no messages to send")]
    EmptyPrompt,
}

/// Anything that turns a prompt into a completion.
pub trait LlmBackend {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, BackendError>;
}

impl<B: LlmBackend + ?Sized> LlmBackend for Box<B> {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        (**self).complete(messages)
    }
}

impl<B: LlmBackend + ?Sized> LlmBackend for &mut B {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        (**self).complete(messages)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_order_and_role_sensitive() {
        let a = vec![ChatMessage::system("x"), ChatMessage::human("y")];
        let b = vec![ChatMessage::human("y"), ChatMessage::system("x")];
        let c = vec![ChatMessage::human("x"), ChatMessage::human("y")];
        assert_eq!(prompt_digest(&a), prompt_digest(&a.clone()));
        assert_ne!(prompt_digest(&a), prompt_digest(&b));
        assert_ne!(prompt_digest(&a), prompt_digest(&c));
        assert_eq!(prompt_digest(&a).len(), 64);
    }

    #[test]
    fn role_serializes_lowercase() {
        let json = serde_json::to_string(&ChatMessage::human("hi")).unwrap();
        assert_eq!(json, r#"{"role":"human","content":"hi"}"#);
    }
}
