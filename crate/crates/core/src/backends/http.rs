use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tracing::warn;

use super::{BackendError, ChatMessage, LlmBackend, Role};

pub const DEFAULT_TEMPERATURE: f64 = 0.01;

/// Field names used on the wire. Defaults follow the common chat-completion
/// convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WireFormat {
    pub system_role: String,
    pub human_role: String,
    pub assistant_role: String,
    /// JSON pointer to the completion text in the response body.
    pub content_pointer: String,
    /// JSON pointer to the choices array; empty means skip the check.
    pub choices_pointer: String,
}

impl Default for WireFormat {
    fn default() -> Self {
        Self {
            system_role: "system".into(),
            human_role: "user".into(),
            assistant_role: "assistant".into(),
            content_pointer: "/choices/0/message/content".into(),
            choices_pointer: "/choices".into(),
        }
    }
}

impl WireFormat {
    fn role(&self, role: Role) -> &str {
        match role {
            Role::System => &self.system_role,
            Role::Human => &self.human_role,
            Role::Assistant => &self.assistant_role,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BackendConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub timeout_secs: f64,
    pub max_retries: u32,
    /// Environment variable holding the bearer token; `None` sends no auth.
    pub api_key_env: Option<String>,
    pub backoff_base_ms: u64,
    pub max_concurrency: usize,
    pub wire: WireFormat,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-4".into(),
            temperature: DEFAULT_TEMPERATURE,
            timeout_secs: 60.0,
            max_retries: 3,
            api_key_env: Some("OPENAI_API_KEY".into()),
            backoff_base_ms: 1000,
            max_concurrency: 4,
            wire: WireFormat::default(),
        }
    }
}

impl BackendConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(format!("temperature {} outside [0, 2]", self.temperature));
        }
        if self.timeout_secs <= 0.0 {
            return Err("timeout must be positive".into());
        }
        if self.max_concurrency == 0 {
            return Err("max_concurrency must be at least 1".into());
        }
        Ok(())
    }

    /// Delay before retry number `attempt` (0-based), without jitter.
    pub fn backoff(&self, attempt: u32) -> Duration {
        Duration::from_millis(self.backoff_base_ms.saturating_mul(1u64 << attempt.min(20)))
    }
}

#[derive(Debug)]
struct Gate {
    in_flight: Mutex<usize>,
    freed: Condvar,
    limit: usize,
}

impl Gate {
    fn acquire(self: &Arc<Self>) -> Permit {
        let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= self.limit {
            n = self.freed.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
        Permit(Arc::clone(self))
    }
}

struct Permit(Arc<Gate>);

impl Drop for Permit {
    fn drop(&mut self) {
        let mut n = self.0.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.0.freed.notify_one();
    }
}

/// Blocking chat-completion client. Clones share the connection pool and the
/// in-flight request limit.
#[derive(Debug, Clone)]
pub struct HttpBackend {
    cfg: BackendConfig,
    client: reqwest::blocking::Client,
    gate: Arc<Gate>,
    attempts: Arc<Mutex<u64>>,
}

enum Attempt {
    Done(Result<String, BackendError>),
    Retry(BackendError),
}

impl HttpBackend {
    pub fn new(cfg: BackendConfig) -> Result<Self, BackendError> {
        cfg.validate().map_err(BackendError::Transport)?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(cfg.timeout_secs))
            .build()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let gate = Arc::new(Gate {
            in_flight: Mutex::new(0),
            freed: Condvar::new(),
            limit: cfg.max_concurrency,
        });
        Ok(Self {
            cfg,
            client,
            gate,
            attempts: Arc::new(Mutex::new(0)),
        })
    }

    pub fn config(&self) -> &BackendConfig {
        &self.cfg
    }

    /// Total HTTP attempts made through this backend and its clones.
    pub fn attempts(&self) -> u64 {
        *self.attempts.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn request_body(&self, messages: &[ChatMessage]) -> Value {
        let wire = &self.cfg.wire;
        let msgs: Vec<Value> = messages
            .iter()
            .map(|m| json!({ "role": wire.role(m.role), "content": m.content }))
            .collect();
        json!({
            "model": self.cfg.model,
            "messages": msgs,
            "temperature": self.cfg.temperature,
        })
    }

    fn api_key(&self) -> Result<Option<String>, BackendError> {
        match &self.cfg.api_key_env {
            None => Ok(None),
            Some(var) => std::env::var(var)
                .ok()
                .filter(|k| !k.is_empty())
                .map(Some)
                .ok_or_else(|| BackendError::AuthMissing(var.clone())),
        }
    }

    fn attempt(&self, body: &Value, key: Option<&str>) -> Attempt {
        *self.attempts.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        let mut req = self.client.post(&self.cfg.endpoint).json(body);
        if let Some(key) = key {
            req = req.bearer_auth(key);
        }
        let resp = match req.send() {
            Ok(r) => r,
            Err(e) if e.is_timeout() => return Attempt::Retry(BackendError::Timeout),
            Err(e) if e.is_connect() => {
                return Attempt::Retry(BackendError::Transport(e.to_string()))
            }
            Err(e) => return Attempt::Done(Err(BackendError::Transport(e.to_string()))),
        };
        let status = resp.status();
        if status.as_u16() == 429 || status.is_server_error() {
            return Attempt::Retry(BackendError::HttpStatus(status.as_u16()));
        }
        if !status.is_success() {
            return Attempt::Done(Err(BackendError::HttpStatus(status.as_u16())));
        }
        let text = match resp.text() {
            Ok(t) => t,
            Err(e) if e.is_timeout() => return Attempt::Retry(BackendError::Timeout),
            Err(e) => return Attempt::Done(Err(BackendError::Transport(e.to_string()))),
        };
        Attempt::Done(self.extract(&text))
    }

    fn extract(&self, body: &str) -> Result<String, BackendError> {
        let value: Value =
            serde_json::from_str(body).map_err(|e| BackendError::Decode(e.to_string()))?;
        let wire = &self.cfg.wire;
        if !wire.choices_pointer.is_empty() {
            match value.pointer(&wire.choices_pointer) {
                Some(Value::Array(a)) if !a.is_empty() => {}
                _ => return Err(BackendError::EmptyCompletion),
            }
        }
        match value.pointer(&wire.content_pointer) {
            Some(Value::String(s)) if !s.is_empty() => Ok(s.clone()),
            _ => Err(BackendError::EmptyCompletion),
        }
    }

    /// Send one chat-completion request, retrying on timeout, 429 and 5xx
    /// with exponential backoff plus jitter. Total attempts are at most
    /// `max_retries + 1`.
    pub fn complete_with(&self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        if messages.is_empty() {
            return Err(BackendError::EmptyPrompt);
        }
        let key = self.api_key()?;
        let body = self.request_body(messages);
        let _permit = self.gate.acquire();
        let mut retry = 0;
        loop {
            match self.attempt(&body, key.as_deref()) {
                Attempt::Done(result) => return result,
                Attempt::Retry(err) => {
                    if retry >= self.cfg.max_retries {
                        return Err(err);
                    }
                    let base = self.cfg.backoff(retry);
                    let jitter_cap = (base.as_millis() as u64 / 4).max(1);
                    let jitter = Duration::from_millis(rand::rng().random_range(0..jitter_cap));
                    warn!(%err, attempt = retry + 1, "chat completion failed, backing off");
                    std::thread::sleep(base + jitter);
                    retry += 1;
                }
            }
        }
    }
}

impl LlmBackend for HttpBackend {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        self.complete_with(messages)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_low_temperature_protocol() {
        let cfg = BackendConfig::default();
        assert_eq!(cfg.temperature, 0.01);
        assert!(cfg.validate().is_ok());
        let bad = BackendConfig {
            temperature: 2.5,
            ..BackendConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn backoff_doubles_from_base() {
        let cfg = BackendConfig::default();
        assert_eq!(cfg.backoff(0), Duration::from_secs(1));
        assert_eq!(cfg.backoff(1), Duration::from_secs(2));
        assert_eq!(cfg.backoff(2), Duration::from_secs(4));
    }

    #[test]
    fn request_body_maps_roles() {
        let backend = HttpBackend::new(BackendConfig {
            api_key_env: None,
            ..BackendConfig::default()
        })
        .unwrap();
        let body = backend.request_body(&[ChatMessage::system("s"), ChatMessage::human("h")]);
        assert_eq!(body["messages"][1]["role"], "user");
        assert_eq!(body["temperature"], 0.01);
        assert_eq!(body["model"], "gpt-4");
    }

    #[test]
    fn missing_key_is_reported_before_any_request() {
        let backend = HttpBackend::new(BackendConfig {
            api_key_env: Some("OPINION_BENCH_TEST_UNSET_KEY".into()),
            endpoint: "http://127.0.0.1:9/".into(),
            ..BackendConfig::default()
        })
        .unwrap();
        assert_eq!(
            backend.complete_with(&[ChatMessage::human("x")]),
            Err(BackendError::AuthMissing("OPINION_BENCH_TEST_UNSET_KEY".into()))
        );
        assert_eq!(backend.attempts(), 0);
    }
}
