use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{prompt_digest, BackendError, ChatMessage, LlmBackend};

/// How a fixture entry is selected: by call index or by prompt digest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Matcher {
    Index(usize),
    Digest(String),
}

/// One line of a fixture file: `{"match": <index or digest>, "response": <text>}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureEntry {
    #[serde(rename = "match")]
    pub matcher: Matcher,
    pub response: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Fixture {
    entries: Vec<FixtureEntry>,
    cursor: usize,
}

impl Fixture {
    pub fn new(entries: Vec<FixtureEntry>) -> Self {
        Self { entries, cursor: 0 }
    }

    /// Index-matched fixture answering calls 0, 1, 2, ... in order.
    pub fn from_responses<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(
            responses
                .into_iter()
                .enumerate()
                .map(|(i, r)| FixtureEntry {
                    matcher: Matcher::Index(i),
                    response: r.into(),
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[FixtureEntry] {
        &self.entries
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn read_jsonl<R: BufRead>(reader: R) -> std::io::Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: FixtureEntry = serde_json::from_str(&line).map_err(|e| {
                std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("fixture line {}: {e}", n + 1),
                )
            })?;
            entries.push(entry);
        }
        Ok(Self::new(entries))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> std::io::Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_jsonl(std::io::BufReader::new(file))
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for entry in &self.entries {
            serde_json::to_writer(&mut out, entry)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Deterministic replay backend. Never touches the network.
#[derive(Debug, Clone)]
pub struct ScriptedBackend {
    fixture: Fixture,
    by_index: HashMap<usize, usize>,
    by_digest: HashMap<String, usize>,
    index_entries: usize,
    calls: usize,
}

impl ScriptedBackend {
    pub fn new(fixture: Fixture) -> Self {
        let mut by_index = HashMap::new();
        let mut by_digest = HashMap::new();
        for (pos, entry) in fixture.entries.iter().enumerate() {
            match &entry.matcher {
                Matcher::Index(i) => {
                    by_index.entry(*i).or_insert(pos);
                }
                Matcher::Digest(d) => {
                    by_digest.entry(d.clone()).or_insert(pos);
                }
            }
        }
        let index_entries = by_index.len();
        Self {
            fixture,
            by_index,
            by_digest,
            index_entries,
            calls: 0,
        }
    }

    pub fn from_responses<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(Fixture::from_responses(responses))
    }

    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn fixture(&self) -> &Fixture {
        &self.fixture
    }

    /// Pick the response for the current call and advance.
    pub fn scripted_complete(&mut self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        let call = self.calls;
        if let Some(&pos) = self.by_index.get(&call) {
            self.calls += 1;
            self.fixture.cursor = (self.fixture.cursor + 1).min(self.fixture.entries.len());
            return Ok(self.fixture.entries[pos].response.clone());
        }
        let digest = prompt_digest(messages);
        if let Some(&pos) = self.by_digest.get(&digest) {
            self.calls += 1;
            return Ok(self.fixture.entries[pos].response.clone());
        }
        if self.index_entries > 0 && call >= self.index_entries {
            return Err(BackendError::FixtureExhausted(self.index_entries));
        }
        Err(BackendError::NoMatch(digest))
    }
}

impl LlmBackend for ScriptedBackend {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        self.scripted_complete(messages)
    }
}

/// Wraps a backend and appends every `(prompt digest, response)` pair to a
/// sink in fixture format.
pub struct RecordingBackend<B, W> {
    inner: B,
    sink: W,
    recorded: usize,
}

impl<B: LlmBackend, W: Write> RecordingBackend<B, W> {
    pub fn new(inner: B, sink: W) -> Self {
        Self {
            inner,
            sink,
            recorded: 0,
        }
    }

    pub fn recorded(&self) -> usize {
        self.recorded
    }

    pub fn into_parts(self) -> (B, W) {
        (self.inner, self.sink)
    }
}

impl<B: LlmBackend, W: Write> LlmBackend for RecordingBackend<B, W> {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        let response = self.inner.complete(messages)?;
        let entry = FixtureEntry {
            matcher: Matcher::Digest(prompt_digest(messages)),
            response: response.clone(),
        };
        let line = serde_json::to_string(&entry).map_err(|e| BackendError::Sink(e.to_string()))?;
        self.sink
            .write_all(line.as_bytes())
            .and_then(|_| self.sink.write_all(b"\n"))
            .and_then(|_| self.sink.flush())
            .map_err(|e| BackendError::Sink(e.to_string()))?;
        self.recorded += 1;
        Ok(response)
    }
}
