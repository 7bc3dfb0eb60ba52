use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::backends::BackendConfig;
use crate::experts::{ExpertKind, QualityTier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    Shop,
    House,
}

impl EnvKind {
    pub fn name(self) -> &'static str {
        match self {
            EnvKind::Shop => "shop",
            EnvKind::House => "house",
        }
    }

    /// Step cap for agent runs and for expert-only rollouts.
    pub fn step_cap(self, expert_only: bool) -> usize {
        match (self, expert_only) {
            (EnvKind::Shop, false) => crate::shopsim::AGENT_STEP_CAP,
            (EnvKind::Shop, true) => crate::shopsim::EXPERT_STEP_CAP,
            (EnvKind::House, false) => crate::housesim::AGENT_STEP_CAP,
            (EnvKind::House, true) => crate::housesim::EXPERT_STEP_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    /// Replay `<fixture_dir>/<task id>.jsonl`.
    Fixture,
    /// Brute-force solution replayed as model responses.
    Oracle,
    /// Never emits JSON.
    Prose,
    /// Executes the first suggestion it sees.
    Copy,
    /// Never executes a suggestion.
    Contrarian,
    /// Live chat-completion endpoint.
    Http,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendSpec {
    pub kind: BackendKind,
    #[serde(default)]
    pub fixture_dir: Option<PathBuf>,
    /// Record every response as a digest-keyed fixture next to the traces.
    #[serde(default)]
    pub record: bool,
    #[serde(default)]
    pub http: BackendConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpertSpec {
    pub kind: ExpertKind,
    #[serde(default)]
    pub tier: QualityTier,
}

fn default_one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Row label in reports.
    pub model: String,
    pub environment: EnvKind,
    /// Goals (shop) or task instances (house), JSON lines.
    pub task_file: PathBuf,
    /// Product catalog; shop only.
    #[serde(default)]
    pub catalog_file: Option<PathBuf>,
    pub first_n: usize,
    #[serde(default = "default_one")]
    pub runs_to_average: usize,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default = "default_one")]
    pub workers: usize,
    #[serde(default)]
    pub opinion_k: usize,
    /// Let the expert act alone: a copy agent follows its top suggestion
    /// under the longer expert step cap.
    #[serde(default)]
    pub expert_only: bool,
    #[serde(default)]
    pub max_steps: Option<usize>,
    #[serde(default)]
    pub context_chars: Option<usize>,
    pub backend: BackendSpec,
    #[serde(default)]
    pub expert: Option<ExpertSpec>,
}

impl RunConfig {
    /// Parse a TOML config. Relative paths resolve against the file's
    /// directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.task_file);
        resolve(&mut cfg.output_dir);
        if let Some(p) = cfg.catalog_file.as_mut() {
            resolve(p);
        }
        if let Some(p) = cfg.backend.fixture_dir.as_mut() {
            resolve(p);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.first_n == 0 {
            return bad("first_n must be at least 1");
        }
        if self.runs_to_average == 0 {
            return bad("runs_to_average must be at least 1");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        if self.max_steps == Some(0) {
            return bad("max_steps must be at least 1");
        }
        if self.environment == EnvKind::Shop && self.catalog_file.is_none() {
            return bad("shop runs need catalog_file");
        }
        if (self.opinion_k > 0 || self.expert_only) && self.expert.is_none() {
            return bad("opinions and expert-only runs need an [expert] section");
        }
        if self.backend.kind == BackendKind::Fixture && self.backend.fixture_dir.is_none() {
            return bad("fixture backend needs fixture_dir");
        }
        if self.backend.kind == BackendKind::Http {
            self.backend.http.validate().map_err(HarnessError::Config)?;
        }
        if let Some(e) = self.expert {
            let ok = match self.environment {
                EnvKind::Shop => {
                    crate::experts::shop_provider(e.kind, e.tier, 0).is_ok()
                }
                EnvKind::House => crate::experts::house_provider(e.kind, 0).is_ok(),
            };
            if !ok {
                return Err(HarnessError::Config(format!(
                    "expert {:?} cannot advise in the {} environment",
                    e.kind,
                    self.environment.name()
                )));
            }
        }
        Ok(())
    }

    /// Effective opinion count: expert-only rollouts always show one.
    pub fn effective_k(&self) -> usize {
        if self.expert_only {
            1
        } else {
            self.opinion_k
        }
    }

    pub fn effective_max_steps(&self) -> usize {
        self.max_steps
            .unwrap_or_else(|| self.environment.step_cap(self.expert_only))
    }
}
