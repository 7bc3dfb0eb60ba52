//! Desk-scale web shop: a product catalog behind a lexical search engine,
//! paginated results, item pages with options and info tabs, and a purchase
//! scored against the shopper's goal.

mod catalog;
mod env;
mod oracle;
mod reward;
mod search;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{gen_catalog, gen_goals, load_catalog, load_goals, write_jsonl, Catalog};
pub use env::{
    Phase, Purchase, ShopEnv, ShopObservation, Tab, BACK_TO_SEARCH, BUY_NOW, NEXT_PAGE, PREV_PAGE,
    RESULTS_PER_PAGE,
};
pub use oracle::{best_purchase, oracle_commands};
pub use reward::{compute_reward, Reward};
pub use search::{lexical_score, SearchIndex};

/// Agent-run step cap.
pub const AGENT_STEP_CAP: usize = 20;
/// Expert-only rollout step cap.
pub const EXPERT_STEP_CAP: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Product {
    pub id: String,
    pub title: String,
    pub description: String,
    pub features: String,
    pub reviews: String,
    pub price: f64,
    pub options: BTreeMap<String, Vec<String>>,
    pub attributes: BTreeSet<String>,
    pub product_type: String,
}

impl Product {
    /// Attributes that do not show up in the title.
    pub fn hidden_attributes(&self) -> impl Iterator<Item = &String> {
        let title = crate::text::tokenize(&self.title);
        self.attributes.iter().filter(move |a| {
            !crate::text::tokenize(a)
                .iter()
                .all(|t| title.contains(t))
        })
    }

    /// Option name owning a given value, matched case-insensitively.
    pub fn option_for_value(&self, value: &str) -> Option<(&str, &str)> {
        let value = value.trim();
        self.options.iter().find_map(|(name, values)| {
            values
                .iter()
                .find(|v| v.eq_ignore_ascii_case(value))
                .map(|v| (name.as_str(), v.as_str()))
        })
    }

    fn validate(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("empty product id".into());
        }
        if !(self.price > 0.0 && self.price.is_finite()) {
            return Err(format!("product {} has non-positive price", self.id));
        }
        if let Some((name, _)) = self.options.iter().find(|(_, v)| v.is_empty()) {
            return Err(format!("product {} option {name} has no values", self.id));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShoppingGoal {
    #[serde(default)]
    pub id: String,
    pub instruction: String,
    pub required_attributes: BTreeSet<String>,
    pub required_options: BTreeMap<String, String>,
    pub price_cap: f64,
    pub target_type: String,
}

impl ShoppingGoal {
    pub fn validate(&self) -> Result<(), ShopError> {
        if self.instruction.trim().is_empty() {
            return Err(ShopError::InvalidGoal("empty instruction".into()));
        }
        if self.price_cap.is_nan() || self.price_cap <= 0.0 {
            return Err(ShopError::InvalidGoal("price cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ShopError {
    #[error("catalog is empty")]
    EmptyCatalog,
    #[error("duplicate product id {0}")]
    DuplicateId(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("invalid goal: {0}")]
    InvalidGoal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
