//! Expert policies: opinion sources for the agent and stand-alone baselines.
//!
//! The shop has a rule policy (search the instruction, buy the first hit) and
//! a heuristic imitation surrogate in two quality tiers. The house has a
//! plan-template surrogate and a degenerate repeater that gets stuck issuing
//! one `go to` forever. A uniform random provider works for both.

mod house;
mod random;
mod shop;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use house::{plan_next_action, HeuristicHouse, Repeater, REPEATER_WARMUP};
pub use random::RandomExpert;
pub use shop::{heuristic_item_score, goal_tokens, rule_shop_act, HeuristicShop, RuleShop};

use crate::housesim::HouseEnv;
use crate::opinions::OpinionProvider;
use crate::shopsim::ShopEnv;

/// One candidate action with the expert's preference for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredAction {
    pub action: String,
    pub score: f64,
}

impl ScoredAction {
    pub fn new(action: impl Into<String>, score: f64) -> Self {
        Self {
            action: action.into(),
            score,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpertKind {
    RuleShop,
    HeuristicShop,
    HeuristicHouse,
    Random,
    Repeater,
}

/// Quality tier of the shop heuristic. The stronger tier also sees
/// attributes that are missing from product titles.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityTier {
    #[default]
    WithImage,
    WithoutImage,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpertError {
    #[error("expert {0:?} does not support the {1} environment")]
    Unsupported(ExpertKind, &'static str),
}

pub type ShopProvider = Box<dyn OpinionProvider<ShopEnv> + Send>;
pub type HouseProvider = Box<dyn OpinionProvider<HouseEnv> + Send>;

pub fn shop_provider(kind: ExpertKind, tier: QualityTier, seed: u64) -> Result<ShopProvider, ExpertError> {
    Ok(match kind {
        ExpertKind::RuleShop => Box::new(RuleShop),
        ExpertKind::HeuristicShop => Box::new(HeuristicShop::new(tier)),
        ExpertKind::Random => Box::new(RandomExpert::new(seed)),
        other => return Err(ExpertError::Unsupported(other, "shop")),
    })
}

pub fn house_provider(kind: ExpertKind, seed: u64) -> Result<HouseProvider, ExpertError> {
    Ok(match kind {
        ExpertKind::HeuristicHouse => Box::new(HeuristicHouse),
        ExpertKind::Repeater => Box::new(Repeater::new(seed)),
        ExpertKind::Random => Box::new(RandomExpert::new(seed)),
        other => return Err(ExpertError::Unsupported(other, "house")),
    })
}
