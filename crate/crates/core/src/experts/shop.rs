use std::collections::BTreeSet;

use super::{QualityTier, ScoredAction};
use crate::opinions::OpinionProvider;
use crate::shopsim::{
    Phase, Product, ShopEnv, ShoppingGoal, Tab, BACK_TO_SEARCH, BUY_NOW, NEXT_PAGE, PREV_PAGE,
};
use crate::text::{is_stopword, tokenize};

/// The fixed baseline: search the whole instruction, click the first result,
/// buy it.
pub fn rule_shop_act(env: &ShopEnv) -> Option<String> {
    match env.phase() {
        Phase::Search => Some(format!("search {}", env.goal().instruction)),
        Phase::Results { .. } => Some(match env.page_items().first() {
            Some(&i) => format!("click {}", env.catalog().products()[i].id),
            None => format!("click {BACK_TO_SEARCH}"),
        }),
        Phase::Item { .. } => Some(format!("click {BUY_NOW}")),
        Phase::Terminal => None,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RuleShop;

impl OpinionProvider<ShopEnv> for RuleShop {
    fn score(&mut self, env: &ShopEnv) -> Vec<ScoredAction> {
        rule_shop_act(env)
            .map(|a| vec![ScoredAction::new(a, 1.0)])
            .unwrap_or_default()
    }
}

/// Content tokens of a goal: instruction plus required attributes, minus
/// stopwords.
pub fn goal_tokens(goal: &ShoppingGoal) -> BTreeSet<String> {
    let mut text = goal.instruction.clone();
    for a in &goal.required_attributes {
        text.push(' ');
        text.push_str(a);
    }
    tokenize(&text)
        .into_iter()
        .filter(|t| !is_stopword(t))
        .collect()
}

/// Results-page score of a product: share of goal tokens found in its title,
/// plus 0.5 in the stronger tier when a required attribute is hidden from the
/// title but present on the product.
pub fn heuristic_item_score(product: &Product, goal: &ShoppingGoal, tier: QualityTier) -> f64 {
    let want = goal_tokens(goal);
    if want.is_empty() {
        return 0.0;
    }
    let title: BTreeSet<String> = tokenize(&product.title).into_iter().collect();
    let overlap = want.intersection(&title).count() as f64 / want.len() as f64;
    let bonus = match tier {
        QualityTier::WithImage
            if product
                .hidden_attributes()
                .any(|a| goal.required_attributes.contains(a)) =>
        {
            0.5
        }
        _ => 0.0,
    };
    overlap + bonus
}

/// Imitation surrogate for the shop.
#[derive(Debug, Clone, Copy)]
pub struct HeuristicShop {
    tier: QualityTier,
}

impl HeuristicShop {
    pub fn new(tier: QualityTier) -> Self {
        Self { tier }
    }
}

impl OpinionProvider<ShopEnv> for HeuristicShop {
    fn score(&mut self, env: &ShopEnv) -> Vec<ScoredAction> {
        let goal = env.goal();
        match env.phase() {
            Phase::Search => {
                let query: Vec<String> = tokenize(&goal.instruction)
                    .into_iter()
                    .filter(|t| !is_stopword(t))
                    .collect();
                vec![ScoredAction::new(format!("search {}", query.join(" ")), 1.0)]
            }
            Phase::Results { .. } => {
                let buttons = env.observe().buttons;
                let mut out: Vec<ScoredAction> = env
                    .page_items()
                    .iter()
                    .map(|&i| {
                        let p = &env.catalog().products()[i];
                        ScoredAction::new(
                            format!("click {}", p.id),
                            heuristic_item_score(p, goal, self.tier),
                        )
                    })
                    .collect();
                if buttons.iter().any(|b| b == NEXT_PAGE) {
                    out.push(ScoredAction::new(format!("click {NEXT_PAGE}"), 0.1));
                }
                out.push(ScoredAction::new(format!("click {BACK_TO_SEARCH}"), 0.0));
                out
            }
            Phase::Item { .. } => {
                let product = env.current_item().expect("item phase has an item");
                let selected = env.selected_options();
                let mut out = Vec::new();
                for (name, values) in &product.options {
                    for v in values {
                        let wanted = goal
                            .required_options
                            .get(name)
                            .is_some_and(|w| w.eq_ignore_ascii_case(v));
                        let already = selected.get(name) == Some(v);
                        let score = if wanted && !already { 1.0 } else { 0.0 };
                        out.push(ScoredAction::new(format!("click {v}"), score));
                    }
                }
                for t in Tab::ALL {
                    out.push(ScoredAction::new(format!("click {}", t.label()), 0.1));
                }
                // Buy once every required option this product offers is chosen.
                let pending = goal.required_options.iter().any(|(name, want)| {
                    product.options.get(name).is_some_and(|vals| {
                        vals.iter().any(|v| v.eq_ignore_ascii_case(want))
                            && !selected
                                .get(name)
                                .is_some_and(|s| s.eq_ignore_ascii_case(want))
                    })
                });
                out.push(ScoredAction::new(
                    format!("click {BUY_NOW}"),
                    if pending { 0.2 } else { 1.0 },
                ));
                out.push(ScoredAction::new(format!("click {PREV_PAGE}"), 0.05));
                out.push(ScoredAction::new(format!("click {BACK_TO_SEARCH}"), 0.0));
                out
            }
            Phase::Terminal => Vec::new(),
        }
    }
}
