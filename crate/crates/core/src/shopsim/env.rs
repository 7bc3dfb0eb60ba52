use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{compute_reward, Catalog, Product, Reward, ShopError, ShoppingGoal};
use crate::agent::{CommandRequest, ToolDemo, ToolSpec};
use crate::env::{DispatchError, Environment, Outcome};
use crate::opinions::{AgreementMode, SuggestionStyle};

pub const BACK_TO_SEARCH: &str = "Back to Search";
pub const NEXT_PAGE: &str = "Next >";
pub const PREV_PAGE: &str = "< Prev";
pub const BUY_NOW: &str = "Buy Now";
pub const RESULTS_PER_PAGE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tab {
    Description,
    Features,
    Reviews,
}

impl Tab {
    pub const ALL: [Tab; 3] = [Tab::Description, Tab::Features, Tab::Reviews];

    pub fn label(self) -> &'static str {
        match self {
            Tab::Description => "Description",
            Tab::Features => "Features",
            Tab::Reviews => "Reviews",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Search,
    Results { page: usize },
    Item { tab: Option<Tab> },
    Terminal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Purchase {
    pub product_id: String,
    pub options: BTreeMap<String, String>,
}

/// Rendered page plus the buttons that can be clicked on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShopObservation {
    pub text: String,
    pub buttons: Vec<String>,
}

/// One shopping episode.
#[derive(Debug, Clone)]
pub struct ShopEnv {
    catalog: Arc<Catalog>,
    goal: ShoppingGoal,
    max_steps: usize,
    phase: Phase,
    query: String,
    results: Vec<usize>,
    /// Results page the current item was opened from.
    results_page: usize,
    item: Option<usize>,
    selected: BTreeMap<String, String>,
    purchased: Option<Purchase>,
    steps_used: usize,
    last_message: Option<String>,
}

impl ShopEnv {
    pub fn reset(
        catalog: Arc<Catalog>,
        goal: ShoppingGoal,
        max_steps: usize,
    ) -> Result<Self, ShopError> {
        if catalog.is_empty() {
            return Err(ShopError::EmptyCatalog);
        }
        goal.validate()?;
        Ok(Self {
            catalog,
            goal,
            max_steps,
            phase: Phase::Search,
            query: String::new(),
            results: Vec::new(),
            results_page: 0,
            item: None,
            selected: BTreeMap::new(),
            purchased: None,
            steps_used: 0,
            last_message: None,
        })
    }

    pub fn goal(&self) -> &ShoppingGoal {
        &self.goal
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn query(&self) -> &str {
        &self.query
    }

    pub fn current_item(&self) -> Option<&Product> {
        self.item.map(|i| &self.catalog.products()[i])
    }

    pub fn selected_options(&self) -> &BTreeMap<String, String> {
        &self.selected
    }

    pub fn purchased(&self) -> Option<&Purchase> {
        self.purchased.as_ref()
    }

    pub fn total_results(&self) -> usize {
        self.results.len()
    }

    /// Product positions shown on the current results page.
    pub fn page_items(&self) -> &[usize] {
        match self.phase {
            Phase::Results { page } => {
                let start = (page * RESULTS_PER_PAGE).min(self.results.len());
                let end = (start + RESULTS_PER_PAGE).min(self.results.len());
                &self.results[start..end]
            }
            _ => &[],
        }
    }

    pub fn reward(&self) -> Reward {
        let purchase = self.purchased.as_ref().and_then(|p| {
            self.catalog
                .get(&p.product_id)
                .map(|prod| (prod, &p.options))
        });
        compute_reward(&self.goal, purchase)
    }

    fn is_over(&self) -> bool {
        self.phase == Phase::Terminal || self.steps_used >= self.max_steps
    }

    fn buttons(&self) -> Vec<String> {
        match self.phase {
            Phase::Search | Phase::Terminal => Vec::new(),
            Phase::Results { page } => {
                let mut b = vec![BACK_TO_SEARCH.to_string()];
                if page > 0 {
                    b.push(PREV_PAGE.to_string());
                }
                if (page + 1) * RESULTS_PER_PAGE < self.results.len() {
                    b.push(NEXT_PAGE.to_string());
                }
                b.extend(
                    self.page_items()
                        .iter()
                        .map(|&i| self.catalog.products()[i].id.clone()),
                );
                b
            }
            Phase::Item { .. } => {
                let product = self.current_item().expect("item phase has an item");
                let mut b = vec![BACK_TO_SEARCH.to_string(), PREV_PAGE.to_string()];
                b.extend(product.options.values().flatten().cloned());
                b.extend(Tab::ALL.iter().map(|t| t.label().to_string()));
                b.push(BUY_NOW.to_string());
                b
            }
        }
    }

    /// Current page.
    pub fn observe(&self) -> ShopObservation {
        let mut text = String::new();
        if let Some(msg) = &self.last_message {
            let _ = writeln!(text, "{msg}");
        }
        let _ = writeln!(text, "{}", self.goal.instruction);
        let button = |t: &mut String, label: &str| {
            let _ = writeln!(t, "[button] {label} [button_]");
        };
        match self.phase {
            Phase::Search => {
                text.push_str("[search box]\n");
            }
            Phase::Terminal => {
                let p = self.purchased.as_ref().expect("terminal via purchase");
                let _ = writeln!(text, "Thank you for shopping with us! You bought {}.", p.product_id);
                let _ = writeln!(text, "Your score (min 0.0, max 1.0): {:.2}", self.reward().value / 100.0);
            }
            Phase::Results { page } => {
                button(&mut text, BACK_TO_SEARCH);
                let _ = writeln!(text, "Page {} (Total results: {})", page + 1, self.results.len());
                if page > 0 {
                    button(&mut text, PREV_PAGE);
                }
                if (page + 1) * RESULTS_PER_PAGE < self.results.len() {
                    button(&mut text, NEXT_PAGE);
                }
                text.push('\n');
                for &i in self.page_items() {
                    let p = &self.catalog.products()[i];
                    button(&mut text, &p.id);
                    let _ = writeln!(text, "{}\n${:.2}\n", p.title, p.price);
                }
            }
            Phase::Item { tab } => {
                let p = self.current_item().expect("item phase has an item");
                button(&mut text, BACK_TO_SEARCH);
                button(&mut text, PREV_PAGE);
                for (name, values) in &p.options {
                    let _ = writeln!(text, "{name}");
                    for v in values {
                        if self.selected.get(name) == Some(v) {
                            let _ = writeln!(text, "[clicked button] {v} [clicked button_]");
                        } else {
                            button(&mut text, v);
                        }
                    }
                }
                let _ = writeln!(text, "{}\nPrice: ${:.2}\nRating: N.A.", p.title, p.price);
                for t in Tab::ALL {
                    button(&mut text, t.label());
                }
                button(&mut text, BUY_NOW);
                if let Some(t) = tab {
                    let body = match t {
                        Tab::Description => &p.description,
                        Tab::Features => &p.features,
                        Tab::Reviews => &p.reviews,
                    };
                    let _ = writeln!(text, "{}: {body}", t.label());
                }
            }
        }
        ShopObservation {
            text: text.trim_end().to_string(),
            buttons: self.buttons(),
        }
    }

    fn finish_step(&mut self, message: Option<String>) -> ShopObservation {
        self.steps_used += 1;
        self.last_message = message;
        self.observe()
    }

    /// Run a query. Accepted from the search page and from results pages.
    pub fn search(&mut self, query: &str) -> ShopObservation {
        if self.is_over() {
            return self.observe();
        }
        if !matches!(self.phase, Phase::Search | Phase::Results { .. }) {
            return self.finish_step(Some(format!(
                "Invalid action: search is not available on this page. Click {BACK_TO_SEARCH} first."
            )));
        }
        let query = query.trim();
        if query.is_empty() {
            return self.finish_step(Some("Invalid action: empty search query.".into()));
        }
        self.query = query.to_string();
        self.results = self.catalog.search(query);
        self.phase = Phase::Results { page: 0 };
        self.finish_step(None)
    }

    /// Press a button on the current page, matched case-insensitively.
    pub fn click(&mut self, target: &str) -> ShopObservation {
        if self.is_over() {
            return self.observe();
        }
        let target = target.trim();
        let Some(button) = self
            .buttons()
            .into_iter()
            .find(|b| b.eq_ignore_ascii_case(target))
        else {
            return self.finish_step(Some(format!("Invalid action: no button {target:?} on this page.")));
        };

        match (self.phase, button.as_str()) {
            (_, BACK_TO_SEARCH) => {
                self.phase = Phase::Search;
                self.item = None;
                self.selected.clear();
            }
            (Phase::Results { page }, NEXT_PAGE) => self.phase = Phase::Results { page: page + 1 },
            (Phase::Results { page }, PREV_PAGE) => {
                self.phase = Phase::Results { page: page - 1 }
            }
            (Phase::Results { page }, id) => {
                self.item = self.catalog.position(id);
                self.results_page = page;
                self.selected.clear();
                self.phase = Phase::Item { tab: None };
            }
            (Phase::Item { .. }, PREV_PAGE) => {
                self.item = None;
                self.selected.clear();
                self.phase = Phase::Results {
                    page: self.results_page,
                };
            }
            (Phase::Item { .. }, BUY_NOW) => {
                let product = self.current_item().expect("item phase has an item");
                self.purchased = Some(Purchase {
                    product_id: product.id.clone(),
                    options: self.selected.clone(),
                });
                self.phase = Phase::Terminal;
            }
            (Phase::Item { .. }, label) => {
                if let Some(tab) = Tab::ALL.into_iter().find(|t| t.label() == label) {
                    self.phase = Phase::Item { tab: Some(tab) };
                } else {
                    let product = self.current_item().expect("item phase has an item");
                    let (name, value) = product
                        .option_for_value(label)
                        .map(|(n, v)| (n.to_string(), v.to_string()))
                        .expect("listed option value");
                    self.selected.insert(name, value);
                }
            }
            (Phase::Search | Phase::Terminal, _) => unreachable!("no buttons on this page"),
        }
        self.finish_step(None)
    }

    /// Execute a canonical action string: `search <query>` or `click <button>`.
    pub fn step_action(&mut self, action: &str) -> ShopObservation {
        let action = action.trim();
        let (verb, arg) = action.split_once(' ').unwrap_or((action, ""));
        match verb.to_ascii_lowercase().as_str() {
            "search" => self.search(arg),
            "click" => self.click(arg),
            _ => self.finish_step(Some(format!("Invalid action: {action:?}."))),
        }
    }
}

fn demo(observation: &str, command: &str) -> ToolDemo {
    ToolDemo {
        observation: observation.into(),
        command: command.into(),
    }
}

impl Environment for ShopEnv {
    fn tools(&self) -> Vec<ToolSpec> {
        vec![
            ToolSpec {
                name: "search".into(),
                description: "Search the shop. Input: the search query text.".into(),
                demos: vec![demo(
                    "i want a folding storage ottoman with faux leather, and price lower than 160.00 dollars [search box]",
                    r#"{"name": "search", "args": {"tool_input": "folding storage ottoman faux leather"}}"#,
                )],
            },
            ToolSpec {
                name: "click".into(),
                description: "Click a button on the current page. Input: the button text, e.g. an item id, an option value, Next >, Back to Search or Buy Now.".into(),
                demos: vec![
                    demo(
                        "[button] B09NXP95GC [button_] Storage Ottoman Bench $139.42",
                        r#"{"name": "click", "args": {"tool_input": "B09NXP95GC"}}"#,
                    ),
                    demo(
                        "size [button] 60x40x40cm [button_] ... [button] Buy Now [button_]",
                        r#"{"name": "click", "args": {"tool_input": "60x40x40cm"}}"#,
                    ),
                ],
            },
        ]
    }

    fn instruction(&self) -> String {
        self.goal.instruction.clone()
    }

    fn observation(&self) -> String {
        self.observe().text
    }

    fn valid_actions(&self) -> Vec<String> {
        let mut actions = Vec::new();
        if self.is_over() {
            return actions;
        }
        if matches!(self.phase, Phase::Search | Phase::Results { .. }) {
            // Free-text queries cannot be enumerated; the instruction stands in.
            actions.push(format!("search {}", self.goal.instruction));
        }
        actions.extend(self.buttons().into_iter().map(|b| format!("click {b}")));
        actions
    }

    fn dispatch(&mut self, command: &CommandRequest) -> Result<String, DispatchError> {
        let obs = match command.name.as_str() {
            "search" => self.search(&command.tool_input),
            "click" => self.click(&command.tool_input),
            other => return Err(DispatchError::UnknownTool(other.to_string())),
        };
        Ok(obs.text)
    }

    fn action_of(&self, command: &CommandRequest) -> String {
        format!("{} {}", command.name, command.tool_input.trim())
    }

    fn command_for(action: &str) -> CommandRequest {
        let action = action.trim();
        let (verb, arg) = action.split_once(' ').unwrap_or((action, ""));
        CommandRequest::new(verb.to_ascii_lowercase(), arg.trim())
    }

    fn is_terminal(&self) -> bool {
        self.is_over()
    }

    fn steps_used(&self) -> usize {
        self.steps_used
    }

    fn outcome(&self) -> Outcome {
        let r = self.reward();
        Outcome {
            completed: self.purchased.is_some(),
            success: r.success,
            reward: r.value,
        }
    }

    fn suggestion_style(&self) -> SuggestionStyle {
        SuggestionStyle::Plain
    }

    fn agreement_mode(&self) -> AgreementMode {
        AgreementMode::AnyMatch
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shopsim::{gen_catalog, gen_goals};
    use proptest::prelude::*;

    fn env(seed: u64, n: usize) -> ShopEnv {
        let catalog = Arc::new(gen_catalog(seed, n).unwrap());
        let goal = gen_goals(&catalog, seed, 1).remove(0);
        ShopEnv::reset(catalog, goal, 20).unwrap()
    }

    #[test]
    fn reset_shows_instruction_and_is_repeatable() {
        let a = env(7, 50);
        let b = env(7, 50);
        assert!(a.observation().contains(&a.goal().instruction));
        assert_eq!(a.observe(), b.observe());
        assert_eq!(a.phase(), Phase::Search);
    }

    #[test]
    fn pagination_shows_ten_and_next() {
        let mut e = env(7, 200);
        let obs = e.search("storage ottoman hair towel shoes mug mat lamp case backpack shampoo headphones");
        assert!(e.total_results() > RESULTS_PER_PAGE);
        assert_eq!(e.page_items().len(), RESULTS_PER_PAGE);
        assert!(obs.buttons.contains(&NEXT_PAGE.to_string()));
        assert!(obs.text.contains(&format!("Page 1 (Total results: {})", e.total_results())));
        e.click(NEXT_PAGE);
        assert_eq!(e.phase(), Phase::Results { page: 1 });
        assert!(e.observe().buttons.contains(&PREV_PAGE.to_string()));
    }

    #[test]
    fn no_overlap_gives_zero_results() {
        let mut e = env(7, 50);
        let obs = e.search("zzzqqq");
        assert!(obs.text.contains("Total results: 0"));
    }

    #[test]
    fn click_item_case_insensitive_then_buy() {
        let mut e = env(7, 50);
        e.search(&e.goal().instruction.clone());
        let id = e.catalog().products()[e.page_items()[0]].id.clone();
        e.click(&id.to_lowercase());
        assert_eq!(e.phase(), Phase::Item { tab: None });
        assert_eq!(e.current_item().unwrap().id, id);
        e.click("Reviews");
        assert_eq!(e.phase(), Phase::Item { tab: Some(Tab::Reviews) });
        e.click(BUY_NOW);
        assert!(e.is_terminal());
        assert_eq!(e.purchased().unwrap().product_id, id);
        assert!(e.purchased().unwrap().options.is_empty());
        assert_eq!(e.steps_used(), 4);
    }

    #[test]
    fn back_to_search_from_results() {
        let mut e = env(7, 50);
        e.search("mug");
        e.click("back to search");
        assert_eq!(e.phase(), Phase::Search);
    }

    #[test]
    fn invalid_click_consumes_step_without_state_change() {
        let mut e = env(7, 50);
        e.search("mug");
        let before = (e.phase(), e.total_results());
        let obs = e.click("not a button");
        assert!(obs.text.starts_with("Invalid action"));
        assert_eq!((e.phase(), e.total_results()), before);
        assert_eq!(e.steps_used(), 2);
        e.search("   ");
        assert_eq!(e.steps_used(), 3);
    }

    #[test]
    fn step_cap_terminates() {
        let mut e = env(7, 50);
        for _ in 0..25 {
            e.click("nothing");
        }
        assert_eq!(e.steps_used(), 20);
        assert!(e.is_terminal());
        assert!(!e.outcome().completed);
    }

    proptest! {
        // Buttons listed are accepted; anything accepted was listed.
        #[test]
        fn action_space_sound_and_complete(seed in 0u64..50, picks in proptest::collection::vec(0usize..40, 1..15)) {
            let mut e = env(seed, 60);
            for p in picks {
                if e.is_terminal() { break; }
                let buttons = e.observe().buttons;
                let before = e.steps_used();
                if buttons.is_empty() {
                    e.search(&e.goal().instruction.clone());
                    continue;
                }
                let b = buttons[p % buttons.len()].clone();
                let obs = e.click(&b);
                prop_assert!(!obs.text.contains("Invalid action"), "{b} rejected");
                prop_assert_eq!(e.steps_used(), before + 1);
                let bogus = e.clone().click("definitely-not-listed").text;
                prop_assert!(e.is_terminal() || bogus.contains("Invalid action"));
            }
        }
    }
}
