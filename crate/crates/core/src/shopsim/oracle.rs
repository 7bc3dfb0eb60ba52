//! Brute-force solver used to build oracle agents.

use std::collections::BTreeMap;

use super::{compute_reward, Catalog, ShoppingGoal, BUY_NOW, NEXT_PAGE, RESULTS_PER_PAGE};

/// Every option assignment of a product, one value per option.
fn option_combos(options: &BTreeMap<String, Vec<String>>) -> Vec<BTreeMap<String, String>> {
    let mut combos = vec![BTreeMap::new()];
    for (name, values) in options {
        combos = combos
            .into_iter()
            .flat_map(|base| {
                values.iter().map(move |v| {
                    let mut m = base.clone();
                    m.insert(name.clone(), v.clone());
                    m
                })
            })
            .collect();
    }
    combos
}

/// Highest-reward (product position, options) over the whole catalog; ties go
/// to the earlier product and the first combination.
pub fn best_purchase(
    catalog: &Catalog,
    goal: &ShoppingGoal,
) -> Option<(usize, BTreeMap<String, String>, f64)> {
    let mut best: Option<(usize, BTreeMap<String, String>, f64)> = None;
    for (i, p) in catalog.products().iter().enumerate() {
        for combo in option_combos(&p.options) {
            let r = compute_reward(goal, Some((p, &combo))).value;
            if best.as_ref().is_none_or(|b| r > b.2) {
                best = Some((i, combo, r));
            }
        }
    }
    best
}

/// Canonical action sequence that buys the best purchase: a search that
/// surfaces the product, page turns, the item click, option clicks and Buy Now.
pub fn oracle_commands(catalog: &Catalog, goal: &ShoppingGoal) -> Option<Vec<String>> {
    let (pos, combo, _) = best_purchase(catalog, goal)?;
    let product = &catalog.products()[pos];
    let candidates = [
        goal.instruction.clone(),
        product.title.clone(),
        format!(
            "{} {}",
            product.title,
            product.attributes.iter().cloned().collect::<Vec<_>>().join(" ")
        ),
    ];
    let (query, rank) = candidates
        .iter()
        .filter_map(|q| {
            catalog
                .search(q)
                .iter()
                .position(|&i| i == pos)
                .map(|r| (q.clone(), r))
        })
        .min_by_key(|(_, r)| *r)?;

    let mut actions = vec![format!("search {query}")];
    actions.extend((0..rank / RESULTS_PER_PAGE).map(|_| format!("click {NEXT_PAGE}")));
    actions.push(format!("click {}", product.id));
    actions.extend(combo.values().map(|v| format!("click {v}")));
    actions.push(format!("click {BUY_NOW}"));
    Some(actions)
}
