use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Product, ShoppingGoal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reward {
    /// Score in [0, 100].
    pub value: f64,
    pub success: bool,
}

impl Reward {
    pub const ZERO: Reward = Reward {
        value: 0.0,
        success: false,
    };
}

/// Score a purchase against a goal.
///
/// Wrong product type scores zero. Otherwise each matched required attribute,
/// each matched required option and the price check earn one share of 100.
/// Success means every share was earned.
pub fn compute_reward(
    goal: &ShoppingGoal,
    purchased: Option<(&Product, &BTreeMap<String, String>)>,
) -> Reward {
    let Some((product, selected)) = purchased else {
        return Reward::ZERO;
    };
    if !product.product_type.eq_ignore_ascii_case(&goal.target_type) {
        return Reward::ZERO;
    }
    let attrs = goal
        .required_attributes
        .iter()
        .filter(|a| product.attributes.contains(*a))
        .count();
    let opts = goal
        .required_options
        .iter()
        .filter(|(name, want)| {
            selected
                .get(*name)
                .is_some_and(|got| got.eq_ignore_ascii_case(want))
        })
        .count();
    let price = usize::from(product.price <= goal.price_cap);
    let earned = attrs + opts + price;
    let total = goal.required_attributes.len() + goal.required_options.len() + 1;
    Reward {
        value: 100.0 * earned as f64 / total as f64,
        success: earned == total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn ottoman() -> Product {
        Product {
            id: "B09NXP95GC".into(),
            title: "Storage Ottoman Bench faux leather".into(),
            description: String::new(),
            features: String::new(),
            reviews: String::new(),
            price: 139.42,
            options: BTreeMap::from([(
                "size".to_string(),
                vec!["40x40x40cm".to_string(), "60x40x40cm".to_string()],
            )]),
            attributes: BTreeSet::from(["faux leather".to_string(), "folding".to_string()]),
            product_type: "storage ottoman".into(),
        }
    }

    fn goal() -> ShoppingGoal {
        ShoppingGoal {
            id: "g".into(),
            instruction: "i want a folding storage ottoman".into(),
            required_attributes: BTreeSet::from(["folding".to_string(), "faux leather".to_string()]),
            required_options: BTreeMap::from([("size".to_string(), "60x40x40cm".to_string())]),
            price_cap: 160.0,
            target_type: "storage ottoman".into(),
        }
    }

    #[test]
    fn full_match_is_success() {
        let p = ottoman();
        let sel = BTreeMap::from([("size".to_string(), "60X40X40CM".to_string())]);
        let r = compute_reward(&goal(), Some((&p, &sel)));
        assert_eq!(r, Reward { value: 100.0, success: true });
    }

    #[test]
    fn missing_option_earns_partial_credit() {
        let p = ottoman();
        let r = compute_reward(&goal(), Some((&p, &BTreeMap::new())));
        assert_eq!(r.value, 75.0);
        assert!(!r.success);
    }

    #[test]
    fn wrong_type_or_no_purchase_is_zero() {
        let mut p = ottoman();
        p.product_type = "hair towel".into();
        assert_eq!(compute_reward(&goal(), Some((&p, &BTreeMap::new()))), Reward::ZERO);
        assert_eq!(compute_reward(&goal(), None), Reward::ZERO);
    }

    #[test]
    fn price_cap_is_inclusive() {
        let mut p = ottoman();
        p.price = 160.0;
        let sel = BTreeMap::from([("size".to_string(), "60x40x40cm".to_string())]);
        assert!(compute_reward(&goal(), Some((&p, &sel))).success);
        p.price = 160.01;
        assert!(!compute_reward(&goal(), Some((&p, &sel))).success);
    }
}
