use std::collections::{BTreeSet, HashMap};

use super::Product;
use crate::text::tokenize;

/// Per-token weight of a product: title occurrences count twice, attribute
/// and product-type occurrences once.
fn token_weights(product: &Product) -> HashMap<String, u64> {
    let mut weights = HashMap::new();
    for t in tokenize(&product.title) {
        *weights.entry(t).or_insert(0) += 2;
    }
    for attr in &product.attributes {
        for t in tokenize(attr) {
            *weights.entry(t).or_insert(0) += 1;
        }
    }
    for t in tokenize(&product.product_type) {
        *weights.entry(t).or_insert(0) += 1;
    }
    weights
}

/// Distinct query tokens, each counted once.
fn query_tokens(query: &str) -> BTreeSet<String> {
    tokenize(query).into_iter().collect()
}

/// Score of one product for one query.
pub fn lexical_score(query: &str, product: &Product) -> u64 {
    let weights = token_weights(product);
    query_tokens(query)
        .iter()
        .map(|t| weights.get(t).copied().unwrap_or(0))
        .sum()
}

/// Precomputed token weights for a whole catalog.
#[derive(Debug, Clone, Default)]
pub struct SearchIndex {
    weights: Vec<HashMap<String, u64>>,
}

impl SearchIndex {
    pub fn build(products: &[Product]) -> Self {
        Self {
            weights: products.iter().map(token_weights).collect(),
        }
    }

    /// Indices of products with a positive score, best first; ties go to the
    /// lexicographically smaller id.
    pub fn rank(&self, query: &str, products: &[Product]) -> Vec<usize> {
        let tokens = query_tokens(query);
        let mut scored: Vec<(u64, usize)> = self
            .weights
            .iter()
            .enumerate()
            .filter_map(|(i, w)| {
                let s: u64 = tokens.iter().map(|t| w.get(t).copied().unwrap_or(0)).sum();
                (s > 0).then_some((s, i))
            })
            .collect();
        scored.sort_by(|a, b| {
            b.0.cmp(&a.0)
                .then_with(|| products[a.1].id.cmp(&products[b.1].id))
        });
        scored.into_iter().map(|(_, i)| i).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn product(id: &str, title: &str, attrs: &[&str], ty: &str) -> Product {
        Product {
            id: id.into(),
            title: title.into(),
            description: String::new(),
            features: String::new(),
            reviews: String::new(),
            price: 1.0,
            options: BTreeMap::new(),
            attributes: attrs.iter().map(|s| s.to_string()).collect(),
            product_type: ty.into(),
        }
    }

    #[test]
    fn title_tokens_weigh_double() {
        let p = product("A", "faux leather ottoman", &["folding"], "storage ottoman");
        // faux: 2 (title); ottoman: 2 (title) + 1 (type); folding: 1 (attr)
        assert_eq!(lexical_score("faux ottoman folding", &p), 6);
        assert_eq!(lexical_score("ottoman ottoman", &p), 3);
        assert_eq!(lexical_score("bicycle", &p), 0);
    }

    #[test]
    fn ranking_breaks_ties_by_id() {
        let products = vec![
            product("B2", "red mug", &[], "mug"),
            product("A9", "red mug", &[], "mug"),
            product("C1", "blue lamp", &[], "lamp"),
        ];
        let index = SearchIndex::build(&products);
        assert_eq!(index.rank("red mug", &products), vec![1, 0]);
        assert!(index.rank("sofa", &products).is_empty());
    }
}
