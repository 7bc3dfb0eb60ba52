//! Small text helpers shared by the environments, experts and agreement checks.

use sha2::{Digest, Sha256};

/// Lowercased alphanumeric tokens, in order of appearance.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// Lowercase, trim and collapse internal runs of whitespace to one space.
pub fn normalize_action(action: &str) -> String {
    action
        .split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "buy", "by", "can", "dollars", "easily", "for",
    "from", "has", "have", "i", "in", "is", "it", "its", "less", "looking", "lower", "me", "my",
    "need", "of", "on", "or", "price", "should", "than", "that", "the", "then", "this", "to",
    "want", "which", "with", "would",
];

pub fn is_stopword(token: &str) -> bool {
    STOPWORDS.binary_search(&token).is_ok()
}

/// Deterministic 64-bit seed from a base seed and a list of indices.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(base.to_le_bytes());
    for p in parts {
        hasher.update(p.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
