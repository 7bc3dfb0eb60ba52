//! Additional opinions: top-k sampling from an expert, the suggestion prompt,
//! and agreement bookkeeping between the agent's choice and what it was shown.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experts::ScoredAction;
use crate::text::normalize_action;

/// An expert's suggested environment action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Opinion {
    pub action: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

impl Opinion {
    pub fn new(action: impl Into<String>) -> Self {
        Self {
            action: action.into(),
            score: None,
        }
    }

    pub fn scored(action: impl Into<String>, score: f64) -> Self {
        Self {
            action: action.into(),
            score: Some(score),
        }
    }
}

/// How suggestions are spelled inside the prompt.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuggestionStyle {
    /// `click b09nxp95gc`
    #[default]
    Plain,
    /// `['go to countertop 1']`
    Bracketed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpinionPrompt {
    pub rendered: String,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgreementMode {
    /// Agreement if the chosen action matches any shown suggestion.
    AnyMatch,
    /// Agreement only if it matches the first (best) suggestion.
    ExactTop1,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementRecord {
    pub step: usize,
    pub chosen: String,
    pub shown: Vec<String>,
    pub mode: AgreementMode,
    pub agreed: bool,
}

impl AgreementRecord {
    pub fn new(step: usize, chosen: impl Into<String>, shown: Vec<String>, mode: AgreementMode) -> Self {
        let chosen = chosen.into();
        let agreed = detect_agreement(&chosen, &shown, mode);
        Self {
            step,
            chosen,
            shown,
            mode,
            agreed,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpinionError {
    #[error("at least one opinion is required")]
    Empty,
    #[error("agreement ratio is undefined over zero records")]
    UndefinedRatio,
}

/// A policy that can score the actions available in an environment state.
pub trait OpinionProvider<E: ?Sized> {
    fn score(&mut self, env: &E) -> Vec<ScoredAction>;
}

impl<E: ?Sized, P: OpinionProvider<E> + ?Sized> OpinionProvider<E> for Box<P> {
    fn score(&mut self, env: &E) -> Vec<ScoredAction> {
        (**self).score(env)
    }
}

/// Best `k` distinct actions by descending score, ties broken by ascending
/// action string. Non-finite scores are dropped.
pub fn sample_topk<E: ?Sized, P: OpinionProvider<E> + ?Sized>(
    provider: &mut P,
    env: &E,
    k: usize,
) -> Vec<Opinion> {
    let mut scored: Vec<ScoredAction> = provider
        .score(env)
        .into_iter()
        .filter(|s| s.score.is_finite() && !s.action.trim().is_empty())
        .collect();
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.action.cmp(&b.action))
    });
    let mut seen = std::collections::HashSet::new();
    scored
        .into_iter()
        .filter(|s| seen.insert(s.action.clone()))
        .take(k)
        .map(|s| Opinion::scored(s.action, s.score))
        .collect()
}

const ONE_PREFIX: &str = "Here's one suggestion for the command: ";
const FEW_PREFIX: &str = "Here's a few suggestions for the command: ";
const ONE_SUFFIX: &str = "Please use this suggestion as a reference and make your own judgement.";
const FEW_SUFFIX: &str = "Please use these suggestions as a reference and make your own judgement.";

/// Wrap opinions in the suggestion template.
pub fn render_opinion_prompt(
    opinions: &[Opinion],
    style: SuggestionStyle,
) -> Result<OpinionPrompt, OpinionError> {
    if opinions.is_empty() {
        return Err(OpinionError::Empty);
    }
    let body = match style {
        SuggestionStyle::Plain => opinions
            .iter()
            .map(|o| o.action.as_str())
            .collect::<Vec<_>>()
            .join("; "),
        SuggestionStyle::Bracketed => format!(
            "[{}]",
            opinions
                .iter()
                .map(|o| format!("'{}'", o.action))
                .collect::<Vec<_>>()
                .join("; ")
        ),
    };
    let (prefix, suffix) = if opinions.len() == 1 {
        (ONE_PREFIX, ONE_SUFFIX)
    } else {
        (FEW_PREFIX, FEW_SUFFIX)
    };
    Ok(OpinionPrompt {
        rendered: format!("{prefix}{body}.\n{suffix}"),
        k: opinions.len(),
    })
}

/// Recover the suggested actions from a rendered suggestion prompt. Returns an
/// empty list when the text carries no suggestions.
pub fn parse_suggestions(text: &str) -> Vec<String> {
    let Some((start, prefix)) = [ONE_PREFIX, FEW_PREFIX]
        .iter()
        .filter_map(|p| text.find(p).map(|i| (i, *p)))
        .min_by_key(|(i, _)| *i)
    else {
        return Vec::new();
    };
    let rest = &text[start + prefix.len()..];
    let end = rest.find("\nPlease use").unwrap_or(rest.len());
    let body = rest[..end].trim_end();
    let body = body.strip_suffix('.').unwrap_or(body);
    if let Some(inner) = body.strip_prefix("['").and_then(|b| b.strip_suffix("']")) {
        inner.split("'; '").map(str::to_string).collect()
    } else {
        body.split("; ").map(str::to_string).collect()
    }
}

/// Whether the chosen action matches the shown suggestions, after
/// lowercasing and whitespace normalization.
pub fn detect_agreement(chosen: &str, shown: &[String], mode: AgreementMode) -> bool {
    let chosen = normalize_action(chosen);
    match mode {
        AgreementMode::AnyMatch => shown.iter().any(|s| normalize_action(s) == chosen),
        AgreementMode::ExactTop1 => shown
            .first()
            .is_some_and(|s| normalize_action(s) == chosen),
    }
}

/// Fraction of records where the agent agreed with a suggestion.
pub fn agreement_ratio(records: &[AgreementRecord]) -> Result<f64, OpinionError> {
    if records.is_empty() {
        return Err(OpinionError::UndefinedRatio);
    }
    let agreed = records.iter().filter(|r| r.agreed).count();
    Ok(agreed as f64 / records.len() as f64)
}

/// Fraction of records where the agent went against every suggestion shown.
pub fn disagreement_ratio(records: &[AgreementRecord]) -> Result<f64, OpinionError> {
    if records.is_empty() {
        return Err(OpinionError::UndefinedRatio);
    }
    let disagreed = records.iter().filter(|r| !r.agreed).count();
    Ok(disagreed as f64 / records.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    struct Fixed(Vec<ScoredAction>);

    impl OpinionProvider<()> for Fixed {
        fn score(&mut self, _env: &()) -> Vec<ScoredAction> {
            self.0.clone()
        }
    }

    fn fixed(pairs: &[(&str, f64)]) -> Fixed {
        Fixed(pairs.iter().map(|(a, s)| ScoredAction::new(*a, *s)).collect())
    }

    #[test]
    fn topk_truncates_to_available_actions() {
        let mut p = fixed(&[("a", 0.1), ("b", 0.9), ("c", 0.5)]);
        let got = sample_topk(&mut p, &(), 5);
        let actions: Vec<_> = got.iter().map(|o| o.action.as_str()).collect();
        assert_eq!(actions, ["b", "c", "a"]);
        assert_eq!(sample_topk(&mut p, &(), 1).len(), 1);
    }

    #[test]
    fn topk_ties_go_to_smaller_action() {
        let mut p = fixed(&[("zeta", 1.0), ("alpha", 1.0), ("mid", 0.5)]);
        let got = sample_topk(&mut p, &(), 2);
        assert_eq!(got[0].action, "alpha");
        assert_eq!(got[1].action, "zeta");
    }

    #[test]
    fn topk_of_empty_provider_is_empty() {
        let mut p = fixed(&[]);
        assert!(sample_topk(&mut p, &(), 3).is_empty());
    }

    #[test]
    fn topk_drops_duplicates_and_nan() {
        let mut p = fixed(&[("a", 1.0), ("a", 0.5), ("b", f64::NAN), ("c", 0.2)]);
        let got = sample_topk(&mut p, &(), 5);
        assert_eq!(got.len(), 2);
        assert_eq!(got[0], Opinion::scored("a", 1.0));
    }

    #[test]
    fn singular_bracketed_template() {
        let p = render_opinion_prompt(&[Opinion::new("go to countertop 1")], SuggestionStyle::Bracketed)
            .unwrap();
        assert!(p
            .rendered
            .contains("Here's one suggestion for the command: ['go to countertop 1']"));
        assert!(p.rendered.ends_with(
            "Please use this suggestion as a reference and make your own judgement."
        ));
        assert_eq!(p.k, 1);
    }

    #[test]
    fn singular_plain_template() {
        let p = render_opinion_prompt(&[Opinion::new("click with 'b09nxp95gc'")], SuggestionStyle::Plain)
            .unwrap();
        assert_eq!(
            p.rendered,
            "Here's one suggestion for the command: click with 'b09nxp95gc'.\n\
             Please use this suggestion as a reference and make your own judgement."
        );
    }

    #[test]
    fn plural_template_lists_all_with_semicolons() {
        let ops: Vec<_> = (1..=5).map(|i| Opinion::new(format!("click item{i}"))).collect();
        let p = render_opinion_prompt(&ops, SuggestionStyle::Plain).unwrap();
        assert!(p.rendered.starts_with("Here's a few suggestions for the command: "));
        assert!(p.rendered.contains("click item1; click item2; click item3; click item4; click item5"));
        assert!(p.rendered.contains("Please use these suggestions"));
        assert_eq!(p.k, 5);
        assert_eq!(render_opinion_prompt(&[], SuggestionStyle::Plain), Err(OpinionError::Empty));
    }

    #[test]
    fn agreement_examples() {
        assert!(detect_agreement(
            "click B09NXP95GC",
            &["click b09nxp95gc".to_string()],
            AgreementMode::AnyMatch
        ));
        assert!(!detect_agreement(
            "take soapbar 1 from countertop 1",
            &["put handtowel 1 in/on countertop 1".to_string()],
            AgreementMode::ExactTop1
        ));
        for mode in [AgreementMode::AnyMatch, AgreementMode::ExactTop1] {
            assert!(detect_agreement("look", &["look".to_string()], mode));
        }
        let shown = vec!["a".to_string(), "b".to_string()];
        assert!(detect_agreement("b", &shown, AgreementMode::AnyMatch));
        assert!(!detect_agreement("b", &shown, AgreementMode::ExactTop1));
    }

    fn records(agreed: usize, total: usize) -> Vec<AgreementRecord> {
        (0..total)
            .map(|i| {
                let chosen = if i < agreed { "x" } else { "y" };
                AgreementRecord::new(i, chosen, vec!["x".into()], AgreementMode::ExactTop1)
            })
            .collect()
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(agreement_ratio(&records(549, 1000)).unwrap(), 0.549);
        let r = records(146, 1000);
        assert_eq!(agreement_ratio(&r).unwrap(), 0.146);
        assert_eq!(disagreement_ratio(&r).unwrap(), 0.854);
        assert_eq!(agreement_ratio(&records(7, 7)).unwrap(), 1.0);
        assert_eq!(agreement_ratio(&[]), Err(OpinionError::UndefinedRatio));
    }

    proptest! {
        #[test]
        fn rendered_contains_each_action_once(n in 1usize..8, style in prop_oneof![Just(SuggestionStyle::Plain), Just(SuggestionStyle::Bracketed)]) {
            let ops: Vec<_> = (0..n).map(|i| Opinion::new(format!("act_{i}_x target"))).collect();
            let p = render_opinion_prompt(&ops, style).unwrap();
            for o in &ops {
                prop_assert_eq!(p.rendered.matches(&o.action).count(), 1);
            }
            let parsed = parse_suggestions(&p.rendered);
            let expected: Vec<String> = ops.iter().map(|o| o.action.clone()).collect();
            prop_assert_eq!(parsed, expected);
        }

        #[test]
        fn agreement_ignores_case_and_outer_whitespace(a in "[a-z0-9 ]{1,20}", pad in " {0,3}") {
            let shown = vec![format!("{pad}{}{pad}", a.to_uppercase())];
            prop_assert!(detect_agreement(&a, &shown, AgreementMode::AnyMatch));
            prop_assert_eq!(
                detect_agreement(&a, &shown, AgreementMode::AnyMatch),
                detect_agreement(&shown[0], std::slice::from_ref(&a), AgreementMode::AnyMatch)
            );
        }

        #[test]
        fn ratios_sum_to_one(agreed in 0usize..50, extra in 1usize..50) {
            let r = records(agreed.min(extra), extra);
            let sum = agreement_ratio(&r).unwrap() + disagreement_ratio(&r).unwrap();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }
    }
}
