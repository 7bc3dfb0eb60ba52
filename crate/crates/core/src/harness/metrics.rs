use serde::{Deserialize, Serialize};

use super::{EnvKind, EpisodeResult, HarnessError};
use crate::agent::TerminalStatus;
use crate::opinions::{agreement_ratio, disagreement_ratio, AgreementRecord};

/// One table row: aggregate metrics of a suite run (or of several averaged).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub model: String,
    pub environment: EnvKind,
    pub opinion_k: usize,
    pub n_episodes: usize,
    pub success_rate: f64,
    /// Mean reward on the 0..100 scale (shop) or 0..1 (house).
    pub avg_reward: f64,
    /// Household suites report the raw success count as their reward.
    pub suite_reward: f64,
    /// Successes over committed episodes; `None` when nothing was committed.
    pub precision: Option<f64>,
    pub purchase_or_completion_rate: f64,
    /// `None` when no step showed opinions.
    pub considered_ratio: Option<f64>,
    pub disagreed_ratio: Option<f64>,
}

impl MetricsReport {
    /// The value shown in the Reward column.
    pub fn reward_column(&self) -> f64 {
        match self.environment {
            EnvKind::Shop => self.avg_reward,
            EnvKind::House => self.suite_reward,
        }
    }
}

pub fn compute_metrics(
    results: &[EpisodeResult],
    environment: EnvKind,
    model: &str,
    opinion_k: usize,
) -> Result<MetricsReport, HarnessError> {
    if results.is_empty() {
        return Err(HarnessError::EmptyResults);
    }
    let n = results.len() as f64;
    let successes = results.iter().filter(|r| r.success).count();
    let committed = results
        .iter()
        .filter(|r| r.terminal == TerminalStatus::Completed)
        .count();
    let records: Vec<AgreementRecord> = results
        .iter()
        .flat_map(|r| r.agreement.iter().cloned())
        .collect();
    Ok(MetricsReport {
        model: model.to_string(),
        environment,
        opinion_k,
        n_episodes: results.len(),
        success_rate: successes as f64 / n,
        avg_reward: results.iter().map(|r| r.reward).sum::<f64>() / n,
        suite_reward: successes as f64,
        precision: (committed > 0).then(|| successes as f64 / committed as f64),
        purchase_or_completion_rate: committed as f64 / n,
        considered_ratio: agreement_ratio(&records).ok(),
        disagreed_ratio: disagreement_ratio(&records).ok(),
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

/// Mean of the defined values; undefined only if every run left it undefined.
fn mean_defined(xs: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = xs.flatten().collect();
    (!defined.is_empty()).then(|| mean(defined.into_iter()))
}

/// Field-wise arithmetic mean of per-run reports over the same suite.
pub fn average_runs(reports: &[MetricsReport]) -> Result<MetricsReport, HarnessError> {
    let first = reports.first().ok_or(HarnessError::EmptyResults)?;
    if let Some(bad) = reports.iter().find(|r| r.n_episodes != first.n_episodes) {
        return Err(HarnessError::MismatchedRuns(first.n_episodes, bad.n_episodes));
    }
    if reports.len() == 1 {
        return Ok(first.clone());
    }
    let it = || reports.iter();
    Ok(MetricsReport {
        model: first.model.clone(),
        environment: first.environment,
        opinion_k: first.opinion_k,
        n_episodes: first.n_episodes,
        success_rate: mean(it().map(|r| r.success_rate)),
        avg_reward: mean(it().map(|r| r.avg_reward)),
        suite_reward: mean(it().map(|r| r.suite_reward)),
        precision: mean_defined(it().map(|r| r.precision)),
        purchase_or_completion_rate: mean(it().map(|r| r.purchase_or_completion_rate)),
        considered_ratio: mean_defined(it().map(|r| r.considered_ratio)),
        disagreed_ratio: mean_defined(it().map(|r| r.disagreed_ratio)),
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::opinions::AgreementMode;
    use proptest::prelude::*;

    /// `n` episodes: the first `successes` succeed, the first `committed`
    /// commit, the rest hit the step cap.
    pub(crate) fn synthetic(n: usize, successes: usize, committed: usize) -> Vec<EpisodeResult> {
        assert!(successes <= committed && committed <= n);
        (0..n)
            .map(|i| EpisodeResult {
                task_id: format!("t{i}"),
                success: i < successes,
                reward: if i < successes { 100.0 } else { 0.0 },
                steps: 5,
                terminal: if i < committed {
                    TerminalStatus::Completed
                } else {
                    TerminalStatus::StepCap
                },
                agreement: Vec::new(),
                error: None,
            })
            .collect()
    }

    fn report(results: &[EpisodeResult]) -> MetricsReport {
        compute_metrics(results, EnvKind::Shop, "m", 0).unwrap()
    }

    #[test]
    fn precision_over_purchases() {
        // 0.240 success and 0.680 purchase over 50 goals.
        let r = report(&synthetic(50, 12, 34));
        assert_eq!(r.success_rate, 0.24);
        assert_eq!(r.purchase_or_completion_rate, 0.68);
        assert!((r.precision.unwrap() - 0.353).abs() < 0.0005);
        let all_buy = report(&synthetic(1000, 227, 1000));
        assert!((all_buy.precision.unwrap() - 0.227).abs() < 1e-12);
    }

    #[test]
    fn house_suite_reward_is_success_count() {
        let r = compute_metrics(&synthetic(134, 65, 80), EnvKind::House, "m", 0).unwrap();
        assert_eq!(r.suite_reward, 65.0);
        assert_eq!(format!("{:.3}", r.success_rate), "0.485");
        assert_eq!(r.reward_column(), 65.0);
    }

    #[test]
    fn undefined_values_stay_undefined() {
        let r = report(&synthetic(10, 0, 0));
        assert_eq!(r.precision, None);
        assert_eq!(r.considered_ratio, None);
        assert!(matches!(
            compute_metrics(&[], EnvKind::Shop, "m", 0),
            Err(HarnessError::EmptyResults)
        ));
    }

    #[test]
    fn agreement_pooled_over_episodes() {
        let mut results = synthetic(2, 0, 0);
        let rec = |agreed: bool| {
            AgreementRecord::new(
                0,
                if agreed { "look" } else { "inventory" },
                vec!["look".into()],
                AgreementMode::AnyMatch,
            )
        };
        results[0].agreement = vec![rec(true), rec(true), rec(false)];
        results[1].agreement = vec![rec(false)];
        let r = report(&results);
        assert_eq!(r.considered_ratio, Some(0.5));
        assert_eq!(r.disagreed_ratio, Some(0.5));
    }

    #[test]
    fn averaging() {
        let a = report(&synthetic(10, 2, 5));
        let b = report(&synthetic(10, 3, 5));
        let avg = average_runs(&[a.clone(), b]).unwrap();
        assert!((avg.success_rate - 0.25).abs() < 1e-12);
        assert_eq!(average_runs(&[a.clone(), a.clone()]).unwrap(), a);
        assert_eq!(average_runs(std::slice::from_ref(&a)).unwrap(), a);
        let c = report(&synthetic(11, 2, 5));
        assert!(matches!(
            average_runs(&[a, c]),
            Err(HarnessError::MismatchedRuns(10, 11))
        ));
    }

    proptest! {
        #[test]
        fn rates_bounded_and_precision_identity(
            n in 1usize..300,
            c_frac in 0.0f64..=1.0,
            s_frac in 0.0f64..=1.0,
        ) {
            let committed = (n as f64 * c_frac) as usize;
            let successes = (committed as f64 * s_frac) as usize;
            let r = report(&synthetic(n, successes, committed));
            for rate in [r.success_rate, r.purchase_or_completion_rate] {
                prop_assert!((0.0..=1.0).contains(&rate));
            }
            match r.precision {
                Some(p) => {
                    prop_assert!((0.0..=1.0).contains(&p));
                    prop_assert!((p * r.purchase_or_completion_rate - r.success_rate).abs() < 1e-12);
                }
                None => prop_assert_eq!(committed, 0),
            }
        }
    }
}
