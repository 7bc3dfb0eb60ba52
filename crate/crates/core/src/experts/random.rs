use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ScoredAction;
use crate::env::Environment;
use crate::opinions::OpinionProvider;
use crate::text::derive_seed;

/// Uniformly random opinions over the executable actions, reproducible per
/// (seed, step).
#[derive(Debug, Clone)]
pub struct RandomExpert {
    seed: u64,
}

impl RandomExpert {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }
}

impl<E: Environment> OpinionProvider<E> for RandomExpert {
    fn score(&mut self, env: &E) -> Vec<ScoredAction> {
        let mut actions = env.valid_actions();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, &[env.steps_used() as u64]));
        actions.shuffle(&mut rng);
        let n = actions.len();
        actions
            .into_iter()
            .enumerate()
            .map(|(i, a)| ScoredAction::new(a, (n - i) as f64))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::{CommandRequest, ToolSpec};
    use crate::env::{DispatchError, Outcome};
    use crate::opinions::sample_topk;

    /// Ten fixed actions; the step counter is all that changes.
    struct Dial {
        step: usize,
    }

    impl Environment for Dial {
        fn tools(&self) -> Vec<ToolSpec> {
            Vec::new()
        }
        fn instruction(&self) -> String {
            String::new()
        }
        fn observation(&self) -> String {
            String::new()
        }
        fn valid_actions(&self) -> Vec<String> {
            (0..10).map(|i| format!("a{i}")).collect()
        }
        fn dispatch(&mut self, _c: &CommandRequest) -> Result<String, DispatchError> {
            Ok(String::new())
        }
        fn action_of(&self, c: &CommandRequest) -> String {
            c.tool_input.clone()
        }
        fn command_for(action: &str) -> CommandRequest {
            CommandRequest::new("act", action)
        }
        fn is_terminal(&self) -> bool {
            false
        }
        fn steps_used(&self) -> usize {
            self.step
        }
        fn outcome(&self) -> Outcome {
            Outcome {
                completed: false,
                success: false,
                reward: 0.0,
            }
        }
    }

    #[test]
    fn same_seed_same_step_same_action() {
        let env = Dial { step: 4 };
        let a = sample_topk(&mut RandomExpert::new(1), &env, 1);
        let b = sample_topk(&mut RandomExpert::new(1), &env, 1);
        assert_eq!(a, b);
    }

    #[test]
    fn top1_is_uniform_chi_square() {
        let mut counts = [0usize; 10];
        let mut p = RandomExpert::new(2024);
        for step in 0..10_000 {
            let top = sample_topk(&mut p, &Dial { step }, 1).remove(0).action;
            counts[top[1..].parse::<usize>().unwrap()] += 1;
        }
        let expected = 1000.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // Critical value for 9 degrees of freedom at alpha = 0.001.
        assert!(chi2 < 27.877, "chi2 = {chi2}, counts = {counts:?}");
    }
}
