use super::ScoredAction;
use crate::env::Environment;
use crate::housesim::{
    check_goal, class_of, HouseEnv, HouseState, HouseTask, Location, TaskFamily, WorldSpec, LAMP,
};
use crate::opinions::OpinionProvider;
use crate::text::derive_seed;

/// Steps the repeater plays sensibly before it locks onto one action.
pub const REPEATER_WARMUP: usize = 3;

/// Reach `r` and make its contents reachable: `go to`, then `open` if closed.
fn approach(world: &WorldSpec, state: &HouseState, r: &str) -> Option<String> {
    if state.agent.as_deref() != Some(r) {
        return Some(format!("go to {r}"));
    }
    if !state.is_visible(world, r) {
        return Some(format!("open {r}"));
    }
    None
}

/// Next action of the per-family plan: locate, take, process at the
/// appliance, then place (or light, for look-at tasks). `None` once the goal
/// holds.
pub fn plan_next_action(world: &WorldSpec, state: &HouseState, task: &HouseTask) -> Option<String> {
    if check_goal(state, task) {
        return None;
    }
    let of_class = |o: &str| class_of(o) == task.object_class;
    let target_recs: Vec<&str> = world
        .receptacles
        .iter()
        .map(|r| r.id.as_str())
        .filter(|r| class_of(r) == task.target_receptacle)
        .collect();
    // For two-object tasks keep filling the receptacle that already has one.
    let dest = target_recs
        .iter()
        .copied()
        .find(|r| state.contents(r).iter().any(|o| of_class(o)))
        .or_else(|| target_recs.first().copied());
    let placed = |o: &str| {
        matches!(state.objects.get(o), Some(Location::Receptacle(r)) if Some(r.as_str()) == dest)
    };

    match state.holding() {
        Some(o) if of_class(o) => {
            let flags = state.flags.get(o).copied().unwrap_or_default();
            let needs = match task.family {
                TaskFamily::PickCleanThenPlaceInRecep if !flags.clean => Some("clean"),
                TaskFamily::PickHeatThenPlaceInRecep if !flags.hot => Some("heat"),
                TaskFamily::PickCoolThenPlaceInRecep if !flags.cold => Some("cool"),
                _ => None,
            };
            if let (Some(verb), Some(appliance)) = (needs, task.family.appliance()) {
                let at = world
                    .receptacles
                    .iter()
                    .map(|r| r.id.as_str())
                    .find(|r| class_of(r) == appliance)?;
                if state.agent.as_deref() != Some(at) {
                    return Some(format!("go to {at}"));
                }
                return Some(format!("{verb} {o} with {at}"));
            }
            if task.family == TaskFamily::LookAtObjInLight {
                let (lamp, spot) = state.objects.iter().find_map(|(id, loc)| match loc {
                    Location::Receptacle(r) if class_of(id) == LAMP => Some((id.as_str(), r.as_str())),
                    _ => None,
                })?;
                if let Some(a) = approach(world, state, spot) {
                    return Some(a);
                }
                return Some(format!("use {lamp}"));
            }
            let dest = dest?;
            if let Some(a) = approach(world, state, dest) {
                return Some(a);
            }
            Some(format!("put {o} in/on {dest}"))
        }
        Some(other) => {
            // Holding something useless: set it down where we stand.
            let here = state.agent.as_deref()?;
            if let Some(a) = approach(world, state, here) {
                return Some(a);
            }
            Some(format!("put {other} in/on {here}"))
        }
        None => {
            let (o, r) = state.objects.iter().find_map(|(id, loc)| match loc {
                Location::Receptacle(r) if of_class(id) && !placed(id) => Some((id.as_str(), r.as_str())),
                _ => None,
            })?;
            if let Some(a) = approach(world, state, r) {
                return Some(a);
            }
            Some(format!("take {o} from {r}"))
        }
    }
}

/// Imitation surrogate for the household: the plan action scores 1.0, going
/// somewhere that holds the task object 0.1, anything else 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicHouse;

impl OpinionProvider<HouseEnv> for HeuristicHouse {
    fn score(&mut self, env: &HouseEnv) -> Vec<ScoredAction> {
        let Some(next) = plan_next_action(env.world(), env.state(), env.task()) else {
            return Vec::new();
        };
        let state = env.state();
        env.valid_actions()
            .into_iter()
            .map(|a| {
                let score = if a == next {
                    1.0
                } else if a.strip_prefix("go to ").is_some_and(|r| {
                    state
                        .contents(r)
                        .iter()
                        .any(|o| class_of(o) == env.task().object_class)
                }) {
                    0.1
                } else {
                    0.0
                };
                ScoredAction::new(a, score)
            })
            .collect()
    }
}

/// Degenerate expert: sensible for a few steps, then the same `go to`
/// forever.
#[derive(Debug, Clone)]
pub struct Repeater {
    seed: u64,
}

impl Repeater {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// The receptacle this repeater gets stuck on in a given world.
    pub fn stuck_on<'w>(&self, world: &'w WorldSpec) -> &'w str {
        let i = derive_seed(self.seed, &[0x5e9]) as usize % world.receptacles.len();
        &world.receptacles[i].id
    }
}

impl OpinionProvider<HouseEnv> for Repeater {
    fn score(&mut self, env: &HouseEnv) -> Vec<ScoredAction> {
        if env.steps_used() < REPEATER_WARMUP {
            return HeuristicHouse.score(env);
        }
        vec![ScoredAction::new(format!("go to {}", self.stuck_on(env.world())), 1.0)]
    }
}
