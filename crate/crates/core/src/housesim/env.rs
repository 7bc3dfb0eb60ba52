use std::sync::Arc;

use super::state::room_listing;
use super::{check_goal, solve, HouseError, HouseState, HouseTask, WorldSpec};
use crate::agent::{CommandRequest, ToolDemo, ToolSpec};
use crate::env::{DispatchError, Environment, Outcome};
use crate::opinions::{AgreementMode, SuggestionStyle};

pub const NOTHING_HAPPENS: &str = "Nothing happens.";
/// Tool the agent calls to declare the task done.
pub const FINISH_TOOL: &str = "finish";
const ACTION_TOOL: &str = "alfworld_action";

/// One household episode.
#[derive(Debug, Clone)]
pub struct HouseEnv {
    world: Arc<WorldSpec>,
    task: HouseTask,
    state: HouseState,
    max_steps: usize,
    steps_used: usize,
    last: Option<(String, String)>,
    finished: bool,
}

impl HouseEnv {
    /// Start an episode. The task must be solvable in the world.
    pub fn reset(world: Arc<WorldSpec>, task: HouseTask, max_steps: usize) -> Result<Self, HouseError> {
        world.validate()?;
        task.validate()?;
        let state = HouseState::initial(&world);
        if check_goal(&state, &task) || solve(&world, &task, &state, 64).is_none() {
            return Err(HouseError::Unsolvable(task.id.clone()));
        }
        Ok(Self {
            world,
            task,
            state,
            max_steps,
            steps_used: 0,
            last: None,
            finished: false,
        })
    }

    pub fn world(&self) -> &WorldSpec {
        &self.world
    }

    pub fn task(&self) -> &HouseTask {
        &self.task
    }

    pub fn state(&self) -> &HouseState {
        &self.state
    }

    pub fn goal_reached(&self) -> bool {
        check_goal(&self.state, &self.task)
    }

    fn intro(&self) -> String {
        format!(
            "{}\nYour task is to: {}",
            room_listing(&self.world),
            self.task.sentence()
        )
    }

    fn action_list(&self) -> String {
        let mut text = String::from("Available Actions are:");
        for a in self.state.available_actions(&self.world) {
            text.push_str(&format!("\n[action] {a} [action_]"));
        }
        text
    }

    fn step_report(&self) -> String {
        match &self.last {
            Some((action, obs)) => format!(
                "After you {action}, current observation is: {obs}\n{}",
                self.action_list()
            ),
            None => self.action_list(),
        }
    }

    /// Execute an action string. Anything not currently executable yields
    /// "Nothing happens."; both cases consume a step.
    pub fn execute(&mut self, action: &str) -> String {
        if self.is_terminal() {
            return NOTHING_HAPPENS.into();
        }
        self.steps_used += 1;
        let obs = self
            .state
            .apply(&self.world, action)
            .unwrap_or_else(|| NOTHING_HAPPENS.to_string());
        self.last = Some((action.trim().to_string(), obs.clone()));
        obs
    }

    /// Declare the task done. Consumes a step and ends the episode.
    pub fn finish(&mut self) -> String {
        if self.is_terminal() {
            return NOTHING_HAPPENS.into();
        }
        self.steps_used += 1;
        self.finished = true;
        if self.goal_reached() {
            "Task finished. The goal is satisfied.".into()
        } else {
            "Task finished. The goal is not satisfied.".into()
        }
    }
}

fn demo(observation: &str, command: &str) -> ToolDemo {
    ToolDemo {
        observation: observation.into(),
        command: command.into(),
    }
}

impl Environment for HouseEnv {
    fn tools(&self) -> Vec<ToolSpec> {
        vec![
            ToolSpec {
                name: ACTION_TOOL.into(),
                description: "Perform one household action. Input: exactly one of the available actions.".into(),
                demos: vec![
                    demo(
                        "On the countertop 1, you see a soapbar 1, and a spraybottle 1.",
                        r#"{"name": "alfworld_action", "args": {"tool_input": "take soapbar 1 from countertop 1"}}"#,
                    ),
                    demo(
                        "You arrive at sinkbasin 1. On the sinkbasin 1, you see nothing.",
                        r#"{"name": "alfworld_action", "args": {"tool_input": "clean soapbar 1 with sinkbasin 1"}}"#,
                    ),
                ],
            },
            ToolSpec {
                name: FINISH_TOOL.into(),
                description: "Declare the task complete. Input: a short reason.".into(),
                demos: vec![demo(
                    "You put the soapbar 1 in/on the countertop 1.",
                    r#"{"name": "finish", "args": {"tool_input": "the soapbar is clean and on the countertop"}}"#,
                )],
            },
        ]
    }

    fn instruction(&self) -> String {
        self.task.sentence()
    }

    fn observation(&self) -> String {
        format!("{}\n{}", self.intro(), self.step_report())
    }

    fn valid_actions(&self) -> Vec<String> {
        if self.is_terminal() {
            return Vec::new();
        }
        self.state.available_actions(&self.world)
    }

    fn dispatch(&mut self, command: &CommandRequest) -> Result<String, DispatchError> {
        match command.name.as_str() {
            ACTION_TOOL => {
                self.execute(&command.tool_input);
                Ok(self.step_report())
            }
            FINISH_TOOL => Ok(self.finish()),
            other => Err(DispatchError::UnknownTool(other.to_string())),
        }
    }

    fn action_of(&self, command: &CommandRequest) -> String {
        if command.name == FINISH_TOOL {
            FINISH_TOOL.to_string()
        } else {
            command.tool_input.trim().to_string()
        }
    }

    fn command_for(action: &str) -> CommandRequest {
        if action.trim() == FINISH_TOOL {
            CommandRequest::new(FINISH_TOOL, "done")
        } else {
            CommandRequest::new(ACTION_TOOL, action.trim())
        }
    }

    fn is_terminal(&self) -> bool {
        self.finished || self.goal_reached() || self.steps_used >= self.max_steps
    }

    fn steps_used(&self) -> usize {
        self.steps_used
    }

    fn outcome(&self) -> Outcome {
        let success = self.goal_reached();
        Outcome {
            completed: self.finished || success,
            success,
            reward: if success { 1.0 } else { 0.0 },
        }
    }

    fn suggestion_style(&self) -> SuggestionStyle {
        SuggestionStyle::Bracketed
    }

    fn agreement_mode(&self) -> AgreementMode {
        AgreementMode::ExactTop1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::housesim::{gen_tasks, Location, TaskFamily, AGENT_STEP_CAP};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn first_task(family: TaskFamily) -> HouseEnv {
        let inst = gen_tasks(3, 12)
            .unwrap()
            .into_iter()
            .find(|t| t.task.family == family)
            .unwrap();
        HouseEnv::reset(Arc::new(inst.world), inst.task, AGENT_STEP_CAP).unwrap()
    }

    #[test]
    fn reset_lists_room_and_task() {
        let a = first_task(TaskFamily::PickCleanThenPlaceInRecep);
        let obs = a.observation();
        assert!(obs.starts_with("You are in the middle of a room. Looking quickly around you, you see a "));
        assert!(obs.contains(&format!("Your task is to: {}", a.task().sentence())));
        assert_eq!(obs, a.clone().observation());
    }

    #[test]
    fn invalid_actions_say_nothing_happens_and_cost_a_step() {
        let mut e = first_task(TaskFamily::PickAndPlaceSimple);
        assert_eq!(e.execute("fly to the moon"), NOTHING_HAPPENS);
        assert_eq!(e.steps_used(), 1);
        let mut cmd = HouseEnv::command_for("look");
        cmd.name = "teleport".into();
        assert!(e.dispatch(&cmd).is_err());
    }

    #[test]
    fn step_cap_ends_episode() {
        let mut e = first_task(TaskFamily::PickAndPlaceSimple);
        for _ in 0..40 {
            e.execute("look");
        }
        assert_eq!(e.steps_used(), AGENT_STEP_CAP);
        assert!(e.is_terminal());
        assert!(!e.outcome().completed);
    }

    #[test]
    fn finishing_early_completes_without_success() {
        let mut e = first_task(TaskFamily::PickHeatThenPlaceInRecep);
        e.dispatch(&HouseEnv::command_for(FINISH_TOOL)).unwrap();
        let o = e.outcome();
        assert!(o.completed && !o.success);
        assert!(e.is_terminal());
    }

    #[test]
    fn heat_sets_flag() {
        let mut e = first_task(TaskFamily::PickHeatThenPlaceInRecep);
        let plan = solve(e.world(), e.task(), e.state(), 64).unwrap();
        let heat = plan.iter().position(|a| a.starts_with("heat ")).unwrap();
        for a in &plan[..=heat] {
            e.execute(a);
        }
        let obj = e.state().holding().unwrap().to_string();
        assert!(e.state().flags[&obj].hot);
    }

    /// Random and garbage actions never duplicate or lose an object.
    #[test]
    fn object_conservation_under_fuzz() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for inst in gen_tasks(5, 6).unwrap() {
            let world = Arc::new(inst.world);
            let n_objects = world.objects.len();
            let mut env = HouseEnv::reset(world.clone(), inst.task, usize::MAX).unwrap();
            for _ in 0..2_000 {
                let actions = env.state().available_actions(&world);
                let before = env.state().clone();
                let action = if rng.random_bool(0.2) {
                    "take everything from everywhere".to_string()
                } else {
                    actions[rng.random_range(0..actions.len())].clone()
                };
                let valid = actions.contains(&action);
                let obs = env.state.apply(&world, &action);
                env.steps_used += 1;
                assert_eq!(obs.is_some(), valid);
                if !valid {
                    assert_eq!(env.state(), &before);
                }
                let s = env.state();
                assert_eq!(s.objects.len(), n_objects);
                let held = s.objects.values().filter(|l| **l == Location::Inventory).count();
                assert!(held <= 1);
            }
        }
    }
}
