//! A degenerate expert that repeats one `go to` forever. An agent that copies
//! it burns the whole step budget; one that ignores it still finishes.
//!
//! cargo run --example house_repeater_confusion

use std::sync::Arc;

use opinion_bench::agent::{render_response, run_episode, AgentConfig, ThoughtRecord};
use opinion_bench::backends::{CopySuggestionAgent, ScriptedBackend};
use opinion_bench::env::Environment;
use opinion_bench::experts::Repeater;
use opinion_bench::housesim::{gen_tasks, solve, HouseEnv, HouseState, AGENT_STEP_CAP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = gen_tasks(4, 1)?.remove(0);
    let world = Arc::new(inst.world.clone());
    println!("task: {}", inst.task.sentence());

    let mut env = HouseEnv::reset(Arc::clone(&world), inst.task.clone(), AGENT_STEP_CAP)?;
    let cfg = AgentConfig::new(env.instruction(), env.tools(), AGENT_STEP_CAP).with_opinions(1);
    let mut copier = CopySuggestionAgent::new(HouseEnv::command_for, "look");
    let mut repeater = Repeater::new(4);
    let trace = run_episode(&mut env, &mut copier, &cfg, Some(&mut repeater))?;
    println!(
        "copier: {:?} after {} steps, success {}",
        trace.status,
        trace.steps.len(),
        trace.outcome.success
    );
    for step in trace.steps.iter().rev().take(3).rev() {
        let cmd = step.command.as_ref().map_or("-", |c| c.tool_input.as_str());
        println!("  step {:>2}: {cmd}", step.index);
    }

    // A scripted agent that follows its own plan and never looks at advice.
    let plan = solve(&world, &inst.task, &HouseState::initial(&world), AGENT_STEP_CAP)
        .ok_or("unsolvable task")?;
    let replies = plan.iter().map(|a| {
        render_response(&ThoughtRecord::default(), &HouseEnv::command_for(a))
    });
    let mut own_mind = ScriptedBackend::from_responses(replies);
    let mut env = HouseEnv::reset(world, inst.task, AGENT_STEP_CAP)?;
    let trace = run_episode(&mut env, &mut own_mind, &cfg, Some(&mut Repeater::new(4)))?;
    let agreed = trace.agreement_records().iter().filter(|r| r.agreed).count();
    println!(
        "independent: {:?} after {} steps, success {}, agreed with the repeater {agreed} times",
        trace.status,
        trace.steps.len(),
        trace.outcome.success
    );
    Ok(())
}
