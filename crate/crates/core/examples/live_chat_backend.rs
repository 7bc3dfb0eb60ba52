//! One shop episode against a live chat-completion endpoint, with the
//! heuristic expert's opinion in every prompt.
//!
//! OPINION_BENCH_ENDPOINT=https://.../v1/chat/completions \
//! OPINION_BENCH_MODEL=gpt-4 OPENAI_API_KEY=... \
//!     cargo run --example live_chat_backend

use std::sync::Arc;

use opinion_bench::agent::{run_episode, AgentConfig};
use opinion_bench::backends::{BackendConfig, HttpBackend};
use opinion_bench::env::Environment;
use opinion_bench::experts::{HeuristicShop, QualityTier};
use opinion_bench::shopsim::{gen_catalog, gen_goals, ShopEnv, AGENT_STEP_CAP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = BackendConfig::default();
    if let Ok(e) = std::env::var("OPINION_BENCH_ENDPOINT") {
        cfg.endpoint = e;
    }
    if let Ok(m) = std::env::var("OPINION_BENCH_MODEL") {
        cfg.model = m;
    }
    let key_var = cfg.api_key_env.clone().unwrap_or_default();
    if std::env::var(&key_var).is_err() {
        println!("{key_var} is not set; nothing to do");
        return Ok(());
    }
    let mut backend = HttpBackend::new(cfg)?;

    let catalog = Arc::new(gen_catalog(1, 500)?);
    let goal = gen_goals(&catalog, 1, 1).remove(0);
    let mut env = ShopEnv::reset(catalog, goal, AGENT_STEP_CAP)?;
    let agent = AgentConfig::new(env.instruction(), env.tools(), AGENT_STEP_CAP).with_opinions(1);
    let mut expert = HeuristicShop::new(QualityTier::WithImage);
    let trace = run_episode(&mut env, &mut backend, &agent, Some(&mut expert))?;
    for s in &trace.steps {
        let cmd = s.command.as_ref().map_or("<unparsed>".to_string(), |c| format!("{} {}", c.name, c.tool_input));
        let agreed = s.agreement.as_ref().map_or("-", |a| if a.agreed { "agreed" } else { "disagreed" });
        println!("{:>2} {agreed:>9} {cmd}", s.index);
    }
    println!(
        "{:?}: reward {:.1}, success {}, {} HTTP attempts",
        trace.status,
        trace.outcome.reward,
        trace.outcome.success,
        backend.attempts()
    );
    Ok(())
}
