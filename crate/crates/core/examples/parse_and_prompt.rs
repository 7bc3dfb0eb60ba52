//! What the model sees and how its answers are read back: the system prompt,
//! the suggestion block in both styles, and lenient JSON extraction.
//!
//! cargo run --example parse_and_prompt

use opinion_bench::agent::{build_prompt, initial_message, parse_response, AgentConfig, ContextBuffer};
use opinion_bench::env::Environment;
use opinion_bench::opinions::{parse_suggestions, render_opinion_prompt, Opinion, SuggestionStyle};
use opinion_bench::shopsim::{gen_catalog, gen_goals, ShopEnv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = std::sync::Arc::new(gen_catalog(3, 30)?);
    let goal = gen_goals(&catalog, 3, 1).remove(0);
    let env = ShopEnv::reset(catalog, goal, 20)?;

    let cfg = AgentConfig::new(env.instruction(), env.tools(), 20).with_opinions(2);
    let ctx = ContextBuffer::new(initial_message(&env), cfg.context_chars);
    let ops = [Opinion::new("search storage ottoman"), Opinion::new("click Back to Search")];
    let prompt = build_prompt(&cfg, &ctx, Some(&ops), env.suggestion_style())?;
    for m in &prompt {
        println!("----- {} -----\n{}", m.role, m.content);
    }

    let bracketed = render_opinion_prompt(&[Opinion::new("go to countertop 1")], SuggestionStyle::Bracketed)?;
    println!("\nbracketed style: {}", bracketed.rendered);
    println!("read back: {:?}", parse_suggestions(&bracketed.rendered));

    let messy = r#"Sure, here is my answer:
```json
{"thoughts": {"text": "search first", "reasoning": "nothing is open yet",
 "plan": "- search\n- click", "criticism": "be specific"},
 "command": {"name": "search", "args": {"tool_input": "storage ottoman"}}}
```
Let me know!"#;
    let (thought, command) = parse_response(messy)?;
    println!("\nparsed: {} -> {}({:?})", thought.text, command.name, command.tool_input);
    for bad in ["no json at all", r#"{"command": {"name": "search"}}"#, "{\"thoughts\": {}, "] {
        println!("{bad:?}: {}", parse_response(bad).unwrap_err());
    }
    Ok(())
}
