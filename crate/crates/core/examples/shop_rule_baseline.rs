//! Rule baseline on a generated shop suite: search the instruction, open the
//! first result, buy. Purchases every time; succeeds only when the top hit
//! happens to fit.
//!
//! cargo run --example shop_rule_baseline -- [n_goals]

use std::fs::File;

use opinion_bench::harness::{render_markdown, run_benchmark, RunConfig};
use opinion_bench::shopsim::{gen_catalog, gen_goals, write_jsonl};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map_or(Ok(50), |s| s.parse())?;
    let dir = tempfile::tempdir()?;
    let catalog = gen_catalog(1, 500)?;
    write_jsonl(catalog.products(), File::create(dir.path().join("catalog.jsonl"))?)?;
    write_jsonl(&gen_goals(&catalog, 1, n), File::create(dir.path().join("goals.jsonl"))?)?;

    let toml = format!(
        r#"
model = "Rule"
environment = "shop"
task_file = "goals.jsonl"
catalog_file = "catalog.jsonl"
first_n = {n}
output_dir = "out"
expert_only = true

[backend]
kind = "copy"

[expert]
kind = "rule_shop"
"#
    );
    let cfg_path = dir.path().join("rule.toml");
    std::fs::write(&cfg_path, toml)?;
    let out = run_benchmark(&RunConfig::load(&cfg_path)?)?;
    print!("{}", render_markdown(std::slice::from_ref(&out.averaged)));
    let steps: Vec<usize> = out.runs[0].iter().map(|r| r.steps).collect();
    println!("steps per episode: min {} max {}", steps.iter().min().unwrap(), steps.iter().max().unwrap());
    Ok(())
}
