//! A fully suggestible agent under different experts and opinion counts.
//! Copying a good expert helps, copying a random one hurts, and the agreement
//! ratio of a copier is always 1.
//!
//! cargo run --example additional_opinions_shop

use std::fs::File;

use opinion_bench::experts::{ExpertKind, QualityTier};
use opinion_bench::harness::{
    render_agreement_csv, render_markdown, run_benchmark, BackendKind, BackendSpec, EnvKind,
    ExpertSpec, RunConfig,
};
use opinion_bench::shopsim::{gen_catalog, gen_goals, write_jsonl};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let catalog = gen_catalog(2, 500)?;
    write_jsonl(catalog.products(), File::create(dir.path().join("catalog.jsonl"))?)?;
    write_jsonl(&gen_goals(&catalog, 2, 50), File::create(dir.path().join("goals.jsonl"))?)?;

    let variants = [
        ("copy + heuristic", BackendKind::Copy, ExpertKind::HeuristicShop, QualityTier::WithImage, 1),
        ("copy + heuristic(top5)", BackendKind::Copy, ExpertKind::HeuristicShop, QualityTier::WithImage, 5),
        ("copy + heuristic w/o image", BackendKind::Copy, ExpertKind::HeuristicShop, QualityTier::WithoutImage, 1),
        ("copy + random", BackendKind::Copy, ExpertKind::Random, QualityTier::WithImage, 1),
        ("contrarian + heuristic", BackendKind::Contrarian, ExpertKind::HeuristicShop, QualityTier::WithImage, 1),
    ];
    let mut rows = Vec::new();
    for (i, (name, backend, kind, tier, k)) in variants.into_iter().enumerate() {
        let cfg = RunConfig {
            model: name.into(),
            environment: EnvKind::Shop,
            task_file: dir.path().join("goals.jsonl"),
            catalog_file: Some(dir.path().join("catalog.jsonl")),
            first_n: 50,
            runs_to_average: 1,
            seed: 2,
            output_dir: dir.path().join(format!("out-{i}")),
            workers: 4,
            opinion_k: k,
            expert_only: false,
            max_steps: None,
            context_chars: None,
            backend: BackendSpec {
                kind: backend,
                fixture_dir: None,
                record: false,
                http: Default::default(),
            },
            expert: Some(ExpertSpec { kind, tier }),
        };
        rows.push(run_benchmark(&cfg)?.averaged);
    }
    print!("{}", render_markdown(&rows));
    println!();
    print!("{}", render_agreement_csv(&rows));
    Ok(())
}
