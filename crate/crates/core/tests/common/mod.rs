//! Fixtures shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use opinion_bench::experts::{ExpertKind, QualityTier};
use opinion_bench::harness::{BackendKind, BackendSpec, EnvKind, ExpertSpec, RunConfig};
use opinion_bench::housesim::{gen_tasks, write_tasks};
use opinion_bench::shopsim::{gen_catalog, gen_goals, write_jsonl, Catalog, BUY_NOW, NEXT_PAGE};

/// A temp dir holding a generated catalog, goals and household tasks.
pub struct Workspace {
    pub dir: tempfile::TempDir,
    pub catalog: Catalog,
}

impl Workspace {
    pub fn new(seed: u64, products: usize, goals: usize, house_tasks: usize) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let catalog = gen_catalog(seed, products).unwrap();
        write_jsonl(catalog.products(), File::create(dir.path().join("catalog.jsonl")).unwrap())
            .unwrap();
        let g = gen_goals(&catalog, seed, goals);
        write_jsonl(&g, File::create(dir.path().join("goals.jsonl")).unwrap()).unwrap();
        let t = gen_tasks(seed, house_tasks).unwrap();
        write_tasks(&t, File::create(dir.path().join("house.jsonl")).unwrap()).unwrap();
        Self { dir, catalog }
    }

    pub fn path(&self) -> &Path {
        self.dir.path()
    }

    pub fn config(&self, env: EnvKind, backend: BackendKind, first_n: usize) -> RunConfig {
        let (task_file, catalog_file) = match env {
            EnvKind::Shop => ("goals.jsonl", Some(self.path().join("catalog.jsonl"))),
            EnvKind::House => ("house.jsonl", None),
        };
        RunConfig {
            model: format!("{backend:?}").to_lowercase(),
            environment: env,
            task_file: self.path().join(task_file),
            catalog_file,
            first_n,
            runs_to_average: 1,
            seed: 11,
            output_dir: self.path().join("out"),
            workers: 4,
            opinion_k: 0,
            expert_only: false,
            max_steps: None,
            context_chars: None,
            backend: BackendSpec {
                kind: backend,
                fixture_dir: None,
                record: false,
                http: Default::default(),
            },
            expert: None,
        }
    }
}

pub fn with_expert(mut cfg: RunConfig, kind: ExpertKind, k: usize) -> RunConfig {
    cfg.expert = Some(ExpertSpec {
        kind,
        tier: QualityTier::WithImage,
    });
    cfg.opinion_k = k;
    cfg
}

pub fn output_dir(mut cfg: RunConfig, name: &str) -> RunConfig {
    cfg.output_dir = cfg.output_dir.parent().unwrap().join(name);
    cfg
}

/// Every file under `dir`, relative path to bytes.
pub fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

/// UI actions that buy `catalog[pos]` with `options`: search its title, page
/// forward to it, open it, pick each option value, buy.
pub fn purchase_actions(catalog: &Catalog, pos: usize, options: &BTreeMap<String, String>) -> Vec<String> {
    let product = &catalog.products()[pos];
    let rank = catalog
        .search(&product.title)
        .iter()
        .position(|&i| i == pos)
        .expect("a product's own title retrieves it");
    let mut actions = vec![format!("search {}", product.title)];
    actions.extend((0..rank / 10).map(|_| format!("click {NEXT_PAGE}")));
    actions.push(format!("click {}", product.id));
    actions.extend(options.values().map(|v| format!("click {v}")));
    actions.push(format!("click {BUY_NOW}"));
    actions
}

/// Every assignment of one value per option.
pub fn all_combos(options: &BTreeMap<String, Vec<String>>) -> Vec<BTreeMap<String, String>> {
    options.iter().fold(vec![BTreeMap::new()], |acc, (name, values)| {
        acc.iter()
            .flat_map(|base| {
                values.iter().map(move |v| {
                    let mut m = base.clone();
                    m.insert(name.clone(), v.clone());
                    m
                })
            })
            .collect()
    })
}
