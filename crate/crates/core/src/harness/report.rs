use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{average_runs, compute_metrics, EnvKind, EpisodeResult, HarnessError, MetricsReport, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Markdown,
}

const NA: &str = "N/A";

fn rate(x: Option<f64>) -> String {
    x.map_or_else(|| NA.to_string(), |v| format!("{v:.3}"))
}

fn reward(r: &MetricsReport) -> String {
    let v = r.reward_column();
    match r.environment {
        // Success counts print as integers unless runs disagreed.
        EnvKind::House if v.fract() == 0.0 => format!("{v:.0}"),
        EnvKind::House => format!("{v:.1}"),
        EnvKind::Shop => format!("{v:.3}"),
    }
}

fn rate_header(reports: &[MetricsReport]) -> &'static str {
    let shop = reports.iter().any(|r| r.environment == EnvKind::Shop);
    let house = reports.iter().any(|r| r.environment == EnvKind::House);
    match (shop, house) {
        (true, false) => "Purchase Rate",
        (false, true) => "Completion Rate",
        _ => "Purchase/Completion Rate",
    }
}

fn cells(r: &MetricsReport) -> [String; 5] {
    [
        r.model.clone(),
        rate(Some(r.success_rate)),
        reward(r),
        rate(r.precision),
        rate(Some(r.purchase_or_completion_rate)),
    ]
}

pub fn render_markdown(reports: &[MetricsReport]) -> String {
    let mut out = format!(
        "| Model | Success Rate | Reward | Precision | {} |\n|---|---|---|---|---|\n",
        rate_header(reports)
    );
    for r in reports {
        writeln!(out, "| {} |", cells(r).join(" | ")).unwrap();
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(reports: &[MetricsReport]) -> String {
    let mut out = format!(
        "Model,Success Rate,Reward,Precision,{}\n",
        rate_header(reports)
    );
    for r in reports {
        let row: Vec<String> = cells(r).iter().map(|c| csv_field(c)).collect();
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    out
}

/// Per-model considered/disagreed ratios for opinion-count sweeps.
pub fn render_agreement_csv(reports: &[MetricsReport]) -> String {
    let mut out = String::from("model,k,considered,disagreed\n");
    for r in reports {
        writeln!(
            out,
            "{},{},{},{}",
            csv_field(&r.model),
            r.opinion_k,
            rate(r.considered_ratio),
            rate(r.disagreed_ratio)
        )
        .unwrap();
    }
    out
}

/// Render a table; returns the conventional file name alongside the text.
pub fn emit_report(reports: &[MetricsReport], format: ReportFormat) -> (&'static str, String) {
    match format {
        ReportFormat::Markdown => ("report.md", render_markdown(reports)),
        ReportFormat::Csv => ("report.csv", render_csv(reports)),
    }
}

fn load_results(path: &Path) -> Result<Vec<EpisodeResult>, HarnessError> {
    let file = fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in std::io::BufRead::lines(BufReader::new(file)).enumerate() {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line).map_err(|e| {
            HarnessError::Config(format!("{} line {}: {e}", path.display(), n + 1))
        })?;
        out.push(r);
    }
    Ok(out)
}

fn load_one(dir: &Path) -> Result<MetricsReport, HarnessError> {
    let cfg_path = dir.join("config.json");
    let text = fs::read_to_string(&cfg_path).map_err(|e| HarnessError::io(&cfg_path, e))?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", cfg_path.display())))?;
    let mut per_run = Vec::new();
    for run in 0..cfg.runs_to_average {
        let results = load_results(&dir.join(format!("run-{run}")).join("results.jsonl"))?;
        per_run.push(compute_metrics(
            &results,
            cfg.environment,
            &cfg.model,
            cfg.effective_k(),
        )?);
    }
    average_runs(&per_run)
}

/// Averaged report rows for an output directory, or for every output
/// directory directly below it (sorted by name) when it holds several.
pub fn load_results_dir(dir: impl AsRef<Path>) -> Result<Vec<MetricsReport>, HarnessError> {
    let dir = dir.as_ref();
    if dir.join("config.json").is_file() {
        return Ok(vec![load_one(dir)?]);
    }
    let mut subdirs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| HarnessError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("config.json").is_file())
        .collect();
    subdirs.sort();
    if subdirs.is_empty() {
        return Err(HarnessError::EmptyResults);
    }
    subdirs.iter().map(|d| load_one(d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(environment: EnvKind) -> MetricsReport {
        MetricsReport {
            model: "GPT4".into(),
            environment,
            opinion_k: 1,
            n_episodes: 50,
            success_rate: 0.24,
            avg_reward: 44.589,
            suite_reward: 12.0,
            precision: Some(0.24 / 0.68),
            purchase_or_completion_rate: 0.68,
            considered_ratio: Some(0.549),
            disagreed_ratio: Some(0.451),
        }
    }

    #[test]
    fn markdown_row_has_five_columns_three_decimals() {
        let md = render_markdown(&[row(EnvKind::Shop)]);
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(
            lines[0],
            "| Model | Success Rate | Reward | Precision | Purchase Rate |"
        );
        assert_eq!(lines[2], "| GPT4 | 0.240 | 44.589 | 0.353 | 0.680 |");
        assert_eq!(lines[2].matches('|').count(), 6);
    }

    #[test]
    fn csv_matches_markdown_columns() {
        let mut r = row(EnvKind::House);
        r.precision = None;
        let csv = render_csv(&[r]);
        assert_eq!(
            csv,
            "Model,Success Rate,Reward,Precision,Completion Rate\nGPT4,0.240,12,N/A,0.680\n"
        );
    }

    #[test]
    fn agreement_csv_with_and_without_opinions() {
        let mut none = row(EnvKind::Shop);
        none.model = "no-op".into();
        none.opinion_k = 0;
        none.considered_ratio = None;
        none.disagreed_ratio = None;
        let csv = render_agreement_csv(&[row(EnvKind::Shop), none]);
        assert_eq!(
            csv,
            "model,k,considered,disagreed\nGPT4,1,0.549,0.451\nno-op,0,N/A,N/A\n"
        );
    }
}
