use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use opinion_bench::harness::{
    emit_report, load_results_dir, render_agreement_csv, replay_dir, run_benchmark,
    ReportFormat, RunConfig,
};
use opinion_bench::housesim::{gen_tasks, write_tasks};
use opinion_bench::shopsim::{gen_catalog, gen_goals, load_catalog, write_jsonl};

#[derive(Parser)]
#[command(version, about = "Agent benchmark with expert additional opinions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

#[derive(Clone, Copy, ValueEnum)]
enum Env {
    Shop,
    House,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark described by a TOML config.
    Run { config: PathBuf },
    /// Re-execute recorded traces and check every observation.
    Replay { trace_dir: PathBuf },
    /// Print the report table of one output dir (or a dir of them).
    Report {
        results_dir: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
        /// Also write report and agreement files into the results dir.
        #[arg(long)]
        write: bool,
    },
    /// Generate a synthetic product catalog as JSON lines.
    GenCatalog {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Generate shopping goals or household tasks as JSON lines.
    GenTasks {
        #[arg(long, value_enum)]
        env: Env,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        /// Catalog the shopping goals are drawn from.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn sink(out: &Option<PathBuf>) -> std::io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let out = run_benchmark(&cfg)?;
            print!("{}", emit_report(std::slice::from_ref(&out.averaged), ReportFormat::Markdown).1);
            println!("output: {}", cfg.output_dir.display());
            Ok(true)
        }
        Command::Replay { trace_dir } => {
            let s = replay_dir(&trace_dir)?;
            println!(
                "replayed {} traces, {} steps, {} successes, {} mismatches",
                s.traces,
                s.steps,
                s.successes,
                s.mismatches.len()
            );
            for m in &s.mismatches {
                println!("mismatch {m}");
            }
            Ok(s.is_faithful())
        }
        Command::Report {
            results_dir,
            format,
            write,
        } => {
            let reports = load_results_dir(&results_dir)?;
            let format = match format {
                Format::Csv => ReportFormat::Csv,
                Format::Markdown => ReportFormat::Markdown,
            };
            let (name, text) = emit_report(&reports, format);
            print!("{text}");
            if write {
                std::fs::write(results_dir.join(name), &text)?;
                std::fs::write(results_dir.join("agreement.csv"), render_agreement_csv(&reports))?;
            }
            Ok(true)
        }
        Command::GenCatalog { seed, n, out } => {
            let catalog = gen_catalog(seed, n)?;
            let mut w = sink(&out)?;
            write_jsonl(catalog.products(), &mut w)?;
            w.flush()?;
            Ok(true)
        }
        Command::GenTasks {
            env,
            seed,
            n,
            catalog,
            out,
        } => {
            let mut w = sink(&out)?;
            match env {
                Env::Shop => {
                    let path = catalog.ok_or("shop goals need --catalog")?;
                    let catalog = load_catalog(path)?;
                    write_jsonl(&gen_goals(&catalog, seed, n), &mut w)?;
                }
                Env::House => write_tasks(&gen_tasks(seed, n)?, &mut w)?,
            }
            w.flush()?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
