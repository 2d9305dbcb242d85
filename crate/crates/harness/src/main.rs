use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gembench::config::ExperimentConfig;
use gembench::error::{HarnessError, Result};
use gembench::manifest::{generate_corpus, ingest_directory, MANIFEST_FILE};
use gembench::report::{plot_data_from_dir, report_from_dir, PlotMetric};
use gembench::runner::{failure_counts, run_experiment};
use gembench_core::generators::DomainPlan;

#[derive(Parser)]
#[command(name = "gembench", version, about = "Link-prediction benchmarks for graph embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus: edge lists plus manifest.toml.
    Generate {
        /// TOML corpus plan; the built-in three-domain plan when omitted.
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a manifest for a directory of edge lists.
    Ingest {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Run the experiment grid.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; falls back to `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "GEMBENCH_WORKERS")]
        workers: Option<usize>,
        #[arg(long, env = "GEMBENCH_SEED")]
        seed: Option<u64>,
    },
    /// Recompute GFS tables and plot series from a run's records.csv.
    Report {
        #[arg(long)]
        records: PathBuf,
    },
    /// Write plot series for one metric.
    PlotData {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value = "map")]
        metric: PlotMetric,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { plan, out, seed } => {
            let plan = match plan {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| HarnessError::Io { path: path.clone(), source: e })?;
                    toml::from_str(&text).map_err(|e| HarnessError::Toml { path, message: e.to_string() })?
                }
                None => DomainPlan::default(),
            };
            let manifest = generate_corpus(&plan, &out, seed)?;
            println!("wrote {} graphs and {}", manifest.graphs.len(), out.join(MANIFEST_FILE).display());
        }
        Command::Ingest { dir, manifest } => {
            let report = ingest_directory(&dir, &manifest)?;
            for (name, count) in &report.self_loops {
                println!("{name}: dropped {count} self-loop(s)");
            }
            println!("wrote {} graphs to {}", report.manifest.graphs.len(), manifest.display());
        }
        Command::Run { config, out, workers, seed } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(w) = workers {
                cfg.workers = Some(w);
            }
            let out = out
                .or_else(|| cfg.output_dir.clone())
                .ok_or_else(|| HarnessError::Config("no output directory (use --out or output_dir)".into()))?;
            let workers = cfg
                .workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let start = std::time::Instant::now();
            let output = run_experiment(&cfg, &out, workers)?;
            println!(
                "{} records, {} failed tasks, {:.1} s with {} worker(s); results in {}",
                output.records.len(),
                output.failures.len(),
                start.elapsed().as_secs_f64(),
                workers,
                out.display()
            );
            for (method, count) in failure_counts(&output.failures) {
                println!("  {method}: {count} task(s) failed and were excluded");
            }
        }
        Command::Report { records } => {
            let audit = report_from_dir(&records)?;
            match audit.matched_previous {
                Some(true) => println!("recomputed GFS matches the stored gfs.csv"),
                Some(false) => println!("recomputed GFS differs from the stored gfs.csv (overwritten)"),
                None => println!("wrote GFS reports"),
            }
        }
        Command::PlotData { records, metric } => {
            let count = plot_data_from_dir(&records, metric)?;
            println!("wrote {count} series under {}", records.join("plots").join(metric.name()).display());
        }
    }
    Ok(())
}
