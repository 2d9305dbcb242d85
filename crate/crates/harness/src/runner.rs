//! The experiment grid: split every graph, run every (method, dimension)
//! task on a worker pool, and persist one flat record per measurement.
//!
//! `records.csv` columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | graph, domain | corpus identity |
//! | n, m, density, avg_degree | statistics of the full (unsplit) graph |
//! | method, dimension | predictor; heuristics repeat their row for every dimension |
//! | trial, trial_seed | split index and the seed of that split |
//! | task_seed | seed handed to the predictor |
//! | map | MAP under the configured `map_mode` |
//! | map_alt | MAP under the other mode |
//! | p_at_k, k | precision of the global top-k |
//! | random_map, random_p_at_k | random-ranking baselines of the same split |
//! | map_mode | `all_nodes` or `nodes_with_hidden` |
//! | hyperparameters | `key=value;...` snapshot, including the decoder |
//!
//! Wall-clock seconds go to `timings.csv` so that `records.csv` stays
//! byte-identical across reruns.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use gembench_core::embeddings::{embed, embed_laplacian_eigenmaps_lcc, EmbeddingMethod, EmbeddingResult};
use gembench_core::evaluation::{map_from_scores, precision_from_scores, random_baseline, MapMode, MetricKind};
use gembench_core::graph::compute_stats;
use gembench_core::heuristics::{score_matrix, HeuristicKind};
use gembench_core::ranking::ScoreMatrix;
use gembench_core::split::{split_edges, EdgeSplit};
use gembench_core::DomainLabel;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, MethodId};
use crate::error::{write_file, HarnessError, Result};
use crate::manifest::{load_corpus, synthesize_corpus, CorpusGraph};
use crate::report::{write_reports, ReportSet};
use crate::seeds::{baseline_seed, split_seed, task_seed};

pub const RECORDS_FILE: &str = "records.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const TIMINGS_FILE: &str = "timings.csv";
pub const CONFIG_FILE: &str = "config.toml";

/// One measurement of one predictor on one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub graph: String,
    pub domain: DomainLabel,
    pub n: usize,
    pub m: usize,
    pub density: f64,
    pub avg_degree: f64,
    pub method: String,
    pub dimension: usize,
    pub trial: usize,
    pub trial_seed: u64,
    pub task_seed: u64,
    pub map: f64,
    pub map_alt: f64,
    pub p_at_k: f64,
    pub k: usize,
    pub random_map: f64,
    pub random_p_at_k: f64,
    pub map_mode: MapMode,
    pub hyperparameters: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskFailure {
    pub graph: String,
    pub method: String,
    pub dimension: usize,
    pub trial: usize,
    pub error: String,
}

/// Seconds spent on a record. Nested methods and heuristics share one
/// computation across dimensions; that shared time is included in each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub graph: String,
    pub method: String,
    pub dimension: usize,
    pub trial: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<RunRecord>,
    pub failures: Vec<TaskFailure>,
    pub timings: Vec<Timing>,
    /// Busy seconds of every scheduled unit of work (splits and tasks), in
    /// no particular order.
    pub busy_seconds: Vec<f64>,
    pub reports: ReportSet,
}

/// Resolves the configured corpus.
pub fn resolve_corpus(config: &ExperimentConfig) -> Result<Vec<CorpusGraph>> {
    let corpus = match (&config.corpus.manifest, &config.corpus.plan) {
        (Some(path), _) => load_corpus(path)?,
        (None, Some(plan)) => synthesize_corpus(plan, config.seed)?,
        (None, None) => return Err(HarnessError::Config("corpus needs a manifest or a plan".into())),
    };
    if corpus.is_empty() {
        return Err(HarnessError::Config("the corpus is empty".into()));
    }
    Ok(corpus)
}

/// Runs the whole grid with `workers` threads and writes every output file
/// into `out`. Fails after writing if some method failed on every task.
pub fn run_experiment(config: &ExperimentConfig, out: &Path, workers: usize) -> Result<RunOutput> {
    config.validate()?;
    let corpus = resolve_corpus(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Run(format!("cannot start worker pool: {e}")))?;
    let (records, failures, timings, busy_seconds) = pool.install(|| execute(config, &corpus));

    write_file(&out.join(CONFIG_FILE), config.to_toml())?;
    write_csv(&out.join(RECORDS_FILE), &RECORD_COLUMNS, &records)?;
    write_csv(&out.join(FAILURES_FILE), &FAILURE_COLUMNS, &failures)?;
    write_csv(&out.join(TIMINGS_FILE), &TIMING_COLUMNS, &timings)?;

    // aggregate from the persisted table, not from memory
    let persisted = read_records(out)?;
    let reports = if persisted.is_empty() {
        ReportSet::default()
    } else {
        write_reports(&persisted, config, out)?
    };

    if let Some(summary) = fully_failed_summary(config, &records, &failures) {
        return Err(HarnessError::Run(summary));
    }
    Ok(RunOutput {
        records,
        failures,
        timings,
        busy_seconds,
        reports,
    })
}

fn fully_failed_summary(config: &ExperimentConfig, records: &[RunRecord], failures: &[TaskFailure]) -> Option<String> {
    let succeeded: BTreeSet<&str> = records.iter().map(|r| r.method.as_str()).collect();
    let dead: Vec<String> = config
        .methods
        .iter()
        .filter(|m| !succeeded.contains(m.name()))
        .map(|m| {
            let count = failures.iter().filter(|f| f.method == m.name()).count();
            let first = failures
                .iter()
                .find(|f| f.method == m.name())
                .map(|f| format!("; first error on {}: {}", f.graph, f.error))
                .unwrap_or_default();
            format!("{m} failed on all {count} tasks{first}")
        })
        .collect();
    if dead.is_empty() {
        None
    } else {
        Some(dead.join("\n"))
    }
}

/// A prepared (graph, trial) split with its baselines.
struct Prepared<'a> {
    graph_index: usize,
    entry: &'a CorpusGraph,
    trial: usize,
    trial_seed: u64,
    n: usize,
    m: usize,
    density: f64,
    avg_degree: f64,
    split: std::result::Result<EdgeSplit, String>,
    random_map: f64,
    random_p_at_k: f64,
    seconds: f64,
}

#[derive(Debug, Clone, Copy)]
enum Job {
    /// Dimension-invariant: one score matrix for every dimension.
    Heuristic(HeuristicKind),
    /// Embed once at the largest dimension, then truncate.
    Nested(EmbeddingMethod),
    Single(EmbeddingMethod, usize),
}

struct Task {
    prepared: usize,
    method_index: usize,
    method: MethodId,
    job: Job,
}

type Outcome = (RunRecord, f64);

type Executed = (Vec<RunRecord>, Vec<TaskFailure>, Vec<Timing>, Vec<f64>);

fn execute(config: &ExperimentConfig, corpus: &[CorpusGraph]) -> Executed {
    let cells: Vec<(usize, usize)> = (0..corpus.len())
        .flat_map(|g| (0..config.trials).map(move |t| (g, t)))
        .collect();
    let prepared: Vec<Prepared> = cells
        .par_iter()
        .map(|&(g, t)| prepare(config, g, &corpus[g], t))
        .collect();

    let mut tasks = Vec::new();
    for (p_idx, p) in prepared.iter().enumerate() {
        for (method_index, &method) in config.methods.iter().enumerate() {
            let jobs = match method {
                MethodId::Heuristic(h) => vec![Job::Heuristic(h)],
                MethodId::Embedding(e) if e.is_nested() => vec![Job::Nested(e)],
                MethodId::Embedding(e) => config.dimensions.iter().map(|&d| Job::Single(e, d)).collect(),
            };
            for job in jobs {
                tasks.push((
                    estimated_cost(job, p.n),
                    Task {
                        prepared: p_idx,
                        method_index,
                        method,
                        job,
                    },
                ));
            }
        }
    }
    // longest first for better packing; output order is restored below
    tasks.sort_by(|a, b| b.0.total_cmp(&a.0));

    let results: Vec<(usize, usize, Vec<std::result::Result<Outcome, TaskFailure>>, f64)> = tasks
        .par_iter()
        .map(|(_, task)| {
            let start = Instant::now();
            let p = &prepared[task.prepared];
            let outcomes = run_task(config, p, task);
            (task.prepared, task.method_index, outcomes, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut busy: Vec<f64> = prepared.iter().map(|p| p.seconds).collect();
    busy.extend(results.iter().map(|r| r.3));

    let mut keyed: Vec<((usize, usize, usize, usize), std::result::Result<Outcome, TaskFailure>)> = Vec::new();
    for (p_idx, method_index, outcomes, _) in results {
        let p = &prepared[p_idx];
        for o in outcomes {
            let dim = match &o {
                Ok((r, _)) => r.dimension,
                Err(f) => f.dimension,
            };
            keyed.push(((p.graph_index, p.trial, method_index, dim), o));
        }
    }
    keyed.sort_by(|a, b| a.0.cmp(&b.0));

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut timings = Vec::new();
    for (_, o) in keyed {
        match o {
            Ok((record, seconds)) => {
                timings.push(Timing {
                    graph: record.graph.clone(),
                    method: record.method.clone(),
                    dimension: record.dimension,
                    trial: record.trial,
                    seconds,
                });
                records.push(record);
            }
            Err(f) => failures.push(f),
        }
    }
    (records, failures, timings, busy)
}

fn estimated_cost(job: Job, n: usize) -> f64 {
    let n = n as f64;
    match job {
        Job::Heuristic(_) => n * n,
        Job::Nested(_) => 4.0 * n * n * n / 1024.0,
        Job::Single(EmbeddingMethod::Sdne, d) => 20.0 * n * n * (1.0 + d as f64 / 128.0),
        Job::Single(_, d) => n * n * (1.0 + d as f64 / 128.0),
    }
}

fn prepare<'a>(config: &ExperimentConfig, graph_index: usize, entry: &'a CorpusGraph, trial: usize) -> Prepared<'a> {
    let start = Instant::now();
    let stats = compute_stats(&entry.graph);
    let trial_seed = split_seed(config.seed, &entry.name, trial);
    let split = split_edges(&entry.graph, config.hide_fraction, trial_seed, config.preserve_connectivity)
        .map_err(|e| e.to_string());
    let (random_map, random_p_at_k) = match &split {
        Ok(s) => {
            let seed = baseline_seed(config.seed, &entry.name, trial);
            (
                random_baseline(s, MetricKind::Map, config.baseline_trials, seed, config.map_mode),
                random_baseline(s, MetricKind::PrecisionAtK(config.k), config.baseline_trials, seed, config.map_mode),
            )
        }
        Err(_) => (f64::NAN, f64::NAN),
    };
    Prepared {
        graph_index,
        entry,
        trial,
        trial_seed,
        n: stats.n,
        m: stats.m,
        density: stats.density,
        avg_degree: stats.avg_degree,
        split,
        random_map,
        random_p_at_k,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn other_mode(mode: MapMode) -> MapMode {
    match mode {
        MapMode::AllNodes => MapMode::NodesWithHidden,
        MapMode::NodesWithHidden => MapMode::AllNodes,
    }
}

fn run_task(config: &ExperimentConfig, p: &Prepared, task: &Task) -> Vec<std::result::Result<Outcome, TaskFailure>> {
    let name = task.method.name();
    let fail = |dimension: usize, error: String| TaskFailure {
        graph: p.entry.name.clone(),
        method: name.to_string(),
        dimension,
        trial: p.trial,
        error,
    };
    let dims: Vec<usize> = match task.job {
        Job::Single(_, d) => vec![d],
        _ => config.dimensions.clone(),
    };
    let split = match &p.split {
        Ok(s) => s,
        Err(e) => return dims.iter().map(|&d| Err(fail(d, format!("split failed: {e}")))).collect(),
    };
    let seed_for = |d: usize| task_seed(config.seed, &p.entry.name, name, d, p.trial);
    let record = |d: usize, seed: u64, scores: &ScoreMatrix, hyperparameters: String| -> std::result::Result<RunRecord, TaskFailure> {
        if !scores.is_finite() {
            return Err(fail(d, "non-finite link scores".into()));
        }
        Ok(RunRecord {
            graph: p.entry.name.clone(),
            domain: p.entry.domain.clone(),
            n: p.n,
            m: p.m,
            density: p.density,
            avg_degree: p.avg_degree,
            method: name.to_string(),
            dimension: d,
            trial: p.trial,
            trial_seed: p.trial_seed,
            task_seed: seed,
            map: map_from_scores(split, scores, config.map_mode),
            map_alt: map_from_scores(split, scores, other_mode(config.map_mode)),
            p_at_k: precision_from_scores(split, scores, config.k),
            k: config.k,
            random_map: p.random_map,
            random_p_at_k: p.random_p_at_k,
            map_mode: config.map_mode,
            hyperparameters,
        })
    };

    let start = Instant::now();
    match task.job {
        Job::Heuristic(h) => {
            // dimension-invariant, so the seed is keyed to dimension 0
            let seed = seed_for(0);
            let scores = score_matrix(h, split, seed);
            let first = record(0, seed, &scores, String::new());
            let seconds = p.seconds + start.elapsed().as_secs_f64();
            dims.iter()
                .map(|&d| match &first {
                    Ok(r) => Ok((RunRecord { dimension: d, ..r.clone() }, seconds)),
                    Err(f) => Err(TaskFailure { dimension: d, ..f.clone() }),
                })
                .collect()
        }
        Job::Nested(method) => {
            let max_d = *dims.iter().max().expect("dimensions are non-empty");
            let full = embed_method(config, method, split, max_d, seed_for(max_d));
            let shared = start.elapsed().as_secs_f64();
            let full = match full {
                Ok(e) => e,
                Err(e) => return dims.iter().map(|&d| Err(fail(d, e.clone()))).collect(),
            };
            dims.iter()
                .map(|&d| {
                    let t = Instant::now();
                    let emb = if d == max_d {
                        Ok(full.clone())
                    } else {
                        full.truncated(d).map_err(|e| e.to_string())
                    };
                    let emb = emb.map_err(|e| fail(d, e))?;
                    let r = record(d, seed_for(d), &emb.score_matrix(), hyperparameters(config, method))?;
                    Ok((r, p.seconds + shared + t.elapsed().as_secs_f64()))
                })
                .collect()
        }
        Job::Single(method, d) => {
            let seed = seed_for(d);
            let outcome = embed_method(config, method, split, d, seed)
                .map_err(|e| fail(d, e))
                .and_then(|emb| record(d, seed, &emb.score_matrix(), hyperparameters(config, method)))
                .map(|r| (r, p.seconds + start.elapsed().as_secs_f64()));
            vec![outcome]
        }
    }
}

fn embed_method(
    config: &ExperimentConfig,
    method: EmbeddingMethod,
    split: &EdgeSplit,
    d: usize,
    seed: u64,
) -> std::result::Result<EmbeddingResult, String> {
    let emb = match method {
        // disconnected train graphs are embedded on their largest component
        EmbeddingMethod::LaplacianEigenmaps => embed_laplacian_eigenmaps_lcc(&split.train, d),
        _ => embed(method, &split.train, d, &config.params, seed),
    };
    emb.and_then(|e| e.with_decoder(config.decoder_for(method)))
        .map_err(|e| e.to_string())
}

fn hyperparameters(config: &ExperimentConfig, method: EmbeddingMethod) -> String {
    let decoder = format!("decoder={}", config.decoder_for(method));
    match config.params.snapshot(method) {
        s if s.is_empty() => decoder,
        s => format!("{s};{decoder}"),
    }
}

/// Writes a header row (always, even for an empty table) followed by `rows`.
pub(crate) fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer.write_record(header).map_err(|e| HarnessError::csv(path, e))?;
    for row in rows {
        writer.serialize(row).map_err(|e| HarnessError::csv(path, e))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| HarnessError::Run(format!("{}: {e}", path.display())))?;
    write_file(path, bytes)
}

pub const FAILURE_COLUMNS: [&str; 5] = ["graph", "method", "dimension", "trial", "error"];
pub const TIMING_COLUMNS: [&str; 5] = ["graph", "method", "dimension", "trial", "seconds"];
pub const RECORD_COLUMNS: [&str; 19] = [
    "graph",
    "domain",
    "n",
    "m",
    "density",
    "avg_degree",
    "method",
    "dimension",
    "trial",
    "trial_seed",
    "task_seed",
    "map",
    "map_alt",
    "p_at_k",
    "k",
    "random_map",
    "random_p_at_k",
    "map_mode",
    "hyperparameters",
];

/// Reads `dir/records.csv`.
pub fn read_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let path: PathBuf = dir.join(RECORDS_FILE);
    let mut reader = csv::Reader::from_path(&path).map_err(|e| HarnessError::csv(&path, e))?;
    reader
        .deserialize()
        .map(|r| r.map_err(|e| HarnessError::csv(&path, e)))
        .collect()
}

/// Per-method failure counts, for the run summary.
pub fn failure_counts(failures: &[TaskFailure]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for f in failures {
        *out.entry(f.method.clone()).or_default() += 1;
    }
    out
}
