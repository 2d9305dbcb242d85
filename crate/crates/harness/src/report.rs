//! GFS tables and plot series computed from run records.
//!
//! GFS scores are computed per trial and then summarized as mean and
//! standard deviation (`n − 1` denominator, 0 for one trial) across trials. Files written into the
//! output directory:
//!
//! * `gfs.csv`: one row per (dimension, method, metric) with columns
//!   `dimension, method, metric, micro_mean, micro_std, macro_mean, macro_std`
//!   followed by a `<domain>_mean, <domain>_std` pair per present domain.
//! * `gfs_best.csv`: same columns, one row per (method, metric) at the
//!   dimension with the highest mean micro score (ties go to the smaller one).
//! * `gfs.txt`: the same numbers as aligned text tables.
//! * `plots/<metric>/<panel>/<method>.csv`: rows of `dimension, mean, std`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use gembench_core::evaluation::{gfs_scores, MetricKind, MetricValue, BASELINE_METHOD};
use gembench_core::DomainLabel;

use crate::config::ExperimentConfig;
use crate::error::{read_to_string, write_file, HarnessError, Result};
use crate::runner::{read_records, RunRecord, CONFIG_FILE};

pub const GFS_FILE: &str = "gfs.csv";
pub const GFS_BEST_FILE: &str = "gfs_best.csv";
pub const GFS_TEXT_FILE: &str = "gfs.txt";
pub const PLOTS_DIR: &str = "plots";

/// Mean and standard deviation over trials. The deviation uses the `n − 1`
/// denominator; a single sample has deviation 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let count = values.len();
        if count == 0 {
            return Stat {
                mean: f64::NAN,
                std: f64::NAN,
                count,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let var = match count {
            1 => 0.0,
            _ => values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64,
        };
        Stat {
            mean,
            std: var.sqrt(),
            count,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GfsRow {
    pub dimension: usize,
    pub method: String,
    pub metric: MetricKind,
    pub micro: Stat,
    pub macro_: Stat,
    pub per_domain: BTreeMap<String, Stat>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportSet {
    pub per_dimension: Vec<GfsRow>,
    pub best: Vec<GfsRow>,
    /// Domains present in the records, in column order.
    pub domains: Vec<String>,
}

impl ReportSet {
    pub fn find(&self, dimension: usize, method: &str, metric: MetricKind) -> Option<&GfsRow> {
        self.per_dimension
            .iter()
            .find(|r| r.dimension == dimension && r.method == method && r.metric == metric)
    }

    pub fn best_for(&self, method: &str, metric: MetricKind) -> Option<&GfsRow> {
        self.best.iter().find(|r| r.method == method && r.metric == metric)
    }
}

fn precision_kind(records: &[RunRecord]) -> Result<MetricKind> {
    let ks: BTreeSet<usize> = records.iter().map(|r| r.k).collect();
    match ks.len() {
        1 => Ok(MetricKind::PrecisionAtK(*ks.first().unwrap())),
        _ => Err(HarnessError::Run(format!("records mix several k values: {ks:?}"))),
    }
}

/// GFS per dimension and best-over-dimension.
pub fn compute_reports(records: &[RunRecord]) -> Result<ReportSet> {
    if records.is_empty() {
        return Err(HarnessError::Core(gembench_core::Error::Validation(
            "cannot report on an empty record set".into(),
        )));
    }
    let p_kind = precision_kind(records)?;
    let domains: BTreeMap<String, DomainLabel> =
        records.iter().map(|r| (r.graph.clone(), r.domain.clone())).collect();
    let dims: BTreeSet<usize> = records.iter().map(|r| r.dimension).collect();
    let trials: BTreeSet<usize> = records.iter().map(|r| r.trial).collect();

    let mut per_dimension = Vec::new();
    for &d in &dims {
        // (method, metric) -> per-trial micro, macro, per-domain values
        type Samples = (Vec<f64>, Vec<f64>, BTreeMap<String, Vec<f64>>);
        let mut samples: BTreeMap<(String, MetricKind), Samples> = BTreeMap::new();
        for &t in &trials {
            let rows = metric_rows(records.iter().filter(|r| r.dimension == d && r.trial == t), p_kind);
            if rows.is_empty() {
                continue;
            }
            let report = gfs_scores(&rows, &domains)?;
            for (key, entry) in report.entries {
                let s = samples.entry(key).or_default();
                s.0.push(entry.micro);
                s.1.push(entry.macro_);
                for (dom, v) in entry.per_domain {
                    s.2.entry(dom).or_default().push(v);
                }
            }
        }
        for ((method, metric), (micro, macro_, per_domain)) in samples {
            per_dimension.push(GfsRow {
                dimension: d,
                method,
                metric,
                micro: Stat::of(&micro),
                macro_: Stat::of(&macro_),
                per_domain: per_domain.into_iter().map(|(k, v)| (k, Stat::of(&v))).collect(),
            });
        }
    }

    let mut best: BTreeMap<(String, MetricKind), &GfsRow> = BTreeMap::new();
    for row in &per_dimension {
        let key = (row.method.clone(), row.metric);
        match best.get(&key) {
            // dimensions are visited in increasing order, so strict > keeps the smaller on ties
            Some(b) if !(row.micro.mean > b.micro.mean) => {}
            _ => {
                best.insert(key, row);
            }
        }
    }
    let best = best.into_values().cloned().collect();
    let domain_names: BTreeSet<String> = domains.values().map(|d| d.to_string()).collect();
    Ok(ReportSet {
        per_dimension,
        best,
        domains: domain_names.into_iter().collect(),
    })
}

/// Method rows plus one baseline row per (graph, trial) and metric.
fn metric_rows<'a>(records: impl Iterator<Item = &'a RunRecord>, p_kind: MetricKind) -> Vec<MetricValue> {
    let mut rows = Vec::new();
    let mut baselines_seen = BTreeSet::new();
    for r in records {
        let row = |method: &str, kind, value| MetricValue {
            graph: r.graph.clone(),
            method: method.to_string(),
            dimension: r.dimension,
            trial: r.trial,
            kind,
            value,
        };
        rows.push(row(&r.method, MetricKind::Map, r.map));
        rows.push(row(&r.method, p_kind, r.p_at_k));
        if baselines_seen.insert((r.graph.clone(), r.trial)) {
            rows.push(row(BASELINE_METHOD, MetricKind::Map, r.random_map));
            rows.push(row(BASELINE_METHOD, p_kind, r.random_p_at_k));
        }
    }
    rows
}

fn gfs_csv(rows: &[GfsRow], domains: &[String]) -> String {
    let mut out = String::from("dimension,method,metric,micro_mean,micro_std,macro_mean,macro_std");
    for d in domains {
        write!(out, ",{d}_mean,{d}_std").unwrap();
    }
    out.push('\n');
    for r in rows {
        write!(
            out,
            "{},{},{},{},{},{},{}",
            r.dimension, r.method, r.metric, r.micro.mean, r.micro.std, r.macro_.mean, r.macro_.std
        )
        .unwrap();
        for d in domains {
            match r.per_domain.get(d) {
                Some(s) => write!(out, ",{},{}", s.mean, s.std).unwrap(),
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

fn text_table(title: &str, rows: &[&GfsRow], domains: &[String], show_dim: bool) -> String {
    let mut header = vec!["method".to_string()];
    if show_dim {
        header.push("dim".into());
    }
    header.extend(["micro".to_string(), "macro".to_string()]);
    header.extend(domains.iter().cloned());
    let cell = |s: &Stat| format!("{:.3} ± {:.3}", s.mean, s.std);
    let mut table = vec![header];
    for r in rows {
        let mut line = vec![r.method.clone()];
        if show_dim {
            line.push(r.dimension.to_string());
        }
        line.push(cell(&r.micro));
        line.push(cell(&r.macro_));
        for d in domains {
            line.push(r.per_domain.get(d).map(cell).unwrap_or_else(|| "-".into()));
        }
        table.push(line);
    }
    let widths: Vec<usize> = (0..table[0].len())
        .map(|c| table.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = format!("{title}\n");
    for (i, line) in table.iter().enumerate() {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            out.push_str(&rule.join("  "));
            out.push('\n');
        }
    }
    out.push('\n');
    out
}

fn gfs_text(reports: &ReportSet) -> String {
    let mut metrics: Vec<MetricKind> = reports.per_dimension.iter().map(|r| r.metric).collect();
    metrics.sort_by_key(|m| (!matches!(m, MetricKind::Map), *m));
    metrics.dedup();
    let dims: BTreeSet<usize> = reports.per_dimension.iter().map(|r| r.dimension).collect();
    let trials = reports.per_dimension.iter().map(|r| r.micro.count).max().unwrap_or(0);
    let mut out = format!("GFS-score, mean ± std over {trials} trial(s)\n\n");
    for &metric in &metrics {
        let best: Vec<&GfsRow> = reports.best.iter().filter(|r| r.metric == metric).collect();
        out.push_str(&text_table(
            &format!("{metric}, best dimension per method"),
            &best,
            &reports.domains,
            true,
        ));
        for &d in &dims {
            let rows: Vec<&GfsRow> = reports
                .per_dimension
                .iter()
                .filter(|r| r.metric == metric && r.dimension == d)
                .collect();
            out.push_str(&text_table(&format!("{metric}, dimension {d}"), &rows, &reports.domains, false));
        }
    }
    out
}

/// Writes the GFS files and the plot series for both metrics.
pub fn write_reports(records: &[RunRecord], config: &ExperimentConfig, out: &Path) -> Result<ReportSet> {
    let reports = compute_reports(records)?;
    write_file(&out.join(GFS_FILE), gfs_csv(&reports.per_dimension, &reports.domains))?;
    write_file(&out.join(GFS_BEST_FILE), gfs_csv(&reports.best, &reports.domains))?;
    write_file(&out.join(GFS_TEXT_FILE), gfs_text(&reports))?;
    for metric in [PlotMetric::Map, PlotMetric::PrecisionAtK] {
        write_plot_series(records, config, metric, out)?;
    }
    Ok(reports)
}

/// Result of re-aggregating a finished run directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Audit {
    pub reports: ReportSet,
    /// Whether the previously written `gfs.csv` matched the recomputation
    /// byte for byte; `None` when there was none.
    pub matched_previous: Option<bool>,
}

/// `report --records DIR`: recomputes every report from `DIR/records.csv`.
pub fn report_from_dir(dir: &Path) -> Result<Audit> {
    let records = read_records(dir)?;
    let config = config_of_run(dir)?;
    let previous = read_to_string(&dir.join(GFS_FILE)).ok();
    let reports = write_reports(&records, &config, dir)?;
    let now = gfs_csv(&reports.per_dimension, &reports.domains);
    Ok(Audit {
        reports,
        matched_previous: previous.map(|p| p == now),
    })
}

/// The effective config saved by `run`, or defaults when absent.
pub fn config_of_run(dir: &Path) -> Result<ExperimentConfig> {
    let path = dir.join(CONFIG_FILE);
    if !path.exists() {
        return Ok(ExperimentConfig::default());
    }
    let text = read_to_string(&path)?;
    toml::from_str(&text).map_err(|e| HarnessError::toml(&path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMetric {
    Map,
    PrecisionAtK,
}

impl PlotMetric {
    pub fn name(self) -> &'static str {
        match self {
            PlotMetric::Map => "map",
            PlotMetric::PrecisionAtK => "p_at_k",
        }
    }

    fn value(self, r: &RunRecord) -> f64 {
        match self {
            PlotMetric::Map => r.map,
            PlotMetric::PrecisionAtK => r.p_at_k,
        }
    }
}

impl std::str::FromStr for PlotMetric {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "map" => Ok(PlotMetric::Map),
            "p_at_k" => Ok(PlotMetric::PrecisionAtK),
            _ => Err(HarnessError::Config(format!("unknown plot metric `{s}` (expected map or p_at_k)"))),
        }
    }
}

/// One row of a plot series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub dimension: usize,
    pub stat: Stat,
}

fn nearest<T: Copy + PartialOrd>(bins: &[T], x: f64, to_f64: impl Fn(T) -> f64) -> Option<T> {
    let mut sorted: Vec<T> = bins.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut best: Option<(T, f64)> = None;
    for b in sorted {
        let dist = (to_f64(b) - x).abs();
        if best.is_none_or(|(_, d)| dist < d) {
            best = Some((b, dist));
        }
    }
    best.map(|(b, _)| b)
}

fn slug(s: &str) -> String {
    s.replace(|c: char| !(c.is_alphanumeric() || c == '-' || c == '_' || c == '.'), "_")
}

/// Series keyed by (panel, method). Size panels hold graphs whose average
/// degree lies in the configured window, binned by nearest size; degree
/// panels bin by nearest average degree and pool every size. Each point
/// pools all graphs and trials of the panel.
pub fn plot_series(
    records: &[RunRecord],
    config: &ExperimentConfig,
    metric: PlotMetric,
) -> BTreeMap<(String, String), Vec<SeriesPoint>> {
    let [lo, hi] = config.size_panel_degree_range;
    let mut values: BTreeMap<(String, String), BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for r in records {
        let domain = slug(&r.domain.to_string());
        let mut panels = Vec::new();
        if (lo..=hi).contains(&r.avg_degree) {
            if let Some(bin) = nearest(&config.size_bins, r.n as f64, |b| b as f64) {
                panels.push(format!("{domain}-size{bin}"));
            }
        }
        if let Some(bin) = nearest(&config.degree_bins, r.avg_degree, |b| b) {
            panels.push(format!("{domain}-degree{bin}"));
        }
        for panel in panels {
            values
                .entry((panel, r.method.clone()))
                .or_default()
                .entry(r.dimension)
                .or_default()
                .push(metric.value(r));
        }
    }
    values
        .into_iter()
        .map(|(key, by_dim)| {
            let points = by_dim
                .into_iter()
                .map(|(dimension, vs)| SeriesPoint {
                    dimension,
                    stat: Stat::of(&vs),
                })
                .collect();
            (key, points)
        })
        .collect()
}

/// Writes `out/plots/<metric>/<panel>/<method>.csv`, replacing any earlier
/// series for that metric.
pub fn write_plot_series(
    records: &[RunRecord],
    config: &ExperimentConfig,
    metric: PlotMetric,
    out: &Path,
) -> Result<usize> {
    let root = out.join(PLOTS_DIR).join(metric.name());
    if root.exists() {
        std::fs::remove_dir_all(&root).map_err(|e| HarnessError::io(&root, e))?;
    }
    let series = plot_series(records, config, metric);
    for ((panel, method), points) in &series {
        let mut text = String::from("dimension,mean,std\n");
        for p in points {
            writeln!(text, "{},{},{}", p.dimension, p.stat.mean, p.stat.std).unwrap();
        }
        write_file(&root.join(panel).join(format!("{}.csv", slug(method))), text)?;
    }
    Ok(series.len())
}

/// `plot-data --records DIR --metric M`.
pub fn plot_data_from_dir(dir: &Path, metric: PlotMetric) -> Result<usize> {
    let records = read_records(dir)?;
    let config = config_of_run(dir)?;
    write_plot_series(&records, &config, metric, dir)
}
