//! Ranking metrics, random baselines and GFS aggregation.
//!
//! A GFS score is a method's metric divided by the random predictor's metric
//! on the same graph, averaged per graph (micro), per domain, or over the
//! domain averages (macro).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{canonical, DomainLabel, Pair};
use crate::ranking::ScoreMatrix;
use crate::split::EdgeSplit;

pub const DEFAULT_K: usize = 100;
pub const DEFAULT_BASELINE_TRIALS: usize = 10;
/// Random baselines never drop below this, so GFS ratios stay finite.
pub const BASELINE_FLOOR: f64 = 1e-9;
/// Method id under which random-baseline rows are stored.
pub const BASELINE_METHOD: &str = "random_baseline";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricKind {
    PrecisionAtK(usize),
    Map,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::PrecisionAtK(k) => write!(f, "p_at_{k}"),
            MetricKind::Map => f.write_str("map"),
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "map" {
            return Ok(MetricKind::Map);
        }
        s.strip_prefix("p_at_")
            .and_then(|k| k.parse().ok())
            .filter(|&k| k >= 1)
            .map(MetricKind::PrecisionAtK)
            .ok_or_else(|| Error::validation(format!("unknown metric `{s}`")))
    }
}

/// Which nodes MAP averages over.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapMode {
    /// Every node; nodes without hidden edges contribute 0.
    #[default]
    AllNodes,
    /// Only nodes with at least one hidden edge.
    NodesWithHidden,
}

/// `|ranking[..k] ∩ hidden| / k`; missing slots count as misses.
pub fn precision_at_k(ranking: &[Pair], hidden: &BTreeSet<Pair>, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let hits = ranking.iter().take(k).filter(|&&(u, v)| hidden.contains(&canonical(u, v))).count();
    hits as f64 / k as f64
}

/// Average precision of one ranked list: the mean of P@r over the ranks `r`
/// holding a hit; 0 when nothing is retrieved.
pub fn average_precision(ranking: impl IntoIterator<Item = bool>) -> f64 {
    let (mut hits, mut total) = (0usize, 0.0);
    for (r, hit) in ranking.into_iter().enumerate() {
        if hit {
            hits += 1;
            total += hits as f64 / (r + 1) as f64;
        }
    }
    if hits == 0 { 0.0 } else { total / hits as f64 }
}

/// MAP over per-node rankings; `per_node[i]` lists the candidate pairs
/// incident to node `i`, best first.
pub fn map_score(per_node: &[Vec<Pair>], hidden: &BTreeSet<Pair>, mode: MapMode) -> Result<f64> {
    let mut has_hidden = vec![false; per_node.len()];
    for &(u, v) in hidden {
        for x in [u, v] {
            if x < has_hidden.len() {
                has_hidden[x] = true;
            }
        }
    }
    let mut total = 0.0;
    for (i, ranking) in per_node.iter().enumerate() {
        if let Some(&(u, v)) = ranking.iter().find(|&&(u, v)| u != i && v != i) {
            return Err(Error::validation(format!(
                "ranking of node {i} contains pair ({u}, {v}) not incident to it"
            )));
        }
        if has_hidden[i] {
            total += average_precision(ranking.iter().map(|&(u, v)| hidden.contains(&canonical(u, v))));
        }
    }
    Ok(normalize_map(total, per_node.len(), has_hidden.iter().filter(|&&h| h).count(), mode))
}

fn normalize_map(total: f64, nodes: usize, covered: usize, mode: MapMode) -> f64 {
    let denom = match mode {
        MapMode::AllNodes => nodes,
        MapMode::NodesWithHidden => covered,
    };
    if denom == 0 { 0.0 } else { total / denom as f64 }
}

/// MAP computed directly from pair scores, without materializing rankings.
/// Identical to ranking every node with [`crate::ranking::node_ranking`] and
/// calling [`map_score`].
pub fn map_from_scores(split: &EdgeSplit, scores: &ScoreMatrix, mode: MapMode) -> f64 {
    let n = split.n();
    let mut covered = 0;
    let mut total = 0.0;
    let mut buf: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        let hidden_here = (0..n).filter(|&j| j != i && split.is_hidden(i, j)).count();
        if hidden_here == 0 {
            continue;
        }
        covered += 1;
        buf.clear();
        buf.extend((0..n).filter(|&j| split.is_candidate(i, j)).map(|j| (scores.get(i, j), j)));
        buf.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        total += average_precision(buf.iter().map(|&(_, j)| split.is_hidden(i, j)));
    }
    normalize_map(total, n, covered, mode)
}

/// P@k of the global ranking induced by `scores`.
pub fn precision_from_scores(split: &EdgeSplit, scores: &ScoreMatrix, k: usize) -> f64 {
    let top: Vec<Pair> = crate::ranking::rank_pairs(split, scores, Some(k))
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    precision_at_k(&top, &split.hidden, k)
}

/// Expected metric value of a uniformly random ranking: analytic for P@k,
/// Monte Carlo over `trials` shuffles for MAP. Floored at [`BASELINE_FLOOR`].
pub fn random_baseline(split: &EdgeSplit, metric: MetricKind, trials: usize, seed: u64, mode: MapMode) -> f64 {
    let value = match metric {
        MetricKind::PrecisionAtK(_) => match split.candidate_count() {
            0 => 0.0,
            c => split.hidden.len() as f64 / c as f64,
        },
        MetricKind::Map => {
            let n = split.n();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sum = 0.0;
            let trials = trials.max(1);
            for _ in 0..trials {
                let mut covered = 0;
                let mut total = 0.0;
                for i in 0..n {
                    let mut ranking: Vec<usize> = (0..n).filter(|&j| split.is_candidate(i, j)).collect();
                    if !ranking.iter().any(|&j| split.is_hidden(i, j)) {
                        continue;
                    }
                    covered += 1;
                    ranking.shuffle(&mut rng);
                    total += average_precision(ranking.iter().map(|&j| split.is_hidden(i, j)));
                }
                sum += normalize_map(total, n, covered, mode);
            }
            sum / trials as f64
        }
    };
    value.max(BASELINE_FLOOR)
}

/// One metric measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub graph: String,
    pub method: String,
    pub dimension: usize,
    pub trial: usize,
    pub kind: MetricKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GfsEntry {
    pub micro: f64,
    pub macro_: f64,
    pub per_domain: BTreeMap<String, f64>,
    /// Per-graph ratio `e(g, method) / e(g, random)`, averaged over trials.
    pub ratios: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GfsReport {
    /// Keyed by `(method, metric)`.
    pub entries: BTreeMap<(String, MetricKind), GfsEntry>,
    /// Graph count per domain.
    pub domain_counts: BTreeMap<String, usize>,
}

impl GfsReport {
    pub fn get(&self, method: &str, metric: MetricKind) -> Option<&GfsEntry> {
        self.entries.get(&(method.to_string(), metric))
    }
}

/// Aggregates metric rows into GFS scores. Baseline rows use the method id
/// [`BASELINE_METHOD`] and are matched by `(graph, metric, trial)`; the
/// dimension of a baseline row is ignored.
pub fn gfs_scores(rows: &[MetricValue], domains: &BTreeMap<String, DomainLabel>) -> Result<GfsReport> {
    let mut baselines: BTreeMap<(&str, MetricKind, usize), f64> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.method == BASELINE_METHOD) {
        baselines.insert((r.graph.as_str(), r.kind, r.trial), r.value.max(BASELINE_FLOOR));
    }
    // (method, metric) -> graph -> ratios over trials
    let mut grouped: BTreeMap<(String, MetricKind), BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    let mut sorted: Vec<&MetricValue> = rows.iter().filter(|r| r.method != BASELINE_METHOD).collect();
    sorted.sort_by(|a, b| {
        (&a.graph, &a.method, a.dimension, a.trial, a.kind).cmp(&(&b.graph, &b.method, b.dimension, b.trial, b.kind))
    });
    for r in sorted {
        let base = baselines.get(&(r.graph.as_str(), r.kind, r.trial)).ok_or_else(|| {
            Error::validation(format!(
                "graph `{}` has no random baseline for {} in trial {}",
                r.graph, r.kind, r.trial
            ))
        })?;
        grouped
            .entry((r.method.clone(), r.kind))
            .or_default()
            .entry(r.graph.clone())
            .or_default()
            .push(r.value / base);
    }

    let domain_of = |g: &str| -> Result<String> {
        domains
            .get(g)
            .map(|d| d.to_string())
            .ok_or_else(|| Error::validation(format!("graph `{g}` has no domain label")))
    };
    let mut report = GfsReport::default();
    let all_graphs: BTreeSet<&String> = rows.iter().map(|r| &r.graph).collect();
    for g in all_graphs {
        *report.domain_counts.entry(domain_of(g)?).or_default() += 1;
    }
    for (key, per_graph) in grouped {
        let ratios: BTreeMap<String, f64> = per_graph
            .into_iter()
            .map(|(g, rs)| {
                let mean = rs.iter().sum::<f64>() / rs.len() as f64;
                (g, mean)
            })
            .collect();
        let mut by_domain: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (g, &r) in &ratios {
            by_domain.entry(domain_of(g)?).or_default().push(r);
        }
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        let micro = mean(&ratios.values().copied().collect::<Vec<_>>());
        let per_domain: BTreeMap<String, f64> = by_domain.iter().map(|(d, rs)| (d.clone(), mean(rs))).collect();
        let macro_ = mean(&per_domain.values().copied().collect::<Vec<_>>());
        report.entries.insert(
            key,
            GfsEntry {
                micro,
                macro_,
                per_domain,
                ratios,
            },
        );
    }
    Ok(report)
}
