//! Synthetic corpus plans: which models to run per domain, at which sizes and
//! average degrees, and how each model's parameters are solved for a target
//! mean degree.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geometric::unit_square_within;
use super::{generate, mix_seed, GeneratorKind, GeneratorSpec};
use crate::error::{Error, Result};
use crate::graph::{DomainLabel, Graph};

/// Parameter-free model name used in plans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorModel {
    BarabasiAlbert,
    PowerlawCluster,
    WattsStrogatz,
    DuplicationDivergence,
    RandomGeometric,
    Waxman,
    StochasticBlockModel,
    RMat,
    RandomHyperbolic,
    StochasticKronecker,
}

impl GeneratorModel {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorModel::BarabasiAlbert => "barabasi_albert",
            GeneratorModel::PowerlawCluster => "powerlaw_cluster",
            GeneratorModel::WattsStrogatz => "watts_strogatz",
            GeneratorModel::DuplicationDivergence => "duplication_divergence",
            GeneratorModel::RandomGeometric => "random_geometric",
            GeneratorModel::Waxman => "waxman",
            GeneratorModel::StochasticBlockModel => "stochastic_block_model",
            GeneratorModel::RMat => "r_mat",
            GeneratorModel::RandomHyperbolic => "random_hyperbolic",
            GeneratorModel::StochasticKronecker => "stochastic_kronecker",
        }
    }
}

impl fmt::Display for GeneratorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Model constants that are not derived from the degree target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorKnobs {
    pub sbm_blocks: usize,
    /// `p_in / p_out`.
    pub sbm_in_out_ratio: f64,
    pub watts_strogatz_rewire: f64,
    pub powerlaw_cluster_triad: f64,
    /// Initial Waxman decay length (fraction of the domain diagonal); doubled
    /// until the solved `alpha` is a probability.
    pub waxman_beta: f64,
    pub hyperbolic_alpha: f64,
    pub rmat_probabilities: [f64; 4],
    /// Kronecker initiator shape per domain (`social`, `biology`, ...). The
    /// shape is rescaled to hit the degree target; `default` covers the rest.
    pub kronecker_initiators: BTreeMap<String, [[f64; 2]; 2]>,
}

impl Default for GeneratorKnobs {
    fn default() -> Self {
        let kronecker_initiators = [
            ("social", [[0.99, 0.54], [0.54, 0.13]]),
            ("biology", [[0.90, 0.60], [0.60, 0.10]]),
            ("internet", [[0.99, 0.55], [0.55, 0.26]]),
            ("default", [[0.90, 0.50], [0.50, 0.20]]),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        GeneratorKnobs {
            sbm_blocks: 4,
            sbm_in_out_ratio: 20.0,
            watts_strogatz_rewire: 0.1,
            powerlaw_cluster_triad: 0.5,
            waxman_beta: 0.1,
            hyperbolic_alpha: 1.0,
            rmat_probabilities: [0.57, 0.19, 0.19, 0.05],
            kronecker_initiators,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainPlanEntry {
    pub domain: DomainLabel,
    pub generators: Vec<GeneratorModel>,
}

/// Sizes × average degrees × per-domain models, plus replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainPlan {
    pub sizes: Vec<usize>,
    pub degrees: Vec<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Adds one stochastic Kronecker graph per domain and cell.
    #[serde(default = "default_true")]
    pub include_kronecker: bool,
    pub domains: Vec<DomainPlanEntry>,
    #[serde(default)]
    pub knobs: GeneratorKnobs,
}

fn default_replicates() -> usize {
    1
}

fn default_true() -> bool {
    true
}

impl DomainPlan {
    /// Social, biology and internet domains with three models each.
    pub fn appendix(sizes: Vec<usize>, degrees: Vec<f64>) -> Self {
        use GeneratorModel::*;
        DomainPlan {
            sizes,
            degrees,
            replicates: 1,
            include_kronecker: true,
            domains: vec![
                DomainPlanEntry {
                    domain: DomainLabel::Social,
                    generators: vec![StochasticBlockModel, RandomGeometric, Waxman],
                },
                DomainPlanEntry {
                    domain: DomainLabel::Biology,
                    generators: vec![WattsStrogatz, DuplicationDivergence, RandomHyperbolic],
                },
                DomainPlanEntry {
                    domain: DomainLabel::Internet,
                    generators: vec![BarabasiAlbert, PowerlawCluster, RMat],
                },
            ],
            knobs: GeneratorKnobs::default(),
        }
    }
}

impl Default for DomainPlan {
    fn default() -> Self {
        DomainPlan::appendix(vec![256, 512, 1024], vec![3.0, 4.0, 5.0])
    }
}

/// A solved spec awaiting generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedGraph {
    pub name: String,
    pub domain: DomainLabel,
    pub spec: GeneratorSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub domain: DomainLabel,
    pub spec: GeneratorSpec,
    pub graph: Graph,
}

/// Solves every graph's parameters. Graph `i` in plan order gets the seed
/// `mix_seed([seed, i])`.
pub fn plan_corpus(plan: &DomainPlan, seed: u64) -> Result<Vec<PlannedGraph>> {
    if plan.replicates == 0 {
        return Err(Error::validation("replicates must be at least 1"));
    }
    let mut out = Vec::new();
    for &n in &plan.sizes {
        for &degree in &plan.degrees {
            for entry in &plan.domains {
                let mut models = entry.generators.clone();
                if plan.include_kronecker && !models.contains(&GeneratorModel::StochasticKronecker) {
                    models.push(GeneratorModel::StochasticKronecker);
                }
                for model in models {
                    for rep in 0..plan.replicates {
                        let graph_seed = mix_seed(&[seed, out.len() as u64]);
                        let kind = solve_parameters(
                            model,
                            n,
                            degree,
                            &entry.domain,
                            &plan.knobs,
                            graph_seed,
                        )?;
                        let name = format!(
                            "{}-{}-n{}-k{}-r{}",
                            domain_slug(&entry.domain),
                            model,
                            kind.node_count(),
                            degree,
                            rep
                        );
                        out.push(PlannedGraph {
                            name,
                            domain: entry.domain.clone(),
                            spec: GeneratorSpec::new(kind, graph_seed),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn domain_slug(d: &DomainLabel) -> String {
    d.to_string().replace(':', "_")
}

pub fn build_synthetic_corpus(plan: &DomainPlan, seed: u64) -> Result<Vec<CorpusEntry>> {
    plan_corpus(plan, seed)?
        .into_iter()
        .map(|p| {
            let graph = generate(&p.spec)?;
            Ok(CorpusEntry {
                name: p.name,
                domain: p.domain,
                spec: p.spec,
                graph,
            })
        })
        .collect()
}

fn unsatisfiable(model: GeneratorModel, n: usize, degree: f64, why: &str) -> Error {
    Error::validation(format!(
        "{model}: average degree {degree} is unsatisfiable with n = {n} ({why})"
    ))
}

/// Picks model parameters whose expected average degree is `degree`.
pub fn solve_parameters(
    model: GeneratorModel,
    n: usize,
    degree: f64,
    domain: &DomainLabel,
    knobs: &GeneratorKnobs,
    seed: u64,
) -> Result<GeneratorKind> {
    if !(degree.is_finite() && degree > 0.0) || degree >= (n as f64 - 1.0) {
        return Err(unsatisfiable(model, n, degree, "need 0 < degree < n - 1"));
    }
    let kind = match model {
        GeneratorModel::BarabasiAlbert | GeneratorModel::PowerlawCluster => {
            let m = ((degree / 2.0).round() as usize).max(1);
            if m >= n {
                return Err(unsatisfiable(model, n, degree, "m must stay below n"));
            }
            if model == GeneratorModel::BarabasiAlbert {
                GeneratorKind::BarabasiAlbert { n, m }
            } else {
                GeneratorKind::PowerlawCluster {
                    n,
                    m,
                    p: knobs.powerlaw_cluster_triad,
                }
            }
        }
        GeneratorModel::WattsStrogatz => {
            let k = (2 * (degree / 2.0).round() as usize).max(2);
            if k >= n {
                return Err(unsatisfiable(model, n, degree, "lattice degree must stay below n"));
            }
            GeneratorKind::WattsStrogatz {
                n,
                k,
                p: knobs.watts_strogatz_rewire,
            }
        }
        GeneratorModel::DuplicationDivergence => GeneratorKind::DuplicationDivergence {
            n,
            p_retain: solve_duplication_retention(n, degree, seed)?,
        },
        GeneratorModel::RandomGeometric => {
            let target = degree / (n as f64 - 1.0);
            if target > unit_square_within(1.0) {
                return Err(unsatisfiable(model, n, degree, "radius would exceed the unit square"));
            }
            let radius = bisect(0.0, 1.0, |r| unit_square_within(r) - target);
            GeneratorKind::RandomGeometric { n, radius }
        }
        GeneratorModel::Waxman => {
            let mut beta = knobs.waxman_beta;
            loop {
                let alpha = degree / ((n as f64 - 1.0) * mean_waxman_decay(beta));
                if alpha <= 1.0 {
                    break GeneratorKind::Waxman {
                        n,
                        alpha,
                        beta_w: beta,
                        domain_size: [1.0, 1.0],
                        radius: None,
                    };
                }
                beta *= 2.0;
                if beta > 1e6 {
                    return Err(unsatisfiable(model, n, degree, "no decay length reaches it"));
                }
            }
        }
        GeneratorModel::StochasticBlockModel => {
            let blocks = knobs.sbm_blocks.clamp(1, n);
            let block_sizes: Vec<usize> = (0..blocks)
                .map(|b| n / blocks + usize::from(b < n % blocks))
                .collect();
            let ratio = knobs.sbm_in_out_ratio;
            let weight: f64 = block_sizes
                .iter()
                .map(|&s| s as f64 * ((s as f64 - 1.0) * ratio + (n - s) as f64))
                .sum();
            let p_out = degree * n as f64 / weight;
            let p_in = ratio * p_out;
            if p_in > 1.0 || p_out > 1.0 {
                return Err(unsatisfiable(model, n, degree, "block probabilities exceed 1"));
            }
            GeneratorKind::StochasticBlockModel {
                block_sizes,
                p_in,
                p_out,
            }
        }
        GeneratorModel::RMat => {
            let scale = power_of_two_exponent(n);
            let nodes = 1usize << scale;
            let edge_count = (nodes as f64 * degree / 2.0).round() as usize;
            let [a, b, c, d] = knobs.rmat_probabilities;
            GeneratorKind::RMat {
                scale,
                edge_count,
                a,
                b,
                c,
                d,
            }
        }
        GeneratorModel::RandomHyperbolic => {
            let alpha = knobs.hyperbolic_alpha;
            if alpha <= 0.5 {
                return Err(Error::validation("hyperbolic_alpha must exceed 1/2"));
            }
            // k̄ ≈ 2α²·n·e^{−R/2} / (π(α − ½)²) for the threshold model
            let radius_r =
                2.0 * (2.0 * alpha * alpha * n as f64 / (std::f64::consts::PI * (alpha - 0.5).powi(2) * degree)).ln();
            if !(radius_r > 0.0) {
                return Err(unsatisfiable(model, n, degree, "disk radius would be non-positive"));
            }
            GeneratorKind::RandomHyperbolic {
                n,
                radius_r,
                alpha_h: alpha,
            }
        }
        GeneratorModel::StochasticKronecker => {
            let iterations = power_of_two_exponent(n);
            let shape = knobs
                .kronecker_initiators
                .get(&domain_slug(domain))
                .or_else(|| knobs.kronecker_initiators.get("default"))
                .copied()
                .unwrap_or([[0.9, 0.5], [0.5, 0.2]]);
            GeneratorKind::StochasticKronecker {
                initiator: solve_kronecker_initiator(shape, iterations, degree)?,
                iterations,
            }
        }
    };
    kind.validate()?;
    Ok(kind)
}

fn power_of_two_exponent(n: usize) -> u32 {
    (n.max(2) as f64).log2().round() as u32
}

/// Root of an increasing function on `[lo, hi]`.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `E[exp(−D/(β·√2))]` for two uniform points of the unit square, estimated
/// from a fixed deterministic sample.
fn mean_waxman_decay(beta: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5741_584D_414E);
    let samples = 100_000;
    let scale = beta * std::f64::consts::SQRT_2;
    let total: f64 = (0..samples)
        .map(|_| {
            let dx = rng.random::<f64>() - rng.random::<f64>();
            let dy = rng.random::<f64>() - rng.random::<f64>();
            (-(dx * dx + dy * dy).sqrt() / scale).exp()
        })
        .sum();
    total / samples as f64
}

/// Retention probability whose pilot graphs average `degree`.
fn solve_duplication_retention(n: usize, degree: f64, seed: u64) -> Result<f64> {
    let pilots = 3u64;
    let mean_degree = |p: f64| -> Result<f64> {
        let mut total = 0.0;
        for k in 0..pilots {
            let spec = GeneratorSpec::new(
                GeneratorKind::DuplicationDivergence { n, p_retain: p },
                mix_seed(&[seed, 0xD0D0, k]),
            );
            let g = generate(&spec)?;
            total += 2.0 * g.m() as f64 / n as f64;
        }
        Ok(total / pilots as f64)
    };
    if mean_degree(1.0)? < degree {
        return Err(unsatisfiable(
            GeneratorModel::DuplicationDivergence,
            n,
            degree,
            "even full retention stays sparser",
        ));
    }
    let (mut lo, mut hi) = (0.01f64, 1.0f64);
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        if mean_degree(mid)? < degree {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Expected number of undirected edges of a stochastic Kronecker graph, by
/// enumerating how many index bits fall in each initiator cell.
pub(super) fn kronecker_expected_edges(theta: &[[f64; 2]; 2], iterations: u32) -> f64 {
    let k = iterations as usize;
    let mut log_fact = vec![0.0f64; k + 1];
    for i in 1..=k {
        log_fact[i] = log_fact[i - 1] + (i as f64).ln();
    }
    let mut total = 0.0;
    for c00 in 0..=k {
        for c01 in 0..=k - c00 {
            for c10 in 0..=k - c00 - c01 {
                let c11 = k - c00 - c01 - c10;
                if c01 == 0 && c10 == 0 {
                    continue;
                }
                let mult =
                    (log_fact[k] - log_fact[c00] - log_fact[c01] - log_fact[c10] - log_fact[c11]).exp();
                let pow = |x: f64, e: usize| x.powi(e as i32);
                let p_ij = pow(theta[0][0], c00) * pow(theta[0][1], c01) * pow(theta[1][0], c10) * pow(theta[1][1], c11);
                let p_ji = pow(theta[0][0], c00) * pow(theta[1][0], c01) * pow(theta[0][1], c10) * pow(theta[1][1], c11);
                total += mult * (1.0 - (1.0 - p_ij) * (1.0 - p_ji));
            }
        }
    }
    total / 2.0
}

fn solve_kronecker_initiator(shape: [[f64; 2]; 2], iterations: u32, degree: f64) -> Result<[[f64; 2]; 2]> {
    let nodes = (1usize << iterations) as f64;
    let target = nodes * degree / 2.0;
    let scaled = |s: f64| shape.map(|row| row.map(|x| (x * s).min(1.0)));
    let smallest = shape
        .iter()
        .flatten()
        .copied()
        .filter(|&x| x > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !smallest.is_finite() {
        return Err(Error::validation("Kronecker initiator shape is all zero"));
    }
    let s_max = 1.0 / smallest;
    if kronecker_expected_edges(&scaled(s_max), iterations) < target {
        return Err(unsatisfiable(
            GeneratorModel::StochasticKronecker,
            nodes as usize,
            degree,
            "initiator saturates first",
        ));
    }
    let s = bisect(0.0, s_max, |s| kronecker_expected_edges(&scaled(s), iterations) - target);
    Ok(scaled(s))
}
