//! Seeded synthetic graph models, random-walk sampling and corpus plans.
//!
//! Every model is a pure function of its [`GeneratorSpec`]: the same spec and
//! seed always produce the same graph.

mod corpus;
mod geometric;
mod growth;
mod recursive;
mod sampling;

pub use corpus::{
    build_synthetic_corpus, plan_corpus, CorpusEntry, DomainPlan, DomainPlanEntry,
    GeneratorKnobs, GeneratorModel, PlannedGraph, solve_parameters,
};
pub use sampling::isrw_sample;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest node count any model may produce.
pub const MAX_NODES: usize = 1 << 13;

/// Model selection plus parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GeneratorKind {
    BarabasiAlbert {
        n: usize,
        m: usize,
    },
    PowerlawCluster {
        n: usize,
        m: usize,
        p: f64,
    },
    WattsStrogatz {
        n: usize,
        k: usize,
        p: f64,
    },
    DuplicationDivergence {
        n: usize,
        p_retain: f64,
    },
    /// Nodes uniform on the unit square.
    RandomGeometric {
        n: usize,
        radius: f64,
    },
    /// Connection probability `alpha·exp(−dist/(beta_w·L))` with `L` the largest
    /// pairwise distance, restricted to pairs within `radius` when one is given.
    Waxman {
        n: usize,
        alpha: f64,
        beta_w: f64,
        domain_size: [f64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    StochasticBlockModel {
        block_sizes: Vec<usize>,
        p_in: f64,
        p_out: f64,
    },
    /// `2^scale` nodes; quadrant probabilities `a, b, c, d`.
    RMat {
        scale: u32,
        edge_count: usize,
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
    RandomHyperbolic {
        n: usize,
        radius_r: f64,
        alpha_h: f64,
    },
    /// `2^iterations` nodes.
    StochasticKronecker {
        initiator: [[f64; 2]; 2],
        iterations: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        GeneratorSpec { kind, seed }
    }
}

impl GeneratorKind {
    pub fn model(&self) -> GeneratorModel {
        match self {
            GeneratorKind::BarabasiAlbert { .. } => GeneratorModel::BarabasiAlbert,
            GeneratorKind::PowerlawCluster { .. } => GeneratorModel::PowerlawCluster,
            GeneratorKind::WattsStrogatz { .. } => GeneratorModel::WattsStrogatz,
            GeneratorKind::DuplicationDivergence { .. } => GeneratorModel::DuplicationDivergence,
            GeneratorKind::RandomGeometric { .. } => GeneratorModel::RandomGeometric,
            GeneratorKind::Waxman { .. } => GeneratorModel::Waxman,
            GeneratorKind::StochasticBlockModel { .. } => GeneratorModel::StochasticBlockModel,
            GeneratorKind::RMat { .. } => GeneratorModel::RMat,
            GeneratorKind::RandomHyperbolic { .. } => GeneratorModel::RandomHyperbolic,
            GeneratorKind::StochasticKronecker { .. } => GeneratorModel::StochasticKronecker,
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            GeneratorKind::BarabasiAlbert { n, .. }
            | GeneratorKind::PowerlawCluster { n, .. }
            | GeneratorKind::WattsStrogatz { n, .. }
            | GeneratorKind::DuplicationDivergence { n, .. }
            | GeneratorKind::RandomGeometric { n, .. }
            | GeneratorKind::Waxman { n, .. }
            | GeneratorKind::RandomHyperbolic { n, .. } => n,
            GeneratorKind::StochasticBlockModel { ref block_sizes, .. } => block_sizes.iter().sum(),
            GeneratorKind::RMat { scale, .. } => 1usize.checked_shl(scale).unwrap_or(usize::MAX),
            GeneratorKind::StochasticKronecker { iterations, .. } => {
                1usize.checked_shl(iterations).unwrap_or(usize::MAX)
            }
        }
    }

    /// Checks every parameter bound, naming the first violated one.
    pub fn validate(&self) -> Result<()> {
        let n = self.node_count();
        if n == 0 || n > MAX_NODES {
            return Err(bound(format!("node count {n} must lie in 1..={MAX_NODES}")));
        }
        match *self {
            GeneratorKind::BarabasiAlbert { n, m } => {
                if m < 1 || m >= n {
                    return Err(bound(format!("BarabasiAlbert needs 1 <= m < n (m={m}, n={n})")));
                }
            }
            GeneratorKind::PowerlawCluster { n, m, p } => {
                if m < 1 || m >= n {
                    return Err(bound(format!("PowerlawCluster needs 1 <= m < n (m={m}, n={n})")));
                }
                probability("PowerlawCluster p", p)?;
            }
            GeneratorKind::WattsStrogatz { n, k, p } => {
                if k % 2 != 0 || k >= n {
                    return Err(bound(format!("WattsStrogatz needs even k < n (k={k}, n={n})")));
                }
                probability("WattsStrogatz p", p)?;
            }
            GeneratorKind::DuplicationDivergence { n, p_retain } => {
                if n < 2 {
                    return Err(bound("DuplicationDivergence needs n >= 2"));
                }
                probability("DuplicationDivergence p_retain", p_retain)?;
                if p_retain == 0.0 {
                    return Err(bound("DuplicationDivergence p_retain must be > 0"));
                }
            }
            GeneratorKind::RandomGeometric { radius, .. } => {
                if !(radius.is_finite() && radius >= 0.0) {
                    return Err(bound(format!("RandomGeometric radius {radius} must be >= 0")));
                }
            }
            GeneratorKind::Waxman {
                alpha,
                beta_w,
                domain_size,
                radius,
                ..
            } => {
                probability("Waxman alpha", alpha)?;
                if !(beta_w.is_finite() && beta_w > 0.0) {
                    return Err(bound(format!("Waxman beta_w {beta_w} must be > 0")));
                }
                if domain_size.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
                    return Err(bound("Waxman domain_size entries must be > 0"));
                }
                if let Some(r) = radius {
                    if r.is_nan() || r < 0.0 {
                        return Err(bound(format!("Waxman radius {r} must be >= 0")));
                    }
                }
            }
            GeneratorKind::StochasticBlockModel {
                ref block_sizes,
                p_in,
                p_out,
            } => {
                if block_sizes.is_empty() || block_sizes.contains(&0) {
                    return Err(bound("StochasticBlockModel blocks must be non-empty"));
                }
                probability("StochasticBlockModel p_in", p_in)?;
                probability("StochasticBlockModel p_out", p_out)?;
            }
            GeneratorKind::RMat {
                edge_count,
                a,
                b,
                c,
                d,
                ..
            } => {
                for (name, x) in [("a", a), ("b", b), ("c", c), ("d", d)] {
                    probability(&format!("RMat {name}"), x)?;
                }
                if ((a + b + c + d) - 1.0).abs() > 1e-9 {
                    return Err(bound(format!("RMat a+b+c+d = {} must equal 1", a + b + c + d)));
                }
                let capacity = n * (n - 1) / 2;
                if edge_count > capacity {
                    return Err(Error::Capacity(format!(
                        "RMat cannot place {edge_count} distinct edges among {n} nodes (max {capacity})"
                    )));
                }
            }
            GeneratorKind::RandomHyperbolic {
                radius_r, alpha_h, ..
            } => {
                if !(radius_r.is_finite() && radius_r > 0.0) {
                    return Err(bound(format!("RandomHyperbolic radius_r {radius_r} must be > 0")));
                }
                if !(alpha_h.is_finite() && alpha_h > 0.0) {
                    return Err(bound(format!("RandomHyperbolic alpha_h {alpha_h} must be > 0")));
                }
            }
            GeneratorKind::StochasticKronecker { initiator, .. } => {
                for row in initiator {
                    for p in row {
                        probability("StochasticKronecker initiator entry", p)?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn bound(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

fn probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(bound(format!("{name} = {p} is not a probability")))
    }
}

/// Realizes a spec as a simple undirected graph.
pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    spec.kind.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rng = &mut rng;
    match spec.kind {
        GeneratorKind::BarabasiAlbert { n, m } => growth::barabasi_albert(n, m, rng),
        GeneratorKind::PowerlawCluster { n, m, p } => growth::powerlaw_cluster(n, m, p, rng),
        GeneratorKind::WattsStrogatz { n, k, p } => growth::watts_strogatz(n, k, p, rng),
        GeneratorKind::DuplicationDivergence { n, p_retain } => {
            growth::duplication_divergence(n, p_retain, rng)
        }
        GeneratorKind::RandomGeometric { n, radius } => geometric::random_geometric(n, radius, rng),
        GeneratorKind::Waxman {
            n,
            alpha,
            beta_w,
            domain_size,
            radius,
        } => geometric::waxman(n, alpha, beta_w, domain_size, radius, rng),
        GeneratorKind::StochasticBlockModel {
            ref block_sizes,
            p_in,
            p_out,
        } => recursive::stochastic_block_model(block_sizes, p_in, p_out, rng),
        GeneratorKind::RMat {
            scale,
            edge_count,
            a,
            b,
            c,
            d,
        } => recursive::rmat(scale, edge_count, [a, b, c, d], rng),
        GeneratorKind::RandomHyperbolic {
            n,
            radius_r,
            alpha_h,
        } => geometric::random_hyperbolic(n, radius_r, alpha_h, rng),
        GeneratorKind::StochasticKronecker {
            initiator,
            iterations,
        } => recursive::stochastic_kronecker(initiator, iterations, rng),
    }
}

/// SplitMix64 finalizer chained over `parts`; stable across builds and platforms.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    for &p in parts {
        state ^= p;
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        state = z ^ (z >> 31);
    }
    // keep seeds representable as signed 64-bit integers in text formats
    state & (i64::MAX as u64)
}
