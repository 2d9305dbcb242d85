use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::DenseMatrix;

use super::{EmbeddingMethod, EmbeddingResult};

/// Objective values above this abort training as divergent.
const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GfParams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub reg_lambda: f64,
    /// Coordinates start uniform in `±init_scale/√d`.
    pub init_scale: f64,
    /// Halve the learning rate after every this many epochs; 0 keeps it fixed.
    pub lr_halving_every: usize,
}

impl Default for GfParams {
    fn default() -> Self {
        GfParams {
            learning_rate: 0.01,
            epochs: 500,
            reg_lambda: 1e-4,
            init_scale: 0.1,
            lr_halving_every: 100,
        }
    }
}

impl GfParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::validation(format!("gf learning_rate {} must be positive", self.learning_rate)));
        }
        if self.epochs == 0 {
            return Err(Error::validation("gf epochs must be at least 1"));
        }
        if !(self.reg_lambda >= 0.0 && self.reg_lambda.is_finite()) {
            return Err(Error::validation(format!("gf reg_lambda {} must be non-negative", self.reg_lambda)));
        }
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return Err(Error::validation(format!("gf init_scale {} must be positive", self.init_scale)));
        }
        Ok(())
    }
}

/// `½Σ_{(i,j)∈E}(W_ij − ⟨Y_i,Y_j⟩)² + (λ/2)Σ_i‖Y_i‖²`.
pub fn gf_objective(graph: &Graph, y: &DenseMatrix, reg_lambda: f64) -> f64 {
    let fit: f64 = graph
        .edges()
        .iter()
        .map(|&(u, v, w)| {
            let dot: f64 = y.row(u).iter().zip(y.row(v)).map(|(a, b)| a * b).sum();
            (w - dot).powi(2)
        })
        .sum();
    let norm: f64 = y.as_slice().iter().map(|x| x * x).sum();
    0.5 * fit + 0.5 * reg_lambda * norm
}

/// Factorizes the adjacency matrix by stochastic gradient descent over the
/// observed edges. The edge order is shuffled once and then fixed, and each
/// edge carries `λ/deg` of every endpoint's regularizer, so one epoch sweeps
/// the gradient of the full objective exactly once.
pub fn embed_graph_factorization(
    train: &Graph,
    d: usize,
    params: &GfParams,
    seed: u64,
) -> Result<EmbeddingResult> {
    params.validate()?;
    if d == 0 {
        return Err(Error::validation("embedding dimension must be at least 1"));
    }
    let n = train.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = params.init_scale / (d as f64).sqrt();
    let mut y = DenseMatrix::from_fn(n, d, |_, _| rng.random_range(-bound..=bound));
    let mut order: Vec<(usize, usize, f64)> = train.edges().to_vec();
    order.shuffle(&mut rng);
    let reg: Vec<f64> = (0..n)
        .map(|u| match train.degree(u) {
            0 => 0.0,
            k => params.reg_lambda / k as f64,
        })
        .collect();

    let mut log = Vec::with_capacity(params.epochs);
    let mut lr = params.learning_rate;
    let (mut yu, mut yv) = (vec![0.0; d], vec![0.0; d]);
    for epoch in 0..params.epochs {
        if params.lr_halving_every > 0 && epoch > 0 && epoch % params.lr_halving_every == 0 {
            lr *= 0.5;
        }
        for &(u, v, w) in &order {
            yu.copy_from_slice(y.row(u));
            yv.copy_from_slice(y.row(v));
            let err = w - yu.iter().zip(&yv).map(|(a, b)| a * b).sum::<f64>();
            for (k, x) in y.row_mut(u).iter_mut().enumerate() {
                *x += lr * (err * yv[k] - reg[u] * yu[k]);
            }
            for (k, x) in y.row_mut(v).iter_mut().enumerate() {
                *x += lr * (err * yu[k] - reg[v] * yv[k]);
            }
        }
        let objective = gf_objective(train, &y, params.reg_lambda);
        if !objective.is_finite() || objective > DIVERGENCE_LIMIT {
            return Err(Error::numeric(format!(
                "graph factorization diverged at epoch {epoch} (objective {objective}); try a smaller learning rate"
            )));
        }
        log.push(objective);
    }
    let mut result = EmbeddingResult::new(EmbeddingMethod::GraphFactorization, d, y, None, None)?;
    result.training_log = log;
    Ok(result)
}
