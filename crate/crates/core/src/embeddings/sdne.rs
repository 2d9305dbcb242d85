//! Structural deep network embedding: a sigmoid autoencoder over adjacency
//! rows with a first-order proximity penalty on the bottleneck.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::{gemm, DenseMatrix};

use super::{EmbeddingMethod, EmbeddingResult};

/// Graphs up to this many nodes train on the full batch every step.
pub const FULL_BATCH_LIMIT: usize = 1024;

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SdneParams {
    pub hidden_layers: Vec<usize>,
    /// Weight of the first-order (neighbor distance) term.
    pub alpha: f64,
    /// Reconstruction weight on observed edges.
    pub beta_penalty: f64,
    /// L2 weight on all kernels.
    pub reg_nu: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Rows per step when the graph exceeds [`FULL_BATCH_LIMIT`].
    pub batch_size: usize,
}

impl Default for SdneParams {
    fn default() -> Self {
        SdneParams {
            hidden_layers: vec![128],
            alpha: 1e-5,
            beta_penalty: 5.0,
            reg_nu: 1e-4,
            learning_rate: 0.01,
            epochs: 200,
            batch_size: 64,
        }
    }
}

impl SdneParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Error::validation(format!("sdne {what} {v} is out of range"));
        if self.hidden_layers.contains(&0) {
            return Err(Error::validation("sdne hidden layers must have at least one unit"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(bad("alpha", self.alpha));
        }
        if !(self.beta_penalty > 1.0 && self.beta_penalty.is_finite()) {
            return Err(bad("beta_penalty", self.beta_penalty));
        }
        if !(self.reg_nu >= 0.0 && self.reg_nu.is_finite()) {
            return Err(bad("reg_nu", self.reg_nu));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(bad("learning_rate", self.learning_rate));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::validation("sdne epochs and batch_size must be at least 1"));
        }
        Ok(())
    }
}

/// Layer layout `n → hidden… → d → …hidden → n`. Parameters live in one flat
/// vector: per layer an `in × out` kernel (row-major) followed by the bias.
#[derive(Debug, Clone, PartialEq)]
pub struct SdneNetwork {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    embed_layer: usize,
}

struct Forward {
    /// `acts[l]` is the output of layer `l` (1-based; index 0 unused).
    acts: Vec<DenseMatrix>,
}

impl SdneNetwork {
    pub fn new(n: usize, d: usize, hidden: &[usize]) -> Result<Self> {
        if d == 0 || d > n {
            return Err(Error::Bounds { index: d, limit: n });
        }
        if let Some(&smallest) = hidden.iter().min() {
            if d > smallest {
                return Err(Error::validation(format!(
                    "embedding dimension {d} exceeds the smallest hidden layer ({smallest})"
                )));
            }
        }
        let mut sizes = vec![n];
        sizes.extend_from_slice(hidden);
        sizes.push(d);
        sizes.extend(hidden.iter().rev());
        sizes.push(n);
        let mut offsets = vec![0];
        for l in 1..sizes.len() {
            let last = *offsets.last().unwrap();
            offsets.push(last + sizes[l - 1] * sizes[l] + sizes[l]);
        }
        Ok(SdneNetwork {
            sizes,
            offsets,
            embed_layer: hidden.len() + 1,
        })
    }

    pub fn layer_count(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn param_count(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn kernel_range(&self, l: usize) -> std::ops::Range<usize> {
        let start = self.offsets[l - 1];
        start..start + self.sizes[l - 1] * self.sizes[l]
    }

    fn bias_range(&self, l: usize) -> std::ops::Range<usize> {
        let end = self.offsets[l];
        end - self.sizes[l]..end
    }

    fn kernel(&self, theta: &[f64], l: usize) -> DenseMatrix {
        DenseMatrix::from_vec(self.sizes[l - 1], self.sizes[l], theta[self.kernel_range(l)].to_vec())
            .expect("layout matches")
    }

    /// Xavier-uniform kernels, zero biases.
    pub fn init(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut theta = vec![0.0; self.param_count()];
        for l in 1..self.sizes.len() {
            let bound = (6.0 / (self.sizes[l - 1] + self.sizes[l]) as f64).sqrt();
            for x in &mut theta[self.kernel_range(l)] {
                *x = rng.random_range(-bound..=bound);
            }
        }
        theta
    }

    fn forward(&self, graph: &Graph, theta: &[f64], rows: &[usize]) -> Forward {
        let b = rows.len();
        let mut acts = vec![DenseMatrix::zeros(0, 0)];
        // The first layer reads sparse adjacency rows directly.
        let k1 = &theta[self.kernel_range(1)];
        let bias1 = &theta[self.bias_range(1)];
        let width = self.sizes[1];
        let mut z = DenseMatrix::zeros(b, width);
        for (bi, &i) in rows.iter().enumerate() {
            let out = z.row_mut(bi);
            out.copy_from_slice(bias1);
            for (&j, &w) in graph.neighbors(i).iter().zip(graph.neighbor_weights(i)) {
                for (o, k) in out.iter_mut().zip(&k1[j * width..(j + 1) * width]) {
                    *o += w * k;
                }
            }
        }
        sigmoid_in_place(&mut z);
        acts.push(z);
        for l in 2..self.sizes.len() {
            let bias = &theta[self.bias_range(l)];
            let mut z = DenseMatrix::from_fn(b, self.sizes[l], |_, c| bias[c]);
            gemm(1.0, &acts[l - 1], false, &self.kernel(theta, l), false, 1.0, &mut z);
            sigmoid_in_place(&mut z);
            acts.push(z);
        }
        Forward { acts }
    }

    /// Loss restricted to `rows`: reconstruction of those adjacency rows, the
    /// first-order term over edges with both endpoints in `rows`, and the
    /// kernel penalty.
    pub fn loss(&self, graph: &Graph, params: &SdneParams, theta: &[f64], rows: &[usize]) -> f64 {
        self.evaluate(graph, params, theta, rows, false).0
    }

    pub fn loss_and_grad(
        &self,
        graph: &Graph,
        params: &SdneParams,
        theta: &[f64],
        rows: &[usize],
    ) -> (f64, Vec<f64>) {
        let (loss, grad) = self.evaluate(graph, params, theta, rows, true);
        (loss, grad.expect("requested"))
    }

    fn evaluate(
        &self,
        graph: &Graph,
        params: &SdneParams,
        theta: &[f64],
        rows: &[usize],
        want_grad: bool,
    ) -> (f64, Option<Vec<f64>>) {
        let n = graph.n();
        let layers = self.layer_count();
        let fwd = self.forward(graph, theta, rows);
        let out = &fwd.acts[layers];
        let b = rows.len();

        // Reconstruction: Σ ((x̂ − x)⊙B)²; the output gradient is 2(x̂ − x)⊙B².
        let mut loss = 0.0;
        let mut g = DenseMatrix::zeros(b, n);
        for (bi, &i) in rows.iter().enumerate() {
            let xr = out.row(bi);
            let gr = g.row_mut(bi);
            for j in 0..n {
                gr[j] = xr[j];
            }
            let mut row_loss: f64 = xr.iter().map(|x| x * x).sum();
            for (&j, &w) in graph.neighbors(i).iter().zip(graph.neighbor_weights(i)) {
                let x = xr[j];
                row_loss -= x * x;
                let diff = (x - w) * params.beta_penalty;
                row_loss += diff * diff;
                gr[j] = diff * params.beta_penalty;
            }
            loss += row_loss;
            gr.iter_mut().for_each(|x| *x *= 2.0);
        }

        // First-order proximity on the bottleneck.
        let y = &fwd.acts[self.embed_layer];
        let mut gy = DenseMatrix::zeros(b, y.cols());
        if params.alpha > 0.0 {
            let mut local = vec![usize::MAX; n];
            for (bi, &i) in rows.iter().enumerate() {
                local[i] = bi;
            }
            for &(i, j, w) in graph.edges() {
                let (bi, bj) = (local[i], local[j]);
                if bi == usize::MAX || bj == usize::MAX {
                    continue;
                }
                for c in 0..y.cols() {
                    let diff = y[(bi, c)] - y[(bj, c)];
                    loss += params.alpha * w * diff * diff;
                    gy[(bi, c)] += 2.0 * params.alpha * w * diff;
                    gy[(bj, c)] -= 2.0 * params.alpha * w * diff;
                }
            }
        }

        for l in 1..=layers {
            loss += params.reg_nu * theta[self.kernel_range(l)].iter().map(|x| x * x).sum::<f64>();
        }
        if !want_grad {
            return (loss, None);
        }

        let mut grad = vec![0.0; self.param_count()];
        for l in (1..=layers).rev() {
            if l == self.embed_layer {
                for (a, c) in g.as_mut_slice().iter_mut().zip(gy.as_slice()) {
                    *a += c;
                }
            }
            let act = &fwd.acts[l];
            let mut delta = g;
            for (dlt, a) in delta.as_mut_slice().iter_mut().zip(act.as_slice()) {
                *dlt *= a * (1.0 - a);
            }
            let bias_grad = &mut grad[self.bias_range(l)];
            for r in 0..b {
                for (bg, dv) in bias_grad.iter_mut().zip(delta.row(r)) {
                    *bg += dv;
                }
            }
            let width = self.sizes[l];
            let kr = self.kernel_range(l);
            if l == 1 {
                let kg = &mut grad[kr.clone()];
                for (bi, &i) in rows.iter().enumerate() {
                    let dr = delta.row(bi);
                    for (&j, &w) in graph.neighbors(i).iter().zip(graph.neighbor_weights(i)) {
                        for (k, dv) in kg[j * width..(j + 1) * width].iter_mut().zip(dr) {
                            *k += w * dv;
                        }
                    }
                }
                g = DenseMatrix::zeros(0, 0);
            } else {
                let kernel = self.kernel(theta, l);
                let mut kg = DenseMatrix::zeros(self.sizes[l - 1], width);
                gemm(1.0, &fwd.acts[l - 1], true, &delta, false, 0.0, &mut kg);
                grad[kr.clone()].copy_from_slice(kg.as_slice());
                let mut prev = DenseMatrix::zeros(b, self.sizes[l - 1]);
                gemm(1.0, &delta, false, &kernel, true, 0.0, &mut prev);
                g = prev;
            }
            for (gk, k) in grad[kr.clone()].iter_mut().zip(&theta[kr]) {
                *gk += 2.0 * params.reg_nu * k;
            }
        }
        (loss, Some(grad))
    }

    /// Bottleneck coordinates and reconstructed adjacency for every node.
    pub fn encode_all(&self, graph: &Graph, theta: &[f64]) -> (DenseMatrix, DenseMatrix) {
        let rows: Vec<usize> = (0..graph.n()).collect();
        let mut fwd = self.forward(graph, theta, &rows);
        let out = fwd.acts.pop().expect("network has layers");
        (fwd.acts.swap_remove(self.embed_layer), out)
    }
}

fn sigmoid_in_place(m: &mut DenseMatrix) {
    for x in m.as_mut_slice() {
        *x = 1.0 / (1.0 + (-*x).exp());
    }
}

/// Trains the autoencoder with Adam: one full-batch step per epoch up to
/// [`FULL_BATCH_LIMIT`] nodes, shuffled mini-batches of rows beyond.
pub fn embed_sdne(train: &Graph, d: usize, params: &SdneParams, seed: u64) -> Result<EmbeddingResult> {
    let n = train.n();
    let batch = if n <= FULL_BATCH_LIMIT { n } else { params.batch_size.min(n) };
    train_sdne(train, d, params, seed, batch)
}

fn train_sdne(train: &Graph, d: usize, params: &SdneParams, seed: u64, batch: usize) -> Result<EmbeddingResult> {
    params.validate()?;
    let n = train.n();
    let net = SdneNetwork::new(n, d, &params.hidden_layers)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = net.init(&mut rng);
    let mut m = vec![0.0; theta.len()];
    let mut v = vec![0.0; theta.len()];
    let mut step = 0i32;
    let mut order: Vec<usize> = (0..n).collect();
    let mut log = Vec::with_capacity(params.epochs);
    for epoch in 0..params.epochs {
        if batch < n {
            order.shuffle(&mut rng);
        }
        let mut epoch_loss = 0.0;
        for rows in order.chunks(batch) {
            let (loss, grad) = net.loss_and_grad(train, params, &theta, rows);
            if !loss.is_finite() {
                return Err(Error::numeric(format!("sdne loss became non-finite at epoch {epoch}")));
            }
            epoch_loss += loss;
            step += 1;
            let c1 = 1.0 - ADAM_BETA1.powi(step);
            let c2 = 1.0 - ADAM_BETA2.powi(step);
            for i in 0..theta.len() {
                m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * grad[i];
                v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * grad[i] * grad[i];
                theta[i] -= params.learning_rate * (m[i] / c1) / ((v[i] / c2).sqrt() + ADAM_EPS);
            }
        }
        log.push(epoch_loss);
    }
    let (y, recon) = net.encode_all(train, &theta);
    let mut result = EmbeddingResult::new(EmbeddingMethod::Sdne, d, y, None, Some(recon))?;
    result.training_log = log;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::finite_diff_grad_check;

    fn small_params() -> SdneParams {
        SdneParams {
            hidden_layers: vec![8],
            alpha: 0.3,
            reg_nu: 0.01,
            ..SdneParams::default()
        }
    }

    fn six_nodes() -> Graph {
        Graph::from_weighted_edges(6, [(0, 1, 1.0), (1, 2, 2.0), (2, 0, 1.0), (2, 3, 0.5), (3, 4, 1.0), (4, 5, 1.0)])
            .unwrap()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let g = six_nodes();
        let params = small_params();
        let net = SdneNetwork::new(6, 2, &params.hidden_layers).unwrap();
        let theta = net.init(&mut ChaCha8Rng::seed_from_u64(1));
        for rows in [vec![0, 1, 2, 3, 4, 5], vec![4, 1, 2]] {
            let (_, grad) = net.loss_and_grad(&g, &params, &theta, &rows);
            let err = finite_diff_grad_check(|t| net.loss(&g, &params, t, &rows), &grad, &theta, 1e-5).unwrap();
            assert!(err < 1e-4, "relative error {err}");
        }
    }

    #[test]
    fn layout_counts_parameters() {
        let net = SdneNetwork::new(10, 2, &[4]).unwrap();
        // 10→4→2→4→10
        assert_eq!(net.param_count(), (40 + 4) + (8 + 2) + (8 + 4) + (40 + 10));
        assert!(SdneNetwork::new(10, 5, &[4]).is_err());
        assert!(SdneNetwork::new(3, 4, &[]).is_err());
    }

    #[test]
    fn fits_complete_graph_reconstruction() {
        let g = Graph::from_edges(4, (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v)))).unwrap();
        let params = SdneParams {
            hidden_layers: vec![4],
            alpha: 0.0,
            reg_nu: 0.0,
            epochs: 1000,
            ..SdneParams::default()
        };
        let e = embed_sdne(&g, 4, &params, 2).unwrap();
        let log = &e.training_log;
        assert!(log.last().unwrap() < &(0.1 * log[0]), "{} vs {}", log.last().unwrap(), log[0]);
    }

    #[test]
    fn deterministic_per_seed() {
        let g = six_nodes();
        let params = SdneParams { epochs: 5, ..small_params() };
        let a = embed_sdne(&g, 2, &params, 4).unwrap();
        assert_eq!(a, embed_sdne(&g, 2, &params, 4).unwrap());
        assert_ne!(a.y(), embed_sdne(&g, 2, &params, 5).unwrap().y());
        assert_eq!(a.training_log.len(), 5);
    }

    #[test]
    fn mini_batches_cover_every_row() {
        let g = six_nodes();
        let params = SdneParams { epochs: 300, ..small_params() };
        let e = train_sdne(&g, 2, &params, 8, 4).unwrap();
        assert_eq!(e, train_sdne(&g, 2, &params, 8, 4).unwrap());
        assert!(e.training_log.last().unwrap() < &e.training_log[0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = six_nodes();
        let wide = SdneParams { hidden_layers: vec![2], ..small_params() };
        assert!(matches!(embed_sdne(&g, 3, &wide, 0), Err(Error::Validation(_))));
        let flat = SdneParams { beta_penalty: 1.0, ..small_params() };
        assert!(embed_sdne(&g, 2, &flat, 0).is_err());
    }
}
