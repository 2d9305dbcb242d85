//! Block and recursive-matrix models: SBM, R-Mat and stochastic Kronecker.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{canonical, Graph};

/// Nodes are numbered block by block.
pub(super) fn stochastic_block_model(
    block_sizes: &[usize],
    p_in: f64,
    p_out: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Graph> {
    let block: Vec<usize> = block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    let n = block.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if block[u] == block[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Places exactly `edge_count` distinct undirected edges on `2^scale` nodes by
/// recursive quadrant descent, redrawing self-loops and repeats.
pub(super) fn rmat(
    scale: u32,
    edge_count: usize,
    probs: [f64; 4],
    rng: &mut ChaCha8Rng,
) -> Result<Graph> {
    let n = 1usize << scale;
    let cumulative = [probs[0], probs[0] + probs[1], probs[0] + probs[1] + probs[2]];
    let max_attempts = 1000 * edge_count.max(1) + 1_000_000;
    let mut edges = BTreeSet::new();
    let mut attempts = 0;
    while edges.len() < edge_count {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Capacity(format!(
                "R-Mat placed only {} of {edge_count} distinct edges in {max_attempts} draws",
                edges.len()
            )));
        }
        let (mut row, mut col) = (0usize, 0usize);
        for level in (0..scale).rev() {
            let x: f64 = rng.random();
            let (r, c) = if x < cumulative[0] {
                (0, 0)
            } else if x < cumulative[1] {
                (0, 1)
            } else if x < cumulative[2] {
                (1, 0)
            } else {
                (1, 1)
            };
            row |= r << level;
            col |= c << level;
        }
        if row != col {
            edges.insert(canonical(row, col));
        }
    }
    Graph::from_edges(n, edges)
}

/// Probability of cell `(i, j)` in the `iterations`-fold Kronecker power of
/// the initiator; bit `b` of each index selects the initiator entry used at
/// level `b`.
pub(super) fn kronecker_cell(initiator: &[[f64; 2]; 2], iterations: u32, i: usize, j: usize) -> f64 {
    (0..iterations).fold(1.0, |acc, b| {
        acc * initiator[(i >> b) & 1][(j >> b) & 1]
    })
}

/// One Bernoulli draw per off-diagonal cell of the dense probability matrix;
/// a pair is linked when either orientation fires.
pub(super) fn stochastic_kronecker(
    initiator: [[f64; 2]; 2],
    iterations: u32,
    rng: &mut ChaCha8Rng,
) -> Result<Graph> {
    let n = 1usize << iterations;
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let p = kronecker_cell(&initiator, iterations, i, j);
            if rng.random::<f64>() < p {
                edges.insert(canonical(i, j));
            }
        }
    }
    Graph::from_edges(n, edges)
}
