//! Candidate-pair ranking shared by heuristics and embeddings.
//!
//! Every predictor is reduced to a symmetric [`ScoreMatrix`]; rankings sort
//! candidates by descending score and break ties by lexicographic pair order.

use std::cmp::Ordering;

use crate::graph::{canonical, Pair};
use crate::split::EdgeSplit;

/// Anything that assigns a symmetric link score to a node pair.
pub trait PairScorer {
    fn n(&self) -> usize;
    fn score(&self, u: usize, v: usize) -> f64;
}

/// Dense symmetric pair scores; the diagonal is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    n: usize,
    data: Vec<f64>,
}

impl ScoreMatrix {
    /// Fills the upper triangle from `f(u, v)` with `u < v` and mirrors it.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for u in 0..n {
            for v in u + 1..n {
                let s = f(u, v);
                data[u * n + v] = s;
                data[v * n + u] = s;
            }
        }
        ScoreMatrix { n, data }
    }

    pub fn from_scorer(scorer: &impl PairScorer) -> Self {
        Self::from_fn(scorer.n(), |u, v| scorer.score(u, v))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl PairScorer for ScoreMatrix {
    fn n(&self) -> usize {
        self.n
    }

    fn score(&self, u: usize, v: usize) -> f64 {
        self.get(u, v)
    }
}

/// Descending score, then ascending pair.
#[inline]
pub fn rank_order(a: &(Pair, f64), b: &(Pair, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

/// All candidate pairs of `split` ranked by `scores`, optionally truncated.
pub fn rank_pairs(split: &EdgeSplit, scores: &ScoreMatrix, top_k: Option<usize>) -> Vec<(Pair, f64)> {
    let mut ranked: Vec<(Pair, f64)> = split
        .candidates()
        .map(|(u, v)| ((u, v), scores.get(u, v)))
        .collect();
    match top_k {
        Some(k) if k < ranked.len() => {
            if k == 0 {
                return Vec::new();
            }
            ranked.select_nth_unstable_by(k - 1, rank_order);
            ranked.truncate(k);
            ranked.sort_unstable_by(rank_order);
        }
        _ => ranked.sort_unstable_by(rank_order),
    }
    ranked
}

/// Candidate pairs incident to `node`, ranked. For a fixed node the
/// lexicographic tie-break reduces to ascending partner id.
pub fn node_ranking(split: &EdgeSplit, scores: &ScoreMatrix, node: usize) -> Vec<Pair> {
    let mut ranked: Vec<(Pair, f64)> = (0..split.n())
        .filter(|&j| split.is_candidate(node, j))
        .map(|j| (canonical(node, j), scores.get(node, j)))
        .collect();
    ranked.sort_by(rank_order);
    ranked.into_iter().map(|(p, _)| p).collect()
}

pub fn per_node_rankings(split: &EdgeSplit, scores: &ScoreMatrix) -> Vec<Vec<Pair>> {
    (0..split.n()).map(|i| node_ranking(split, scores, i)).collect()
}
