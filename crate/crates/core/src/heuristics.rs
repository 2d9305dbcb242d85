//! Neighborhood link-prediction heuristics and the random predictor.
//!
//! All scores ignore edge weights and use train-graph degrees only.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_node, Error, Result};
use crate::graph::{sorted_intersection_count, Graph, Pair};
use crate::ranking::{rank_pairs, ScoreMatrix};
use crate::split::EdgeSplit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicKind {
    PreferentialAttachment,
    CommonNeighbors,
    AdamicAdar,
    JaccardCoefficient,
    Random,
}

impl HeuristicKind {
    pub const ALL: [HeuristicKind; 5] = [
        HeuristicKind::PreferentialAttachment,
        HeuristicKind::CommonNeighbors,
        HeuristicKind::AdamicAdar,
        HeuristicKind::JaccardCoefficient,
        HeuristicKind::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HeuristicKind::PreferentialAttachment => "pa",
            HeuristicKind::CommonNeighbors => "cn",
            HeuristicKind::AdamicAdar => "aa",
            HeuristicKind::JaccardCoefficient => "jc",
            HeuristicKind::Random => "random",
        }
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeuristicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HeuristicKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::validation(format!("unknown heuristic `{s}`")))
    }
}

/// Deterministic score of one pair. `Random` is not a function of the pair and
/// is only available through [`score_matrix`].
pub fn heuristic_score(kind: HeuristicKind, train: &Graph, u: usize, v: usize) -> Result<f64> {
    check_node(u, train.n())?;
    check_node(v, train.n())?;
    if u == v {
        return Err(Error::validation(format!("pair ({u}, {v}) is not two distinct nodes")));
    }
    match kind {
        HeuristicKind::Random => Err(Error::validation(
            "the random predictor draws from a split-scoped stream; use score_matrix",
        )),
        _ => Ok(pair_score(kind, train, u, v)),
    }
}

fn pair_score(kind: HeuristicKind, train: &Graph, u: usize, v: usize) -> f64 {
    let (nu, nv) = (train.neighbors(u), train.neighbors(v));
    match kind {
        HeuristicKind::PreferentialAttachment => (nu.len() * nv.len()) as f64,
        HeuristicKind::CommonNeighbors => sorted_intersection_count(nu, nv) as f64,
        HeuristicKind::JaccardCoefficient => {
            let common = sorted_intersection_count(nu, nv);
            let union = nu.len() + nv.len() - common;
            if union == 0 {
                0.0
            } else {
                common as f64 / union as f64
            }
        }
        HeuristicKind::AdamicAdar => {
            let (mut i, mut j, mut total) = (0, 0, 0.0);
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        // a shared neighbor touches both u and v, so its degree is >= 2
                        total += 1.0 / (train.degree(nu[i]) as f64).ln();
                        i += 1;
                        j += 1;
                    }
                }
            }
            total
        }
        HeuristicKind::Random => unreachable!("handled by score_matrix"),
    }
}

/// Scores for every pair of the train graph. The random predictor draws one
/// uniform value per pair, in lexicographic pair order, from a stream seeded
/// with `seed`.
pub fn score_matrix(kind: HeuristicKind, split: &EdgeSplit, seed: u64) -> ScoreMatrix {
    let train = &split.train;
    match kind {
        HeuristicKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            ScoreMatrix::from_fn(train.n(), |_, _| rng.random::<f64>())
        }
        _ => ScoreMatrix::from_fn(train.n(), |u, v| pair_score(kind, train, u, v)),
    }
}

pub fn rank_candidates(
    kind: HeuristicKind,
    split: &EdgeSplit,
    seed: u64,
    top_k: Option<usize>,
) -> Vec<(Pair, f64)> {
    rank_pairs(split, &score_matrix(kind, split, seed), top_k)
}
