//! Held-out edge splits for link prediction.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{canonical, Graph, Pair};

pub const DEFAULT_HIDE_FRACTION: f64 = 0.2;

/// Train graph plus the hidden edges a predictor must recover. Candidates are
/// every unordered pair of distinct nodes that is not a train edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSplit {
    pub train: Graph,
    pub hidden: BTreeSet<Pair>,
    pub hide_fraction: f64,
    /// Edges that should have been hidden but were protected by the spanning forest.
    pub shortfall: usize,
}

impl EdgeSplit {
    pub fn n(&self) -> usize {
        self.train.n()
    }

    pub fn is_candidate(&self, u: usize, v: usize) -> bool {
        u != v && !self.train.has_edge(u, v)
    }

    pub fn is_hidden(&self, u: usize, v: usize) -> bool {
        self.hidden.contains(&canonical(u, v))
    }

    pub fn candidate_count(&self) -> usize {
        let n = self.n();
        n * n.saturating_sub(1) / 2 - self.train.m()
    }

    /// Candidate pairs in lexicographic order.
    pub fn candidates(&self) -> impl Iterator<Item = Pair> + '_ {
        let n = self.n();
        (0..n).flat_map(move |u| (u + 1..n).filter(move |&v| !self.train.has_edge(u, v)).map(move |v| (u, v)))
    }
}

/// Moves `⌊hide_fraction·m⌋` uniformly chosen edges into the hidden set. With
/// `preserve_connectivity`, the edges of a uniformly random spanning forest
/// are never hidden, so every component of the input stays connected in train.
pub fn split_edges(
    graph: &Graph,
    hide_fraction: f64,
    seed: u64,
    preserve_connectivity: bool,
) -> Result<EdgeSplit> {
    if !(0.0..1.0).contains(&hide_fraction) {
        return Err(Error::validation(format!(
            "hide fraction {hide_fraction} must lie in [0, 1)"
        )));
    }
    if graph.m() == 0 {
        return Err(Error::validation("cannot split a graph without edges"));
    }
    let quota = (hide_fraction * graph.m() as f64).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exempt = if preserve_connectivity {
        uniform_spanning_forest(graph, &mut rng)
    } else {
        BTreeSet::new()
    };
    let mut eligible: Vec<Pair> = graph.edge_pairs().filter(|e| !exempt.contains(e)).collect();
    eligible.shuffle(&mut rng);
    let hidden: BTreeSet<Pair> = eligible.into_iter().take(quota).collect();
    let shortfall = quota - hidden.len();
    Ok(EdgeSplit {
        train: graph.without_edges(&hidden),
        hidden,
        hide_fraction,
        shortfall,
    })
}

/// Wilson's algorithm run in every component: loop-erased random walks from
/// each node into the growing tree give a uniform spanning tree per component.
pub fn uniform_spanning_forest(graph: &Graph, rng: &mut ChaCha8Rng) -> BTreeSet<Pair> {
    let n = graph.n();
    let (comp, count) = graph.components();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for u in 0..n {
        members[comp[u]].push(u);
    }
    let mut in_tree = vec![false; n];
    let mut next = vec![usize::MAX; n];
    let mut forest = BTreeSet::new();
    for nodes in &members {
        let root = nodes[rng.random_range(0..nodes.len())];
        in_tree[root] = true;
        for &start in nodes {
            let mut u = start;
            while !in_tree[u] {
                next[u] = *graph.neighbors(u).choose(rng).expect("component has edges");
                u = next[u];
            }
            let mut u = start;
            while !in_tree[u] {
                in_tree[u] = true;
                forest.insert(canonical(u, next[u]));
                u = next[u];
            }
        }
    }
    forest
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn ring(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|u| (u, (u + 1) % n))).unwrap()
    }

    fn dense_random(n: usize, m_target: usize, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = BTreeSet::new();
        for u in 1..n {
            edges.insert(canonical(u, rng.random_range(0..u)));
        }
        while edges.len() < m_target {
            let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
            if u != v {
                edges.insert(canonical(u, v));
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn zero_fraction_is_identity() {
        let g = ring(8);
        let s = split_edges(&g, 0.0, 1, true).unwrap();
        assert_eq!(s.train, g);
        assert!(s.hidden.is_empty());
        assert_eq!(s.shortfall, 0);
    }

    #[test]
    fn hides_exact_quota() {
        let g = dense_random(40, 100, 3);
        assert_eq!(g.m(), 100);
        let s = split_edges(&g, 0.2, 9, true).unwrap();
        assert_eq!(s.hidden.len(), 20);
        assert_eq!(s.train.m(), 80);
        assert!(s.train.is_connected());
    }

    #[test]
    fn tree_keeps_every_edge_and_records_shortfall() {
        let tree = Graph::from_edges(11, (1..11).map(|u| (u, (u - 1) / 2))).unwrap();
        let s = split_edges(&tree, 0.2, 4, true).unwrap();
        assert!(s.hidden.is_empty());
        assert_eq!(s.shortfall, 2);
        let s = split_edges(&tree, 0.2, 4, false).unwrap();
        assert_eq!(s.hidden.len(), 2);
    }

    #[test]
    fn invalid_fraction() {
        let g = ring(5);
        assert!(matches!(split_edges(&g, 1.0, 0, true), Err(Error::Validation(_))));
        assert!(matches!(split_edges(&g, -0.1, 0, true), Err(Error::Validation(_))));
        assert!(split_edges(&Graph::empty(3), 0.2, 0, true).is_err());
    }

    #[test]
    fn candidates_exclude_train_edges_only() {
        let g = ring(6);
        let s = split_edges(&g, 0.5, 2, false).unwrap();
        let cands: BTreeSet<Pair> = s.candidates().collect();
        assert_eq!(cands.len(), s.candidate_count());
        assert!(s.hidden.is_subset(&cands));
        assert_eq!(cands.len(), 15 - s.train.m());
    }

    #[test]
    fn spanning_tree_is_uniform_on_a_cycle() {
        // each of the 4 spanning trees of C4 drops exactly one edge
        let g = ring(4);
        let mut counts = [0usize; 4];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..4000 {
            let forest = uniform_spanning_forest(&g, &mut rng);
            assert_eq!(forest.len(), 3);
            let missing = g.edge_pairs().position(|e| !forest.contains(&e)).unwrap();
            counts[missing] += 1;
        }
        for c in counts {
            assert!((850..1150).contains(&c), "{counts:?}");
        }
    }

    proptest! {
        #[test]
        fn split_partitions_edges(seed in 0u64..1000, frac in 0.0f64..0.95, preserve: bool) {
            let g = dense_random(25, 60, seed);
            let s = split_edges(&g, frac, seed, preserve).unwrap();
            let train: BTreeSet<Pair> = s.train.edge_pairs().collect();
            prop_assert!(train.is_disjoint(&s.hidden));
            let union: BTreeSet<Pair> = train.union(&s.hidden).copied().collect();
            prop_assert_eq!(union, g.edge_pairs().collect::<BTreeSet<_>>());
            prop_assert_eq!(s.hidden.len() + s.shortfall, (frac * 60.0).floor() as usize);
            if preserve {
                prop_assert!(s.train.is_connected());
            }
            prop_assert_eq!(&s, &split_edges(&g, frac, seed, preserve).unwrap());
        }
    }
}
