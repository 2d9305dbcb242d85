use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Induced-subgraph random-walk sampling.
///
/// Walks the graph collecting distinct nodes until `target_n` are visited,
/// jumping to a fresh unvisited node whenever the walk stops discovering new
/// ones (isolated start, or a small component already exhausted). Returns the
/// induced subgraph, relabeled in ascending order of original id.
pub fn isrw_sample(graph: &Graph, target_n: usize, seed: u64) -> Result<Graph> {
    let n = graph.n();
    if target_n > n {
        return Err(Error::Bounds {
            index: target_n,
            limit: n,
        });
    }
    if target_n == 0 {
        return Err(Error::validation("sample size must be at least 1"));
    }
    if target_n > 1 && graph.m() == 0 {
        return Err(Error::validation("cannot random-walk sample an edgeless graph"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut visited = BTreeSet::new();
    let mut current = rng.random_range(0..n);
    visited.insert(current);
    let mut stale_steps = 0usize;
    while visited.len() < target_n {
        let stall_limit = 100.max(10 * visited.len());
        let next = match graph.neighbors(current).choose(&mut rng) {
            Some(&v) if stale_steps < stall_limit => v,
            _ => {
                let unvisited: Vec<usize> = (0..n).filter(|u| !visited.contains(u)).collect();
                *unvisited.choose(&mut rng).expect("fewer visited than target")
            }
        };
        if visited.insert(next) {
            stale_steps = 0;
        } else {
            stale_steps += 1;
        }
        current = next;
    }
    let nodes: Vec<usize> = visited.into_iter().collect();
    graph.induced_subgraph(&nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn full_sample_is_whole_graph() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(isrw_sample(&g, 6, 1).unwrap(), g);
    }

    #[test]
    fn singleton_sample() {
        let g = complete(5);
        let s = isrw_sample(&g, 1, 9).unwrap();
        assert_eq!((s.n(), s.m()), (1, 0));
    }

    #[test]
    fn sample_of_complete_graph_is_complete() {
        for seed in 0..5 {
            let s = isrw_sample(&complete(10), 5, seed).unwrap();
            assert_eq!((s.n(), s.m()), (5, 10));
        }
    }

    #[test]
    fn walk_escapes_small_components() {
        // a triangle plus a long path; sampling 8 nodes must leave the triangle
        let mut edges = vec![(0, 1), (1, 2), (0, 2)];
        edges.extend((3..19).map(|u| (u, u + 1)));
        let g = Graph::from_edges(20, edges).unwrap();
        for seed in 0..10 {
            assert_eq!(isrw_sample(&g, 8, seed).unwrap().n(), 8);
        }
    }

    #[test]
    fn oversized_request_is_bounds_error() {
        assert!(matches!(
            isrw_sample(&complete(3), 4, 0),
            Err(Error::Bounds { index: 4, limit: 3 })
        ));
        assert!(isrw_sample(&Graph::empty(3), 2, 0).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = Graph::from_edges(30, (0..30).map(|u| (u, (u * 7 + 3) % 30)).filter(|(u, v)| u != v))
            .unwrap();
        assert_eq!(isrw_sample(&g, 12, 4).unwrap(), isrw_sample(&g, 12, 4).unwrap());
    }
}
