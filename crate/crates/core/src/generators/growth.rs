//! Growth and rewiring models: Barabási-Albert, Holme-Kim powerlaw cluster,
//! Watts-Strogatz and duplication-divergence.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::Graph;

type Adjacency = Vec<BTreeSet<usize>>;

fn into_graph(adj: &Adjacency) -> Result<Graph> {
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| u < v).map(move |&v| (u, v)));
    Graph::from_edges(adj.len(), edges)
}

fn link(adj: &mut Adjacency, u: usize, v: usize) {
    adj[u].insert(v);
    adj[v].insert(u);
}

/// `m` distinct entries drawn from `pool` (degree-weighted when the pool
/// repeats nodes once per incident edge).
fn distinct_sample(pool: &[usize], m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut chosen = BTreeSet::new();
    let mut order = Vec::with_capacity(m);
    while order.len() < m {
        let x = *pool.choose(rng).expect("non-empty pool");
        if chosen.insert(x) {
            order.push(x);
        }
    }
    order
}

/// Seed: `m` isolated nodes. Node `m` attaches to all of them; every later node
/// attaches to `m` distinct existing nodes with probability proportional to
/// degree. Yields exactly `m(n − m)` edges.
pub(super) fn barabasi_albert(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    let mut adj: Adjacency = vec![BTreeSet::new(); n];
    let mut repeated: Vec<usize> = Vec::with_capacity(2 * m * n);
    for source in m..n {
        let targets = if repeated.is_empty() {
            (0..m).collect()
        } else {
            distinct_sample(&repeated, m, rng)
        };
        for &t in &targets {
            link(&mut adj, source, t);
            repeated.push(t);
            repeated.push(source);
        }
    }
    into_graph(&adj)
}

/// Barabási-Albert growth where, after each preferential link to `v`, the
/// next link closes a triangle through a random neighbor of `v` with
/// probability `p`.
pub(super) fn powerlaw_cluster(n: usize, m: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<Graph> {
    let mut adj: Adjacency = vec![BTreeSet::new(); n];
    // every seed node starts in the pool once, so the first choice is uniform
    let mut repeated: Vec<usize> = (0..m).collect();
    for source in m..n {
        let mut targets = distinct_sample(&repeated, m, rng);
        let mut target = targets.pop().expect("m >= 1");
        link(&mut adj, source, target);
        repeated.push(target);
        let mut count = 1;
        while count < m {
            if rng.random_bool(p) {
                let options: Vec<usize> = adj[target]
                    .iter()
                    .copied()
                    .filter(|&w| w != source && !adj[source].contains(&w))
                    .collect();
                if let Some(&w) = options.choose(rng) {
                    link(&mut adj, source, w);
                    repeated.push(w);
                    count += 1;
                    continue;
                }
            }
            match targets.pop() {
                Some(t) => {
                    target = t;
                    if adj[source].insert(target) {
                        adj[target].insert(source);
                        repeated.push(target);
                    }
                    count += 1;
                }
                None => break,
            }
        }
        repeated.extend(std::iter::repeat_n(source, m));
    }
    into_graph(&adj)
}

/// Ring lattice with `k/2` neighbors per side; each lattice edge `(u, u+j)` is
/// rewired to `(u, w)` with probability `p`, `w` uniform among non-neighbors.
pub(super) fn watts_strogatz(n: usize, k: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<Graph> {
    let mut adj: Adjacency = vec![BTreeSet::new(); n];
    for j in 1..=k / 2 {
        for u in 0..n {
            link(&mut adj, u, (u + j) % n);
        }
    }
    if p > 0.0 {
        for j in 1..=k / 2 {
            for u in 0..n {
                let v = (u + j) % n;
                if !rng.random_bool(p) || !adj[u].contains(&v) || adj[u].len() >= n - 1 {
                    continue;
                }
                let w = loop {
                    let w = rng.random_range(0..n);
                    if w != u && !adj[u].contains(&w) {
                        break w;
                    }
                };
                adj[u].remove(&v);
                adj[v].remove(&u);
                link(&mut adj, u, w);
            }
        }
    }
    into_graph(&adj)
}

pub(super) fn duplication_divergence(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<Graph> {
    duplication_divergence_traced(n, p, rng, |_, _, _| {})
}

/// Starts from a single edge. Each step duplicates a uniformly chosen target:
/// the duplicate keeps every target edge independently with probability `p`,
/// and the step is redrawn when nothing is kept. `on_duplicate(dup, target,
/// adjacency)` observes each accepted step.
pub(super) fn duplication_divergence_traced<F>(
    n: usize,
    p: f64,
    rng: &mut ChaCha8Rng,
    mut on_duplicate: F,
) -> Result<Graph>
where
    F: FnMut(usize, usize, &Adjacency),
{
    let mut adj: Adjacency = vec![BTreeSet::new(); n];
    link(&mut adj, 0, 1);
    for dup in 2..n {
        loop {
            let target = rng.random_range(0..dup);
            let kept: Vec<usize> = adj[target]
                .iter()
                .copied()
                .filter(|_| rng.random_bool(p))
                .collect();
            if kept.is_empty() {
                continue;
            }
            for v in kept {
                link(&mut adj, dup, v);
            }
            on_duplicate(dup, target, &adj);
            break;
        }
    }
    into_graph(&adj)
}
