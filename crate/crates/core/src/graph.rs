//! Undirected weighted simple graphs, edge-list I/O and structural statistics.
//!
//! Nodes are the integers `0..n`. Edges are stored once in canonical `(u, v)`
//! order with `u < v`, alongside sorted neighbor lists for fast set operations.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_node, Error, Result};
use crate::numerics::DenseMatrix;

/// An unordered node pair stored as `(min, max)`.
pub type Pair = (usize, usize);

#[inline]
pub fn canonical(u: usize, v: usize) -> Pair {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    adj: Vec<Vec<usize>>,
    adj_weights: Vec<Vec<f64>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            adj_weights: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from weighted edges. Either orientation of a pair names
    /// the same edge; a repeated pair keeps the last weight.
    pub fn from_weighted_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut map = BTreeMap::new();
        for (u, v, w) in edges {
            check_node(u, n)?;
            check_node(v, n)?;
            if u == v {
                return Err(Error::validation(format!("self-loop on node {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) has weight {w}; weights must be positive and finite"
                )));
            }
            map.insert(canonical(u, v), w);
        }
        Ok(Self::from_canonical_map(n, map))
    }

    /// Unit-weight convenience constructor.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_weighted_edges(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    fn from_canonical_map(n: usize, map: BTreeMap<Pair, f64>) -> Self {
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(map.len());
        for ((u, v), w) in map {
            adj[u].push((v, w));
            adj[v].push((u, w));
            edges.push((u, v, w));
        }
        let mut ids = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for mut list in adj {
            list.sort_unstable_by_key(|&(v, _)| v);
            ids.push(list.iter().map(|&(v, _)| v).collect());
            weights.push(list.iter().map(|&(_, w)| w).collect());
        }
        Graph {
            n,
            edges,
            adj: ids,
            adj_weights: weights,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edges `(u, v, w)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn edge_pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        self.edges.iter().map(|&(u, v, _)| (u, v))
    }

    /// Sorted neighbor ids of `u`.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    /// Edge weights aligned with [`Graph::neighbors`].
    pub fn neighbor_weights(&self, u: usize) -> &[f64] {
        &self.adj_weights[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        if u >= self.n {
            return None;
        }
        self.adj[u]
            .binary_search(&v)
            .ok()
            .map(|i| self.adj_weights[u][i])
    }

    /// Dense symmetric weight matrix `W`.
    pub fn adjacency_matrix(&self) -> DenseMatrix {
        let mut w = DenseMatrix::zeros(self.n.max(1), self.n.max(1));
        for &(u, v, weight) in &self.edges {
            w[(u, v)] = weight;
            w[(v, u)] = weight;
        }
        w
    }

    /// Subgraph induced on `nodes`, relabeled so that `nodes[i]` becomes `i`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph> {
        let mut index = vec![usize::MAX; self.n];
        for (new, &old) in nodes.iter().enumerate() {
            check_node(old, self.n)?;
            if index[old] != usize::MAX {
                return Err(Error::validation(format!("node {old} listed twice")));
            }
            index[old] = new;
        }
        let mut map = BTreeMap::new();
        for &(u, v, w) in &self.edges {
            let (a, b) = (index[u], index[v]);
            if a != usize::MAX && b != usize::MAX {
                map.insert(canonical(a, b), w);
            }
        }
        Ok(Self::from_canonical_map(nodes.len(), map))
    }

    /// Same node set with the listed edges removed.
    pub fn without_edges(&self, removed: &std::collections::BTreeSet<Pair>) -> Graph {
        let map = self
            .edges
            .iter()
            .filter(|&&(u, v, _)| !removed.contains(&(u, v)))
            .map(|&(u, v, w)| ((u, v), w))
            .collect();
        Self::from_canonical_map(self.n, map)
    }

    /// Component id per node, numbered in order of each component's smallest node.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().1 == 1
    }

    /// Hop distances from `source`; unreachable nodes get `usize::MAX`.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// Number of common elements of two sorted slices.
pub(crate) fn sorted_intersection_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

// ---------------------------------------------------------------------------
// Edge-list I/O

/// Outcome of reading an edge-list file.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub self_loops_dropped: usize,
}

/// Reads a whitespace-delimited `u v [w]` edge list. Lines starting with `#`
/// are comments. Both orientations of a pair name the same undirected edge.
pub fn load_edge_list(path: impl AsRef<Path>, n_hint: Option<usize>) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, n_hint).map_err(|e| match e {
        Error::Parse { line, message, .. } => Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        },
        other => other,
    })
}

pub fn parse_edge_list(text: &str, n_hint: Option<usize>) -> Result<LoadedGraph> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: "<input>".into(),
        line,
        message,
    };
    let mut map: BTreeMap<Pair, f64> = BTreeMap::new();
    let mut max_id: Option<usize> = None;
    let mut self_loops = 0;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(parse_err(
                lineno,
                format!("expected `u v [w]`, found {} fields", fields.len()),
            ));
        }
        let node = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(lineno, format!("`{s}` is not a non-negative integer node id")))
        };
        let u = node(fields[0])?;
        let v = node(fields[1])?;
        let w = match fields.get(2) {
            Some(s) => s
                .parse::<f64>()
                .map_err(|_| parse_err(lineno, format!("`{s}` is not a number")))?,
            None => 1.0,
        };
        if !w.is_finite() || w <= 0.0 {
            return Err(Error::validation(format!(
                "line {lineno}: weight {w} is not strictly positive"
            )));
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        if u == v {
            self_loops += 1;
            continue;
        }
        map.insert(canonical(u, v), w);
    }
    let n = max_id.map_or(0, |m| m + 1).max(n_hint.unwrap_or(0));
    Ok(LoadedGraph {
        graph: Graph::from_canonical_map(n, map),
        self_loops_dropped: self_loops,
    })
}

/// Writes `u v w` lines with `u < v`, sorted lexicographically.
pub fn save_edge_list(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_edge_list(graph, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_edge_list(graph: &Graph, out: &mut impl Write) -> std::io::Result<()> {
    for &(u, v, w) in graph.edges() {
        writeln!(out, "{u} {v} {w}")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Statistics

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub density: f64,
    pub avg_degree: f64,
    pub diameter_lcc: usize,
    pub avg_clustering: f64,
    pub num_components: usize,
}

pub fn compute_stats(graph: &Graph) -> GraphStats {
    let n = graph.n();
    let m = graph.m();
    let density = if n > 1 {
        2.0 * m as f64 / (n as f64 * (n as f64 - 1.0))
    } else {
        0.0
    };
    let avg_degree = if n > 0 { 2.0 * m as f64 / n as f64 } else { 0.0 };

    let (comp, num_components) = graph.components();
    let diameter_lcc = match largest_component_id(&comp, num_components) {
        Some(lcc) => (0..n)
            .filter(|&u| comp[u] == lcc)
            .map(|u| {
                graph
                    .bfs_distances(u)
                    .into_iter()
                    .filter(|&d| d != usize::MAX)
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0),
        None => 0,
    };

    GraphStats {
        n,
        m,
        density,
        avg_degree,
        diameter_lcc,
        avg_clustering: average_clustering(graph),
        num_components,
    }
}

pub fn local_clustering(graph: &Graph, v: usize) -> f64 {
    let nbrs = graph.neighbors(v);
    let d = nbrs.len();
    if d < 2 {
        return 0.0;
    }
    let links: usize = nbrs
        .iter()
        .map(|&u| sorted_intersection_count(graph.neighbors(u), nbrs))
        .sum();
    // each triangle through v is seen from both of its other corners
    links as f64 / (d as f64 * (d as f64 - 1.0))
}

pub fn average_clustering(graph: &Graph) -> f64 {
    if graph.n() == 0 {
        return 0.0;
    }
    (0..graph.n()).map(|v| local_clustering(graph, v)).sum::<f64>() / graph.n() as f64
}

fn largest_component_id(comp: &[usize], count: usize) -> Option<usize> {
    if count == 0 {
        return None;
    }
    let mut sizes = vec![0usize; count];
    for &c in comp {
        sizes[c] += 1;
    }
    // component ids are ordered by smallest member, so the first maximum wins ties
    let mut best = 0;
    for (c, &s) in sizes.iter().enumerate() {
        if s > sizes[best] {
            best = c;
        }
    }
    Some(best)
}

/// Largest connected component, relabeled `0..k`. The returned map sends new
/// ids to original ids and preserves their relative order.
pub fn largest_connected_component(graph: &Graph) -> (Graph, Vec<usize>) {
    let (comp, count) = graph.components();
    match largest_component_id(&comp, count) {
        Some(lcc) => {
            let nodes: Vec<usize> = (0..graph.n()).filter(|&u| comp[u] == lcc).collect();
            let sub = graph
                .induced_subgraph(&nodes)
                .expect("component nodes are distinct and in range");
            (sub, nodes)
        }
        None => (Graph::empty(0), Vec::new()),
    }
}

// ---------------------------------------------------------------------------
// Domains

/// Domain of origin for a corpus graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum DomainLabel {
    Social,
    Biology,
    Economic,
    Technological,
    Internet,
    Other(String),
}

impl fmt::Display for DomainLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainLabel::Social => f.write_str("social"),
            DomainLabel::Biology => f.write_str("biology"),
            DomainLabel::Economic => f.write_str("economic"),
            DomainLabel::Technological => f.write_str("technological"),
            DomainLabel::Internet => f.write_str("internet"),
            DomainLabel::Other(name) => write!(f, "other:{name}"),
        }
    }
}

impl FromStr for DomainLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let label = match s.trim().to_ascii_lowercase().as_str() {
            "social" => DomainLabel::Social,
            "biology" | "biological" => DomainLabel::Biology,
            "economic" => DomainLabel::Economic,
            "technological" | "tech" => DomainLabel::Technological,
            "internet" => DomainLabel::Internet,
            other => {
                let name = other.strip_prefix("other:").unwrap_or(other);
                if name.is_empty() || name.contains(char::is_whitespace) || name.contains(',') {
                    return Err(Error::validation(format!("bad domain label `{s}`")));
                }
                DomainLabel::Other(name.to_string())
            }
        };
        Ok(label)
    }
}

impl From<DomainLabel> for String {
    fn from(d: DomainLabel) -> String {
        d.to_string()
    }
}

impl TryFrom<String> for DomainLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}
