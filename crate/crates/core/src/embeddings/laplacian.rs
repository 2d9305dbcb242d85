use crate::error::{Error, Result};
use crate::graph::{largest_connected_component, Graph};
use crate::numerics::{sym_eig_smallest, DenseMatrix};

use super::{EmbeddingMethod, EmbeddingResult};

/// `I − D^{-1/2} W D^{-1/2}` using weighted degrees; isolated nodes get a
/// diagonal of zero.
pub fn normalized_laplacian(graph: &Graph) -> DenseMatrix {
    let n = graph.n();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|u| {
            let d: f64 = graph.neighbor_weights(u).iter().sum();
            if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 }
        })
        .collect();
    let mut l = DenseMatrix::zeros(n, n);
    for u in 0..n {
        if inv_sqrt[u] > 0.0 {
            l[(u, u)] = 1.0;
        }
    }
    for &(u, v, w) in graph.edges() {
        let x = -w * inv_sqrt[u] * inv_sqrt[v];
        l[(u, v)] = x;
        l[(v, u)] = x;
    }
    l
}

/// Eigenvectors of the normalized Laplacian for the `d` smallest non-trivial
/// eigenvalues. The graph must be connected.
pub fn embed_laplacian_eigenmaps(train: &Graph, d: usize) -> Result<EmbeddingResult> {
    let n = train.n();
    if d == 0 || d >= n {
        return Err(Error::Bounds { index: d, limit: n });
    }
    if !train.is_connected() {
        return Err(Error::validation(
            "Laplacian Eigenmaps needs a connected graph; embed the largest connected component instead",
        ));
    }
    let eig = sym_eig_smallest(&normalized_laplacian(train), d + 1)?;
    let y = DenseMatrix::from_fn(n, d, |r, c| eig.vectors[(r, c + 1)]);
    let mut result = EmbeddingResult::new(EmbeddingMethod::LaplacianEigenmaps, d, y, None, None)?;
    result.spectrum = eig.values[1..].to_vec();
    Ok(result)
}

/// Embeds the largest connected component and gives every other node the zero
/// vector. When the component has fewer than `d + 1` nodes the missing
/// columns are zero as well.
pub fn embed_laplacian_eigenmaps_lcc(train: &Graph, d: usize) -> Result<EmbeddingResult> {
    if d == 0 {
        return Err(Error::validation("embedding dimension must be at least 1"));
    }
    let n = train.n();
    if train.is_connected() && d < n {
        return embed_laplacian_eigenmaps(train, d);
    }
    let (lcc, nodes) = largest_connected_component(train);
    let inner_d = d.min(lcc.n().saturating_sub(1));
    let mut y = DenseMatrix::zeros(n, d);
    let mut spectrum = Vec::new();
    if inner_d > 0 {
        let inner = embed_laplacian_eigenmaps(&lcc, inner_d)?;
        for (i, &orig) in nodes.iter().enumerate() {
            y.row_mut(orig)[..inner_d].copy_from_slice(inner.y().row(i));
        }
        spectrum = inner.spectrum;
    }
    let mut result = EmbeddingResult::new(EmbeddingMethod::LaplacianEigenmaps, d, y, None, None)?;
    result.spectrum = spectrum;
    Ok(result)
}
