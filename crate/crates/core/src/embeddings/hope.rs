use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::{spectral_radius, truncated_svd, DenseMatrix};

use super::{EmbeddingMethod, EmbeddingResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HopeParams {
    /// Katz decay as a fraction of `1/ρ(W)`.
    pub beta_factor: f64,
}

impl Default for HopeParams {
    fn default() -> Self {
        HopeParams { beta_factor: 0.5 }
    }
}

impl HopeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_factor > 0.0 && self.beta_factor < 1.0) {
            return Err(Error::validation(format!(
                "hope beta_factor {} must lie in (0, 1)",
                self.beta_factor
            )));
        }
        Ok(())
    }
}

/// Columns per side for a total dimension `d`.
pub(super) fn side_width(d: usize) -> usize {
    (d / 2).max(1)
}

/// Katz proximity `(I − βW)^{-1}·βW`. For an undirected graph the result is
/// symmetric in exact arithmetic; it is symmetrized to remove round-off.
pub fn katz_matrix(graph: &Graph, beta: f64) -> Result<DenseMatrix> {
    let n = graph.n();
    let w = graph.adjacency_matrix();
    if n == 0 || graph.m() == 0 {
        return Ok(DenseMatrix::zeros(n, n));
    }
    let bw = w.scaled(beta);
    let m = DenseMatrix::identity(n).sub(&bw);
    let lu = m.to_nalgebra().lu();
    let rhs: DMatrix<f64> = bw.to_nalgebra();
    let s = lu
        .solve(&rhs)
        .ok_or_else(|| Error::numeric(format!("I − βW is singular at β = {beta}")))?;
    let s = DenseMatrix::from_fn(n, n, |r, c| 0.5 * (s[(r, c)] + s[(c, r)]));
    if !s.is_finite() {
        return Err(Error::numeric(format!("Katz matrix is not finite at β = {beta}")));
    }
    Ok(s)
}

/// Factorizes the Katz matrix with a rank-`d/2` SVD:
/// `Y = U·Σ^{1/2}`, `Y_target = V·Σ^{1/2}`.
pub fn embed_hope(train: &Graph, d: usize, params: &HopeParams) -> Result<EmbeddingResult> {
    params.validate()?;
    if d == 0 {
        return Err(Error::validation("embedding dimension must be at least 1"));
    }
    let n = train.n();
    let k = side_width(d);
    let rho = spectral_radius(&train.adjacency_matrix())?;
    if rho == 0.0 {
        let zeros = DenseMatrix::zeros(n, k);
        let mut result = EmbeddingResult::new(EmbeddingMethod::Hope, d, zeros.clone(), Some(zeros), None)?;
        result.spectrum = vec![0.0; k];
        return Ok(result);
    }
    let s = katz_matrix(train, params.beta_factor / rho)?;
    let rank = k.min(n);
    let svd = truncated_svd(&s, rank)?;
    let root: Vec<f64> = svd.singular_values.iter().map(|x| x.sqrt()).collect();
    let side = |m: &DenseMatrix| DenseMatrix::from_fn(n, k, |r, c| if c < rank { m[(r, c)] * root[c] } else { 0.0 });
    let (y, target) = (side(&svd.u), side(&svd.v));
    let mut result = EmbeddingResult::new(EmbeddingMethod::Hope, d, y, Some(target), None)?;
    result.spectrum = svd.singular_values;
    result.spectrum.resize(k, 0.0);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_node_katz_closed_form() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let s = katz_matrix(&g, 0.1).unwrap();
        // (I − βA)^{-1} = [[1, β], [β, 1]] / (1 − β²)
        assert!((s[(0, 1)] - 0.1 / 0.99).abs() < 1e-12);
        assert!((s[(0, 0)] - 0.01 / 0.99).abs() < 1e-12);
        assert!((s[(1, 0)] - 0.1 / 0.99).abs() < 1e-12);
    }

    #[test]
    fn two_node_full_rank_score_reproduces_katz() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        // ρ = 1, so beta_factor 0.1 gives β = 0.1
        let e = embed_hope(&g, 4, &HopeParams { beta_factor: 0.1 }).unwrap();
        assert!((e.link_score(0, 1).unwrap() - 0.1 / 0.99).abs() < 1e-12);
    }

    #[test]
    fn edgeless_graph_embeds_at_origin() {
        let e = embed_hope(&Graph::empty(4), 4, &HopeParams::default()).unwrap();
        assert!(e.y().as_slice().iter().all(|&x| x == 0.0));
        assert_eq!(e.link_score(1, 3).unwrap(), 0.0);
    }

    #[test]
    fn katz_entries_are_non_negative() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]).unwrap();
        let rho = spectral_radius(&g.adjacency_matrix()).unwrap();
        let s = katz_matrix(&g, 0.9 / rho).unwrap();
        assert!(s.as_slice().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn invalid_beta_factor() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        for b in [0.0, 1.0, -0.2] {
            assert!(embed_hope(&g, 2, &HopeParams { beta_factor: b }).is_err());
        }
    }

    #[test]
    fn truncation_matches_direct_computation() {
        let g = Graph::from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (0, 4), (2, 6)])
            .unwrap();
        let p = HopeParams::default();
        let big = embed_hope(&g, 8, &p).unwrap();
        for d in [2, 4, 6] {
            assert_eq!(big.truncated(d).unwrap(), embed_hope(&g, d, &p).unwrap());
        }
    }
}
