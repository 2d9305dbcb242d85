//! Dense linear-algebra and optimization kernels shared by the embedding methods.
//!
//! The symmetric eigensolver and the SVD are backed by `nalgebra`; this module
//! fixes ordering, sign conventions and error reporting on top of it.

mod matrix;

pub use matrix::{gemm, DenseMatrix};

use nalgebra::{SymmetricEigen, SVD};

use crate::error::{Error, Result};

/// Symmetry tolerance accepted by the symmetric eigensolver.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Convergence threshold handed to the eigen/SVD iterations (nalgebra's own default).
const DECOMPOSITION_EPS: f64 = 5.0 * f64::EPSILON;

/// Iteration cap handed to the underlying QR iterations.
pub const DECOMPOSITION_ITERATION_CAP: usize = 1_000_000;

pub const POWER_ITERATION_CAP: usize = 200;
pub const POWER_ITERATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// One eigenvector per column, `n × k`.
    pub vectors: DenseMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    pub u: DenseMatrix,
    /// Non-negative, descending.
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

impl TruncatedSvd {
    /// `U·diag(σ)·Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for r in 0..us.rows() {
            for (x, s) in us.row_mut(r).iter_mut().zip(&self.singular_values) {
                *x *= s;
            }
        }
        us.matmul_transposed(&self.v)
    }
}

/// Full symmetric eigendecomposition, eigenvalues ascending.
fn symmetric_eigen_sorted(a: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    if !a.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::validation(format!(
            "matrix is not symmetric within {SYMMETRY_TOL}"
        )));
    }
    let n = a.rows();
    // Zero rows are split off as exact (0, e_i) pairs; nalgebra's
    // tridiagonalization can return NaN when many of them are present.
    let active: Vec<usize> = (0..n).filter(|&r| a.row(r).iter().any(|&x| x != 0.0)).collect();
    let inactive: Vec<usize> = (0..n).filter(|&r| a.row(r).iter().all(|&x| x == 0.0)).collect();
    let block = nalgebra::DMatrix::from_fn(active.len(), active.len(), |r, c| a[(active[r], active[c])]);
    let eig = SymmetricEigen::try_new(block, DECOMPOSITION_EPS, DECOMPOSITION_ITERATION_CAP).ok_or_else(|| {
        Error::numeric(format!(
            "symmetric eigensolver did not converge within {DECOMPOSITION_ITERATION_CAP} iterations"
        ))
    })?;
    if !eig.eigenvalues.iter().chain(eig.eigenvectors.iter()).all(|x| x.is_finite()) {
        return Err(Error::numeric("symmetric eigensolver produced non-finite output"));
    }
    let p = active.len();
    let value_of = |i: usize| if i < p { eig.eigenvalues[i] } else { 0.0 };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| value_of(i).total_cmp(&value_of(j)).then(i.cmp(&j)));
    let values = order.iter().map(|&i| value_of(i)).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (c, &src) in order.iter().enumerate() {
        if src >= p {
            vectors[(inactive[src - p], c)] = 1.0;
            continue;
        }
        let col = eig.eigenvectors.column(src);
        let sign = sign_of_largest(col.iter().copied());
        for (k, &r) in active.iter().enumerate() {
            vectors[(r, c)] = sign * col[k];
        }
    }
    Ok((values, vectors))
}

/// `+1` or `-1` so that the largest-magnitude entry (first on ties) becomes positive.
fn sign_of_largest(values: impl Iterator<Item = f64>) -> f64 {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for x in values {
        if x.abs() > best.abs() {
            best = x;
            sign = if x < 0.0 { -1.0 } else { 1.0 };
        }
    }
    sign
}

/// The `k` smallest eigenpairs of a symmetric matrix, eigenvalues ascending.
/// Each eigenvector's largest-magnitude component is positive.
pub fn sym_eig_smallest(a: &DenseMatrix, k: usize) -> Result<SymEigen> {
    if k > a.rows() {
        return Err(Error::Bounds {
            index: k,
            limit: a.rows(),
        });
    }
    let (values, vectors) = symmetric_eigen_sorted(a)?;
    Ok(SymEigen {
        values: values[..k].to_vec(),
        vectors: vectors.leading_columns(k),
    })
}

/// Rank-`k` truncated SVD. Symmetric inputs go through the symmetric
/// eigensolver (singular values are `|λ|`), everything else through a full SVD.
pub fn truncated_svd(a: &DenseMatrix, k: usize) -> Result<TruncatedSvd> {
    let limit = a.rows().min(a.cols());
    if k > limit {
        return Err(Error::Bounds { index: k, limit });
    }
    if !a.is_finite() {
        return Err(Error::numeric("matrix has non-finite entries"));
    }
    let (rows, cols) = a.shape();
    let (u_full, s_full, v_full) = if a.is_symmetric(1e-13) {
        let (values, vectors) = symmetric_eigen_sorted(a)?;
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| values[j].abs().total_cmp(&values[i].abs()).then(i.cmp(&j)));
        let u = DenseMatrix::from_fn(rows, limit, |r, c| vectors[(r, order[c])]);
        let v = DenseMatrix::from_fn(cols, limit, |r, c| {
            let i = order[c];
            if values[i] < 0.0 {
                -vectors[(r, i)]
            } else {
                vectors[(r, i)]
            }
        });
        let s = order.iter().map(|&i| values[i].abs()).collect::<Vec<_>>();
        (u, s, v)
    } else {
        let svd = SVD::try_new(
            a.to_nalgebra(),
            true,
            true,
            DECOMPOSITION_EPS,
            DECOMPOSITION_ITERATION_CAP,
        )
        .ok_or_else(|| {
            Error::numeric(format!(
                "SVD did not converge within {DECOMPOSITION_ITERATION_CAP} iterations"
            ))
        })?;
        let u = svd.u.expect("requested U");
        let v_t = svd.v_t.expect("requested Vᵀ");
        let s = svd.singular_values;
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));
        let mut um = DenseMatrix::zeros(rows, limit);
        let mut vm = DenseMatrix::zeros(cols, limit);
        for (c, &i) in order.iter().enumerate() {
            let sign = sign_of_largest(u.column(i).iter().copied());
            for r in 0..rows {
                um[(r, c)] = sign * u[(r, i)];
            }
            for r in 0..cols {
                vm[(r, c)] = sign * v_t[(i, r)];
            }
        }
        (um, order.iter().map(|&i| s[i]).collect(), vm)
    };
    Ok(TruncatedSvd {
        u: u_full.leading_columns(k),
        singular_values: s_full[..k].to_vec(),
        v: v_full.leading_columns(k),
    })
}

/// Largest-magnitude eigenvalue of a non-negative square matrix by power
/// iteration on `A + I` (the shift keeps bipartite spectra from oscillating).
pub fn spectral_radius(a: &DenseMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::validation("spectral radius needs a square matrix"));
    }
    if a.as_slice().iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::validation("spectral radius needs finite non-negative entries"));
    }
    let n = a.rows();
    if n == 0 || a.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let symmetric = a.is_symmetric(SYMMETRY_TOL);
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut estimate = f64::NAN;
    for _ in 0..POWER_ITERATION_CAP {
        let av = a.matvec(&v);
        let next = if symmetric {
            v.iter().zip(&av).map(|(x, y)| x * y).sum::<f64>()
        } else {
            let shifted: f64 = av.iter().zip(&v).map(|(y, x)| (y + x) * (y + x)).sum();
            shifted.sqrt() - 1.0
        };
        let mut w: Vec<f64> = av.iter().zip(&v).map(|(y, x)| y + x).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= norm);
        v = w;
        let converged = (next - estimate).abs() <= POWER_ITERATION_TOL * next.abs().max(1.0);
        estimate = next;
        if converged {
            break;
        }
    }
    Ok(estimate)
}

/// Compares an analytic gradient against central differences and returns the
/// largest per-coordinate relative error
/// `|g − g_fd| / max(1e-12, |g| + |g_fd|)`.
pub fn finite_diff_grad_check<F>(
    loss: F,
    analytic: &[f64],
    params: &[f64],
    epsilon: f64,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if !(epsilon > 0.0 && epsilon <= 1e-2) {
        return Err(Error::validation(format!("epsilon {epsilon} outside (0, 1e-2]")));
    }
    if analytic.len() != params.len() {
        return Err(Error::validation("gradient and parameter lengths differ"));
    }
    let mut x = params.to_vec();
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let orig = x[i];
        x[i] = orig + epsilon;
        let plus = loss(&x);
        x[i] = orig - epsilon;
        let minus = loss(&x);
        x[i] = orig;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::numeric(format!("loss is not finite around coordinate {i}")));
        }
        let fd = (plus - minus) / (2.0 * epsilon);
        let g = analytic[i];
        let rel = (g - fd).abs() / (g.abs() + fd.abs()).max(1e-12);
        worst = worst.max(rel);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64, non_negative: bool) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = if non_negative {
                    rng.random_range(0.0..1.0)
                } else {
                    rng.random_range(-1.0..1.0)
                };
                a[(i, j)] = x;
                a[(j, i)] = x;
            }
        }
        a
    }

    /// Cyclic Jacobi rotations; returns all eigenvalues ascending.
    fn jacobi_eigenvalues(a: &DenseMatrix) -> Vec<f64> {
        let n = a.rows();
        let mut m = a.clone();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)] * m[(i, j)])
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if m[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * m[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                        m[(k, p)] = c * mkp - s * mkq;
                        m[(k, q)] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                        m[(p, k)] = c * mpk - s * mqk;
                        m[(q, k)] = s * mpk + c * mqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    fn k_n_adjacency(n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 })
    }

    #[test]
    fn zero_rows_are_deflated() {
        // half the rows zero, like Katz on a graph with many isolated nodes
        let n = 60;
        let inner = random_symmetric(n / 2, 9, true);
        let a = DenseMatrix::from_fn(n, n, |i, j| if i % 2 == 0 && j % 2 == 0 { inner[(i / 2, j / 2)] } else { 0.0 });
        let mut expected = jacobi_eigenvalues(&inner);
        expected.extend(std::iter::repeat_n(0.0, n / 2));
        expected.sort_by(f64::total_cmp);
        let e = sym_eig_smallest(&a, n).unwrap();
        for (x, y) in e.values.iter().zip(&expected) {
            assert!((x - y).abs() < 1e-10);
        }
        let svd = truncated_svd(&a, n).unwrap();
        let back = svd.reconstruct();
        for (x, y) in back.as_slice().iter().zip(a.as_slice()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_spectrum() {
        let e = sym_eig_smallest(&DenseMatrix::identity(3), 2).unwrap();
        assert_eq!(e.values.len(), 2);
        for v in e.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn normalized_laplacian_of_k4() {
        let l = DenseMatrix::from_fn(4, 4, |i, j| if i == j { 1.0 } else { -1.0 / 3.0 });
        let e = sym_eig_smallest(&l, 4).unwrap();
        assert!(e.values[0].abs() < 1e-12);
        for &v in &e.values[1..] {
            assert!((v - 4.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eigen_matches_jacobi_oracle() {
        for seed in 0..5 {
            let a = random_symmetric(8, seed, false);
            let expected = jacobi_eigenvalues(&a);
            let got = sym_eig_smallest(&a, 8).unwrap();
            for (g, e) in got.values.iter().zip(&expected) {
                assert!((g - e).abs() < 1e-8, "{g} vs {e}");
            }
            let frob = a.frobenius_norm();
            for c in 0..8 {
                let v = got.vectors.column(c);
                let av = a.matvec(&v);
                let res: f64 = av
                    .iter()
                    .zip(&v)
                    .map(|(x, y)| (x - got.values[c] * y).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(res <= 1e-8 * frob);
                let (imax, _) = v
                    .iter()
                    .enumerate()
                    .fold((0, 0.0f64), |(bi, bv), (i, x)| if x.abs() > bv { (i, x.abs()) } else { (bi, bv) });
                assert!(v[imax] > 0.0);
            }
            let vtv = got.vectors.transpose().matmul(&got.vectors);
            for i in 0..8 {
                for j in 0..8 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((vtv[(i, j)] - want).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn eigen_rejects_asymmetric_and_large_k() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eig_smallest(&a, 1), Err(Error::Validation(_))));
        assert!(matches!(
            sym_eig_smallest(&DenseMatrix::identity(2), 3),
            Err(Error::Bounds { .. })
        ));
    }

    #[test]
    fn svd_of_zero_matrix() {
        let s = truncated_svd(&DenseMatrix::zeros(4, 3), 3).unwrap();
        assert!(s.singular_values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn svd_of_rank_one_outer_product() {
        let x = [1.0, -2.0, 3.0];
        let y = [0.5, 4.0, -1.0, 2.0];
        let a = DenseMatrix::from_fn(3, 4, |i, j| x[i] * y[j]);
        let s = truncated_svd(&a, 1).unwrap();
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((s.singular_values[0] - nx * ny).abs() < 1e-10, "{:?} {}", s.singular_values, nx * ny);
        assert!(a.sub(&s.reconstruct()).frobenius_norm() < 1e-10);
    }

    #[test]
    fn svd_full_rank_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = DenseMatrix::from_fn(10, 10, |_, _| rng.random_range(-1.0..1.0));
        let s = truncated_svd(&a, 10).unwrap();
        assert!(a.sub(&s.reconstruct()).frobenius_norm() < 1e-8);
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        let sym = random_symmetric(10, 3, false);
        let s = truncated_svd(&sym, 10).unwrap();
        assert!(sym.sub(&s.reconstruct()).frobenius_norm() < 1e-8);
        assert!(s.singular_values.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn svd_error_non_increasing_in_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = DenseMatrix::from_fn(9, 7, |_, _| rng.random_range(-1.0..1.0));
        let mut last = f64::INFINITY;
        for k in 0..=7 {
            let err = a.sub(&truncated_svd(&a, k).unwrap().reconstruct()).frobenius_norm();
            assert!(err <= last + 1e-12);
            last = err;
        }
        assert!(matches!(truncated_svd(&a, 8), Err(Error::Bounds { .. })));
    }

    #[test]
    fn svd_residual_is_eckart_young_optimal() {
        // optimal rank-k residual² = sum of the trailing eigenvalues of AᵀA
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (rows, cols, symmetric) in [(8, 6, false), (7, 7, true)] {
            let a = if symmetric {
                random_symmetric(rows, 21, false)
            } else {
                DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
            };
            let gram = a.transpose().matmul(&a);
            let mut sq = jacobi_eigenvalues(&gram);
            sq.reverse();
            for k in 1..=cols {
                let optimal: f64 = sq[k..].iter().map(|x| x.max(0.0)).sum::<f64>().sqrt();
                let got = a.sub(&truncated_svd(&a, k).unwrap().reconstruct()).frobenius_norm();
                assert!(
                    (got - optimal).abs() <= 1e-6 * a.frobenius_norm(),
                    "k={k}: {got} vs {optimal}"
                );
            }
        }
    }

    #[test]
    fn spectral_radius_of_complete_graphs() {
        assert!((spectral_radius(&k_n_adjacency(2)).unwrap() - 1.0).abs() < 1e-8);
        assert!((spectral_radius(&k_n_adjacency(4)).unwrap() - 3.0).abs() < 1e-8);
        assert_eq!(spectral_radius(&DenseMatrix::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn spectral_radius_matches_eigen_oracle() {
        for seed in 0..5 {
            let a = random_symmetric(6, 100 + seed, true);
            let ev = jacobi_eigenvalues(&a);
            let rho = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let est = spectral_radius(&a).unwrap();
            assert!((est - rho).abs() < 1e-6, "{est} vs {rho}");
            let scaled = spectral_radius(&a.scaled(3.5)).unwrap();
            assert!((scaled - 3.5 * est).abs() < 1e-6 * scaled.max(1.0));
        }
    }

    #[test]
    fn spectral_radius_of_bipartite_path() {
        // path on 4 nodes: ρ = 2cos(π/5)
        let mut a = DenseMatrix::zeros(4, 4);
        for i in 0..3 {
            a[(i, i + 1)] = 1.0;
            a[(i + 1, i)] = 1.0;
        }
        let want = 2.0 * (std::f64::consts::PI / 5.0).cos();
        assert!((spectral_radius(&a).unwrap() - want).abs() < 1e-8);
    }

    #[test]
    fn grad_check_quadratic_and_constant() {
        let x = [1.0, 2.0];
        let err = finite_diff_grad_check(|p| p.iter().map(|v| v * v).sum(), &[2.0, 4.0], &x, 1e-5)
            .unwrap();
        assert!(err < 1e-8);
        let err = finite_diff_grad_check(|_| 3.0, &[0.0, 0.0], &x, 1e-5).unwrap();
        assert_eq!(err, 0.0);
        assert!(finite_diff_grad_check(|_| f64::NAN, &[0.0], &[0.0], 1e-5).is_err());
        assert!(finite_diff_grad_check(|_| 0.0, &[0.0], &[0.0], 0.5).is_err());
    }

    #[test]
    fn gemm_transpose_variants() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let ab = a.matmul(&b);
        assert_eq!(ab.as_slice(), &[4.0, 5.0, 10.0, 11.0]);
        let mut c = DenseMatrix::zeros(2, 2);
        gemm(1.0, &b, true, &a, true, 0.0, &mut c);
        assert_eq!(c, ab.transpose());
        let aat = a.matmul_transposed(&a);
        assert_eq!(aat.as_slice(), &[14.0, 32.0, 32.0, 77.0]);
        let mut ata = DenseMatrix::zeros(3, 3);
        gemm(1.0, &a, true, &a, false, 0.0, &mut ata);
        assert_eq!(ata[(0, 0)], 17.0);
        assert_eq!(ata[(2, 1)], 36.0);
    }
}
