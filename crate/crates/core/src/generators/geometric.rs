//! Spatial models: random geometric, Waxman and threshold random hyperbolic graphs.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::Graph;

fn uniform_points(n: usize, width: f64, height: f64, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| (rng.random::<f64>() * width, rng.random::<f64>() * height))
        .collect()
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Unit square; `u ~ v` iff their Euclidean distance is at most `radius`.
pub(super) fn random_geometric(n: usize, radius: f64, rng: &mut ChaCha8Rng) -> Result<Graph> {
    let pts = uniform_points(n, 1.0, 1.0, rng);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if dist(pts[u], pts[v]) <= radius {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

pub(super) fn waxman(
    n: usize,
    alpha: f64,
    beta_w: f64,
    domain_size: [f64; 2],
    radius: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<Graph> {
    let pts = uniform_points(n, domain_size[0], domain_size[1], rng);
    let mut max_dist = 0.0f64;
    for u in 0..n {
        for v in u + 1..n {
            max_dist = max_dist.max(dist(pts[u], pts[v]));
        }
    }
    let scale = beta_w * max_dist;
    let cutoff = radius.unwrap_or(f64::INFINITY);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let d = dist(pts[u], pts[v]);
            // one draw per pair keeps the stream independent of the cutoff
            let draw: f64 = rng.random();
            let p = if scale > 0.0 { alpha * (-d / scale).exp() } else { alpha };
            if d <= cutoff && draw < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Hyperbolic disk of radius `R` (curvature −1). Angles are uniform; radii
/// have density `α·sinh(αr)/(cosh(αR) − 1)`, which is uniform in area at
/// `α = 1`. Pairs closer than `R` are linked.
pub(super) fn random_hyperbolic(
    n: usize,
    radius_r: f64,
    alpha_h: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Graph> {
    let span = (alpha_h * radius_r).cosh() - 1.0;
    let nodes: Vec<(f64, f64, f64, f64)> = (0..n)
        .map(|_| {
            let theta = rng.random::<f64>() * 2.0 * PI;
            let u: f64 = rng.random();
            let r = (1.0 + span * u).acosh() / alpha_h;
            (theta, r.cosh(), r.sinh(), r)
        })
        .collect();
    let threshold = radius_r.cosh();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let (ta, ca, sa, _) = nodes[a];
            let (tb, cb, sb, _) = nodes[b];
            let cosh_d = ca * cb - sa * sb * (ta - tb).cos();
            if cosh_d < threshold {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Probability that two uniform points of the unit square lie within `r ≤ 1`.
pub(super) fn unit_square_within(r: f64) -> f64 {
    let r = r.clamp(0.0, 1.0);
    PI * r * r - 8.0 / 3.0 * r.powi(3) + 0.5 * r.powi(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn unit_square_closed_form_matches_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for r in [0.05, 0.2, 0.5] {
            let trials = 200_000;
            let hits = (0..trials)
                .filter(|_| {
                    let a = (rng.random::<f64>(), rng.random::<f64>());
                    let b = (rng.random::<f64>(), rng.random::<f64>());
                    dist(a, b) <= r
                })
                .count();
            let mc = hits as f64 / trials as f64;
            assert!((mc - unit_square_within(r)).abs() < 0.005, "r={r}: {mc}");
        }
        assert!((unit_square_within(1.0) - (PI - 8.0 / 3.0 + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn waxman_zero_radius_has_no_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = waxman(40, 1.0, 10.0, [1.0, 1.0], Some(0.0), &mut rng).unwrap();
        assert_eq!(g.m(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // alpha = 1 and a huge decay length links nearly everything
        let g = waxman(40, 1.0, 1e9, [2.0, 1.0], None, &mut rng).unwrap();
        assert_eq!(g.m(), 40 * 39 / 2);
    }

    #[test]
    fn hyperbolic_radius_controls_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dense = random_hyperbolic(200, 4.0, 1.0, &mut rng).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sparse = random_hyperbolic(200, 10.0, 1.0, &mut rng).unwrap();
        assert!(dense.m() > sparse.m());
    }
}
