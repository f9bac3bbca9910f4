use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{index_profile, IndexMode, YoungFunction};

/// Result of sampling `(F(a) − F(b))·(a − b)` with `F(a) = g(|a|) a/|a|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub samples: usize,
    pub dim: usize,
    pub seed: u64,
    pub min_dot: f64,
    /// Pairs with dot product below `−abs_tol`.
    pub violations: usize,
    pub abs_tol: f64,
    /// Whether `t g'(t)/g(t) ≥ 1` on the grid; `None` without `g'`.
    pub index_condition: Option<bool>,
}

pub const MONOTONICITY_ABS_TOL: f64 = 1e-12;

fn field(g: &YoungFunction, a: &[f64]) -> Vec<f64> {
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return vec![0.0; a.len()];
    }
    let s = g.density(norm) / norm;
    a.iter().map(|x| s * x).collect()
}

/// `(F(a) − F(b))·(a − b)`; the field at `0` is the zero vector.
pub fn monotonicity_dot(g: &YoungFunction, a: &[f64], b: &[f64]) -> f64 {
    let fa = field(g, a);
    let fb = field(g, b);
    (0..a.len()).map(|i| (fa[i] - fb[i]) * (a[i] - b[i])).sum()
}

fn draw(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    (0..dim).map(|_| scale * rng.random_range(-1.0..1.0)).collect()
}

/// Sample `samples` pairs `a, b ∈ ℝ^dim` from a seeded stream.
///
/// Magnitudes are log-uniform over four decades; every 16th pair is a
/// near-coincident pair `b = a + 10⁻⁶ δ`.
pub fn vectorfield_monotonicity_check(
    g: &YoungFunction,
    samples: usize,
    dim: usize,
    seed: u64,
) -> MonotonicityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_dot = f64::INFINITY;
    let mut violations = 0;
    for i in 0..samples {
        let a = draw(&mut rng, dim);
        let b = if i % 16 == 15 {
            let d = draw(&mut rng, dim);
            a.iter().zip(&d).map(|(x, y)| x + 1e-6 * y).collect()
        } else {
            draw(&mut rng, dim)
        };
        let dot = monotonicity_dot(g, &a, &b);
        min_dot = min_dot.min(dot);
        if dot < -MONOTONICITY_ABS_TOL {
            violations += 1;
        }
    }
    let index_condition = index_profile(g, IndexMode::DensityBased)
        .ok()
        .map(|(lo, _)| lo >= 1.0 - 1e-9);
    MonotonicityReport {
        samples,
        dim,
        seed,
        min_dot,
        violations,
        abs_tol: MONOTONICITY_ABS_TOL,
        index_condition,
    }
}
