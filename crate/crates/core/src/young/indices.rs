use serde::Serialize;

use super::YoungFunction;
use crate::grid::{inf_on_grid, log_grid, sup_on_grid, PER_DECADE};
use crate::{Error, Result};

/// Which growth ratio [`index_profile`] scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexMode {
    /// `t·g(t)/G(t)`, bounded by `p⁻` and `p⁺`.
    GBased,
    /// `t·g'(t)/g(t)`, bounded by `p⁻ − 1` and `p⁺ − 1`.
    DensityBased,
}

const ZOOM_ROUNDS: usize = 4;

/// Infimum and supremum of the growth ratio over the domain hint.
pub fn index_profile(f: &YoungFunction, mode: IndexMode) -> Result<(f64, f64)> {
    let (lo, hi) = f.domain_hint();
    let grid = log_grid(lo, hi, PER_DECADE);
    let ratio: Box<dyn Fn(f64) -> f64> = match mode {
        IndexMode::GBased => Box::new(|t: f64| t * f.density(t) / f.value(t)),
        IndexMode::DensityBased => {
            if !f.has_density_derivative() {
                return Err(Error::Capability(format!(
                    "{} has no density derivative; density-based indices unavailable",
                    f.label()
                )));
            }
            Box::new(|t: f64| t * f.density_derivative(t).unwrap_or(f64::NAN) / f.density(t))
        }
    };
    let inf = inf_on_grid(&ratio, &grid, ZOOM_ROUNDS);
    let sup = sup_on_grid(&ratio, &grid, ZOOM_ROUNDS);
    Ok((inf.value, sup.value))
}

/// `t·g(t)/G(t)` at a single point.
pub(crate) fn growth_ratio(f: &YoungFunction, t: f64) -> f64 {
    t * f.density(t) / f.value(t)
}

/// Grid estimate of a supremum-type constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantEstimate {
    /// Estimate, clamped below at 1.
    pub value: f64,
    /// Unclamped grid supremum.
    pub raw_sup: f64,
    /// The supremum is attained on the outer decade of the grid and exceeds
    /// the supremum over the interior: the constant may not exist.
    pub edge_growth: bool,
}

fn pair_sup(
    n: usize,
    inner: std::ops::Range<usize>,
    ratio: impl Fn(usize, usize) -> f64,
) -> ConstantEstimate {
    let mut full = f64::NEG_INFINITY;
    let mut interior = f64::NEG_INFINITY;
    for i in 0..n {
        for j in i..n {
            let r = ratio(i, j);
            if !r.is_finite() {
                continue;
            }
            if r > full {
                full = r;
            }
            if inner.contains(&i) && inner.contains(&j) && r > interior {
                interior = r;
            }
        }
    }
    ConstantEstimate {
        value: full.max(1.0),
        raw_sup: full,
        edge_growth: full > interior * (1.0 + 1e-6),
    }
}

/// Estimate of the Δ′ constant: `sup G(ab) / (G(a) G(b))` over the grid.
pub fn delta_prime_constant(f: &YoungFunction) -> ConstantEstimate {
    let (lo, hi) = f.domain_hint();
    let grid = log_grid(lo, hi, PER_DECADE);
    let n = grid.len();
    // Products of grid nodes land on the squared grid: a_i·a_j = ext[i+j].
    let ext = log_grid(lo * lo, hi * hi, PER_DECADE);
    let g: Vec<f64> = grid.iter().map(|&t| f.value(t)).collect();
    let gext: Vec<f64> = ext.iter().map(|&t| f.value(t)).collect();
    let decade = PER_DECADE.min(n / 4);
    pair_sup(n, decade..n - decade, |i, j| gext[i + j] / (g[i] * g[j]))
}

/// Estimate of `c` in `G⁻¹(s) G⁻¹(t) ≤ c G⁻¹(st)`.
pub fn inverse_product_constant(f: &YoungFunction) -> Result<ConstantEstimate> {
    let (lo, hi) = f.domain_hint();
    let grid = log_grid(lo, hi, PER_DECADE);
    let n = grid.len();
    let ext = log_grid(lo * lo, hi * hi, PER_DECADE);
    let inv: Vec<f64> = grid.iter().map(|&y| f.inverse(y)).collect::<Result<_>>()?;
    let inv_ext: Vec<f64> = ext.iter().map(|&y| f.inverse(y)).collect::<Result<_>>()?;
    let decade = PER_DECADE.min(n / 4);
    Ok(pair_sup(n, decade..n - decade, |i, j| {
        inv[i] * inv[j] / inv_ext[i + j]
    }))
}
