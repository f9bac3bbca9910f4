//! Log-spaced sampling grids and sup/inf estimation on them.

/// Lower end of the default estimation range.
pub const GRID_LO: f64 = 1e-6;
/// Upper end of the default estimation range.
pub const GRID_HI: f64 = 1e6;
/// Points per decade for sup/inf estimation.
pub const PER_DECADE: usize = 200;

/// Log-spaced grid on `[lo, hi]` with `per_decade` points per decade.
///
/// Nodes are `10^(e0 + i/per_decade)`, so every integer power of ten inside
/// the range is hit exactly.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo, "log_grid needs 0 < lo < hi");
    let e0 = lo.log10();
    let e1 = hi.log10();
    let steps = ((e1 - e0) * per_decade as f64).round().max(1.0) as usize;
    (0..=steps)
        .map(|i| {
            let e = e0 + i as f64 / per_decade as f64;
            if e.fract() == 0.0 {
                10f64.powi(e as i32)
            } else {
                10f64.powf(e)
            }
        })
        .collect()
}

/// Result of a grid search for a supremum or infimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub arg: f64,
    /// The extremum was found at the first or last grid node.
    pub at_edge: bool,
}

fn argbest(grid: &[f64], vals: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for i in 1..vals.len() {
        if vals[i].is_nan() {
            continue;
        }
        if vals[best].is_nan() || better(vals[i], vals[best]) {
            best = i;
        }
    }
    debug_assert_eq!(grid.len(), vals.len());
    best
}

fn search(f: &dyn Fn(f64) -> f64, grid: &[f64], zoom_rounds: usize, sup: bool) -> Extremum {
    let better = |a: f64, b: f64| if sup { a > b } else { a < b };
    let vals: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    let i = argbest(grid, &vals, better);
    let at_edge = i == 0 || i + 1 == grid.len();
    let mut best = Extremum {
        value: vals[i],
        arg: grid[i],
        at_edge,
    };
    // Zoom into the neighbourhood of the best node; picks up extrema that sit
    // between nodes (including one-sided limits at a kink).
    let mut lo = grid[i.saturating_sub(1)];
    let mut hi = grid[(i + 1).min(grid.len() - 1)];
    for _ in 0..zoom_rounds {
        if hi <= lo {
            break;
        }
        let m = 40;
        let (la, lb) = (lo.ln(), hi.ln());
        let pts: Vec<f64> = (0..=m)
            .map(|k| (la + (lb - la) * k as f64 / m as f64).exp())
            .collect();
        let v: Vec<f64> = pts.iter().map(|&t| f(t)).collect();
        let j = argbest(&pts, &v, better);
        if better(v[j], best.value) {
            best.value = v[j];
            best.arg = pts[j];
        }
        lo = pts[j.saturating_sub(1)];
        hi = pts[(j + 1).min(m)];
    }
    best
}

/// Supremum of `f` over `grid`, refined by `zoom_rounds` local zooms.
pub fn sup_on_grid(f: &dyn Fn(f64) -> f64, grid: &[f64], zoom_rounds: usize) -> Extremum {
    search(f, grid, zoom_rounds, true)
}

/// Infimum of `f` over `grid`, refined by `zoom_rounds` local zooms.
pub fn inf_on_grid(f: &dyn Fn(f64) -> f64, grid: &[f64], zoom_rounds: usize) -> Extremum {
    search(f, grid, zoom_rounds, false)
}
