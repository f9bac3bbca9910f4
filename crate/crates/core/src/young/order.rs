use serde::Serialize;

use super::YoungFunction;
use crate::grid::{log_grid, PER_DECADE};

/// Witness for `H ≺ G`: `H(t) ≤ G(k t)` for all sampled `t ≥ t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderingWitness {
    pub k: f64,
    pub t0: f64,
}

/// Candidate scales are `10^(j/200)`, `j = 0..=K_STEPS`.
const K_STEPS: i32 = 600;

/// Relative growth over the outer decade that counts as "still growing".
const EDGE_GROWTH: f64 = 1e-6;

fn sample_range(h: &YoungFunction, g: &YoungFunction, t0: f64) -> Option<(f64, f64)> {
    let (hl, hh) = h.domain_hint();
    let (gl, gh) = g.domain_hint();
    let lo = hl.max(gl).max(t0);
    let hi = hh.min(gh);
    (hi > lo).then_some((lo, hi))
}

/// Smallest candidate `k ∈ {10^(j/200) : 0 ≤ j ≤ 600}` with `H(t) ≤ G(k t)`
/// on a log grid over `[max(t0, t_min), t_max]`.
///
/// Returns `None` when no candidate up to `10³` works or when the required
/// scale `G⁻¹(H(t))/t` is still growing at an open end of the sampled range.
pub fn prec(h: &YoungFunction, g: &YoungFunction, t0: f64) -> Option<OrderingWitness> {
    let (lo, hi) = sample_range(h, g, t0)?;
    let ts = log_grid(lo, hi, PER_DECADE);
    let mut need = Vec::with_capacity(ts.len());
    for &t in &ts {
        let hv = h.value(t);
        if !hv.is_finite() {
            return None;
        }
        need.push(g.inverse(hv).ok()? / t);
    }
    let (imax, &k_req) = need
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    let decade = PER_DECADE.min(ts.len() / 2);
    let n = ts.len();
    // Growth toward the top end, or toward the bottom end when the range
    // was cut by the grid rather than by t0.
    if imax + decade >= n && need[n - 1] > need[n - 1 - decade] * (1.0 + EDGE_GROWTH) {
        return None;
    }
    if lo > t0 && imax < decade && need[0] > need[decade] * (1.0 + EDGE_GROWTH) {
        return None;
    }
    let ok = |k: f64| {
        ts.iter()
            .all(|&t| h.value(t) <= g.value(k * t) * (1.0 + 1e-12))
    };
    let j0 = ((k_req.log10() * PER_DECADE as f64).floor() as i32 - 1).max(0);
    (j0..=K_STEPS)
        .map(|j| 10f64.powf(j as f64 / PER_DECADE as f64))
        .find(|&k| ok(k))
        .map(|k| OrderingWitness { k, t0 })
}

/// Probe scales for `prec_prec`.
pub const PROBE_SCALES: [f64; 5] = [1e-2, 1e-1, 1.0, 10.0, 100.0];
/// Ratio below which decay is accepted outright.
pub const DECAY_EPS: f64 = 1e-12;
/// Number of trailing doublings inspected.
const TAIL_STEPS: usize = 8;
/// Minimum average log-slope of `H(t)/G(kt)` counted as decay.
const MIN_DECAY_SLOPE: f64 = 1e-3;

/// Outcome of [`prec_prec`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrecPrecVerdict {
    pub holds: bool,
    /// Average `d ln(H(t)/G(kt)) / d ln t` over the tail window, per probe.
    pub tail_slopes: Vec<f64>,
    pub diagnostic: String,
}

/// Numeric test of `H ≺≺ G`: for every probe `k`, `H(t)/G(k t)` must keep
/// decreasing along doublings `t = 2^j` up to `t_max`, either dropping below
/// [`DECAY_EPS`] or decaying at log-slope at most `−10⁻³`.
pub fn prec_prec(h: &YoungFunction, g: &YoungFunction) -> PrecPrecVerdict {
    let t_max = h.domain_hint().1.min(g.domain_hint().1);
    let mut ts = vec![1.0];
    while ts.last().unwrap() * 2.0 <= t_max {
        ts.push(ts.last().unwrap() * 2.0);
    }
    if ts.len() < TAIL_STEPS + 1 {
        return PrecPrecVerdict {
            holds: false,
            tail_slopes: Vec::new(),
            diagnostic: format!("t_max = {t_max:e} leaves too few doublings"),
        };
    }
    let mut slopes = Vec::new();
    for k in PROBE_SCALES {
        let r: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let d = g.value(k * t);
                if d.is_infinite() {
                    0.0
                } else {
                    h.value(t) / d
                }
            })
            .collect();
        let tail = &r[r.len() - TAIL_STEPS - 1..];
        let last = *tail.last().unwrap();
        if last < DECAY_EPS {
            slopes.push(f64::NEG_INFINITY);
            continue;
        }
        let slope = (last / tail[0]).ln() / (TAIL_STEPS as f64 * std::f64::consts::LN_2);
        slopes.push(slope);
        let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
        if !decreasing || slope > -MIN_DECAY_SLOPE {
            return PrecPrecVerdict {
                holds: false,
                tail_slopes: slopes,
                diagnostic: format!(
                    "H(t)/G({k}·t) not decaying: tail log-slope {slope:.3e}, last ratio {last:.3e}"
                ),
            };
        }
    }
    PrecPrecVerdict {
        holds: true,
        tail_slopes: slopes,
        diagnostic: String::from("decay on all probe scales"),
    }
}
