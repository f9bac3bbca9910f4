//! Young functions and their calculus.
//!
//! A Young function is a convex increasing `G: [0,∞) → [0,∞)` with `G(0) = 0`
//! given by integrating a nondecreasing density `g`. Values are immutable
//! after construction and cheap to clone; every operation here is pure.

mod conjugate;
mod indices;
mod monotone;
mod order;
mod sobolev;
mod table;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::grid::{log_grid, GRID_HI, GRID_LO};
use crate::quad;
use crate::{Error, Result};

pub use indices::{
    delta_prime_constant, index_profile, inverse_product_constant, ConstantEstimate, IndexMode,
};
pub use monotone::{
    monotonicity_dot, vectorfield_monotonicity_check, MonotonicityReport, MONOTONICITY_ABS_TOL,
};
pub use order::{prec, prec_prec, OrderingWitness, PrecPrecVerdict, PROBE_SCALES};
pub use sobolev::{
    critical_composition, critical_function, hardy_transform, sigma, sobolev_classify,
    tail_index, SobolevClass, INDEX_TOL,
};

/// Relative tolerance of [`YoungFunction::inverse`].
pub const INVERSE_RTOL: f64 = 1e-13;

/// Evaluation kernel behind a [`YoungFunction`].
pub trait YoungKernel: Send + Sync {
    fn value(&self, t: f64) -> f64;
    fn density(&self, t: f64) -> f64;
    fn density_derivative(&self, _t: f64) -> Option<f64> {
        None
    }
    /// Closed-form or tabulated inverse, when one is cheaper than root finding.
    fn inverse(&self, _y: f64) -> Option<f64> {
        None
    }
}

/// Built-in families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Power,
    PowerLog,
    PiecewisePower,
}

/// Serializable description of a built-in Young function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum YoungSpec {
    /// `t^p`
    Power { p: f64 },
    /// `t^p (1 + |log t|)`
    PowerLog { p: f64 },
    /// `t^p` on `(0,1]`, `t^q` on `(1,∞)`
    PiecewisePower { p: f64, q: f64 },
}

impl YoungSpec {
    pub fn build(&self) -> Result<YoungFunction> {
        match *self {
            YoungSpec::Power { p } => YoungFunction::power(p),
            YoungSpec::PowerLog { p } => YoungFunction::power_log(p),
            YoungSpec::PiecewisePower { p, q } => YoungFunction::piecewise_power(p, q),
        }
    }
}

/// A Young function `G` with density `g = G'`.
#[derive(Clone)]
pub struct YoungFunction {
    label: String,
    family: Option<Family>,
    params: Vec<f64>,
    kernel: Arc<dyn YoungKernel>,
    domain_hint: (f64, f64),
}

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("YoungFunction")
            .field("label", &self.label)
            .field("params", &self.params)
            .field("domain_hint", &self.domain_hint)
            .finish()
    }
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// `t^e`, using repeated multiplication for small integer exponents so that
/// powers of two stay exact.
#[inline]
fn pow(t: f64, e: f64) -> f64 {
    if e.fract() == 0.0 && e.abs() <= 32.0 {
        t.powi(e as i32)
    } else {
        t.powf(e)
    }
}

struct Power {
    p: f64,
}

impl YoungKernel for Power {
    fn value(&self, t: f64) -> f64 {
        pow(t, self.p)
    }
    fn density(&self, t: f64) -> f64 {
        self.p * pow(t, self.p - 1.0)
    }
    fn density_derivative(&self, t: f64) -> Option<f64> {
        Some(self.p * (self.p - 1.0) * pow(t, self.p - 2.0))
    }
    fn inverse(&self, y: f64) -> Option<f64> {
        Some(if self.p == 2.0 { y.sqrt() } else { y.powf(1.0 / self.p) })
    }
}

struct PowerLog {
    p: f64,
}

impl YoungKernel for PowerLog {
    fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        pow(t, self.p) * (1.0 + t.ln().abs())
    }
    // Right-continuous at t = 1, where g jumps from p-1 to p+1.
    fn density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let l = t.ln();
        let p = self.p;
        if t < 1.0 {
            pow(t, p - 1.0) * (p - p * l - 1.0)
        } else {
            pow(t, p - 1.0) * (p + p * l + 1.0)
        }
    }
    fn density_derivative(&self, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(0.0);
        }
        let l = t.ln();
        let p = self.p;
        let tp = pow(t, p - 2.0);
        Some(if t < 1.0 {
            tp * ((p - 1.0) * (p - 1.0 - p * l) - p)
        } else {
            tp * ((p - 1.0) * (p + 1.0 + p * l) + p)
        })
    }
}

struct PiecewisePower {
    p: f64,
    q: f64,
}

impl YoungKernel for PiecewisePower {
    fn value(&self, t: f64) -> f64 {
        if t <= 1.0 {
            pow(t, self.p)
        } else {
            pow(t, self.q)
        }
    }
    fn density(&self, t: f64) -> f64 {
        if t <= 1.0 {
            self.p * pow(t, self.p - 1.0)
        } else {
            self.q * pow(t, self.q - 1.0)
        }
    }
    fn density_derivative(&self, t: f64) -> Option<f64> {
        Some(if t <= 1.0 {
            self.p * (self.p - 1.0) * pow(t, self.p - 2.0)
        } else {
            self.q * (self.q - 1.0) * pow(t, self.q - 2.0)
        })
    }
}

type Callable = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

struct Custom {
    value: Callable,
    density: Callable,
    density_derivative: Option<Callable>,
}

impl YoungKernel for Custom {
    fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }
    fn density(&self, t: f64) -> f64 {
        (self.density)(t)
    }
    fn density_derivative(&self, t: f64) -> Option<f64> {
        self.density_derivative.as_ref().map(|d| d(t))
    }
}

struct Rescaled {
    base: YoungFunction,
    scale: f64,
}

impl YoungKernel for Rescaled {
    fn value(&self, t: f64) -> f64 {
        self.base.value(t) / self.scale
    }
    fn density(&self, t: f64) -> f64 {
        self.base.density(t) / self.scale
    }
    fn density_derivative(&self, t: f64) -> Option<f64> {
        self.base.density_derivative(t).map(|d| d / self.scale)
    }
}

fn check_exponent(name: &str, p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be a finite number > 1, got {p}"
        )))
    }
}

fn fmt_param(x: f64) -> String {
    format!("{x}")
}

impl YoungFunction {
    /// Wrap an arbitrary kernel.
    pub fn from_kernel(
        label: impl Into<String>,
        params: Vec<f64>,
        kernel: Arc<dyn YoungKernel>,
        domain_hint: (f64, f64),
    ) -> Self {
        Self {
            label: label.into(),
            family: None,
            params,
            kernel,
            domain_hint,
        }
    }

    /// `G(t) = t^p`, `p > 1`.
    pub fn power(p: f64) -> Result<Self> {
        check_exponent("p", p)?;
        Ok(Self {
            label: format!("power(p={})", fmt_param(p)),
            family: Some(Family::Power),
            params: vec![p],
            kernel: Arc::new(Power { p }),
            domain_hint: (GRID_LO, GRID_HI),
        })
    }

    /// `G(t) = t^p (1 + |log t|)`, `p > 1`.
    pub fn power_log(p: f64) -> Result<Self> {
        check_exponent("p", p)?;
        Ok(Self {
            label: format!("power_log(p={})", fmt_param(p)),
            family: Some(Family::PowerLog),
            params: vec![p],
            kernel: Arc::new(PowerLog { p }),
            domain_hint: (GRID_LO, GRID_HI),
        })
    }

    /// `G(t) = t^p` on `(0,1]` and `t^q` on `(1,∞)`, `p, q > 1`.
    pub fn piecewise_power(p: f64, q: f64) -> Result<Self> {
        check_exponent("p", p)?;
        check_exponent("q", q)?;
        Ok(Self {
            label: format!("piecewise_power(p={},q={})", fmt_param(p), fmt_param(q)),
            family: Some(Family::PiecewisePower),
            params: vec![p, q],
            kernel: Arc::new(PiecewisePower { p, q }),
            domain_hint: (GRID_LO, GRID_HI),
        })
    }

    /// Construct a built-in family from its parameter list.
    pub fn make_builtin(family: Family, params: &[f64]) -> Result<Self> {
        let need = match family {
            Family::Power | Family::PowerLog => 1,
            Family::PiecewisePower => 2,
        };
        if params.len() != need {
            return Err(Error::InvalidParameter(format!(
                "{family:?} takes {need} parameter(s), got {}",
                params.len()
            )));
        }
        match family {
            Family::Power => Self::power(params[0]),
            Family::PowerLog => Self::power_log(params[0]),
            Family::PiecewisePower => Self::piecewise_power(params[0], params[1]),
        }
    }

    /// User-defined Young function from an analytic `(G, g)` pair.
    pub fn custom<V, D>(
        label: impl Into<String>,
        value: V,
        density: D,
        density_derivative: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
        domain_hint: (f64, f64),
    ) -> Result<Self>
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let (lo, hi) = domain_hint;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "domain hint must satisfy 0 < t_min < t_max < ∞, got ({lo}, {hi})"
            )));
        }
        Ok(Self::from_kernel(
            label,
            Vec::new(),
            Arc::new(Custom {
                value: Arc::new(value),
                density: Arc::new(density),
                density_derivative,
            }),
            domain_hint,
        ))
    }

    /// `G(t) / G(1)`, which satisfies `G(1) = 1`.
    pub fn rescaled(&self) -> Self {
        let scale = self.value(1.0);
        Self::from_kernel(
            format!("{}/G(1)", self.label),
            self.params.clone(),
            Arc::new(Rescaled {
                base: self.clone(),
                scale,
            }),
            self.domain_hint,
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn family(&self) -> Option<Family> {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Exponent `p` when this is `power(p)`.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.family {
            Some(Family::Power) => Some(self.params[0]),
            _ => None,
        }
    }

    pub fn domain_hint(&self) -> (f64, f64) {
        self.domain_hint
    }

    pub fn with_domain_hint(mut self, hint: (f64, f64)) -> Self {
        self.domain_hint = hint;
        self
    }

    /// `G(t)` for `t ≥ 0`.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        self.kernel.value(t)
    }

    /// `g(t) = G'(t)`.
    #[inline]
    pub fn density(&self, t: f64) -> f64 {
        self.kernel.density(t)
    }

    /// `g'(t)`, when available.
    pub fn density_derivative(&self, t: f64) -> Option<f64> {
        self.kernel.density_derivative(t)
    }

    pub fn has_density_derivative(&self) -> bool {
        self.kernel.density_derivative(1.0).is_some()
    }

    /// `G⁻¹(y)` for `y ≥ 0`: bracketing bisection refined by safeguarded
    /// Newton steps.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y.is_nan() || y < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "inverse needs y ≥ 0, got {y}"
            )));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if !y.is_finite() {
            return Err(Error::Overflow(y));
        }
        if let Some(t) = self.kernel.inverse(y) {
            return Ok(t);
        }
        let g = |t: f64| self.value(t);
        // Bracket with G(lo) < y ≤ G(hi).
        let (mut lo, mut hi);
        if g(1.0) < y {
            lo = 1.0;
            hi = 2.0;
            while g(hi) < y {
                lo = hi;
                hi *= 2.0;
                if hi > 1e300 {
                    return Err(Error::Overflow(y));
                }
            }
        } else {
            hi = 1.0;
            lo = 0.5;
            while g(lo) >= y {
                hi = lo;
                lo *= 0.5;
                if lo < 1e-300 {
                    return Ok(lo);
                }
            }
        }
        let mut t = (lo * hi).sqrt();
        for _ in 0..400 {
            let f = g(t) - y;
            if f.abs() <= INVERSE_RTOL * y {
                return Ok(t);
            }
            if f < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(0.5 * (lo + hi));
            }
            let d = self.density(t);
            let newton = t - f / d;
            t = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else if hi / lo > 4.0 {
                (lo * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
        }
        Ok(t)
    }

    /// Right-continuous generalized inverse of the density,
    /// `sup{a ≥ 0 : g(a) ≤ s}`.
    pub fn density_inverse(&self, s: f64) -> f64 {
        if !(s > 0.0) {
            return 0.0;
        }
        let g = |a: f64| self.density(a);
        let (mut lo, mut hi);
        if g(1.0) <= s {
            lo = 1.0;
            hi = 2.0;
            while g(hi) <= s {
                lo = hi;
                hi *= 2.0;
                if hi > 1e300 {
                    return f64::INFINITY;
                }
            }
        } else {
            hi = 1.0;
            lo = 0.5;
            while g(lo) > s {
                hi = lo;
                lo *= 0.5;
                if lo < 1e-300 {
                    return 0.0;
                }
            }
        }
        for _ in 0..200 {
            if hi - lo <= 2.0 * f64::EPSILON * hi {
                break;
            }
            let mid = if hi / lo > 1.5 {
                (lo * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) <= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Complementary function `G̃(t) = sup{ta − G(a)}`.
    pub fn conjugate(&self) -> YoungFunction {
        conjugate::conjugate(self)
    }

    /// Numeric check of the Young-function invariants on a log grid.
    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

/// Outcome of [`YoungFunction::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub zero_at_origin: bool,
    pub strictly_increasing: bool,
    pub convex: bool,
    pub density_nondecreasing: bool,
    pub density_positive: bool,
    /// Largest relative mismatch between `G(t)` and `∫₀ᵗ g`.
    pub integral_mismatch: f64,
    /// `g(t_max)`; should be large (`g → ∞`).
    pub density_at_t_max: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.zero_at_origin
            && self.strictly_increasing
            && self.convex
            && self.density_nondecreasing
            && self.density_positive
            && self.integral_mismatch < 1e-6
    }
}

fn validate(f: &YoungFunction) -> ValidationReport {
    let (lo, hi) = f.domain_hint;
    let grid = log_grid(lo, hi, 20);
    let vals: Vec<f64> = grid.iter().map(|&t| f.value(t)).collect();
    let dens: Vec<f64> = grid.iter().map(|&t| f.density(t)).collect();
    let strictly_increasing = vals.windows(2).all(|w| w[1] > w[0]);
    let rel = 1e-12;
    // Three-point convexity: slope of consecutive chords is nondecreasing.
    let convex = grid.windows(3).zip(vals.windows(3)).all(|(t, v)| {
        let s1 = (v[1] - v[0]) / (t[1] - t[0]);
        let s2 = (v[2] - v[1]) / (t[2] - t[1]);
        s2 >= s1 * (1.0 - rel)
    });
    let density_nondecreasing = dens.windows(2).all(|w| w[1] >= w[0] * (1.0 - rel));
    let density_positive = dens.iter().all(|&d| d > 0.0);
    let mut integral_mismatch: f64 = 0.0;
    for &t in [1e-3, 0.5, 1.0, 2.0, 10.0].iter().filter(|&&t| t > lo && t < hi) {
        // Split at 1 where the built-in families may have a kink.
        let g = |s: f64| f.density(s);
        let mut int = quad::head_integral(&g, t.min(1.0), 1e-11)
            .map(|e| e.value)
            .unwrap_or(f64::NAN);
        if t > 1.0 {
            int += quad::adaptive_simpson(&g, 1.0, t, 1e-12, 0.0).value;
        }
        let v = f.value(t);
        integral_mismatch = integral_mismatch.max(((int - v) / v).abs());
    }
    ValidationReport {
        zero_at_origin: f.value(0.0) == 0.0,
        strictly_increasing,
        convex,
        density_nondecreasing,
        density_positive,
        integral_mismatch,
        density_at_t_max: f.density(hi),
    }
}
