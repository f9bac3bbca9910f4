//! Discrete fields on intervals and balls (radial), weights, modulars and
//! Luxemburg norms.
//!
//! Fields are continuous piecewise-linear (P1) on a uniform grid of `N`
//! elements. Integrals of nonlinear functions of a field use the four-point
//! Gauss rule on every element, split at discontinuities of the weight, and
//! include the radial measure `n ωₙ r^(n−1) dr` on balls.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::quad::{gauss_composite, GAUSS4_NODES, GAUSS4_WEIGHTS};
use crate::young::YoungFunction;
use crate::{Error, Result};

/// Volume of the unit ball in `ℝⁿ`.
pub fn unit_ball_volume(n: usize) -> f64 {
    // ω₀ = 1, ω₁ = 2, ωₙ = 2π/n · ωₙ₋₂
    let mut w = if n.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if n.is_multiple_of(2) { 2 } else { 3 };
    while k <= n {
        w *= 2.0 * PI / k as f64;
        k += 2;
    }
    w
}

/// An interval `(a, b)` or a ball of radius `R` in `ℝⁿ` (radial fields).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainGeometry {
    Interval { a: f64, b: f64 },
    Ball { radius: f64, dim: usize },
}

impl DomainGeometry {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        let d = DomainGeometry::Interval { a, b };
        d.validate()?;
        Ok(d)
    }

    pub fn ball(radius: f64, dim: usize) -> Result<Self> {
        let d = DomainGeometry::Ball { radius, dim };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DomainGeometry::Interval { a, b } if a.is_finite() && b.is_finite() && a < b => Ok(()),
            DomainGeometry::Ball { radius, dim } if radius > 0.0 && radius.is_finite() && dim >= 1 => {
                Ok(())
            }
            _ => Err(Error::InvalidParameter(format!("invalid domain {self:?}"))),
        }
    }

    /// Spatial dimension.
    pub fn dim(&self) -> usize {
        match *self {
            DomainGeometry::Interval { .. } => 1,
            DomainGeometry::Ball { dim, .. } => dim,
        }
    }

    /// `|Ω|`.
    pub fn measure(&self) -> f64 {
        match *self {
            DomainGeometry::Interval { a, b } => b - a,
            DomainGeometry::Ball { radius, dim } => unit_ball_volume(dim) * radius.powi(dim as i32),
        }
    }

    /// `r_Ω`.
    pub fn inradius(&self) -> f64 {
        match *self {
            DomainGeometry::Interval { a, b } => 0.5 * (b - a),
            DomainGeometry::Ball { radius, .. } => radius,
        }
    }

    /// Coordinate range `[x₀, x₁]` of the discretization (`[0, R]` on balls).
    pub fn span(&self) -> (f64, f64) {
        match *self {
            DomainGeometry::Interval { a, b } => (a, b),
            DomainGeometry::Ball { radius, .. } => (0.0, radius),
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, DomainGeometry::Ball { .. })
    }

    /// Density of the measure in the discretization coordinate.
    #[inline]
    pub fn measure_density(&self, x: f64) -> f64 {
        match *self {
            DomainGeometry::Interval { .. } => 1.0,
            DomainGeometry::Ball { dim, .. } => {
                dim as f64 * unit_ball_volume(dim) * x.powi(dim as i32 - 1)
            }
        }
    }

    /// Measure of the slab `x₀ ≤ x ≤ x₁` (shell on balls).
    pub fn slab_measure(&self, x0: f64, x1: f64) -> f64 {
        match *self {
            DomainGeometry::Interval { .. } => x1 - x0,
            DomainGeometry::Ball { dim, .. } => {
                unit_ball_volume(dim) * (x1.powi(dim as i32) - x0.powi(dim as i32))
            }
        }
    }

    /// Node `i` of the uniform grid with `n` elements.
    #[inline]
    pub fn node(&self, i: usize, n: usize) -> f64 {
        let (x0, x1) = self.span();
        if i == n {
            x1
        } else {
            x0 + (x1 - x0) * i as f64 / n as f64
        }
    }

    pub fn label(&self) -> String {
        match *self {
            DomainGeometry::Interval { a, b } => format!("interval({a},{b})"),
            DomainGeometry::Ball { radius, dim } => format!("ball(R={radius},n={dim})"),
        }
    }
}

/// Continuous piecewise-linear field given by its nodal values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Field {
    domain: DomainGeometry,
    values: Vec<f64>,
}

impl Field {
    /// `values` has `N + 1` entries for `N ≥ 2` elements.
    pub fn new(domain: DomainGeometry, values: Vec<f64>) -> Result<Self> {
        domain.validate()?;
        if values.len() < 3 {
            return Err(Error::Shape(format!(
                "a field needs at least 2 elements, got {} nodes",
                values.len()
            )));
        }
        Ok(Self { domain, values })
    }

    /// Interpolate `f` at the nodes of an `n`-element grid.
    pub fn from_fn(domain: DomainGeometry, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..=n).map(|i| f(domain.node(i, n))).collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &DomainGeometry {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn n_elements(&self) -> usize {
        self.values.len() - 1
    }

    pub fn h(&self) -> f64 {
        let (x0, x1) = self.domain.span();
        (x1 - x0) / self.n_elements() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.domain.node(i, self.n_elements())
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.node(i)).collect()
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::Shape(format!(
                "expected {} nodal values, got {}",
                self.values.len(),
                values.len()
            )));
        }
        Ok(Self {
            domain: self.domain,
            values,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            domain: self.domain,
            values: self.values.iter().map(|v| s * v).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Dirichlet condition: zero at both ends of an interval, at `r = R` on a ball.
    pub fn satisfies_boundary(&self) -> bool {
        let last = *self.values.last().unwrap() == 0.0;
        match self.domain {
            DomainGeometry::Interval { .. } => self.values[0] == 0.0 && last,
            DomainGeometry::Ball { .. } => last,
        }
    }

    pub fn check_compatible(&self, other: &Field) -> Result<()> {
        if self.domain != other.domain || self.values.len() != other.values.len() {
            return Err(Error::Shape(format!(
                "incompatible fields: {} with {} elements vs {} with {} elements",
                self.domain.label(),
                self.n_elements(),
                other.domain.label(),
                other.n_elements()
            )));
        }
        Ok(())
    }

    /// `∫ |u v| w` with the weighted rule.
    pub fn weighted_abs_product(&self, other: &Field, w: &Weight) -> Result<f64> {
        self.check_compatible(other)?;
        let rule = QuadratureRule::new(&self.domain, self.n_elements(), w);
        Ok(rule.integrate2(&self.values, &other.values, |a, b| (a * b).abs()))
    }
}

/// Element-wise constant field (the gradient of a P1 field).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementField {
    domain: DomainGeometry,
    slopes: Vec<f64>,
}

impl ElementField {
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn domain(&self) -> &DomainGeometry {
        &self.domain
    }

    /// `∫ F(|s|)` (unweighted).
    pub fn modular(&self, f: &YoungFunction) -> f64 {
        let n = self.slopes.len();
        self.slopes
            .iter()
            .enumerate()
            .map(|(e, s)| {
                let m = self
                    .domain
                    .slab_measure(self.domain.node(e, n), self.domain.node(e + 1, n));
                f.value(s.abs()) * m
            })
            .sum()
    }

    /// Unweighted Luxemburg norm `‖∇u‖_F`.
    pub fn luxemburg_norm(&self, f: &YoungFunction) -> f64 {
        let sup = self.slopes.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        luxemburg(sup, |d| self.scaled_modular(f, d))
    }

    fn scaled_modular(&self, f: &YoungFunction, delta: f64) -> f64 {
        let n = self.slopes.len();
        self.slopes
            .iter()
            .enumerate()
            .map(|(e, s)| {
                let m = self
                    .domain
                    .slab_measure(self.domain.node(e, n), self.domain.node(e + 1, n));
                f.value(s.abs() / delta) * m
            })
            .sum()
    }
}

/// Element-wise slopes `(u_{i+1} − u_i)/h`.
pub fn gradient_field(u: &Field) -> ElementField {
    let h = u.h();
    ElementField {
        domain: u.domain,
        slopes: u.values.windows(2).map(|w| (w[1] - w[0]) / h).collect(),
    }
}

/// Closed-form weight families and nodal samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightKind {
    Constant {
        value: f64,
    },
    /// `value` on `[lo, hi]`, zero elsewhere.
    Step {
        lo: f64,
        hi: f64,
        value: f64,
    },
    /// `height·(1 − ((x−center)/radius)²)²` on `|x − center| < radius`.
    Bump {
        center: f64,
        radius: f64,
        height: f64,
    },
    /// Values at uniformly spaced points across the domain span, linearly
    /// interpolated.
    Samples {
        values: Vec<f64>,
    },
}

/// Nonnegative weight on a fixed domain with cached norms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Weight {
    kind: WeightKind,
    domain: DomainGeometry,
    linf: f64,
    l1: f64,
}

impl Weight {
    pub fn new(kind: WeightKind, domain: &DomainGeometry) -> Result<Self> {
        domain.validate()?;
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match &kind {
            WeightKind::Constant { value } if !(*value >= 0.0 && value.is_finite()) => {
                return bad(format!("constant weight must be finite and ≥ 0, got {value}"))
            }
            WeightKind::Step { lo, hi, value }
                if !(lo < hi && *value >= 0.0 && value.is_finite()) =>
            {
                return bad(format!("invalid step weight [{lo}, {hi}] value {value}"))
            }
            WeightKind::Bump {
                radius, height, ..
            } if !(*radius > 0.0 && *height >= 0.0 && height.is_finite()) => {
                return bad(format!("invalid bump weight radius {radius} height {height}"))
            }
            WeightKind::Samples { values } => {
                if values.len() < 2 {
                    return Err(Error::Shape("sampled weight needs ≥ 2 values".into()));
                }
                if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
                    return bad(format!("sampled weight has invalid value {v}"));
                }
            }
            _ => {}
        }
        let mut w = Self {
            kind,
            domain: *domain,
            linf: 0.0,
            l1: 0.0,
        };
        w.linf = w.compute_linf();
        w.l1 = w.compute_l1();
        if !(w.l1 > 0.0) {
            return Err(Error::Degenerate("weight vanishes almost everywhere".into()));
        }
        Ok(w)
    }

    pub fn constant(value: f64, domain: &DomainGeometry) -> Result<Self> {
        Self::new(WeightKind::Constant { value }, domain)
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn domain(&self) -> &DomainGeometry {
        &self.domain
    }

    /// `‖w‖_∞`.
    pub fn linf_norm(&self) -> f64 {
        self.linf
    }

    /// `‖w‖_{L¹(Ω)}`.
    pub fn l1_norm(&self) -> f64 {
        self.l1
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            WeightKind::Constant { value } => *value,
            WeightKind::Step { lo, hi, value } => {
                if x >= *lo && x <= *hi {
                    *value
                } else {
                    0.0
                }
            }
            WeightKind::Bump {
                center,
                radius,
                height,
            } => {
                let z = (x - center) / radius;
                if z.abs() < 1.0 {
                    let q = 1.0 - z * z;
                    height * q * q
                } else {
                    0.0
                }
            }
            WeightKind::Samples { values } => {
                let (x0, x1) = self.domain.span();
                let m = values.len() - 1;
                let s = ((x - x0) / (x1 - x0) * m as f64).clamp(0.0, m as f64);
                let i = (s.floor() as usize).min(m - 1);
                let t = s - i as f64;
                values[i] * (1.0 - t) + values[i + 1] * t
            }
        }
    }

    /// Points inside the span where the weight or its derivative jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (x0, x1) = self.domain.span();
        let pts = match &self.kind {
            WeightKind::Constant { .. } => vec![],
            WeightKind::Step { lo, hi, .. } => vec![*lo, *hi],
            WeightKind::Bump { center, radius, .. } => vec![center - radius, center + radius],
            WeightKind::Samples { values } => {
                let m = values.len() - 1;
                (1..m).map(|i| x0 + (x1 - x0) * i as f64 / m as f64).collect()
            }
        };
        pts.into_iter().filter(|&p| p > x0 && p < x1).collect()
    }

    fn compute_linf(&self) -> f64 {
        let (x0, x1) = self.domain.span();
        match &self.kind {
            WeightKind::Constant { value } => *value,
            WeightKind::Step { lo, hi, value } => {
                if *hi >= x0 && *lo <= x1 {
                    *value
                } else {
                    0.0
                }
            }
            WeightKind::Bump { center, .. } => {
                let c = center.clamp(x0, x1);
                self.eval(c)
            }
            WeightKind::Samples { values } => values.iter().fold(0.0, |m, v| m.max(*v)),
        }
    }

    fn compute_l1(&self) -> f64 {
        let (x0, x1) = self.domain.span();
        let mut cuts = vec![x0];
        cuts.extend(self.breakpoints());
        cuts.push(x1);
        cuts.windows(2)
            .map(|c| {
                gauss_composite(
                    |x| self.eval(x) * self.domain.measure_density(x),
                    c[0],
                    c[1],
                    64,
                )
            })
            .sum()
    }
}

/// Quadrature point on element `elem` at local coordinate `xi ∈ [0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub elem: usize,
    pub xi: f64,
    /// Includes the weight, the measure density and the element length.
    pub weight: f64,
}

/// Precomputed weighted rule for integrals of functions of a P1 field.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    points: Vec<QuadPoint>,
    n_elements: usize,
}

impl QuadratureRule {
    /// Four-point Gauss on each element, split at weight breakpoints.
    pub fn new(domain: &DomainGeometry, n: usize, w: &Weight) -> Self {
        let bps = w.breakpoints();
        let mut points = Vec::with_capacity(4 * n + 8 * bps.len());
        for e in 0..n {
            let xa = domain.node(e, n);
            let xb = domain.node(e + 1, n);
            let h = xb - xa;
            let mut cuts = vec![xa];
            cuts.extend(bps.iter().copied().filter(|&p| p > xa && p < xb));
            cuts.push(xb);
            for c in cuts.windows(2) {
                let len = c[1] - c[0];
                for (gx, gw) in GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS) {
                    let x = c[0] + gx * len;
                    let weight = gw * len * w.eval(x) * domain.measure_density(x);
                    if weight != 0.0 {
                        points.push(QuadPoint {
                            elem: e,
                            xi: (x - xa) / h,
                            weight,
                        });
                    }
                }
            }
        }
        Self {
            points,
            n_elements: n,
        }
    }

    pub fn points(&self) -> &[QuadPoint] {
        &self.points
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    /// `∫ f(u) w dμ`.
    #[inline]
    pub fn integrate(&self, u: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        self.points
            .iter()
            .map(|q| {
                let v = u[q.elem] * (1.0 - q.xi) + u[q.elem + 1] * q.xi;
                q.weight * f(v)
            })
            .sum()
    }

    /// `∫ f(u, v) w dμ`.
    pub fn integrate2(&self, u: &[f64], v: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points
            .iter()
            .map(|q| {
                let a = u[q.elem] * (1.0 - q.xi) + u[q.elem + 1] * q.xi;
                let b = v[q.elem] * (1.0 - q.xi) + v[q.elem + 1] * q.xi;
                q.weight * f(a, b)
            })
            .sum()
    }

    /// Nodal gradient of `u ↦ ∫ F(|u|) w dμ`.
    pub fn gradient(&self, u: &[f64], density: impl Fn(f64) -> f64, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for q in &self.points {
            let v = u[q.elem] * (1.0 - q.xi) + u[q.elem + 1] * q.xi;
            let d = q.weight * density(v.abs()) * v.signum() * (v != 0.0) as u8 as f64;
            out[q.elem] += d * (1.0 - q.xi);
            out[q.elem + 1] += d * q.xi;
        }
    }
}

fn check_weight(w: &Weight, u: &Field) -> Result<()> {
    if w.domain() != u.domain() {
        return Err(Error::Shape(format!(
            "weight defined on {} but field on {}",
            w.domain().label(),
            u.domain().label()
        )));
    }
    Ok(())
}

/// `Φ_{F,w}(u) = ∫ F(|u|) w`.
pub fn modular(f: &YoungFunction, w: &Weight, u: &Field) -> Result<f64> {
    check_weight(w, u)?;
    let rule = QuadratureRule::new(u.domain(), u.n_elements(), w);
    Ok(rule.integrate(u.values(), |v| f.value(v.abs())))
}

/// Relative bracket width at which the Luxemburg bisection stops.
pub const LUXEMBURG_RTOL: f64 = 1e-12;

/// Solve `Φ(u/δ) = 1` for the decreasing map `δ ↦ phi(δ)` by bisection in
/// `ln δ`, starting from the scale `sup`.
fn luxemburg(sup: f64, phi: impl Fn(f64) -> f64) -> f64 {
    if sup == 0.0 || (phi(sup) == 0.0 && phi(sup * 1e-12) == 0.0) {
        return 0.0;
    }
    let mut lo = sup;
    let mut hi = sup;
    let mut guard = 0;
    while phi(lo) <= 1.0 && guard < 2000 {
        lo *= 0.5;
        guard += 1;
    }
    while phi(hi) > 1.0 && guard < 4000 {
        hi *= 2.0;
        guard += 1;
    }
    for _ in 0..200 {
        if hi - lo <= LUXEMBURG_RTOL * hi {
            break;
        }
        let mid = if hi / lo > 1.5 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if phi(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `‖u‖_{F,w} = inf{δ > 0 : Φ_{F,w}(u/δ) ≤ 1}`.
pub fn luxemburg_norm(f: &YoungFunction, w: &Weight, u: &Field) -> Result<f64> {
    check_weight(w, u)?;
    let rule = QuadratureRule::new(u.domain(), u.n_elements(), w);
    Ok(luxemburg_with_rule(f, &rule, u.values()))
}

pub(crate) fn luxemburg_with_rule(f: &YoungFunction, rule: &QuadratureRule, u: &[f64]) -> f64 {
    let sup = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    luxemburg(sup, |d| rule.integrate(u, |v| f.value(v.abs() / d)))
}

/// Luxemburg norm of the indicator of a set of measure `m`: `1/F⁻¹(1/m)`.
pub fn char_fn_norm(f: &YoungFunction, m: f64) -> Result<f64> {
    check_measure(m)?;
    Ok(1.0 / f.inverse(1.0 / m)?)
}

/// `τ_F(m) = m·F⁻¹(1/m)`.
pub fn tau(f: &YoungFunction, m: f64) -> Result<f64> {
    check_measure(m)?;
    Ok(m * f.inverse(1.0 / m)?)
}

fn check_measure(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "measure must be positive and finite, got {m}"
        )))
    }
}

/// `2‖u‖_{F,w}‖v‖_{F̃,w} − ∫|uv| w`; nonnegative by Hölder's inequality.
pub fn holder_defect(u: &Field, v: &Field, f: &YoungFunction, w: &Weight) -> Result<f64> {
    u.check_compatible(v)?;
    check_weight(w, u)?;
    let rule = QuadratureRule::new(u.domain(), u.n_elements(), w);
    let lhs = rule.integrate2(u.values(), v.values(), |a, b| (a * b).abs());
    let nu = luxemburg_with_rule(f, &rule, u.values());
    let nv = luxemburg_with_rule(&f.conjugate(), &rule, v.values());
    Ok(2.0 * nu * nv - lhs)
}
