//! Sobolev-critical objects: the tail integral `T_g`, the modulus `σ`, the
//! critical function `G*` and the Hardy transform.

use std::sync::Arc;

use serde::Serialize;

use super::indices::growth_ratio;
use super::table::LogLogTable;
use super::{YoungFunction, YoungKernel};
use crate::quad::{head_integral, integrate_log, tail_integral};
use crate::{Error, Result};

/// Half-width of the band around `n` in which the tail index is treated as
/// undecidable.
pub const INDEX_TOL: f64 = 1e-2;

const TAIL_RTOL: f64 = 1e-10;

/// Convergence class of `T_g = ∫₁^∞ G⁻¹(t) / t^(1+1/n) dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum SobolevClass {
    Finite { value: f64 },
    Infinite,
}

impl SobolevClass {
    pub fn is_finite(&self) -> bool {
        matches!(self, SobolevClass::Finite { .. })
    }

    /// `T_g`, or `+∞`.
    pub fn value(&self) -> f64 {
        match *self {
            SobolevClass::Finite { value } => value,
            SobolevClass::Infinite => f64::INFINITY,
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be ≥ 1".into()));
    }
    Ok(())
}

/// `G⁻¹(s) / s^(1+1/n)`.
fn integrand(g: &YoungFunction, n: usize) -> impl Fn(f64) -> f64 + '_ {
    let e = 1.0 + 1.0 / n as f64;
    move |s: f64| g.inverse(s).unwrap_or(f64::NAN) / s.powf(e)
}

/// Tail index `t·g(t)/G(t)` at the top of the domain hint.
pub fn tail_index(g: &YoungFunction) -> f64 {
    growth_ratio(g, g.domain_hint().1)
}

fn near_zero_index(g: &YoungFunction) -> f64 {
    growth_ratio(g, g.domain_hint().0)
}

/// Decide whether `T_g` is finite; when it is, evaluate it.
pub fn sobolev_classify(g: &YoungFunction, n: usize) -> Result<SobolevClass> {
    check_dim(n)?;
    let p_tail = tail_index(g);
    let dim = n as f64;
    // For t^p the integrand is t^(1/p − 1 − 1/n): divergent exactly when p ≤ n.
    if g.power_exponent().is_some_and(|p| p <= dim) {
        return Ok(SobolevClass::Infinite);
    }
    if (p_tail - dim).abs() < INDEX_TOL {
        return Err(Error::BorderlineSobolev {
            p_tail,
            dim: n,
            index_tol: INDEX_TOL,
        });
    }
    if p_tail < dim {
        return Ok(SobolevClass::Infinite);
    }
    let f = integrand(g, n);
    let est = tail_integral(&f, 1.0, TAIL_RTOL)?;
    if !(est.value > 0.0) || est.error > 1e-8 * est.value {
        return Err(Error::Quadrature(format!(
            "T_g tail quadrature did not reach tolerance: value {:e}, error {:e}",
            est.value, est.error
        )));
    }
    Ok(SobolevClass::Finite { value: est.value })
}

/// `σ(t) = ∫_{t^(−n)}^∞ G⁻¹(s) / s^(1+1/n) ds`, defined when `T_g < ∞`.
pub fn sigma(g: &YoungFunction, n: usize, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "σ needs a positive finite length, got {t}"
        )));
    }
    if !sobolev_classify(g, n)?.is_finite() {
        return Err(Error::Precondition(format!(
            "σ needs T_g < ∞, but {g} has T_g = ∞ in dimension {n}"
        )));
    }
    let f = integrand(g, n);
    Ok(tail_integral(&f, t.powi(-(n as i32)), TAIL_RTOL)?.value)
}

/// Table nodes are `y = 10^(k/STEPS_PER_DECADE)` for `|k| ≤ TABLE_DECADES·STEPS_PER_DECADE`.
const TABLE_DECADES: i32 = 60;
const STEPS_PER_DECADE: i32 = 20;
/// Largest relative midpoint error accepted before the table is refined.
const TABLE_TOL: f64 = 1e-9;

/// `Φ = (G*)⁻¹` tabulated on a log grid.
struct CriticalTable {
    base: YoungFunction,
    n: usize,
    table: LogLogTable,
}

fn build_table(g: &YoungFunction, n: usize) -> Result<LogLogTable> {
    let f = integrand(g, n);
    let mut per_decade = STEPS_PER_DECADE;
    loop {
        let kmax = TABLE_DECADES * per_decade;
        let ys: Vec<f64> = (-kmax..=kmax)
            .map(|k| 10f64.powf(k as f64 / per_decade as f64))
            .collect();
        let head = head_integral(&f, ys[0], 1e-12).map_err(|e| {
            Error::Precondition(format!("(G*)⁻¹ integral diverges at 0 for {g}: {e}"))
        })?;
        let mut phi = Vec::with_capacity(ys.len());
        phi.push(head.value);
        for w in ys.windows(2) {
            let seg = integrate_log(&f, w[0], w[1], 1e-13).value;
            phi.push(phi.last().unwrap() + seg);
        }
        let slope: Vec<f64> = ys.iter().zip(&phi).map(|(&y, &p)| y * f(y) / p).collect();
        if phi.iter().chain(&slope).any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::Quadrature(format!(
                "non-finite (G*)⁻¹ table for {g} in dimension {n}"
            )));
        }
        let table = LogLogTable::new(&ys, &phi, &slope);
        // Midpoint check against direct quadrature on every 8th segment.
        let mut worst: f64 = 0.0;
        for i in (0..ys.len() - 1).step_by(8) {
            let ym = (ys[i] * ys[i + 1]).sqrt();
            let exact = phi[i] + integrate_log(&f, ys[i], ym, 1e-13).value;
            worst = worst.max((table.eval(ym) / exact - 1.0).abs());
        }
        if worst <= TABLE_TOL || per_decade >= 8 * STEPS_PER_DECADE {
            if worst > TABLE_TOL {
                log::warn!("(G*)⁻¹ table for {g}: midpoint error {worst:e} after refinement");
            }
            return Ok(table);
        }
        per_decade *= 2;
    }
}

impl YoungKernel for CriticalTable {
    fn value(&self, t: f64) -> f64 {
        self.table.eval_inverse(t)
    }
    // g*(t) = 1/Φ'(y) at y = G*(t).
    fn density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let y = self.table.eval_inverse(t);
        y.powf(1.0 + 1.0 / self.n as f64) / self.base.inverse(y).unwrap_or(f64::NAN)
    }
    fn inverse(&self, y: f64) -> Option<f64> {
        Some(self.table.eval(y))
    }
}

fn check_critical(g: &YoungFunction, n: usize) -> Result<()> {
    if sobolev_classify(g, n)?.is_finite() {
        return Err(Error::Precondition(format!(
            "critical function needs T_g = ∞, but {g} has T_g < ∞ in dimension {n}"
        )));
    }
    let p0 = near_zero_index(g);
    if p0 >= n as f64 {
        return Err(Error::Precondition(format!(
            "(G*)⁻¹ integral diverges at 0: near-zero index {p0} ≥ n = {n}"
        )));
    }
    Ok(())
}

fn critical_kernel(g: &YoungFunction, n: usize) -> Result<Arc<CriticalTable>> {
    check_dim(n)?;
    check_critical(g, n)?;
    Ok(Arc::new(CriticalTable {
        base: g.clone(),
        n,
        table: build_table(g, n)?,
    }))
}

/// Sobolev conjugate `G*` with `(G*)⁻¹(t) = ∫₀ᵗ G⁻¹(s) / s^(1+1/n) ds`.
pub fn critical_function(g: &YoungFunction, n: usize) -> Result<YoungFunction> {
    let k = critical_kernel(g, n)?;
    let hint = (k.table.eval(1e-30), k.table.eval(1e30));
    let (lo, hi) = g.domain_hint();
    let hint = (hint.0.max(lo), hint.1.min(hi));
    Ok(YoungFunction::from_kernel(
        format!("critical({g}, n={n})"),
        g.params().to_vec(),
        k,
        hint,
    ))
}

/// `A = G*∘G⁻¹`, whose inverse `G∘(G*)⁻¹` is read off the table.
struct Composition {
    crit: Arc<CriticalTable>,
}

impl YoungKernel for Composition {
    fn value(&self, t: f64) -> f64 {
        match self.crit.base.inverse(t) {
            Ok(s) => self.crit.value(s),
            Err(_) => f64::INFINITY,
        }
    }
    fn density(&self, t: f64) -> f64 {
        let s = self.crit.base.inverse(t).unwrap_or(f64::NAN);
        self.crit.density(s) / self.crit.base.density(s)
    }
    fn inverse(&self, y: f64) -> Option<f64> {
        Some(self.crit.base.value(self.crit.table.eval(y)))
    }
}

/// `A = G*∘G⁻¹`; `A.inverse(y) = G((G*)⁻¹(y))` without root finding.
pub fn critical_composition(g: &YoungFunction, n: usize) -> Result<YoungFunction> {
    let crit = critical_kernel(g, n)?;
    Ok(YoungFunction::from_kernel(
        format!("critical({g}, n={n})∘inv({g})"),
        g.params().to_vec(),
        Arc::new(Composition { crit }),
        g.domain_hint(),
    ))
}

struct Hardy {
    base: YoungFunction,
    t0: f64,
}

impl Hardy {
    fn integral(&self, t: f64) -> f64 {
        if t <= self.t0 {
            return 0.0;
        }
        let f = |s: f64| self.base.value(s) / (s * s);
        if self.t0 == 0.0 {
            head_integral(&f, t, 1e-12)
                .map(|e| e.value)
                .unwrap_or(f64::NAN)
        } else {
            integrate_log(&f, self.t0, t, 1e-12).value
        }
    }
}

impl YoungKernel for Hardy {
    fn value(&self, t: f64) -> f64 {
        t * self.integral(t)
    }
    fn density(&self, t: f64) -> f64 {
        if t <= self.t0 {
            return 0.0;
        }
        self.integral(t) + self.base.value(t) / t
    }
}

/// `Ĥ(t) = t ∫_{t0}^t H(s)/s² ds` for `t ≥ t0` (zero below `t0`).
pub fn hardy_transform(h: &YoungFunction, t0: f64) -> Result<YoungFunction> {
    if !(t0 >= 0.0) || !t0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Hardy threshold must be finite and ≥ 0, got {t0}"
        )));
    }
    let (lo, hi) = h.domain_hint();
    if t0 == 0.0 {
        let p0 = near_zero_index(h);
        if p0 <= 1.0 + INDEX_TOL {
            return Err(Error::Precondition(format!(
                "H(s)/s² is not integrable at 0 (near-zero index {p0}); use t0 > 0"
            )));
        }
    }
    if t0 >= hi {
        return Err(Error::InvalidParameter(format!(
            "Hardy threshold {t0} beyond the domain hint of {h}"
        )));
    }
    Ok(YoungFunction::from_kernel(
        format!("hardy({h}, t0={t0})"),
        h.params().to_vec(),
        Arc::new(Hardy {
            base: h.clone(),
            t0,
        }),
        (lo.max(t0 * 1.001), hi),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::{index_profile, prec, IndexMode};
    use approx::assert_relative_eq;

    fn p(e: f64) -> YoungFunction {
        YoungFunction::power(e).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_relative_eq!(
            sobolev_classify(&p(2.0), 1).unwrap().value(),
            2.0,
            max_relative = 1e-8
        );
        assert_eq!(sobolev_classify(&p(2.0), 3).unwrap(), SobolevClass::Infinite);
        assert_eq!(sobolev_classify(&p(2.0), 2).unwrap(), SobolevClass::Infinite);
        assert_relative_eq!(
            sobolev_classify(&p(4.0), 2).unwrap().value(),
            4.0,
            max_relative = 1e-8
        );
        assert!(matches!(
            sobolev_classify(&p(2.005), 2),
            Err(Error::BorderlineSobolev { .. })
        ));
    }

    #[test]
    fn sigma_closed_form() {
        let g = p(2.0);
        assert_relative_eq!(sigma(&g, 1, 4.0).unwrap(), 4.0, max_relative = 1e-8);
        assert_relative_eq!(sigma(&g, 1, 1.0).unwrap(), 2.0, max_relative = 1e-8);
        assert!(sigma(&g, 1, 0.25).unwrap() < sigma(&g, 1, 1.0).unwrap());
        assert!(matches!(sigma(&g, 3, 1.0), Err(Error::Precondition(_))));
        // n p/(p − n) t^(1 − n/p) with p = 5, n = 2
        let want = 10.0 / 3.0 * 0.3f64.powf(0.6);
        assert_relative_eq!(sigma(&p(5.0), 2, 0.3).unwrap(), want, max_relative = 1e-8);
    }

    #[test]
    fn critical_function_of_power() {
        let gs = critical_function(&p(2.0), 3).unwrap();
        assert_relative_eq!(gs.inverse(1.0).unwrap(), 6.0, max_relative = 1e-10);
        assert_relative_eq!(gs.value(6.0), 1.0, max_relative = 1e-10);
        assert_relative_eq!(gs.value(3.0), 0.5f64.powi(6), max_relative = 1e-9);
        let (lo, hi) = index_profile(&gs, IndexMode::GBased).unwrap();
        assert_relative_eq!(lo, 6.0, max_relative = 1e-6);
        assert_relative_eq!(hi, 6.0, max_relative = 1e-6);

        let g4 = critical_function(&p(2.0), 4).unwrap();
        let (lo, hi) = index_profile(&g4, IndexMode::GBased).unwrap();
        assert_relative_eq!(lo, 4.0, max_relative = 1e-6);
        assert_relative_eq!(hi, 4.0, max_relative = 1e-6);
    }

    #[test]
    fn critical_preconditions() {
        assert!(matches!(
            critical_function(&p(3.0), 2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn critical_of_piecewise_matches_quadrature() {
        let g = YoungFunction::piecewise_power(1.5, 2.5).unwrap();
        let gs = critical_function(&g, 3).unwrap();
        let f = |s: f64| g.inverse(s).unwrap() / s.powf(4.0 / 3.0);
        for y in [1e-3, 0.7, 1.0, 3.0, 1e4] {
            let phi = head_integral(&f, y, 1e-12).unwrap().value;
            assert_relative_eq!(gs.inverse(y).unwrap(), phi, max_relative = 1e-8);
        }
    }

    #[test]
    fn composition_round_trip() {
        let a = critical_composition(&p(2.0), 3).unwrap();
        for y in [1e-4, 0.1, 1.0, 10.0, 1e5] {
            let t = a.inverse(y).unwrap();
            assert_relative_eq!(a.value(t), y, max_relative = 1e-9);
        }
        // A(t) = (√t/6)⁶ = t³/6⁶
        assert_relative_eq!(a.value(2.0), 8.0 / 6f64.powi(6), max_relative = 1e-9);
    }

    #[test]
    fn hardy_examples() {
        let h2 = hardy_transform(&p(2.0), 0.0).unwrap();
        assert_relative_eq!(h2.value(3.0), 9.0, max_relative = 1e-10);
        let h3 = hardy_transform(&p(3.0), 0.0).unwrap();
        assert_relative_eq!(h3.value(2.0), 4.0, max_relative = 1e-10);
        assert_eq!(prec(&h2, &p(2.0), 1.0).unwrap().k, 1.0);
        let h1 = hardy_transform(&p(2.0), 1.0).unwrap();
        assert_relative_eq!(h1.value(2.0), 2.0, max_relative = 1e-10);
    }
}
