//! First eigenvalue of the Dirichlet g-Laplacian at a prescribed level.
//!
//! The discrete problem minimizes `I(u) = ∫ G(|u'|) dμ` over P1 fields with
//! `J(u) = ∫ w H(|u|) dμ = μ`. On balls the fields are radial, so the
//! minimum is a Ritz upper estimate of the eigenvalue of the ball.
//!
//! Each iteration preconditions the gradients with the weighted Laplacian
//! `K_a` whose element coefficients are `g(|s|)/|s|` (so that `∇I = K_a u`),
//! takes the component of `−K_a⁻¹∇I` tangent to the level set, and applies
//! Armijo backtracking on `I` after projecting back onto the level set. A
//! full step is the Kačanov (inverse iteration) update.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::orlicz::{DomainGeometry, Field, QuadratureRule, Weight};
use crate::young::{index_profile, IndexMode, YoungFunction};
use crate::{Error, Result};

/// `(G, H, w, Ω, μ)`.
#[derive(Debug, Clone)]
pub struct EigenProblem {
    pub g: YoungFunction,
    pub h: YoungFunction,
    pub weight: Weight,
    pub domain: DomainGeometry,
    pub mu: f64,
}

impl EigenProblem {
    pub fn new(g: YoungFunction, h: YoungFunction, weight: Weight, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "level μ must be positive and finite, got {mu}"
            )));
        }
        for f in [&g, &h] {
            let (lo, hi) = index_profile(f, IndexMode::GBased)?;
            if !(lo >= 1.0 - 1e-9 && hi.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{f} has growth indices ({lo}, {hi}); need 1 ≤ p⁻ ≤ p⁺ < ∞"
                )));
            }
        }
        let domain = *weight.domain();
        Ok(Self {
            g,
            h,
            weight,
            domain,
            mu,
        })
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.g.clone(), self.h.clone(), self.weight.clone(), mu)
    }
}

/// Solver controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    /// Number of elements `N`.
    pub n: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub restarts: usize,
    /// Relative tolerance of the level constraint.
    pub level_tol: f64,
    pub kkt_tol: f64,
    /// Stop when `λ` moved by less than this (relative) over `stall_window` iterations.
    pub stall_rtol: f64,
    pub stall_window: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            n: 512,
            max_iters: 5000,
            seed: 0,
            restarts: 3,
            level_tol: 1e-10,
            kkt_tol: 1e-6,
            stall_rtol: 1e-8,
            stall_window: 10,
        }
    }
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Kkt,
    Stall,
    LineSearch,
}

/// Discrete minimizer and diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct EigenResult {
    /// `I(u)/J(u)`.
    pub lambda: f64,
    /// `⟨I'(u), u⟩ / ⟨J'(u), u⟩`; equals `lambda` for homogeneous pairs.
    pub multiplier: f64,
    pub u: Field,
    /// Achieved `J(u)`.
    pub mu: f64,
    pub energy: f64,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub history: Vec<f64>,
    pub grid_n: usize,
    pub restart: usize,
    pub stop: StopReason,
    /// `"ritz-upper"` on intervals, `"radial-ritz-upper"` on balls.
    pub label: &'static str,
}

/// Precomputed discrete operators for one `(problem, N)`.
struct Discrete<'a> {
    p: &'a EigenProblem,
    n: usize,
    h: f64,
    /// Element measures.
    meas: Vec<f64>,
    rule: QuadratureRule,
    first_free: usize,
    last_free: usize,
}

impl<'a> Discrete<'a> {
    fn new(p: &'a EigenProblem, n: usize) -> Self {
        let d = &p.domain;
        let meas = (0..n).map(|e| d.slab_measure(d.node(e, n), d.node(e + 1, n))).collect();
        let (x0, x1) = d.span();
        let first_free = if d.is_radial() { 0 } else { 1 };
        Self {
            p,
            n,
            h: (x1 - x0) / n as f64,
            meas,
            rule: QuadratureRule::new(d, n, &p.weight),
            first_free,
            last_free: n - 1,
        }
    }

    fn slope(&self, u: &[f64], e: usize) -> f64 {
        (u[e + 1] - u[e]) / self.h
    }

    fn energy(&self, u: &[f64]) -> f64 {
        (0..self.n)
            .map(|e| self.p.g.value(self.slope(u, e).abs()) * self.meas[e])
            .sum()
    }

    fn level(&self, u: &[f64]) -> f64 {
        self.rule.integrate(u, |v| self.p.h.value(v.abs()))
    }

    fn grad_energy(&self, u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for e in 0..self.n {
            let s = self.slope(u, e);
            let c = if s == 0.0 {
                0.0
            } else {
                self.p.g.density(s.abs()) * s.signum() * self.meas[e] / self.h
            };
            out[e] -= c;
            out[e + 1] += c;
        }
        self.clamp_boundary(out);
    }

    fn grad_level(&self, u: &[f64], out: &mut [f64]) {
        self.rule.gradient(u, |t| self.p.h.density(t), out);
        self.clamp_boundary(out);
    }

    fn clamp_boundary(&self, v: &mut [f64]) {
        for (i, x) in v.iter_mut().enumerate() {
            if i < self.first_free || i > self.last_free {
                *x = 0.0;
            }
        }
    }

    /// Element coefficients of `K_a`: `g(|s|)/|s| · m_e / h²`, floored.
    fn stiffness(&self, u: &[f64]) -> Vec<f64> {
        let smax = (0..self.n).fold(0.0f64, |m, e| m.max(self.slope(u, e).abs()));
        let floor_slope = (smax * 1e-8).max(f64::MIN_POSITIVE);
        let mut a: Vec<f64> = (0..self.n)
            .map(|e| {
                let s = self.slope(u, e).abs().max(floor_slope);
                self.p.g.density(s) / s * self.meas[e] / (self.h * self.h)
            })
            .collect();
        let amax = a.iter().fold(0.0f64, |m, v| m.max(*v));
        for v in &mut a {
            *v = v.max(1e-6 * amax);
        }
        a
    }

    /// Solve `K_a z = r` on the free nodes (Thomas algorithm).
    fn solve_stiffness(&self, a: &[f64], r: &[f64]) -> Vec<f64> {
        let (f0, f1) = (self.first_free, self.last_free);
        let m = f1 - f0 + 1;
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m]; // off[k] couples k and k+1
        for k in 0..m {
            let i = f0 + k;
            diag[k] = a[i] + if i > 0 { a[i - 1] } else { 0.0 };
            if k + 1 < m {
                off[k] = -a[i];
            }
        }
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        c[0] = off[0] / diag[0];
        d[0] = r[f0] / diag[0];
        for k in 1..m {
            let den = diag[k] - off[k - 1] * c[k - 1];
            c[k] = off[k] / den;
            d[k] = (r[f0 + k] - off[k - 1] * d[k - 1]) / den;
        }
        let mut z = vec![0.0; self.n + 1];
        z[f0 + m - 1] = d[m - 1];
        for k in (0..m - 1).rev() {
            z[f0 + k] = d[k] - c[k] * z[f0 + k + 1];
        }
        z
    }

    fn project(&self, u: &[f64], mu: f64, tol: f64) -> Result<(Vec<f64>, f64)> {
        let s = level_scale(|s| self.level_scaled(u, s), mu, tol)?;
        Ok((u.iter().map(|v| (s * v).abs()).collect(), s))
    }

    fn level_scaled(&self, u: &[f64], s: f64) -> f64 {
        self.rule.integrate(u, |v| self.p.h.value((s * v).abs()))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve `J(s·u) = μ` for `s > 0`: Newton in `ln s` inside a bisection bracket.
fn level_scale(j: impl Fn(f64) -> f64, mu: f64, tol: f64) -> Result<f64> {
    let j1 = j(1.0);
    if !(j1 > 0.0) {
        return Err(Error::Degenerate(
            "J(u) = 0: the field vanishes on the support of the weight".into(),
        ));
    }
    let (mut lo, mut hi) = (f64::NAN, f64::NAN);
    let mut s: f64 = 1.0;
    let mut js = j1;
    for _ in 0..400 {
        if (js - mu).abs() <= tol * mu {
            return Ok(s);
        }
        if js < mu {
            lo = s;
        } else {
            hi = s;
        }
        // Secant slope of ln J against ln s, bounded by the growth indices.
        let ds = 1e-6;
        let slope = ((j(s * (1.0 + ds)) / js).ln() / (1.0 + ds).ln()).clamp(1.0, 64.0);
        let mut next = s * ((mu / js).ln() / slope).exp();
        let inside = |x: f64| (lo.is_nan() || x > lo) && (hi.is_nan() || x < hi);
        if !inside(next) || !next.is_finite() {
            next = match (lo.is_nan(), hi.is_nan()) {
                (false, false) => (lo * hi).sqrt(),
                (true, _) => hi * 0.5,
                (_, true) => lo * 2.0,
            };
        }
        if !lo.is_nan() && !hi.is_nan() && hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        s = next;
        js = j(s);
    }
    Err(Error::NonConvergence {
        iterations: 400,
        last: s,
        history: vec![],
    })
}

/// `J(u) = ∫ w H(|u|) dμ`.
pub fn level(h: &YoungFunction, w: &Weight, u: &Field) -> Result<f64> {
    crate::orlicz::modular(h, w, u)
}

/// `I(u) = ∫ G(|∇u|) dμ`, exact for P1 fields.
pub fn energy(g: &YoungFunction, u: &Field) -> f64 {
    crate::orlicz::gradient_field(u).modular(g)
}

/// Rescale `u` onto `{J = μ}`.
pub fn level_project(h: &YoungFunction, w: &Weight, u: &Field, mu: f64) -> Result<Field> {
    if w.domain() != u.domain() {
        return Err(Error::Shape("weight and field live on different domains".into()));
    }
    let rule = QuadratureRule::new(u.domain(), u.n_elements(), w);
    let vals = u.values();
    let s = level_scale(|s| rule.integrate(vals, |v| h.value((s * v).abs())), mu, 1e-10)?;
    Ok(u.scaled(s))
}

/// `I(u)/J(u)`.
pub fn rayleigh(problem: &EigenProblem, u: &Field) -> Result<f64> {
    let j = level(&problem.h, &problem.weight, u)?;
    if !(j > 0.0) {
        return Err(Error::Degenerate(
            "J(u) = 0: the field vanishes on the support of the weight".into(),
        ));
    }
    Ok(energy(&problem.g, u) / j)
}

fn initial_mode(d: &Discrete) -> Vec<f64> {
    // Inverse iteration for the weighted linear problem K u = λ M u.
    let a: Vec<f64> = d.meas.iter().map(|m| m / (d.h * d.h)).collect();
    let mut u: Vec<f64> = (0..=d.n)
        .map(|i| {
            let x = i as f64 / d.n as f64;
            if d.p.domain.is_radial() {
                (std::f64::consts::FRAC_PI_2 * (1.0 + x)).sin().abs()
            } else {
                (std::f64::consts::PI * x).sin()
            }
        })
        .collect();
    d.clamp_boundary(&mut u);
    let mut mu_ = vec![0.0; d.n + 1];
    for _ in 0..30 {
        d.rule.gradient(&u, |t| 2.0 * t, &mut mu_);
        d.clamp_boundary(&mut mu_);
        let z = d.solve_stiffness(&a, &mu_);
        let s = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if s == 0.0 {
            break;
        }
        u = z.iter().map(|v| v.abs() / s).collect();
    }
    u
}

fn perturb(u: &[f64], seed: u64, restart: usize) -> Vec<f64> {
    if restart == 0 {
        return u.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart as u64));
    u.iter()
        .map(|v| v * (1.0 + 0.25 * rng.random_range(-1.0..1.0)))
        .collect()
}

fn run(d: &Discrete, start: Vec<f64>, opts: &SolveOptions, restart: usize) -> Result<EigenResult> {
    let mu = d.p.mu;
    let (mut u, _) = d.project(&start, mu, opts.level_tol)?;
    let mut i_u = d.energy(&u);
    let mut history = vec![i_u / mu];
    let nn = d.n + 1;
    let (mut gi, mut gj) = (vec![0.0; nn], vec![0.0; nn]);
    let mut kkt = f64::INFINITY;
    let mut stop = None;
    let mut iterations = 0;
    for it in 0..opts.max_iters {
        iterations = it + 1;
        d.grad_energy(&u, &mut gi);
        d.grad_level(&u, &mut gj);
        let a = d.stiffness(&u);
        let zi = d.solve_stiffness(&a, &gi);
        let zj = d.solve_stiffness(&a, &gj);
        let lam_t = dot(&gj, &zi) / dot(&gj, &zj);
        let dir: Vec<f64> = zi.iter().zip(&zj).map(|(x, y)| lam_t * y - x).collect();
        let q = -dot(&gi, &dir);
        kkt = (q.max(0.0) / dot(&gi, &zi)).sqrt();
        if kkt < opts.kkt_tol {
            stop = Some(StopReason::Kkt);
            break;
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = u.iter().zip(&dir).map(|(x, y)| x + alpha * y).collect();
            if let Ok((v, _)) = d.project(&trial, mu, opts.level_tol) {
                let iv = d.energy(&v);
                if iv <= i_u - 1e-4 * alpha * q {
                    accepted = Some((v, iv));
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((v, iv)) => {
                u = v;
                i_u = iv;
            }
            None => {
                stop = Some(StopReason::LineSearch);
                break;
            }
        }
        history.push(i_u / mu);
        let k = history.len();
        if k > opts.stall_window {
            let old = history[k - 1 - opts.stall_window];
            if (old - history[k - 1]).abs() <= opts.stall_rtol * history[k - 1] {
                stop = Some(StopReason::Stall);
                break;
            }
        }
    }
    let stop = match stop {
        Some(StopReason::LineSearch) if kkt > 1e-3 => {
            return Err(Error::NonConvergence {
                iterations,
                last: i_u / mu,
                history,
            })
        }
        Some(s) => s,
        None => {
            return Err(Error::NonConvergence {
                iterations,
                last: i_u / mu,
                history,
            })
        }
    };
    let j_u = d.level(&u);
    d.grad_energy(&u, &mut gi);
    d.grad_level(&u, &mut gj);
    let multiplier = dot(&gi, &u) / dot(&gj, &u);
    let field = Field::new(d.p.domain, u)?;
    Ok(EigenResult {
        lambda: i_u / j_u,
        multiplier,
        u: field,
        mu: j_u,
        energy: i_u,
        iterations,
        kkt_residual: kkt,
        history,
        grid_n: d.n,
        restart,
        stop,
        label: if d.p.domain.is_radial() {
            "radial-ritz-upper"
        } else {
            "ritz-upper"
        },
    })
}

/// Minimize `I` over the discrete level set `{J = μ}` with `opts.n` elements.
pub fn solve_first(problem: &EigenProblem, opts: &SolveOptions) -> Result<EigenResult> {
    if opts.n < 16 {
        return Err(Error::InvalidParameter(format!(
            "grid needs N ≥ 16 elements, got {}",
            opts.n
        )));
    }
    let d = Discrete::new(problem, opts.n);
    let base = initial_mode(&d);
    let restarts = opts.restarts.max(1);
    let results: Vec<Result<EigenResult>> = (0..restarts)
        .into_par_iter()
        .map(|r| run(&d, perturb(&base, opts.seed, r), opts, r))
        .collect();
    let mut best: Option<EigenResult> = None;
    let mut first_err = None;
    for r in results {
        match r {
            Ok(res) => {
                if best.as_ref().is_none_or(|b| res.lambda < b.lambda) {
                    best = Some(res);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.unwrap())
}

/// `max_i |⟨I'(u), φᵢ⟩ − λ⟨J'(u), φᵢ⟩| / max_i |⟨I'(u), φᵢ⟩|` over interior
/// hat functions `φᵢ`.
pub fn weak_residual_at(problem: &EigenProblem, u: &Field, lambda: f64) -> f64 {
    let d = Discrete::new(problem, u.n_elements());
    let nn = d.n + 1;
    let (mut gi, mut gj) = (vec![0.0; nn], vec![0.0; nn]);
    d.grad_energy(u.values(), &mut gi);
    d.grad_level(u.values(), &mut gj);
    let scale = gi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let r = gi
        .iter()
        .zip(&gj)
        .fold(0.0f64, |m, (a, b)| m.max((a - lambda * b).abs()));
    r / scale
}

/// [`weak_residual_at`] with the result's own `λ`.
pub fn weak_residual(problem: &EigenProblem, result: &EigenResult) -> f64 {
    weak_residual_at(problem, &result.u, result.lambda)
}

/// One level of a μ-sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub mu: f64,
    pub lambda: Option<f64>,
    pub error: Option<String>,
}

/// Solves over a list of levels with the monotonicity verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct MuSweep {
    pub entries: Vec<SweepEntry>,
    /// `λ_{1,1}` used for the lower estimate `λ_{1,μ} ≥ λ_{1,1}/μ`.
    pub lambda_at_one: Option<f64>,
    /// `μ λ_{1,μ}` nondecreasing within `tol`.
    pub mu_lambda_nondecreasing: bool,
    /// `λ_{1,μ} ≥ λ_{1,1}/μ − tol` for all `μ ≥ 1`.
    pub corollary_holds: bool,
    pub tol: f64,
}

/// Solve at every `μ` in `mu_list` (strictly increasing, positive).
pub fn mu_sweep(
    problem: &EigenProblem,
    mu_list: &[f64],
    opts: &SolveOptions,
    tol: f64,
) -> Result<MuSweep> {
    if mu_list.is_empty()
        || mu_list.iter().any(|m| !(*m > 0.0))
        || mu_list.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::Precondition(
            "μ list must be nonempty, positive and strictly increasing".into(),
        ));
    }
    let mut levels = mu_list.to_vec();
    let has_one = mu_list.contains(&1.0);
    if !has_one {
        levels.push(1.0);
    }
    let solved: Vec<Result<f64>> = levels
        .par_iter()
        .map(|&m| Ok(solve_first(&problem.with_mu(m)?, opts)?.lambda))
        .collect();
    let entries: Vec<SweepEntry> = mu_list
        .iter()
        .zip(&solved)
        .map(|(&mu, r)| SweepEntry {
            mu,
            lambda: r.as_ref().ok().copied(),
            error: r.as_ref().err().map(|e| e.to_string()),
        })
        .collect();
    let lambda_at_one = if has_one {
        let i = mu_list.iter().position(|&m| m == 1.0).unwrap();
        entries[i].lambda
    } else {
        solved.last().unwrap().as_ref().ok().copied()
    };
    let ok: Vec<(f64, f64)> = entries
        .iter()
        .filter_map(|e| e.lambda.map(|l| (e.mu, l)))
        .collect();
    let mu_lambda_nondecreasing = ok
        .windows(2)
        .all(|w| w[1].0 * w[1].1 >= w[0].0 * w[0].1 * (1.0 - tol));
    let corollary_holds = match lambda_at_one {
        Some(l1) => ok
            .iter()
            .filter(|(m, _)| *m >= 1.0)
            .all(|(m, l)| *l >= l1 / m * (1.0 - tol)),
        None => false,
    };
    Ok(MuSweep {
        entries,
        lambda_at_one,
        mu_lambda_nondecreasing,
        corollary_holds,
        tol,
    })
}

/// λ over a sequence of nested grids.
#[derive(Debug, Clone, Serialize)]
pub struct RefineStudy {
    pub n: Vec<usize>,
    pub lambda: Vec<f64>,
    /// Richardson estimate from the last two levels.
    pub extrapolated: f64,
    /// Observed order from the last three levels (when available).
    pub observed_order: Option<f64>,
    /// `λ_N` nonincreasing within the tolerance.
    pub monotone: bool,
}

/// Solve on each grid of `n_list`; every entry must divide the next.
pub fn refine_study(
    problem: &EigenProblem,
    n_list: &[usize],
    opts: &SolveOptions,
    tol: f64,
) -> Result<RefineStudy> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0] || w[1] % w[0] != 0) {
        return Err(Error::Precondition(format!(
            "grid list {n_list:?} is not increasing and nested"
        )));
    }
    let lambda: Vec<f64> = n_list
        .par_iter()
        .map(|&n| solve_first(problem, &SolveOptions { n, ..*opts }).map(|r| r.lambda))
        .collect::<Result<_>>()?;
    Ok(richardson(n_list, lambda, tol))
}

pub(crate) fn richardson(n_list: &[usize], lambda: Vec<f64>, tol: f64) -> RefineStudy {
    let k = lambda.len();
    let monotone = lambda.windows(2).all(|w| w[1] <= w[0] * (1.0 + tol));
    let observed_order = (k >= 3).then(|| {
        let (a, b, c) = (lambda[k - 3], lambda[k - 2], lambda[k - 1]);
        let r = n_list[k - 1] as f64 / n_list[k - 2] as f64;
        ((a - b) / (b - c)).abs().ln() / r.ln()
    });
    let extrapolated = if k >= 2 {
        let (b, c) = (lambda[k - 2], lambda[k - 1]);
        let r = n_list[k - 1] as f64 / n_list[k - 2] as f64;
        let q = observed_order.filter(|q| q.is_finite() && *q > 0.5).unwrap_or(2.0);
        if (b - c).abs() <= f64::EPSILON * c.abs() {
            c
        } else {
            c - (b - c) / (r.powf(q) - 1.0)
        }
    } else {
        lambda[0]
    };
    RefineStudy {
        n: n_list.to_vec(),
        lambda,
        extrapolated,
        observed_order: observed_order.filter(|q| q.is_finite()),
        monotone,
    }
}
