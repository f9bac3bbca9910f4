//! Constant ledger, hypothesis checks and the eigenvalue lower bounds.
//!
//! Every bound is evaluated in its explicit form, with the constants
//! `C`, `c`, `κ₀`, `k̂`, `κ`, `c_H` read from a [`ConstantLedger`]. A bound
//! whose hypotheses fail is reported as inapplicable and never compared
//! against an eigenvalue.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::eigen::{refine_study, solve_first, weak_residual, EigenProblem, RefineStudy, SolveOptions};
use crate::grid::{GRID_HI, GRID_LO, PER_DECADE};
use crate::orlicz::{
    gradient_field, luxemburg_norm, tau, unit_ball_volume, DomainGeometry, Field, Weight,
};
use crate::quad::head_integral;
use crate::young::{
    critical_function, delta_prime_constant, hardy_transform, index_profile,
    inverse_product_constant, prec, prec_prec, sigma, sobolev_classify, ConstantEstimate, Family,
    IndexMode, OrderingWitness, PrecPrecVerdict, SobolevClass, YoungFunction, YoungSpec,
};
use crate::{Error, Result};

/// Where a ledger value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    Estimated,
    UserSupplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub value: f64,
    pub provenance: Provenance,
}

impl LedgerEntry {
    fn exact(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::Exact,
        }
    }

    fn estimated(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::Estimated,
        }
    }

    fn user(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::UserSupplied,
        }
    }
}

/// Values that replace derived ledger entries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerOverrides {
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c_delta: Option<f64>,
    #[serde(rename = "c", default, skip_serializing_if = "Option::is_none")]
    pub c_inv: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_hat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_order: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_hardy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_hardy: Option<f64>,
}

/// The constants entering the bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantLedger {
    /// Δ′ constant, the larger of those of `G` and `H`.
    #[serde(rename = "C")]
    pub c_delta: LedgerEntry,
    /// Inverse-product constant, the larger of those of `G` and `H`.
    #[serde(rename = "c")]
    pub c_inv: LedgerEntry,
    /// `C^{p⁺}` with `p⁺` the upper index of `G`.
    pub kappa0: LedgerEntry,
    /// Multiplicative constant in `∫ w H(|u|) ≤ k̂ ∫ w G(|u|)`.
    pub k_hat: Option<LedgerEntry>,
    /// Scale `k` with `H(t) ≤ G(k t)` for all `t ≥ 0`.
    pub k_order: Option<LedgerEntry>,
    /// Embedding constant for the regime of `T_g`.
    pub kappa: Option<LedgerEntry>,
    pub c_hardy: Option<LedgerEntry>,
    /// Scale in the Hardy ordering `Ĥ(t) ≤ G(k t)`.
    pub k_hardy: Option<LedgerEntry>,
    /// Upper index of `G` used for `κ₀`.
    pub p_plus: f64,
}

fn is_power(f: &YoungFunction) -> bool {
    f.family() == Some(Family::Power)
}

/// Same exponent power pair `G = H = t^p`.
fn same_power(g: &YoungFunction, h: &YoungFunction) -> Option<f64> {
    let p = g.power_exponent()?;
    (h.power_exponent()? == p).then_some(p)
}

/// Sobolev constant `‖u‖_{p*} ≤ S ‖∇u‖_p` on `ℝⁿ`, `1 < p < n`.
pub fn talenti_constant(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    let ratio = gamma(1.0 + nf / 2.0) * gamma(nf) / (gamma(nf / p) * gamma(1.0 + nf - nf / p));
    std::f64::consts::PI.powf(-0.5)
        * nf.powf(-1.0 / p)
        * ((p - 1.0) / (nf - p)).powf(1.0 - 1.0 / p)
        * ratio.powf(1.0 / nf)
}

/// `κ` with `‖u‖_{G*} ≤ κ ‖∇u‖_G` for `G = t^p`, `p < n`.
///
/// Here `(G*)⁻¹(t) = K t^{1/p*}` with `K = np/(n−p)`, so the Luxemburg norm
/// of `G*` is `‖u‖_{p*}/K`.
pub fn power_sobolev_kappa(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    talenti_constant(n, p) * (nf - p) / (nf * p)
}

/// `κ` with `|u(x) − u(y)| ≤ κ σ(|x−y|) ‖∇u‖_p` for `G = t^p`, `p > n ≥ 2`.
///
/// Averages over the ball with diameter `|x−y|` and Hölder's inequality
/// give the Morrey constant `2·2ⁿ/(nωₙ)·(nωₙ(p−1)/(p−n))^{1−1/p}`; it is
/// divided by the prefactor `np/(p−n)` of `σ`.
pub fn power_morrey_kappa(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    let area = nf * unit_ball_volume(n);
    let morrey =
        2.0 * 2f64.powi(n as i32) / area * (area * (p - 1.0) / (p - nf)).powf(1.0 - 1.0 / p);
    morrey * (p - nf) / (nf * p)
}

impl ConstantLedger {
    /// Derive every constant that has a constructive value.
    ///
    /// * `C`, `c`: grid estimates, exactly `1` for power functions.
    /// * `k̂ = C·G(k)` from the ordering witness `k`.
    /// * `κ`: `2` on intervals (`t G⁻¹(1/t) ≤ σ(t)`), the Sobolev or Morrey
    ///   constant for power `G` on balls, absent otherwise.
    /// * `c_H = p′` for `G = H = t^p` on convex domains.
    pub fn derive(
        g: &YoungFunction,
        h: &YoungFunction,
        domain: &DomainGeometry,
        hyp: &HypothesisReport,
    ) -> Self {
        let both_power = is_power(g) && is_power(h);
        let (c_delta, c_inv) = if both_power {
            (LedgerEntry::exact(1.0), LedgerEntry::exact(1.0))
        } else {
            let ci = hyp.inverse_product_g.value.max(hyp.inverse_product_h.value);
            (
                LedgerEntry::estimated(hyp.delta_prime_g.value.max(hyp.delta_prime_h.value)),
                LedgerEntry::estimated(if ci.is_finite() { ci } else { f64::INFINITY }),
            )
        };
        let p_plus = hyp.indices_g.1;
        let kappa0 = LedgerEntry {
            value: c_delta.value.powf(p_plus),
            provenance: c_delta.provenance,
        };
        let k_order = hyp.prec_hg.map(|w| {
            if both_power && w.k == 1.0 {
                LedgerEntry::exact(1.0)
            } else {
                LedgerEntry::estimated(w.k)
            }
        });
        let k_hat = k_order.map(|k| LedgerEntry {
            value: c_delta.value * g.value(k.value),
            provenance: if k.provenance == Provenance::Exact && c_delta.provenance == Provenance::Exact {
                Provenance::Exact
            } else {
                Provenance::Estimated
            },
        });
        let n = domain.dim();
        let kappa = match (n, g.power_exponent(), hyp.sobolev_class) {
            (1, _, Some(SobolevClass::Finite { .. })) => Some(LedgerEntry::exact(2.0)),
            (_, Some(p), Some(SobolevClass::Finite { .. })) if p > n as f64 => {
                Some(LedgerEntry::exact(power_morrey_kappa(n, p)))
            }
            (_, Some(p), Some(SobolevClass::Infinite)) if p < n as f64 => {
                Some(LedgerEntry::exact(power_sobolev_kappa(n, p)))
            }
            _ => None,
        };
        let c_hardy = same_power(g, h).map(|p| LedgerEntry::exact(p / (p - 1.0)));
        let k_hardy = hyp.hardy_ok.map(|w| LedgerEntry::estimated(w.k));
        Self {
            c_delta,
            c_inv,
            kappa0,
            k_hat,
            k_order,
            kappa,
            c_hardy,
            k_hardy,
            p_plus,
        }
    }

    /// Replace entries by user-supplied values.
    pub fn with_overrides(mut self, o: &LedgerOverrides) -> Self {
        if let Some(v) = o.c_delta {
            self.c_delta = LedgerEntry::user(v);
        }
        if let Some(v) = o.c_inv {
            self.c_inv = LedgerEntry::user(v);
        }
        if let Some(v) = o.kappa0 {
            self.kappa0 = LedgerEntry::user(v);
        }
        let set = |slot: &mut Option<LedgerEntry>, v: Option<f64>| {
            if let Some(v) = v {
                *slot = Some(LedgerEntry::user(v));
            }
        };
        set(&mut self.k_hat, o.k_hat);
        set(&mut self.k_order, o.k_order);
        set(&mut self.kappa, o.kappa);
        set(&mut self.c_hardy, o.c_hardy);
        set(&mut self.k_hardy, o.k_hardy);
        self
    }

    /// `κ₀` recomputed as `C^{p⁺}`.
    pub fn kappa0_recomputed(&self) -> f64 {
        self.c_delta.value.powf(self.p_plus)
    }

    /// Violations of the ledger invariants; empty when consistent.
    pub fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        let at_least_one = [
            ("C", Some(self.c_delta)),
            ("c", Some(self.c_inv)),
            ("kappa0", Some(self.kappa0)),
            ("k_hat", self.k_hat),
            ("k_order", self.k_order),
        ];
        for (name, e) in at_least_one {
            if let Some(e) = e {
                if !(e.value >= 1.0 && e.value.is_finite()) {
                    out.push(format!("{name} = {:e} is not a finite value ≥ 1", e.value));
                }
            }
        }
        for (name, e) in [("kappa", self.kappa), ("c_H", self.c_hardy), ("k_hardy", self.k_hardy)] {
            if let Some(e) = e {
                if !(e.value > 0.0 && e.value.is_finite()) {
                    out.push(format!("{name} = {:e} is not positive", e.value));
                }
            }
        }
        let k0 = self.kappa0_recomputed();
        if (self.kappa0.value - k0).abs() > 1e-12 * k0 {
            out.push(format!(
                "kappa0 = {:e} differs from C^p+ = {k0:e}",
                self.kappa0.value
            ));
        }
        out
    }
}

/// How the weight enters the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightClass {
    Linf,
    DualOrlicz,
}

/// Verdicts on the hypotheses of every bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub dim: usize,
    /// Both `G` and `H` have a finite Δ′ constant on the grid.
    pub delta_prime_ok: bool,
    pub delta_prime_g: ConstantEstimate,
    pub delta_prime_h: ConstantEstimate,
    pub inverse_product_g: ConstantEstimate,
    pub inverse_product_h: ConstantEstimate,
    /// `(p⁻, p⁺)` of `G`.
    pub indices_g: (f64, f64),
    pub sobolev_class: Option<SobolevClass>,
    /// Set when the class of `T_g` could not be decided.
    pub sobolev_undecidable: Option<String>,
    /// `H ≺ G` for all `t ≥ 0`.
    pub prec_hg: Option<OrderingWitness>,
    /// `G ≺≺ G*`; only examined when `T_g = ∞`.
    pub prec_prec_g_gstar: bool,
    pub prec_prec_detail: Option<PrecPrecVerdict>,
    /// `Ĥ ≺ G` with the threshold used for `Ĥ`.
    pub hardy_ok: Option<OrderingWitness>,
    pub weight_class: WeightClass,
    /// Sampling used by the verdicts above.
    pub sampling: String,
}

fn failed_estimate() -> ConstantEstimate {
    ConstantEstimate {
        value: f64::INFINITY,
        raw_sup: f64::INFINITY,
        edge_growth: true,
    }
}

/// Evaluate the hypotheses of all bounds for `(G, H, w, Ω)`.
///
/// Failed hypotheses are reported, never raised.
pub fn check_hypotheses(
    g: &YoungFunction,
    h: &YoungFunction,
    n: usize,
    w: &Weight,
    domain: &DomainGeometry,
) -> HypothesisReport {
    let _ = (w, domain);
    let delta_prime_g = delta_prime_constant(g);
    let delta_prime_h = delta_prime_constant(h);
    let inverse_product_g = inverse_product_constant(g).unwrap_or_else(|_| failed_estimate());
    let inverse_product_h = inverse_product_constant(h).unwrap_or_else(|_| failed_estimate());
    let delta_prime_ok = !delta_prime_g.edge_growth && !delta_prime_h.edge_growth;
    let indices_g = index_profile(g, IndexMode::GBased).unwrap_or((f64::NAN, f64::NAN));
    let (sobolev_class, sobolev_undecidable) = match sobolev_classify(g, n) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let prec_hg = prec(h, g, 0.0);
    let prec_prec_detail = match sobolev_class {
        Some(SobolevClass::Infinite) => Some(match critical_function(g, n) {
            Ok(gs) => prec_prec(g, &gs),
            Err(e) => PrecPrecVerdict {
                holds: false,
                tail_slopes: Vec::new(),
                diagnostic: format!("critical function unavailable: {e}"),
            },
        }),
        _ => None,
    };
    let prec_prec_g_gstar = prec_prec_detail.as_ref().is_some_and(|v| v.holds);
    let hardy_ok = [0.0, 1.0].into_iter().find_map(|t0| {
        let hh = hardy_transform(h, t0).ok()?;
        prec(&hh, g, t0)
    });
    HypothesisReport {
        dim: n,
        delta_prime_ok,
        delta_prime_g,
        delta_prime_h,
        inverse_product_g,
        inverse_product_h,
        indices_g,
        sobolev_class,
        sobolev_undecidable,
        prec_hg,
        prec_prec_g_gstar,
        prec_prec_detail,
        hardy_ok,
        weight_class: WeightClass::Linf,
        sampling: format!("log grid [{GRID_LO:e}, {GRID_HI:e}], {PER_DECADE} points per decade"),
    }
}

/// The lower-bound theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// Critical-embedding bound with a bounded weight and the volume factor `τ_A`.
    VolumeLinf,
    /// Critical-embedding bound with a weight in a dual Orlicz class.
    DualWeight,
    /// Hardy-inequality bound through the inradius.
    Hardy,
    /// Morrey-regime bound with `‖w‖₁`.
    MorreyL1,
    /// Morrey-regime bound with `‖w‖_∞` and `τ_H`.
    MorreyLinf,
    /// Interval bound under Δ′ only.
    IntervalGeneral,
    /// Interval bound under `H ≺ G`, valid for every level.
    IntervalOrdered,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::VolumeLinf,
        TheoremId::DualWeight,
        TheoremId::Hardy,
        TheoremId::MorreyL1,
        TheoremId::MorreyLinf,
        TheoremId::IntervalGeneral,
        TheoremId::IntervalOrdered,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::VolumeLinf => "volume-linf",
            TheoremId::DualWeight => "dual-weight",
            TheoremId::Hardy => "hardy",
            TheoremId::MorreyL1 => "morrey-l1",
            TheoremId::MorreyLinf => "morrey-linf",
            TheoremId::IntervalGeneral => "interval-general",
            TheoremId::IntervalOrdered => "interval-ordered",
        }
    }

    /// What the bound bounds from below.
    pub fn target(self) -> BoundTarget {
        match self {
            TheoremId::IntervalOrdered => BoundTarget::Lambda,
            _ => BoundTarget::MuLambda,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Quantity a bound is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundTarget {
    /// `μ·λ_{1,μ}` for `μ ≥ 1`.
    MuLambda,
    /// `λ_{1,μ}` for every `μ > 0`.
    Lambda,
}

/// One evaluated bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub theorem: TheoremId,
    pub target: BoundTarget,
    /// Present exactly when `applicable`.
    pub value: Option<f64>,
    pub applicable: bool,
    pub reason: Option<String>,
    /// Formula with the constants substituted symbolically.
    pub composition: &'static str,
    pub inputs: BTreeMap<String, f64>,
}

impl BoundResult {
    fn new(theorem: TheoremId, composition: &'static str) -> Self {
        Self {
            theorem,
            target: theorem.target(),
            value: None,
            applicable: false,
            reason: None,
            composition,
            inputs: BTreeMap::new(),
        }
    }

    fn input(mut self, name: &str, v: f64) -> Self {
        self.inputs.insert(name.to_string(), v);
        self
    }

    fn reject(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }

    fn accept(mut self, value: f64) -> Self {
        if value > 0.0 && value.is_finite() {
            self.value = Some(value);
            self.applicable = true;
        } else {
            self.reason = Some(format!("formula evaluated to {value:e}"));
        }
        self
    }

    fn finish(self, value: Result<f64>) -> Self {
        match value {
            Ok(v) => self.accept(v),
            Err(e) => self.reject(format!("evaluation failed: {e}")),
        }
    }
}

fn need(e: Option<LedgerEntry>, name: &str) -> std::result::Result<f64, String> {
    e.map(|e| e.value)
        .ok_or_else(|| format!("ledger incomplete: {name} missing"))
}

/// `[G(x)]⁻¹`.
fn recip_g(g: &YoungFunction, x: f64) -> f64 {
    1.0 / g.value(x)
}

/// `A⁻¹(y) = G((G*)⁻¹(y))` for `A = G*∘G⁻¹`, by direct quadrature.
pub fn critical_composition_inverse(g: &YoungFunction, n: usize, y: f64) -> Result<f64> {
    let e = 1.0 + 1.0 / n as f64;
    let density = |s: f64| g.inverse(s).map_or(f64::NAN, |v| v / s.powf(e));
    let gs_inv = head_integral(&density, y, 1e-10)?.value;
    Ok(g.value(gs_inv))
}

/// `τ_A(Ω) = |Ω|·A⁻¹(1/|Ω|)`.
pub fn tau_a(g: &YoungFunction, n: usize, measure: f64) -> Result<f64> {
    Ok(measure * critical_composition_inverse(g, n, 1.0 / measure)?)
}

fn gate_critical(hyp: &HypothesisReport, r: BoundResult) -> std::result::Result<BoundResult, BoundResult> {
    if !hyp.delta_prime_ok {
        return Err(r.reject("Δ′ condition not verified for G and H"));
    }
    match hyp.sobolev_class {
        Some(SobolevClass::Infinite) => {}
        Some(SobolevClass::Finite { .. }) => return Err(r.reject("T_g is finite")),
        None => {
            return Err(r.reject(format!(
                "T_g undecidable: {}",
                hyp.sobolev_undecidable.as_deref().unwrap_or("unknown")
            )))
        }
    }
    if hyp.prec_hg.is_none() {
        return Err(r.reject("H ≺ G not verified"));
    }
    if !hyp.prec_prec_g_gstar {
        return Err(r.reject("G ≺≺ G* not verified"));
    }
    Ok(r)
}

fn gate_morrey(hyp: &HypothesisReport, r: BoundResult) -> std::result::Result<BoundResult, BoundResult> {
    if !hyp.delta_prime_ok {
        return Err(r.reject("Δ′ condition not verified for G and H"));
    }
    match hyp.sobolev_class {
        Some(SobolevClass::Finite { .. }) => Ok(r),
        Some(SobolevClass::Infinite) => Err(r.reject("T_g is infinite")),
        None => Err(r.reject(format!(
            "T_g undecidable: {}",
            hyp.sobolev_undecidable.as_deref().unwrap_or("unknown")
        ))),
    }
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(r) => return r,
        }
    };
}

macro_rules! ledger {
    ($r:expr, $e:expr, $name:expr) => {
        match need($e, $name) {
            Ok(v) => v,
            Err(msg) => return $r.reject(msg),
        }
    };
}

/// Bounded weight: `[G(c κ κ₀ / G⁻¹(1/(2 k̂ ‖w‖_∞ τ_A(Ω))))]⁻¹` with
/// `A = G*∘G⁻¹`.
pub fn bound_volume(
    g: &YoungFunction,
    n: usize,
    w_inf: f64,
    measure: f64,
    ledger: &ConstantLedger,
    hyp: &HypothesisReport,
) -> BoundResult {
    let r = BoundResult::new(
        TheoremId::VolumeLinf,
        "1/G(c*kappa*kappa0/Ginv(1/(2*k_hat*w_inf*tau_A)))",
    )
    .input("w_inf", w_inf)
    .input("measure", measure);
    let r = tri!(gate_critical(hyp, r));
    let kappa = ledger!(r, ledger.kappa, "kappa");
    let k_hat = ledger!(r, ledger.k_hat, "k_hat");
    let ta = match tau_a(g, n, measure) {
        Ok(v) => v,
        Err(e) => return r.reject(format!("τ_A failed: {e}")),
    };
    let r = r.input("tau_A", ta);
    let value = g
        .inverse(1.0 / (2.0 * k_hat * w_inf * ta))
        .map(|gi| recip_g(g, ledger.c_inv.value * kappa * ledger.kappa0.value / gi));
    r.finish(value)
}

/// Weight in `L^{B̃}`: `[G(c κ κ₀ / G⁻¹(1/(2 k̂ ‖w‖_{B̃})))]⁻¹`.
///
/// `b_below_a` is the verdict `B ≤ A` needed to pass from `‖·‖_B` to `‖·‖_A`.
pub fn bound_dual_weight(
    g: &YoungFunction,
    w_dual_norm: f64,
    b_below_a: bool,
    ledger: &ConstantLedger,
    hyp: &HypothesisReport,
) -> BoundResult {
    let r = BoundResult::new(
        TheoremId::DualWeight,
        "1/G(c*kappa*kappa0/Ginv(1/(2*k_hat*w_dual)))",
    )
    .input("w_dual", w_dual_norm);
    let r = tri!(gate_critical(hyp, r));
    if !b_below_a {
        return r.reject("B ≤ A not verified");
    }
    let kappa = ledger!(r, ledger.kappa, "kappa");
    let k_hat = ledger!(r, ledger.k_hat, "k_hat");
    let value = g
        .inverse(1.0 / (2.0 * k_hat * w_dual_norm))
        .map(|gi| recip_g(g, ledger.c_inv.value * kappa * ledger.kappa0.value / gi));
    r.finish(value)
}

/// Hardy bound: `[G(c_H κ₀ r_Ω / H⁻¹(C⁻¹ ‖w‖_∞⁻¹))]⁻¹`.
pub fn bound_hardy(
    g: &YoungFunction,
    h: &YoungFunction,
    r_in: f64,
    w_inf: f64,
    ledger: &ConstantLedger,
    hyp: &HypothesisReport,
) -> BoundResult {
    let r = BoundResult::new(
        TheoremId::Hardy,
        "1/G(c_H*kappa0*r/Hinv(1/(C*w_inf)))",
    )
    .input("inradius", r_in)
    .input("w_inf", w_inf);
    if !hyp.delta_prime_ok {
        return r.reject("Δ′ condition not verified for G and H");
    }
    if hyp.hardy_ok.is_none() {
        return r.reject("Hardy ordering Ĥ ≺ G not verified");
    }
    let c_h = ledger!(r, ledger.c_hardy, "c_H");
    let value = h
        .inverse(1.0 / (ledger.c_delta.value * w_inf))
        .map(|hi| recip_g(g, c_h * ledger.kappa0.value * r_in / hi));
    r.finish(value)
}

/// Morrey regime with `‖w‖₁`: `[G(c κ κ₀ σ(r_Ω) / H⁻¹(‖w‖₁⁻¹))]⁻¹`.
pub fn bound_sup_morrey_l1(
    g: &YoungFunction,
    h: &YoungFunction,
    n: usize,
    r_in: f64,
    w_l1: f64,
    ledger: &ConstantLedger,
    hyp: &HypothesisReport,
) -> BoundResult {
    let r = BoundResult::new(
        TheoremId::MorreyL1,
        "1/G(c*kappa*kappa0*sigma(r)/Hinv(1/w_l1))",
    )
    .input("inradius", r_in)
    .input("w_l1", w_l1);
    let r = tri!(gate_morrey(hyp, r));
    let kappa = ledger!(r, ledger.kappa, "kappa");
    let s = match sigma(g, n, r_in) {
        Ok(s) => s,
        Err(e) => return r.reject(format!("σ failed: {e}")),
    };
    let r = r.input("sigma", s);
    let value = h
        .inverse(1.0 / w_l1)
        .map(|hi| recip_g(g, ledger.c_inv.value * kappa * ledger.kappa0.value * s / hi));
    r.finish(value)
}

/// Morrey regime with `‖w‖_∞`:
/// `[G(κ κ₀ σ(r_Ω) τ_H(Ω) / H⁻¹(C⁻¹ ‖w‖_∞⁻¹))]⁻¹`, `τ_H(Ω) = |Ω| H̃⁻¹(1/|Ω|)`.
///
/// The factor `C⁻¹` comes from passing from `‖·‖_{H,w}` to `‖·‖_H`; it is
/// `1` for power functions.
#[allow(clippy::too_many_arguments)]
pub fn bound_sup_morrey_linf(
    g: &YoungFunction,
    h: &YoungFunction,
    n: usize,
    r_in: f64,
    measure: f64,
    w_inf: f64,
    ledger: &ConstantLedger,
    hyp: &HypothesisReport,
) -> BoundResult {
    let r = BoundResult::new(
        TheoremId::MorreyLinf,
        "1/G(kappa*kappa0*sigma(r)*tau_H/Hinv(1/(C*w_inf)))",
    )
    .input("inradius", r_in)
    .input("measure", measure)
    .input("w_inf", w_inf);
    let r = tri!(gate_morrey(hyp, r));
    let kappa = ledger!(r, ledger.kappa, "kappa");
    let s = match sigma(g, n, r_in) {
        Ok(s) => s,
        Err(e) => return r.reject(format!("σ failed: {e}")),
    };
    let th = match tau(&h.conjugate(), measure) {
        Ok(t) => t,
        Err(e) => return r.reject(format!("τ_H failed: {e}")),
    };
    let r = r.input("sigma", s).input("tau_H", th);
    let value = h
        .inverse(1.0 / (ledger.c_delta.value * w_inf))
        .map(|hi| recip_g(g, kappa * ledger.kappa0.value * s * th / hi));
    r.finish(value)
}

/// Interval `(a, b)` under Δ′:
/// `[G(2 c κ₀ (b−a) G⁻¹(1/(b−a)) / H⁻¹(‖w‖₁⁻¹))]⁻¹`.
pub fn bound_1d_general(
    g: &YoungFunction,
    h: &YoungFunction,
    a: f64,
    b: f64,
    w_l1: f64,
    ledger: &ConstantLedger,
    hyp: &HypothesisReport,
) -> BoundResult {
    let r = BoundResult::new(
        TheoremId::IntervalGeneral,
        "1/G(2*c*kappa0*(b-a)*Ginv(1/(b-a))/Hinv(1/w_l1))",
    )
    .input("a", a)
    .input("b", b)
    .input("w_l1", w_l1);
    if !(a < b) {
        return r.reject("empty interval");
    }
    if !hyp.delta_prime_ok {
        return r.reject("Δ′ condition not verified for G and H");
    }
    let len = b - a;
    let value = (|| {
        let num = 2.0 * ledger.c_inv.value * ledger.kappa0.value * len * g.inverse(1.0 / len)?;
        Ok(recip_g(g, num / h.inverse(1.0 / w_l1)?))
    })();
    r.finish(value)
}

/// Interval `(a, b)` under `H(t) ≤ G(k t)`:
/// `(b−a) / (C k ‖w‖₁ G(k(b−a)/2))`, a bound on `λ_{1,μ}` for every `μ > 0`.
pub fn bound_1d_ordered(
    g: &YoungFunction,
    a: f64,
    b: f64,
    w_l1: f64,
    ledger: &ConstantLedger,
    hyp: &HypothesisReport,
) -> BoundResult {
    let r = BoundResult::new(
        TheoremId::IntervalOrdered,
        "(b-a)/(C*k*w_l1*G(k*(b-a)/2))",
    )
    .input("a", a)
    .input("b", b)
    .input("w_l1", w_l1);
    if !(a < b) {
        return r.reject("empty interval");
    }
    if !hyp.delta_prime_ok {
        return r.reject("Δ′ condition not verified for G and H");
    }
    if hyp.prec_hg.is_none() {
        return r.reject("H ≺ G not verified");
    }
    let k = ledger!(r, ledger.k_order, "k");
    let len = b - a;
    r.accept(len / (ledger.c_delta.value * k * w_l1 * g.value(k * len / 2.0)))
}

/// Both sides of `‖∇u‖_G ≤ κ₀ ‖u‖_{H,w} / G⁻¹(1/λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientNormCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `rhs/lhs − 1`.
    pub rel_gap: f64,
}

/// Check the gradient-norm estimate on a computed eigenpair `(λ, u)`.
pub fn gradient_norm_check(
    problem: &EigenProblem,
    u: &Field,
    lambda: f64,
    kappa0: f64,
    tol: f64,
) -> Result<GradientNormCheck> {
    let lhs = gradient_field(u).luxemburg_norm(&problem.g);
    let rhs = kappa0 * luxemburg_norm(&problem.h, &problem.weight, u)? / problem.g.inverse(1.0 / lambda)?;
    Ok(GradientNormCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + tol),
        rel_gap: rhs / lhs - 1.0,
    })
}

/// Controls for [`verify_case`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub solve: SolveOptions,
    /// Relative slack in `bound ≤ λ (1 + tol)`.
    pub tol: f64,
    /// Levels `μ ≥ 1` at which every applicable bound is checked.
    pub mu_list: Vec<f64>,
    /// Additional levels `μ < 1` for bounds valid at every level.
    pub extra_mu: Vec<f64>,
    /// Nested grids for a refinement study of `λ_{1,1}`.
    pub refine: Option<Vec<usize>>,
    /// Young function `B` for the dual-weight bound.
    pub dual_weight: Option<YoungSpec>,
    /// Restrict to these theorems (all when empty).
    pub theorems: Vec<TheoremId>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions::default(),
            tol: 1e-3,
            mu_list: vec![1.0],
            extra_mu: vec![0.25, 0.5],
            refine: None,
            dual_weight: None,
            theorems: Vec::new(),
        }
    }
}

/// Solve at one level.
#[derive(Debug, Clone, Serialize)]
pub struct LevelSolve {
    pub mu: f64,
    pub lambda: Option<f64>,
    pub residual: Option<f64>,
    pub iterations: Option<usize>,
    pub label: Option<&'static str>,
    pub error: Option<String>,
}

/// A bound compared at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub mu: f64,
    /// `μ λ` or `λ`, according to the target.
    pub reference: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub bound: BoundResult,
    pub comparisons: Vec<Comparison>,
    /// `None` when inapplicable or nothing to compare against.
    pub pass: Option<bool>,
}

/// Outcome of [`verify_case`].
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub domain: String,
    pub g: String,
    pub h: String,
    pub hypotheses: HypothesisReport,
    pub ledger: ConstantLedger,
    pub ledger_issues: Vec<String>,
    pub solves: Vec<LevelSolve>,
    pub bounds: Vec<BoundCheck>,
    pub gradient_norm: Option<GradientNormCheck>,
    pub refine: Option<RefineStudy>,
    /// Every requested solve succeeded.
    pub complete: bool,
    /// Theorems with a bound above the computed eigenvalue.
    pub violations: Vec<TheoremId>,
}

impl VerificationReport {
    /// No applicable bound exceeded a computed eigenvalue.
    pub fn all_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluate every applicable bound for `problem`.
pub fn evaluate_bounds(
    problem: &EigenProblem,
    ledger: &ConstantLedger,
    hyp: &HypothesisReport,
    dual_weight: Option<&YoungSpec>,
) -> Vec<BoundResult> {
    let (g, h, w, dom) = (&problem.g, &problem.h, &problem.weight, &problem.domain);
    let n = dom.dim();
    let (m, r_in) = (dom.measure(), dom.inradius());
    let (w_inf, w_l1) = (w.linf_norm(), w.l1_norm());
    let mut out = vec![
        bound_volume(g, n, w_inf, m, ledger, hyp),
        dual_bound(problem, ledger, hyp, dual_weight),
        bound_hardy(g, h, r_in, w_inf, ledger, hyp),
        bound_sup_morrey_l1(g, h, n, r_in, w_l1, ledger, hyp),
        bound_sup_morrey_linf(g, h, n, r_in, m, w_inf, ledger, hyp),
    ];
    match *dom {
        DomainGeometry::Interval { a, b } => {
            out.push(bound_1d_general(g, h, a, b, w_l1, ledger, hyp));
            out.push(bound_1d_ordered(g, a, b, w_l1, ledger, hyp));
        }
        DomainGeometry::Ball { .. } => {
            for id in [TheoremId::IntervalGeneral, TheoremId::IntervalOrdered] {
                out.push(BoundResult::new(id, "").reject("domain is not an interval"));
            }
        }
    }
    out
}

/// Grid used to evaluate `‖w‖_{B̃}`.
const DUAL_NORM_GRID: usize = 2048;

fn dual_bound(
    problem: &EigenProblem,
    ledger: &ConstantLedger,
    hyp: &HypothesisReport,
    spec: Option<&YoungSpec>,
) -> BoundResult {
    let base = BoundResult::new(TheoremId::DualWeight, "");
    let Some(spec) = spec else {
        return base.reject("no dual Young function B supplied");
    };
    let n = problem.domain.dim();
    let prepared = (|| {
        let b = spec.build()?;
        let a = crate::young::critical_composition(&problem.g, n)?;
        let b_below_a = prec(&b, &a, 0.0).is_some_and(|w| w.k == 1.0);
        let wf = Field::from_fn(problem.domain, DUAL_NORM_GRID, |x| problem.weight.eval(x))?;
        let one = Weight::constant(1.0, &problem.domain)?;
        let norm = luxemburg_norm(&b.conjugate(), &one, &wf)?;
        Ok::<_, Error>((norm, b_below_a))
    })();
    match prepared {
        Ok((norm, ok)) => {
            let mut hyp = hyp.clone();
            hyp.weight_class = WeightClass::DualOrlicz;
            bound_dual_weight(&problem.g, norm, ok, ledger, &hyp)
        }
        Err(e) => base.reject(format!("dual norm failed: {e}")),
    }
}

/// Run the hypotheses, bounds and solves for one case and compare.
///
/// Bounds targeting `μ λ_{1,μ}` are compared at the levels `μ ≥ 1` of
/// `opts.mu_list`; bounds on `λ_{1,μ}` at every level. A failed solve
/// marks the report incomplete and leaves the affected comparisons out.
pub fn verify_case(
    problem: &EigenProblem,
    ledger: Option<&ConstantLedger>,
    opts: &VerifyOptions,
) -> VerificationReport {
    use rayon::prelude::*;

    let n = problem.domain.dim();
    let hyp = check_hypotheses(&problem.g, &problem.h, n, &problem.weight, &problem.domain);
    let ledger = ledger
        .cloned()
        .unwrap_or_else(|| ConstantLedger::derive(&problem.g, &problem.h, &problem.domain, &hyp));
    let mut bounds = evaluate_bounds(problem, &ledger, &hyp, opts.dual_weight.as_ref());
    if !opts.theorems.is_empty() {
        bounds.retain(|b| opts.theorems.contains(&b.theorem));
    }

    let mut levels: Vec<f64> = opts.mu_list.clone();
    levels.extend(opts.extra_mu.iter().copied());
    if !levels.contains(&1.0) {
        levels.push(1.0);
    }
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let solved: Vec<(LevelSolve, Option<crate::eigen::EigenResult>)> = levels
        .par_iter()
        .map(|&mu| {
            let r = problem
                .with_mu(mu)
                .and_then(|p| solve_first(&p, &opts.solve).map(|res| (weak_residual(&p, &res), res)));
            match r {
                Ok((res, e)) => (
                    LevelSolve {
                        mu,
                        lambda: Some(e.lambda),
                        residual: Some(res),
                        iterations: Some(e.iterations),
                        label: Some(e.label),
                        error: None,
                    },
                    Some(e),
                ),
                Err(err) => (
                    LevelSolve {
                        mu,
                        lambda: None,
                        residual: None,
                        iterations: None,
                        label: None,
                        error: Some(err.to_string()),
                    },
                    None,
                ),
            }
        })
        .collect();
    let complete = solved.iter().all(|(s, _)| s.lambda.is_some());

    let in_mu_list = |mu: f64| opts.mu_list.contains(&mu) || mu == 1.0;
    let mut violations = Vec::new();
    let checks: Vec<BoundCheck> = bounds
        .into_iter()
        .map(|bound| {
            let mut comparisons = Vec::new();
            if let Some(v) = bound.value {
                for (s, _) in &solved {
                    let Some(l) = s.lambda else { continue };
                    let reference = match bound.target {
                        BoundTarget::MuLambda if s.mu >= 1.0 && in_mu_list(s.mu) => s.mu * l,
                        BoundTarget::Lambda => l,
                        _ => continue,
                    };
                    comparisons.push(Comparison {
                        mu: s.mu,
                        reference,
                        holds: v <= reference * (1.0 + opts.tol),
                    });
                }
            }
            let pass = (!comparisons.is_empty()).then(|| comparisons.iter().all(|c| c.holds));
            if pass == Some(false) {
                violations.push(bound.theorem);
            }
            BoundCheck {
                bound,
                comparisons,
                pass,
            }
        })
        .collect();

    let at_one = solved.iter().find(|(s, _)| s.mu == 1.0).and_then(|(_, e)| e.as_ref());
    let gradient_norm = at_one.and_then(|e| {
        gradient_norm_check(problem, &e.u, e.lambda, ledger.kappa0.value, opts.tol).ok()
    });
    let refine = opts.refine.as_ref().and_then(|ns| {
        problem
            .with_mu(1.0)
            .and_then(|p| refine_study(&p, ns, &opts.solve, opts.tol))
            .ok()
    });
    VerificationReport {
        domain: problem.domain.label(),
        g: problem.g.label().to_string(),
        h: problem.h.label().to_string(),
        ledger_issues: ledger.issues(),
        hypotheses: hyp,
        ledger,
        solves: solved.into_iter().map(|(s, _)| s).collect(),
        bounds: checks,
        gradient_norm,
        refine,
        complete,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pw(p: f64) -> YoungFunction {
        YoungFunction::power(p).unwrap()
    }

    fn setup(g: &YoungFunction, h: &YoungFunction, dom: DomainGeometry) -> (HypothesisReport, ConstantLedger) {
        let w = Weight::constant(1.0, &dom).unwrap();
        let hyp = check_hypotheses(g, h, dom.dim(), &w, &dom);
        let led = ConstantLedger::derive(g, h, &dom, &hyp);
        (hyp, led)
    }

    fn unit() -> DomainGeometry {
        DomainGeometry::interval(0.0, 1.0).unwrap()
    }

    /// Ledger with every constant set to one.
    fn ones(led: &ConstantLedger) -> ConstantLedger {
        led.clone().with_overrides(&LedgerOverrides {
            c_delta: Some(1.0),
            c_inv: Some(1.0),
            kappa0: Some(1.0),
            k_hat: Some(1.0),
            k_order: Some(1.0),
            kappa: Some(1.0),
            c_hardy: led.c_hardy.map(|e| e.value),
            k_hardy: None,
        })
    }

    #[test]
    fn hypotheses_for_quadratic_pairs() {
        let (h3, _) = setup(&pw(2.0), &pw(2.0), DomainGeometry::ball(1.0, 3).unwrap());
        assert_eq!(h3.sobolev_class, Some(SobolevClass::Infinite));
        assert_eq!(h3.prec_hg.unwrap().k, 1.0);
        assert!(h3.prec_prec_g_gstar);
        let (h1, _) = setup(&pw(2.0), &pw(2.0), unit());
        match h1.sobolev_class.unwrap() {
            SobolevClass::Finite { value } => assert_relative_eq!(value, 2.0, max_relative = 1e-8),
            SobolevClass::Infinite => panic!("expected finite T_g"),
        }
        let (hq, _) = setup(&pw(2.0), &pw(4.0), unit());
        assert!(hq.hardy_ok.is_none());
        assert!(hq.prec_hg.is_none());
    }

    #[test]
    fn borderline_dimension_is_undecidable() {
        let g = pw(2.005);
        let (h, led) = setup(&g, &g, DomainGeometry::ball(1.0, 2).unwrap());
        assert!(h.sobolev_class.is_none());
        assert!(h.sobolev_undecidable.is_some());
        assert!(led.kappa.is_none());
        let (h2, _) = setup(&pw(2.0), &pw(2.0), DomainGeometry::ball(1.0, 2).unwrap());
        assert_eq!(h2.sobolev_class, Some(SobolevClass::Infinite));
        assert!(!h2.prec_prec_g_gstar);
    }

    #[test]
    fn power_ledger_is_exact() {
        let (_, led) = setup(&pw(3.0), &pw(3.0), unit());
        assert_eq!(led.c_delta, LedgerEntry::exact(1.0));
        assert_eq!(led.kappa0.value, 1.0);
        assert_eq!(led.k_hat.unwrap().value, 1.0);
        assert_eq!(led.kappa.unwrap().value, 2.0);
        assert_relative_eq!(led.c_hardy.unwrap().value, 1.5);
        assert!(led.issues().is_empty());
    }

    #[test]
    fn overrides_are_tagged_and_checked() {
        let (_, led) = setup(&pw(2.0), &pw(2.0), unit());
        let bad = led.with_overrides(&LedgerOverrides {
            kappa0: Some(1e-3),
            ..Default::default()
        });
        assert_eq!(bad.kappa0.provenance, Provenance::UserSupplied);
        assert_eq!(bad.issues().len(), 2);
    }

    #[test]
    fn interval_bounds_match_closed_forms() {
        let (hyp, led) = setup(&pw(2.0), &pw(2.0), unit());
        let g = pw(2.0);
        assert_eq!(bound_1d_general(&g, &g, 0.0, 1.0, 1.0, &led, &hyp).value, Some(0.25));
        assert_eq!(bound_1d_ordered(&g, 0.0, 1.0, 1.0, &led, &hyp).value, Some(4.0));
        assert_eq!(bound_1d_ordered(&g, 0.0, 2.0, 2.0, &led, &hyp).value, Some(1.0));
        let half = bound_1d_general(&g, &g, 0.0, 0.5, 1.0, &led, &hyp).value.unwrap();
        assert_relative_eq!(half, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn hardy_and_morrey_examples() {
        let g = pw(2.0);
        let (hyp, led) = setup(&g, &g, unit());
        let one = ones(&led);
        assert_eq!(bound_hardy(&g, &g, 0.5, 1.0, &one, &hyp).value, Some(1.0));
        assert_relative_eq!(bound_hardy(&g, &g, 0.25, 1.0, &one, &hyp).value.unwrap(), 4.0);
        let m1 = bound_sup_morrey_l1(&g, &g, 1, 0.5, 1.0, &one, &hyp).value.unwrap();
        assert_relative_eq!(m1, 0.5, max_relative = 1e-8);
        let m2 = bound_sup_morrey_linf(&g, &g, 1, 0.5, 1.0, 1.0, &one, &hyp);
        assert_relative_eq!(m2.inputs["tau_H"], 2.0, max_relative = 1e-10);
        assert_relative_eq!(m2.value.unwrap(), 0.125, max_relative = 1e-8);
    }

    #[test]
    fn critical_bounds_need_infinite_tail() {
        let g = pw(2.0);
        let (hyp, led) = setup(&g, &g, unit());
        let r = bound_volume(&g, 1, 1.0, 1.0, &led, &hyp);
        assert!(!r.applicable);
        assert!(r.value.is_none());
        let ball = DomainGeometry::ball(1.0, 3).unwrap();
        let (hyp3, led3) = setup(&g, &g, ball);
        let r3 = bound_sup_morrey_l1(&g, &g, 3, 1.0, 1.0, &led3, &hyp3);
        assert!(!r3.applicable);
    }

    #[test]
    fn volume_factor_closed_form() {
        // (G*)⁻¹(t) = 6 t^{1/6} for t², n = 3, so A⁻¹(1) = 36.
        let g = pw(2.0);
        assert_relative_eq!(tau_a(&g, 3, 1.0).unwrap(), 36.0, max_relative = 1e-8);
        let (hyp, led) = setup(&g, &g, DomainGeometry::ball(1.0, 3).unwrap());
        let one = ones(&led);
        let v = bound_volume(&g, 3, 1.0, 1.0, &one, &hyp).value.unwrap();
        assert_relative_eq!(v, 1.0 / 72.0, max_relative = 1e-8);
        let v2 = bound_volume(&g, 3, 2.0, 1.0, &one, &hyp).value.unwrap();
        assert!(v2 < v);
        let dual = bound_dual_weight(&g, 36.0, true, &one, &hyp).value.unwrap();
        assert_relative_eq!(dual, v, max_relative = 1e-8);
    }

    #[test]
    fn missing_constant_is_reported() {
        let g = pw(2.0);
        let h = pw(3.0);
        let (hyp, led) = setup(&g, &h, unit());
        assert!(led.c_hardy.is_none());
        let r = bound_hardy(&g, &h, 0.5, 1.0, &led, &hyp);
        assert!(!r.applicable);
    }

    #[test]
    fn embedding_constants() {
        // p = 2: S = (π n (n−2))^{-1/2} (Γ(n)/Γ(n/2))^{1/n}.
        for n in [3usize, 4, 5] {
            let nf = n as f64;
            let s = (std::f64::consts::PI * nf * (nf - 2.0)).powf(-0.5)
                * (gamma(nf) / gamma(nf / 2.0)).powf(1.0 / nf);
            assert_relative_eq!(talenti_constant(n, 2.0), s, max_relative = 1e-12);
        }
        assert!(power_morrey_kappa(2, 3.0) > 0.0);
    }
}
