use std::path::Path;

use log::info;
use orlicz_core::bounds::{check_hypotheses, verify_case, ConstantLedger};
use orlicz_core::eigen::{solve_first, weak_residual};
use orlicz_core::young::{
    critical_function, delta_prime_constant, index_profile, inverse_product_constant, sigma,
    sobolev_classify, tail_index, ConstantEstimate, IndexMode,
};
use orlicz_core::{SobolevClass, VerificationReport, YoungFunction};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{LoadedCase, Overrides};
use crate::report::{num, opt_num};
use crate::CliError;

/// Quantities of one Young function in a fixed dimension.
#[derive(Debug, Clone, Serialize)]
pub struct YoungSummary {
    pub label: String,
    pub p_minus: f64,
    pub p_plus: f64,
    pub delta_prime: ConstantEstimate,
    pub inverse_product: Option<ConstantEstimate>,
    pub tail_index: f64,
    pub t_g: Option<SobolevClass>,
    pub t_g_note: Option<String>,
    /// Index range of `G*` when `T_g = ∞`.
    pub critical_indices: Option<(f64, f64)>,
    /// `[t, G*(t)]` samples.
    pub critical_samples: Vec<[f64; 2]>,
    /// `[t, σ(t)]` samples when `T_g < ∞`.
    pub sigma_samples: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InspectReport {
    pub case_id: String,
    pub dim: usize,
    #[serde(rename = "G")]
    pub g: YoungSummary,
    #[serde(rename = "H")]
    pub h: YoungSummary,
}

const SAMPLE_POINTS: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

pub fn summarize(f: &YoungFunction, n: usize) -> Result<YoungSummary, CliError> {
    let (p_minus, p_plus) =
        index_profile(f, IndexMode::GBased).map_err(|e| CliError::Config(e.to_string()))?;
    let (t_g, t_g_note) = match sobolev_classify(f, n) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut critical_indices = None;
    let mut critical_samples = Vec::new();
    if t_g == Some(SobolevClass::Infinite) {
        if let Ok(gs) = critical_function(f, n) {
            critical_indices = index_profile(&gs, IndexMode::GBased).ok();
            critical_samples = SAMPLE_POINTS.iter().map(|&t| [t, gs.value(t)]).collect();
        }
    }
    let sigma_samples = if t_g.is_some_and(|c| c.is_finite()) {
        [0.25, 0.5, 1.0]
            .iter()
            .filter_map(|&t| sigma(f, n, t).ok().map(|s| [t, s]))
            .collect()
    } else {
        Vec::new()
    };
    Ok(YoungSummary {
        label: f.label().to_string(),
        p_minus,
        p_plus,
        delta_prime: delta_prime_constant(f),
        inverse_product: inverse_product_constant(f).ok(),
        tail_index: tail_index(f),
        t_g,
        t_g_note,
        critical_indices,
        critical_samples,
        sigma_samples,
    })
}

pub fn young_inspect(case: &LoadedCase) -> Result<InspectReport, CliError> {
    let p = case.config.problem()?;
    let n = p.domain.dim();
    Ok(InspectReport {
        case_id: case.id.clone(),
        dim: n,
        g: summarize(&p.g, n)?,
        h: summarize(&p.h, n)?,
    })
}

/// One level of `solve`.
#[derive(Debug, Clone, Serialize)]
pub struct SolveRow {
    pub case_id: String,
    #[serde(rename = "G")]
    pub g: String,
    #[serde(rename = "H")]
    pub h: String,
    pub domain: String,
    pub mu: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub lambda: String,
    pub mu_lambda: String,
    pub residual: String,
    pub iterations: String,
    pub label: String,
    /// `μ λ_{1,μ}` nondecreasing over the listed levels (same on every row).
    pub mu_monotone: bool,
    pub error: String,
}

/// Relative slack of the level-monotonicity verdict.
pub const MU_TOL: f64 = 1e-3;

/// Solve at every level of the case. Failed levels keep a row with the
/// error message; check [`solve_failure`] for the exit status.
pub fn solve(case: &LoadedCase, o: &Overrides) -> Result<Vec<SolveRow>, CliError> {
    let base = case.config.problem()?;
    let opts = case.config.solve_options(o);
    let results: Vec<_> = case
        .config
        .mu_list
        .par_iter()
        .map(|&mu| {
            let p = base.with_mu(mu)?;
            solve_first(&p, &opts).map(|r| (weak_residual(&p, &r), r))
        })
        .collect();
    let ok: Vec<(f64, f64)> = case
        .config
        .mu_list
        .iter()
        .zip(&results)
        .filter_map(|(&m, r)| r.as_ref().ok().map(|(_, e)| (m, m * e.lambda)))
        .collect();
    let mu_monotone = ok.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - MU_TOL));
    let mut rows = Vec::new();
    for (&mu, r) in case.config.mu_list.iter().zip(results) {
        let (lambda, residual, iterations, label, error) = match r {
            Ok((res, e)) => {
                info!("{} mu={mu}: lambda={} after {} iterations", case.id, e.lambda, e.iterations);
                (Some(e.lambda), Some(res), e.iterations.to_string(), e.label.to_string(), String::new())
            }
            Err(e) => (None, None, String::new(), String::new(), e.to_string()),
        };
        rows.push(SolveRow {
            case_id: case.id.clone(),
            g: base.g.label().to_string(),
            h: base.h.label().to_string(),
            domain: base.domain.label(),
            mu: num(mu),
            n: opts.n,
            lambda: opt_num(lambda),
            mu_lambda: opt_num(lambda.map(|l| l * mu)),
            residual: opt_num(residual),
            iterations,
            label,
            mu_monotone,
            error,
        });
    }
    Ok(rows)
}

/// Solver error summarizing the failed rows, if any.
pub fn solve_failure(rows: &[SolveRow]) -> Option<CliError> {
    let failures: Vec<String> = rows
        .iter()
        .filter(|r| !r.error.is_empty())
        .map(|r| format!("mu = {}: {}", r.mu, r.error))
        .collect();
    (!failures.is_empty()).then(|| CliError::Solver(failures.join("; ")))
}

/// Verification of one case with the ledger overrides of its file.
pub fn verify(case: &LoadedCase, o: &Overrides) -> Result<VerificationReport, CliError> {
    let p = case.config.problem()?;
    let hyp = check_hypotheses(&p.g, &p.h, p.domain.dim(), &p.weight, &p.domain);
    let ledger = ConstantLedger::derive(&p.g, &p.h, &p.domain, &hyp).with_overrides(&case.config.ledger);
    Ok(verify_case(&p, Some(&ledger), &case.config.verify_options(o)))
}

/// Exit status of a verification: violations outrank incomplete solves.
pub fn verdict(r: &VerificationReport) -> Result<(), CliError> {
    if !r.violations.is_empty() {
        let ids: Vec<&str> = r.violations.iter().map(|t| t.as_str()).collect();
        return Err(CliError::Violation(format!(
            "bound above the computed eigenvalue for {}",
            ids.join(", ")
        )));
    }
    if !r.complete {
        let errs: Vec<String> = r
            .solves
            .iter()
            .filter_map(|s| s.error.as_ref().map(|e| format!("mu = {}: {e}", s.mu)))
            .collect();
        return Err(CliError::Solver(errs.join("; ")));
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
