//! Case configuration files.
//!
//! A case is a JSON object with a versioned `schema` field. Unknown keys are
//! rejected so that a misspelled option cannot silently fall back to a
//! default.

use std::path::Path;

use orlicz_core::bounds::{LedgerOverrides, TheoremId, VerifyOptions};
use orlicz_core::{DomainGeometry, EigenProblem, SolveOptions, Weight, WeightKind, YoungSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const SCHEMA: &str = "orlicz-spectral/case-v1";

/// Solver settings; omitted fields keep the library defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(rename = "N", default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub restarts: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub kkt_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub schema: String,
    /// Defaults to the file stem.
    #[serde(default)]
    pub case_id: Option<String>,
    #[serde(rename = "young_G")]
    pub young_g: YoungSpec,
    #[serde(rename = "young_H")]
    pub young_h: YoungSpec,
    pub domain: DomainGeometry,
    pub weight: WeightKind,
    #[serde(default = "default_mu_list")]
    pub mu_list: Vec<f64>,
    /// Levels below one at which the level-independent bound is checked.
    #[serde(default)]
    pub extra_mu: Option<Vec<f64>>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub ledger: LedgerOverrides,
    /// Restrict verification to these theorems.
    #[serde(default)]
    pub theorems: Vec<TheoremId>,
    #[serde(default)]
    pub dual_weight: Option<YoungSpec>,
    #[serde(default)]
    pub refine: Option<Vec<usize>>,
}

fn default_mu_list() -> Vec<f64> {
    vec![1.0]
}

/// Command-line overrides applied on top of a file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid: Option<usize>,
}

/// A parsed case with its identity.
#[derive(Debug, Clone)]
pub struct LoadedCase {
    pub id: String,
    /// SHA-256 of the file bytes, hex encoded.
    pub hash: String,
    pub config: CaseConfig,
}

pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl CaseConfig {
    pub fn parse(bytes: &[u8]) -> Result<Self, CliError> {
        let cfg: CaseConfig =
            serde_json::from_slice(bytes).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema != SCHEMA {
            return Err(CliError::Config(format!(
                "unsupported schema {:?}; expected {SCHEMA:?}",
                cfg.schema
            )));
        }
        if cfg.mu_list.is_empty() || cfg.mu_list.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
            return Err(CliError::Config("mu_list must hold positive finite levels".into()));
        }
        if cfg.mu_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config("mu_list must be strictly increasing".into()));
        }
        if let Some(extra) = &cfg.extra_mu {
            if extra.iter().any(|m| !(*m > 0.0 && *m < 1.0)) {
                return Err(CliError::Config("extra_mu levels must lie in (0, 1)".into()));
            }
        }
        cfg.problem()?;
        Ok(cfg)
    }

    pub fn solve_options(&self, o: &Overrides) -> SolveOptions {
        let d = SolveOptions::default();
        SolveOptions {
            n: o.grid.or(self.solver.n).unwrap_or(d.n),
            restarts: self.solver.restarts.unwrap_or(d.restarts),
            seed: o.seed.or(self.solver.seed).unwrap_or(d.seed),
            max_iters: self.solver.max_iters.unwrap_or(d.max_iters),
            kkt_tol: self.solver.kkt_tol.unwrap_or(d.kkt_tol),
            ..d
        }
    }

    pub fn verify_options(&self, o: &Overrides) -> VerifyOptions {
        let d = VerifyOptions::default();
        VerifyOptions {
            solve: self.solve_options(o),
            mu_list: self.mu_list.clone(),
            extra_mu: self.extra_mu.clone().unwrap_or(d.extra_mu),
            refine: self.refine.clone(),
            dual_weight: self.dual_weight,
            theorems: self.theorems.clone(),
            ..d
        }
    }

    /// The eigenvalue problem at `μ = 1`.
    pub fn problem(&self) -> Result<EigenProblem, CliError> {
        let cfg = |e: orlicz_core::Error| CliError::Config(e.to_string());
        self.domain.validate().map_err(cfg)?;
        let g = self.young_g.build().map_err(cfg)?;
        let h = self.young_h.build().map_err(cfg)?;
        let w = Weight::new(self.weight.clone(), &self.domain).map_err(cfg)?;
        EigenProblem::new(g, h, w, 1.0).map_err(cfg)
    }
}

pub fn load(path: &Path) -> Result<LoadedCase, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let config = CaseConfig::parse(&bytes)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let id = config.case_id.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "case".into())
    });
    Ok(LoadedCase {
        id,
        hash: config_hash(&bytes),
        config,
    })
}
