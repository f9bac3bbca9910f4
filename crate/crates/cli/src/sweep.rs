//! Batch verification over a glob of case files.
//!
//! Cases run concurrently and each writes only its own staging file. A
//! single-threaded merge then orders everything by config hash and writes
//! `cases.csv`, `manifest.json` and `cases/<case>.json`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::{verify, write_json};
use crate::config::{config_hash, CaseConfig, LoadedCase, Overrides};
use crate::report::{case_rows, error_row, write_csv, CaseRow};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub case_id: String,
    pub config: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// `ok`, `violation`, `incomplete` or `error`.
    pub status: String,
    pub message: Option<String>,
    pub report: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema: &'static str,
    pub created_unix: u64,
    pub parallel: usize,
    pub seed_override: Option<u64>,
    pub grid_override: Option<usize>,
    pub cases: Vec<ManifestEntry>,
}

/// Outcome of [`sweep`].
#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub manifest: RunManifest,
    pub rows: Vec<CaseRow>,
}

impl SweepSummary {
    pub fn failed(&self) -> usize {
        self.manifest.cases.iter().filter(|c| c.status == "error").count()
    }
}

struct Staged {
    hash: String,
    entry: ManifestEntry,
    rows: Vec<CaseRow>,
    staging: Option<PathBuf>,
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn run_one(path: &Path, o: &Overrides, staging_dir: &Path) -> Staged {
    let display = path.display().to_string();
    let bytes = fs::read(path);
    let hash = match &bytes {
        Ok(b) => config_hash(b),
        Err(_) => config_hash(display.as_bytes()),
    };
    let fallback_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "case".into());
    let fail = |id: String, msg: String| {
        warn!("{display}: {msg}");
        Staged {
            hash: hash.clone(),
            rows: vec![error_row(&id)],
            entry: ManifestEntry {
                case_id: id,
                config: display.clone(),
                config_hash: hash.clone(),
                seed: None,
                n: None,
                status: "error".into(),
                message: Some(msg),
                report: None,
            },
            staging: None,
        }
    };
    let bytes = match bytes {
        Ok(b) => b,
        Err(e) => return fail(fallback_id, format!("cannot read: {e}")),
    };
    let config = match CaseConfig::parse(&bytes) {
        Ok(c) => c,
        Err(e) => return fail(fallback_id, e.to_string()),
    };
    let case = LoadedCase {
        id: config.case_id.clone().unwrap_or(fallback_id),
        hash: hash.clone(),
        config,
    };
    let opts = case.config.solve_options(o);
    let report = match verify(&case, o) {
        Ok(r) => r,
        Err(e) => return fail(case.id.clone(), e.to_string()),
    };
    let status = if !report.violations.is_empty() {
        "violation"
    } else if !report.complete {
        "incomplete"
    } else {
        "ok"
    };
    info!("{}: {status}", case.id);
    let file = format!("{}-{}.json", &hash[..12], sanitize(&case.id));
    let staged = staging_dir.join(&file);
    let payload = serde_json::json!({
        "case_id": case.id,
        "config_hash": hash,
        "config": case.config,
        "report": report,
    });
    if let Err(e) = write_json(&staged, &payload) {
        return fail(case.id.clone(), format!("cannot stage report: {e}"));
    }
    Staged {
        hash: hash.clone(),
        rows: case_rows(&case.id, opts.n, &report),
        entry: ManifestEntry {
            case_id: case.id.clone(),
            config: display,
            config_hash: hash,
            seed: Some(opts.seed),
            n: Some(opts.n),
            status: status.into(),
            message: None,
            report: Some(format!("cases/{file}")),
        },
        staging: Some(staged),
    }
}

/// Expand a glob into a sorted list of files.
pub fn expand(pattern: &str) -> Result<Vec<PathBuf>, CliError> {
    let paths = glob::glob(pattern).map_err(|e| CliError::Config(format!("bad glob {pattern:?}: {e}")))?;
    let mut out: Vec<PathBuf> = paths.filter_map(|p| p.ok()).filter(|p| p.is_file()).collect();
    out.sort();
    if out.is_empty() {
        return Err(CliError::Config(format!("no config files match {pattern:?}")));
    }
    Ok(out)
}

/// Run every case matching `pattern` with `parallel` workers and write the
/// results directory `out`.
pub fn sweep(pattern: &str, out: &Path, parallel: usize, o: &Overrides) -> Result<SweepSummary, CliError> {
    let files = expand(pattern)?;
    let staging_dir = out.join(".staging");
    fs::create_dir_all(&staging_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel.max(1))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut staged: Vec<Staged> =
        pool.install(|| files.par_iter().map(|f| run_one(f, o, &staging_dir)).collect());

    // Merge.
    staged.sort_by(|a, b| a.hash.cmp(&b.hash).then_with(|| a.entry.config.cmp(&b.entry.config)));
    let cases_dir = out.join("cases");
    fs::create_dir_all(&cases_dir)?;
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for s in staged {
        if let (Some(src), Some(rel)) = (&s.staging, &s.entry.report) {
            fs::rename(src, out.join(rel))?;
        }
        rows.extend(s.rows);
        entries.push(s.entry);
    }
    let _ = fs::remove_dir(&staging_dir);
    write_csv(fs::File::create(out.join("cases.csv"))?, &rows)
        .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    let manifest = RunManifest {
        tool: "orlicz-spectral",
        version: env!("CARGO_PKG_VERSION"),
        schema: crate::config::SCHEMA,
        created_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        parallel: parallel.max(1),
        seed_override: o.seed,
        grid_override: o.grid,
        cases: entries,
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(SweepSummary { manifest, rows })
}
