//! CSV rows and text summaries.
//!
//! Numbers are written as `{:.16e}` (17 significant digits), which round-trips
//! every `f64` exactly.

use std::io::Write;

use orlicz_core::VerificationReport;
use serde::Serialize;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// One row of `cases.csv`; the column order is a stable contract.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseRow {
    pub case_id: String,
    #[serde(rename = "G")]
    pub g: String,
    #[serde(rename = "H")]
    pub h: String,
    pub domain: String,
    pub mu: String,
    #[serde(rename = "N")]
    pub n: String,
    pub lambda: String,
    pub residual: String,
    pub theorem_id: String,
    pub bound_value: String,
    pub applicable: String,
    /// `true`/`false`, empty when not compared, `error` for a failed case.
    pub pass: String,
}

pub const CASE_COLUMNS: [&str; 12] = [
    "case_id",
    "G",
    "H",
    "domain",
    "mu",
    "N",
    "lambda",
    "residual",
    "theorem_id",
    "bound_value",
    "applicable",
    "pass",
];

/// Rows for every (level, theorem) pair of a report.
pub fn case_rows(case_id: &str, grid_n: usize, r: &VerificationReport) -> Vec<CaseRow> {
    let mut rows = Vec::new();
    for s in &r.solves {
        for b in &r.bounds {
            let cmp = b.comparisons.iter().find(|c| c.mu == s.mu);
            rows.push(CaseRow {
                case_id: case_id.to_string(),
                g: r.g.clone(),
                h: r.h.clone(),
                domain: r.domain.clone(),
                mu: num(s.mu),
                n: grid_n.to_string(),
                lambda: opt_num(s.lambda),
                residual: opt_num(s.residual),
                theorem_id: b.bound.theorem.to_string(),
                bound_value: opt_num(b.bound.value),
                applicable: b.bound.applicable.to_string(),
                pass: cmp.map(|c| c.holds.to_string()).unwrap_or_default(),
            });
        }
    }
    rows
}

/// Row recording a case that could not be run.
pub fn error_row(case_id: &str) -> CaseRow {
    CaseRow {
        case_id: case_id.to_string(),
        g: String::new(),
        h: String::new(),
        domain: String::new(),
        mu: String::new(),
        n: String::new(),
        lambda: String::new(),
        residual: String::new(),
        theorem_id: String::new(),
        bound_value: String::new(),
        applicable: String::new(),
        pass: "error".into(),
    }
}

pub fn write_csv<T: Serialize>(out: impl Write, rows: &[T]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Human-readable table of a verification run.
pub fn summary_table(r: &VerificationReport) -> String {
    let mut s = format!("{} | G = {} | H = {}\n", r.domain, r.g, r.h);
    for l in &r.solves {
        match (l.lambda, &l.error) {
            (Some(v), _) => s += &format!("  mu = {:<6} lambda = {v:.10}\n", l.mu),
            (None, Some(e)) => s += &format!("  mu = {:<6} failed: {e}\n", l.mu),
            _ => {}
        }
    }
    s += &format!("  {:<18} {:<10} {:<24} {}\n", "theorem", "applicable", "bound", "pass");
    for b in &r.bounds {
        let value = b.bound.value.map(|v| format!("{v:.10e}")).unwrap_or_else(|| "-".into());
        let pass = match b.pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "-",
        };
        s += &format!(
            "  {:<18} {:<10} {:<24} {}\n",
            b.bound.theorem.as_str(),
            b.bound.applicable,
            value,
            pass
        );
        if let Some(reason) = &b.bound.reason {
            s += &format!("      {reason}\n");
        }
    }
    if let Some(gn) = &r.gradient_norm {
        s += &format!(
            "  gradient norm estimate: {:.10e} <= {:.10e} ({})\n",
            gn.lhs,
            gn.rhs,
            if gn.holds { "holds" } else { "FAILS" }
        );
    }
    for issue in &r.ledger_issues {
        s += &format!("  ledger: {issue}\n");
    }
    s
}
