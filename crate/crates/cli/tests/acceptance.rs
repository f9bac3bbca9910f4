//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Tolerances are the pinned acceptance values.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use orlicz_core::bounds::{bound_1d_general, bound_1d_ordered, check_hypotheses, ConstantLedger};
use orlicz_core::eigen::{mu_sweep, solve_first};
use orlicz_core::orlicz::{holder_defect, luxemburg_norm, modular};
use orlicz_core::young::{sobolev_classify, vectorfield_monotonicity_check};
use orlicz_core::{
    DomainGeometry, EigenProblem, Field, SobolevClass, SolveOptions, Weight, WeightKind, YoungFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[path = "../../core/tests/common/oracles.rs"]
#[allow(dead_code)]
mod oracles;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_orlicz-spectral")
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn suite_files() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(fixtures().join("suite"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    v.sort();
    v
}

fn power_problem(p: f64, domain: DomainGeometry, mu: f64) -> EigenProblem {
    let g = YoungFunction::power(p).unwrap();
    EigenProblem::new(g.clone(), g, Weight::constant(1.0, &domain).unwrap(), mu).unwrap()
}

fn unit() -> DomainGeometry {
    DomainGeometry::interval(0.0, 1.0).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn classical_eigenvalue() -> Outcome {
    let start = Instant::now();
    let r = solve_first(&power_problem(2.0, unit(), 1.0), &SolveOptions { n: 2048, ..Default::default() })
        .map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let rel = (r.lambda / (PI * PI) - 1.0).abs();
    check(
        rel < 5e-3 && secs < 30.0,
        format!("lambda = {:.8}, rel err {rel:.2e} (< 5e-3), {secs:.1} s (< 30 s)", r.lambda),
    )
}

fn oracle_cross_check() -> Outcome {
    let shoot = oracles::shooting_eigenvalue(3.0);
    let cubic = solve_first(&power_problem(3.0, unit(), 1.0), &SolveOptions { n: 1024, ..Default::default() })
        .map_err(|e| e.to_string())?
        .lambda;
    let fd = oracles::radial_fd_eigenvalue(4000);
    let disc = solve_first(
        &power_problem(2.0, DomainGeometry::ball(1.0, 2).unwrap(), 1.0),
        &SolveOptions { n: 512, ..Default::default() },
    )
    .map_err(|e| e.to_string())?
    .lambda;
    let r1 = (cubic / shoot - 1.0).abs();
    let r2 = (disc / fd - 1.0).abs();
    check(
        r1 < 1e-2 && r2 < 1e-2,
        format!(
            "p = 3: {cubic:.6} vs shooting {shoot:.6} (rel {r1:.2e}); disc: {disc:.6} vs radial FD {fd:.6} (rel {r2:.2e})"
        ),
    )
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn remark_constants() -> Outcome {
    let two = BigRational::from_integer(2.into());
    let mut checked = 0;
    for p in [2i32, 3, 4] {
        let g = YoungFunction::power(p as f64).unwrap();
        for (num, den) in [(1i64, 2i64), (1, 1), (2, 1)] {
            let width = BigRational::new(num.into(), den.into());
            let len = num as f64 / den as f64;
            let domain = DomainGeometry::interval(0.0, len).unwrap();
            let w = Weight::constant(1.0, &domain).unwrap();
            let hyp = check_hypotheses(&g, &g, 1, &w, &domain);
            let ledger = ConstantLedger::derive(&g, &g, &domain, &hyp);
            // ‖w‖₁ = b − a for w ≡ 1.
            let w1 = width.clone();
            let ordered = bound_1d_ordered(&g, 0.0, len, len, &ledger, &hyp)
                .value
                .ok_or(format!("ordered bound inapplicable for p = {p}"))?;
            let expect = two.pow(p) / (w1.clone() * width.pow(p - 1));
            if rational(ordered) != expect {
                return Err(format!("ordered p = {p}, width {len}: {ordered} != {expect}"));
            }
            let general = bound_1d_general(&g, &g, 0.0, len, len, &ledger, &hyp)
                .value
                .ok_or(format!("general bound inapplicable for p = {p}"))?;
            let expect = two.pow(-p) / (w1 * width.pow(p - 1));
            if rational(general) != expect {
                return Err(format!("general p = {p}, width {len}: {general} != {expect}"));
            }
            checked += 2;
        }
    }
    Ok(format!("{checked} values equal their rational closed forms exactly"))
}

fn suite_verification(out: &Path) -> Outcome {
    let files = suite_files();
    let start = Instant::now();
    let mut failed = Vec::new();
    for f in &files {
        let stem = f.file_stem().unwrap().to_string_lossy().into_owned();
        let status = Command::new(bin())
            .args(["verify", "--config"])
            .arg(f)
            .arg("--out")
            .arg(out.join(&stem))
            .output()
            .map_err(|e| e.to_string())?
            .status;
        if status.code() != Some(0) {
            failed.push(format!("{stem} (exit {:?})", status.code()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        failed.is_empty() && files.len() >= 12 && secs < 600.0,
        format!(
            "{} cases, failing: [{}], {secs:.0} s (< 600 s)",
            files.len(),
            failed.join(", ")
        ),
    )
}

fn mu_monotonicity() -> Outcome {
    let levels = [0.5, 1.0, 2.0, 4.0];
    let opts = SolveOptions { n: 512, ..Default::default() };
    let g = YoungFunction::power(2.0).unwrap();
    let h = YoungFunction::piecewise_power(2.0, 4.0).unwrap();
    let mixed = EigenProblem::new(g, h, Weight::constant(1.0, &unit()).unwrap(), 1.0).unwrap();
    let s = mu_sweep(&mixed, &levels, &opts, 1e-3).map_err(|e| e.to_string())?;
    let ml: Vec<String> = s
        .entries
        .iter()
        .map(|e| format!("{:.5}", e.mu * e.lambda.unwrap_or(f64::NAN)))
        .collect();
    let mut spread = 0.0f64;
    for p in [2.0, 3.0, 4.0] {
        let s = mu_sweep(&power_problem(p, unit(), 1.0), &levels, &opts, 1e-3).map_err(|e| e.to_string())?;
        let l: Vec<f64> = s.entries.iter().map(|e| e.lambda.unwrap_or(f64::NAN)).collect();
        let (lo, hi) = l.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        spread = spread.max(hi / lo - 1.0);
    }
    check(
        s.mu_lambda_nondecreasing && spread < 1e-3,
        format!(
            "mixed mu*lambda = [{}] nondecreasing: {}; power pairs max spread {spread:.2e} (< 1e-3)",
            ml.join(", "),
            s.mu_lambda_nondecreasing
        ),
    )
}

fn young_calculus() -> Outcome {
    let fams = [
        YoungFunction::power(2.0).unwrap(),
        YoungFunction::power(3.5).unwrap(),
        YoungFunction::power_log(3.0).unwrap(),
        YoungFunction::piecewise_power(2.0, 4.0).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let mut involution = 0.0f64;
    for g in &fams {
        let back = g.conjugate().conjugate();
        for i in 0..=60 {
            let t = 10f64.powf(-3.0 + 0.1 * i as f64);
            involution = involution.max((back.value(t) / g.value(t) - 1.0).abs());
        }
    }

    let mut young_violations = 0;
    for i in 0..10_000 {
        let g = &fams[i % fams.len()];
        let a = 10f64.powf(rng.random_range(-4.0..4.0));
        let b = 10f64.powf(rng.random_range(-4.0..4.0));
        let rhs = g.value(a) + g.conjugate().value(b);
        if a * b > rhs * (1.0 + 1e-12) {
            young_violations += 1;
        }
    }

    let random_field = |rng: &mut ChaCha8Rng| {
        let c: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
        Field::from_fn(unit(), 64, |x| {
            c.iter()
                .enumerate()
                .map(|(k, a)| a * ((k + 1) as f64 * PI * x).sin())
                .sum()
        })
        .unwrap()
    };
    let w = Weight::new(WeightKind::Bump { center: 0.5, radius: 0.45, height: 1.5 }, &unit()).unwrap();
    let mut equiv_failures = 0;
    for i in 0..100 {
        let g = &fams[i % fams.len()];
        let u = random_field(&mut rng);
        let n = luxemburg_norm(g, &w, &u).map_err(|e| e.to_string())?;
        for (scale, want) in [(0.5, -1), (1.0, 0), (2.0, 1)] {
            let v = u.scaled(scale / n);
            let m = modular(g, &w, &v).map_err(|e| e.to_string())?;
            let nv = luxemburg_norm(g, &w, &v).map_err(|e| e.to_string())?;
            let ok = match want {
                -1 => m < 1.0 && nv < 1.0,
                0 => (m - 1.0).abs() < 1e-9 && (nv - 1.0).abs() < 1e-9,
                _ => m > 1.0 && nv > 1.0,
            };
            if !ok {
                equiv_failures += 1;
            }
        }
    }

    let mut holder_min = f64::INFINITY;
    for i in 0..1_000 {
        let g = &fams[i % fams.len()];
        let (u, v) = (random_field(&mut rng), random_field(&mut rng));
        holder_min = holder_min.min(holder_defect(&u, &v, g, &w).map_err(|e| e.to_string())?);
    }

    let mut class_failures = 0;
    for p in [1.5, 2.0, 3.0, 5.0] {
        for n in 1..=4usize {
            let ok = match sobolev_classify(&YoungFunction::power(p).unwrap(), n) {
                Ok(SobolevClass::Finite { .. }) => p > n as f64,
                Ok(SobolevClass::Infinite) => p <= n as f64,
                Err(_) => false,
            };
            if !ok {
                class_failures += 1;
            }
        }
    }

    check(
        involution < 1e-6
            && young_violations == 0
            && equiv_failures == 0
            && holder_min >= -1e-9
            && class_failures == 0,
        format!(
            "involution {involution:.1e}; Young violations {young_violations}/10000; \
             equiv failures {equiv_failures}/100; min Holder defect {holder_min:.2e}; \
             T_g mismatches {class_failures}/16"
        ),
    )
}

fn vector_field_monotonicity() -> Outcome {
    let mut min_dot = f64::INFINITY;
    let mut violations = 0;
    for g in [
        YoungFunction::power(2.0).unwrap(),
        YoungFunction::power(4.0).unwrap(),
        YoungFunction::piecewise_power(2.0, 4.0).unwrap(),
    ] {
        for dim in [2, 3] {
            let r = vectorfield_monotonicity_check(&g, 100_000, dim, 77);
            min_dot = min_dot.min(r.min_dot);
            violations += r.violations;
        }
    }
    check(
        min_dot >= -1e-12 && violations == 0,
        format!("6 x 100000 pairs, min dot {min_dot:.3e} (>= -1e-12)"),
    )
}

fn gradient_norm_estimate(out: &Path) -> Outcome {
    let mut failures = Vec::new();
    let mut quadratic_gap = None;
    for f in suite_files() {
        let stem = f.file_stem().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(out.join(&stem).join("verify.json"))
            .map_err(|e| format!("{stem}: {e}"))?;
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let gn = &v["gradient_norm"];
        if gn["holds"] != serde_json::Value::Bool(true) {
            failures.push(stem.clone());
        }
        if stem == "power2-unit" {
            let (lhs, rhs) = (gn["lhs"].as_f64().unwrap_or(0.0), gn["rhs"].as_f64().unwrap_or(0.0));
            quadratic_gap = Some((lhs, rhs, (lhs / rhs - 1.0).abs()));
        }
    }
    let (lhs, rhs, gap) = quadratic_gap.ok_or("power2-unit report missing")?;
    check(
        failures.is_empty() && gap < 1e-3,
        format!(
            "holds on every case (failing: [{}]); p = 2: lhs {lhs:.6}, rhs {rhs:.6}, gap {gap:.2e} (< 1e-3)",
            failures.join(", ")
        ),
    )
}

fn sweep_determinism(out: &Path) -> Outcome {
    let pattern = fixtures().join("suite").join("*.json");
    let mut csvs = Vec::new();
    for (name, par) in [("serial", "1"), ("parallel", "4")] {
        let dir = out.join(name);
        let status = Command::new(bin())
            .args(["sweep", "--config"])
            .arg(&pattern)
            .args(["--parallel", par, "--out"])
            .arg(&dir)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("{name} sweep exited with {status}"));
        }
        csvs.push(std::fs::read(dir.join("cases.csv")).map_err(|e| e.to_string())?);
    }
    let rows = csvs[0].iter().filter(|&&b| b == b'\n').count().saturating_sub(1);
    check(
        csvs[0] == csvs[1],
        format!("{rows} rows, serial and parallel cases.csv byte-identical: {}", csvs[0] == csvs[1]),
    )
}

fn main() {
    let work = tempfile::tempdir().expect("temp dir");
    let verify_dir = work.path().join("verify");
    let sweep_dir = work.path().join("sweep");
    let criteria: Vec<Criterion> = vec![
        ("classical eigenvalue", Box::new(classical_eigenvalue)),
        ("oracle cross-check", Box::new(oracle_cross_check)),
        ("remark constants", Box::new(remark_constants)),
        ("suite verification", Box::new(|| suite_verification(&verify_dir))),
        ("mu-monotonicity", Box::new(mu_monotonicity)),
        ("Young calculus", Box::new(young_calculus)),
        ("vector-field monotonicity", Box::new(vector_field_monotonicity)),
        ("gradient-norm estimate", Box::new(|| gradient_norm_estimate(&verify_dir))),
        ("sweep determinism", Box::new(|| sweep_determinism(&sweep_dir))),
    ];
    let mut failed = 0;
    let total = Instant::now();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} [{name}]: {tag} ({secs:.1} s) {detail}", i + 1);
    }
    let elapsed: Duration = total.elapsed();
    println!(
        "acceptance: {}/{} criteria passed in {:.0} s",
        criteria.len() - failed,
        criteria.len(),
        elapsed.as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
