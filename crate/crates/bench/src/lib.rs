//! Fixed workloads shared by the criterion benches.

use orlicz_core::{DomainGeometry, EigenProblem, Field, Weight, WeightKind, YoungFunction};

pub fn unit_interval() -> DomainGeometry {
    DomainGeometry::interval(0.0, 1.0).expect("valid interval")
}

/// `G = H = t^p` on `(0, 1)` with `w ≡ 1`.
pub fn power_problem(p: f64) -> EigenProblem {
    let d = unit_interval();
    let g = YoungFunction::power(p).expect("valid exponent");
    EigenProblem::new(g.clone(), g, Weight::constant(1.0, &d).expect("valid weight"), 1.0)
        .expect("valid problem")
}

/// `G = t²`, `H = piecewise(2, 4)` with a bump weight.
pub fn mixed_problem(mu: f64) -> EigenProblem {
    let d = unit_interval();
    let w = Weight::new(WeightKind::Bump { center: 0.5, radius: 0.4, height: 1.0 }, &d).expect("valid weight");
    EigenProblem::new(
        YoungFunction::power(2.0).expect("valid exponent"),
        YoungFunction::piecewise_power(2.0, 4.0).expect("valid exponents"),
        w,
        mu,
    )
    .expect("valid problem")
}

/// `sin(πx) + 0.3 sin(3πx)` sampled on `n` elements.
pub fn sample_field(n: usize) -> Field {
    use std::f64::consts::PI;
    Field::from_fn(unit_interval(), n, |x| (PI * x).sin() + 0.3 * (3.0 * PI * x).sin()).expect("valid field")
}

/// Log-spaced arguments over `[1e-3, 1e3]`.
pub fn log_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (points - 1) as f64))
        .collect()
}
