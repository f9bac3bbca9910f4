//! Independent eigenvalue oracles shared by integration tests.

/// `|x|^e x`: `φ_p` for `e = p − 2`, its inverse for `e = 1/(p−1) − 1`.
fn phi(x: f64, e: f64) -> f64 {
    x.abs().powf(e) * x
}

/// Position of the first turning point `u'(x*) = 0` of
/// `(φ_p(u'))' = −λ φ_p(u)`, `u(0) = 0`, `u'(0) = 1`, by RK4 in `(u, φ_p(u'))`.
pub fn turning_point(lambda: f64, p: f64) -> f64 {
    let dx = 2e-6;
    let rhs = |u: f64, v: f64| (phi(v, 1.0 / (p - 1.0) - 1.0), -lambda * phi(u, p - 2.0));
    let (mut x, mut u, mut v) = (0.0, 0.0, 1.0);
    loop {
        let (k1u, k1v) = rhs(u, v);
        let (k2u, k2v) = rhs(u + 0.5 * dx * k1u, v + 0.5 * dx * k1v);
        let (k3u, k3v) = rhs(u + 0.5 * dx * k2u, v + 0.5 * dx * k2v);
        let (k4u, k4v) = rhs(u + dx * k3u, v + dx * k3v);
        let un = u + dx / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        let vn = v + dx / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if vn <= 0.0 {
            return x + dx * v / (v - vn);
        }
        (x, u, v) = (x + dx, un, vn);
        if x > 10.0 {
            return f64::INFINITY;
        }
    }
}

/// First Dirichlet eigenvalue of `−(φ_p(u'))' = λ φ_p(u)` on `(0, 1)`: the
/// eigenfunction is symmetric, so `λ` places the turning point at `1/2`.
pub fn shooting_eigenvalue(p: f64) -> f64 {
    let (mut lo, mut hi) = (1.0, 200.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if turning_point(mid, p) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest eigenvalue of `−(r u')'/r = λ u` on `(0, 1)`, `u(1) = 0`, from a
/// cell-centred finite-volume matrix and Sturm-sequence bisection.
pub fn radial_fd_eigenvalue(cells: usize) -> f64 {
    let h = 1.0 / cells as f64;
    let r: Vec<f64> = (0..cells).map(|i| (i as f64 + 0.5) * h).collect();
    // Symmetric form D^{-1/2} A D^{-1/2} with D = diag(r_i).
    let mut diag = vec![0.0; cells];
    let mut off = vec![0.0; cells - 1];
    for i in 0..cells {
        let left = if i == 0 { 0.0 } else { i as f64 * h };
        let right = (i + 1) as f64 * h;
        // Ghost value −u_{N−1} enforces u(1) = 0 at the outer face.
        let outer = if i == cells - 1 { 2.0 * right } else { right };
        diag[i] = (left + outer) / (h * h) / r[i];
        if i + 1 < cells {
            off[i] = -right / (h * h) / (r[i] * r[i + 1]).sqrt();
        }
    }
    let count_below = |x: f64| {
        let mut count = 0;
        let mut d = diag[0] - x;
        if d < 0.0 {
            count += 1;
        }
        for i in 1..cells {
            let prev = if d == 0.0 { 1e-300 } else { d };
            d = diag[i] - x - off[i - 1] * off[i - 1] / prev;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let (mut lo, mut hi) = (0.0, 100.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
