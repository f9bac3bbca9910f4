/// Monotone increasing map `x ↦ y` tabulated in log–log coordinates with
/// exact logarithmic slopes, read in either direction by cubic Hermite
/// interpolation. Pure power laws are reproduced exactly; outside the table
/// the end slopes extrapolate linearly in log–log.
#[derive(Debug, Clone)]
pub(crate) struct LogLogTable {
    lx: Vec<f64>,
    ly: Vec<f64>,
    /// `d ln y / d ln x` at each node.
    slope: Vec<f64>,
}

fn hermite(xs: &[f64], ys: &[f64], ds: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0] + ds[0] * (x - xs[0]);
    }
    if x >= xs[n - 1] {
        return ys[n - 1] + ds[n - 1] * (x - xs[n - 1]);
    }
    let i = xs.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * ys[i] + h10 * h * ds[i] + h01 * ys[i + 1] + h11 * h * ds[i + 1]
}

impl LogLogTable {
    /// Nodes `(x_i, y_i, d ln y/d ln x)`; `x` and `y` strictly increasing.
    pub(crate) fn new(x: &[f64], y: &[f64], slope: &[f64]) -> Self {
        debug_assert!(x.windows(2).all(|w| w[1] > w[0]));
        debug_assert!(y.windows(2).all(|w| w[1] > w[0]));
        Self {
            lx: x.iter().map(|v| v.ln()).collect(),
            ly: y.iter().map(|v| v.ln()).collect(),
            slope: slope.to_vec(),
        }
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        hermite(&self.lx, &self.ly, &self.slope, x.ln()).exp()
    }

    pub(crate) fn eval_inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        hermite_inverse(self, y.ln()).exp()
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.lx.len()
    }
}

fn hermite_inverse(t: &LogLogTable, ly: f64) -> f64 {
    // Same Hermite construction with the roles of the columns swapped.
    let n = t.ly.len();
    if ly <= t.ly[0] {
        return t.lx[0] + (ly - t.ly[0]) / t.slope[0];
    }
    if ly >= t.ly[n - 1] {
        return t.lx[n - 1] + (ly - t.ly[n - 1]) / t.slope[n - 1];
    }
    let i = t.ly.partition_point(|&v| v <= ly).clamp(1, n - 1) - 1;
    let h = t.ly[i + 1] - t.ly[i];
    let s = (ly - t.ly[i]) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * t.lx[i] + h10 * h / t.slope[i] + h01 * t.lx[i + 1] + h11 * h / t.slope[i + 1]
}
