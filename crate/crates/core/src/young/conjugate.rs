use std::sync::Arc;

use super::{YoungFunction, YoungKernel};

/// `G̃` with density `g̃ = g⁻¹` (right-continuous generalized inverse).
///
/// The value uses Young's equality `G̃(t) = t·a − G(a)` at `a = g⁻¹(t)`,
/// which is `∫₀ᵗ g⁻¹(s) ds` without a quadrature error.
struct Conjugate {
    base: YoungFunction,
}

impl YoungKernel for Conjugate {
    fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let a = self.base.density_inverse(t);
        (t * a - self.base.value(a)).max(0.0)
    }

    fn density(&self, t: f64) -> f64 {
        self.base.density_inverse(t)
    }

    fn density_derivative(&self, t: f64) -> Option<f64> {
        let a = self.base.density_inverse(t);
        self.base.density_derivative(a).map(|d| 1.0 / d)
    }
}

pub(super) fn conjugate(base: &YoungFunction) -> YoungFunction {
    let (lo, hi) = base.domain_hint();
    let hint = (base.density(lo), base.density(hi));
    let hint = if hint.0 > 0.0 && hint.1 > hint.0 && hint.1.is_finite() {
        hint
    } else {
        (lo, hi)
    };
    YoungFunction::from_kernel(
        format!("conj({})", base.label()),
        base.params().to_vec(),
        Arc::new(Conjugate { base: base.clone() }),
        hint,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_transform_of_powers() {
        let c2 = YoungFunction::power(2.0).unwrap().conjugate();
        assert_relative_eq!(c2.value(2.0), 1.0, max_relative = 1e-14);
        let c3 = YoungFunction::power(3.0).unwrap().conjugate();
        assert_relative_eq!(c3.value(3.0), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn involution_on_grid() {
        let g = YoungFunction::power(2.0).unwrap();
        let cc = g.conjugate().conjugate();
        for t in [1e-3, 0.1, 0.5, 1.0, 3.0, 40.0, 1e3] {
            assert_relative_eq!(cc.value(t), t * t, max_relative = 1e-6);
        }
    }

    #[test]
    fn conjugate_density_is_inverse_of_density() {
        let g = YoungFunction::piecewise_power(2.0, 4.0).unwrap();
        let c = g.conjugate();
        for a in [0.2, 0.9, 1.5, 7.0] {
            assert_relative_eq!(c.density(g.density(a)), a, max_relative = 1e-13);
        }
        // On the jump of g at 1 the conjugate is affine with slope 1.
        assert_relative_eq!(c.value(3.0) - c.value(2.5), 0.5, max_relative = 1e-12);
    }
}
