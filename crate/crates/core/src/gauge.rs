//! Mean-value bookkeeping for the perturbed flow.
//!
//! With `a0 = a(0)` and `c0 = -mean(u(0))`, the change of unknown
//! `v(t,x) = u(t, x - 2d(t)) + c(t)` with `c(t) = c0 e^{a0 t}` and
//! `d(t) = (c0/a0)(e^{a0 t} - 1)` maps solutions to zero-mean solutions of the
//! same equation. For `a0 = 0` it reduces to the Galilei shift `d(t) = c0 t`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::TorusField;

const MEAN_RESIDUAL_TOL: f64 = 1e-10;
const SERIES_SWITCH: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeParams {
    pub a0: f64,
    pub c0: f64,
}

impl GaugeParams {
    pub fn c(&self, t: f64) -> f64 {
        self.c0 * (self.a0 * t).exp()
    }

    pub fn d(&self, t: f64) -> f64 {
        let x = self.a0 * t;
        if x.abs() < SERIES_SWITCH {
            self.c0 * t * (1.0 + x / 2.0 + x * x / 6.0)
        } else {
            self.c0 / self.a0 * x.exp_m1()
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.c0 == 0.0
    }
}

pub fn mean(f: &TorusField) -> f64 {
    f.mean()
}

pub fn gauge_params(a0: f64, u0: &TorusField) -> GaugeParams {
    GaugeParams { a0, c0: -u0.mean() }
}

/// `v(t,x) = u(t, x - 2d(t)) + c(t)`.
pub fn to_zero_mean(u_t: &TorusField, t: f64, gp: &GaugeParams) -> Result<TorusField> {
    let v = u_t.translate(-2.0 * gp.d(t)).add_mean(gp.c(t));
    let residual = v.mean();
    if residual.abs() > MEAN_RESIDUAL_TOL * (1.0 + u_t.mean().abs()) {
        return Err(Error::MeanResidual(residual));
    }
    Ok(v)
}

/// Inverse of [`to_zero_mean`]: `u(t,x) = v(t, x + 2d(t)) - c(t)`.
pub fn from_zero_mean(v_t: &TorusField, t: f64, gp: &GaugeParams) -> TorusField {
    v_t.add_mean(-gp.c(t)).translate(2.0 * gp.d(t))
}

/// `v(t,x) = u(t, x + t/δ)`, removing the ILW drift `-δ⁻¹ ∂_x`.
pub fn boost_frame(u_t: &TorusField, t: f64, delta: f64) -> TorusField {
    u_t.apply_symbol(|n| Complex64::from_polar(1.0, n as f64 * t / delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{E, PI};

    fn field(coeffs: &[(f64, f64)]) -> TorusField {
        TorusField::from_coeffs(coeffs.iter().map(|&(r, i)| Complex64::new(r, i)).collect()).unwrap()
    }

    #[test]
    fn mean_examples() {
        assert_eq!(mean(&field(&[(0.0, 0.0), (1.0, 0.0)])), 0.0);
        assert_eq!(mean(&field(&[(3.0, 0.0), (0.0, 0.0)])), 3.0);
        assert_eq!(mean(&field(&[(1.0, 0.0), (0.5, 0.0)])), 1.0);
    }

    #[test]
    fn closed_forms() {
        let u0 = field(&[(0.5, 0.0), (1.0, 0.0)]);
        let gp = gauge_params(1.0, &u0);
        assert_abs_diff_eq!(gp.c(1.0), -0.5 * E, epsilon = 1e-15);
        assert_abs_diff_eq!(gp.d(1.0), -0.5 * (E - 1.0), epsilon = 1e-15);
        assert_eq!(gp.c(0.0), gp.c0);
        assert_eq!(gp.d(0.0), 0.0);
        assert_abs_diff_eq!(gp.c(1.0), -1.359_140_914_229_522_6, epsilon = 1e-15);
        assert_abs_diff_eq!(gp.d(1.0), -0.859_140_914_229_522_6, epsilon = 1e-15);

        let galilei = gauge_params(0.0, &u0);
        for t in [0.0, 0.3, 1.0, 7.5] {
            assert_eq!(galilei.d(t), -0.5 * t);
            assert_eq!(galilei.c(t), -0.5);
        }
    }

    #[test]
    fn series_branch_is_continuous() {
        let u0 = field(&[(0.5, 0.0), (1.0, 0.0)]);
        for a0 in [1e-9, -1e-9, 3e-8] {
            let gp = gauge_params(a0, &u0);
            let t = 0.7;
            let exact = gp.c0 * t * (1.0 + a0 * t / 2.0);
            assert_abs_diff_eq!(gp.d(t), exact, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_mean_data_gives_identity() {
        let u = field(&[(0.0, 0.0), (1.0, 0.3), (0.2, -0.1)]);
        let gp = gauge_params(2.0, &u);
        assert!(gp.is_trivial());
        assert_eq!(to_zero_mean(&u, 0.8, &gp).unwrap(), u);
        assert_eq!(from_zero_mean(&u, 0.8, &gp), u);
    }

    #[test]
    fn time_zero_subtracts_mean() {
        let u = field(&[(0.5, 0.0), (1.0, 0.3)]);
        let gp = gauge_params(1.0, &u);
        let v = to_zero_mean(&u, 0.0, &gp).unwrap();
        assert_eq!(v, u.zero_mean());
        assert_eq!(from_zero_mean(&v, 0.0, &gp), u);
    }

    #[test]
    fn inconsistent_params_are_reported() {
        let u = field(&[(0.5, 0.0), (1.0, 0.3)]);
        let gp = GaugeParams { a0: 1.0, c0: 0.2 };
        assert!(matches!(to_zero_mean(&u, 0.0, &gp), Err(Error::MeanResidual(_))));
    }

    #[test]
    fn boost_examples() {
        let u = field(&[(0.1, 0.0), (1.0, 0.3), (0.2, -0.1)]);
        assert_eq!(boost_frame(&u, 0.0, 3.0), u);
        let delta = 3.0;
        let full_period = boost_frame(&u, 2.0 * PI * delta, delta);
        assert!((&full_period - &u).l2_norm() < 1e-14);
        let composed = boost_frame(&boost_frame(&u, 0.4, delta), 1.1, delta);
        let direct = boost_frame(&u, 1.5, delta);
        assert!((&composed - &direct).l2_norm() < 1e-15);
    }
}
