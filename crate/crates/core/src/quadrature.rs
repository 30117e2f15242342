//! Semi-infinite integrals `∫_κ^∞ f(ϰ) ϰ^{2s} dϰ` for integrands with
//! `f(ϰ) = W/ϰ + O(ϰ^{-2})`, as arise for the resolvent quadratic form.
//!
//! The finite part uses composite Gauss-Legendre on log-spaced panels (one
//! octave split into `p` panels); the remainder past `κ_max` is replaced by the
//! leading-order tail `W κ_max^{2s} / (2|s|)`.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NODES_PER_PANEL: usize = 8;
const MAX_OCTAVES: usize = 200;
const MAX_PANELS_PER_OCTAVE: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailIntegral {
    pub value: f64,
    /// `|I_p - I_{p/2}|` between the last two panel refinements.
    pub quad_error: f64,
    /// Estimated error of the leading-order tail.
    pub tail_error: f64,
    pub kappa_max: f64,
    pub panels_per_octave: usize,
}

fn gauss_rule() -> Vec<(f64, f64)> {
    GaussLegendre::new(NonZeroUsize::new(NODES_PER_PANEL).expect("nonzero"))
        .as_node_weight_pairs()
        .to_vec()
}

fn panel<F>(rule: &[(f64, f64)], a: f64, b: f64, s: f64, f: &mut F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut acc = 0.0;
    for &(x, w) in rule {
        let k = mid + half * x;
        acc += w * f(k)? * k.powf(2.0 * s);
    }
    Ok(half * acc)
}

/// One pass at fixed panel density; octaves are added until the tail error
/// estimate drops below `rtol` of the running total.
fn pass<F>(
    rule: &[(f64, f64)],
    f: &mut F,
    leading: f64,
    s: f64,
    kappa: f64,
    rtol: f64,
    per_octave: usize,
) -> Result<(f64, f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut total = 0.0;
    for octave in 0..MAX_OCTAVES {
        let lo = kappa * 2f64.powi(octave as i32);
        for i in 0..per_octave {
            let a = lo * 2f64.powf(i as f64 / per_octave as f64);
            let b = lo * 2f64.powf((i + 1) as f64 / per_octave as f64);
            total += panel(rule, a, b, s, f)?;
        }
        let kmax = 2.0 * lo;
        let subleading = (leading - kmax * f(kmax)?) * kmax;
        let tail = leading * kmax.powf(2.0 * s) / (2.0 * s.abs());
        let tail_error = subleading.abs() * kmax.powf(2.0 * s - 1.0) / (1.0 - 2.0 * s);
        let value = total + tail;
        if tail_error <= rtol * value.abs() {
            return Ok((value, tail_error, kmax));
        }
    }
    Err(Error::QuadratureNotConverged(format!(
        "tail still above rtol after {MAX_OCTAVES} octaves"
    )))
}

/// `∫_κ^∞ f(ϰ) ϰ^{2s} dϰ` for `-1/2 < s < 0`, where `leading = lim ϰ f(ϰ)`.
pub fn weighted_tail_integral<F>(
    mut f: F,
    leading: f64,
    s: f64,
    kappa: f64,
    rtol: f64,
) -> Result<TailIntegral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(s > -0.5 && s < 0.0) {
        return Err(Error::InvalidArgument(format!("s must lie in (-1/2, 0), got {s}")));
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    if leading == 0.0 && f(kappa)? == 0.0 {
        return Ok(TailIntegral {
            value: 0.0,
            quad_error: 0.0,
            tail_error: 0.0,
            kappa_max: kappa,
            panels_per_octave: 1,
        });
    }
    let rule = gauss_rule();
    let mut per_octave = 1;
    let (mut prev, _, _) = pass(&rule, &mut f, leading, s, kappa, rtol, per_octave)?;
    while per_octave < MAX_PANELS_PER_OCTAVE {
        per_octave *= 2;
        let (value, tail_error, kappa_max) = pass(&rule, &mut f, leading, s, kappa, rtol, per_octave)?;
        let quad_error = (value - prev).abs();
        if quad_error <= rtol * value.abs() {
            return Ok(TailIntegral {
                value,
                quad_error,
                tail_error,
                kappa_max,
                panels_per_octave: per_octave,
            });
        }
        prev = value;
    }
    Err(Error::QuadratureNotConverged(format!(
        "panel refinement stalled at {MAX_PANELS_PER_OCTAVE} panels per octave"
    )))
}
