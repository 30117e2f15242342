//! Fourier-side representation of real fields on the torus.
//!
//! Coefficients follow the normalized convention
//! `f̂(n) = (1/2π) ∫ e^{-inx} f(x) dx`, so that `f(x) = Σ f̂(n) e^{inx}` and
//! `‖f‖²_{L²} = Σ_n |f̂(n)|²`. Only the modes `0..=N` are stored; negative
//! modes are implied by `f̂(-n) = conj(f̂(n))`.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MEAN_IMAG_TOL: f64 = 1e-12;
const SYNTH_IMAG_TOL: f64 = 1e-10;

/// A real-valued band-limited function on the torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct TorusField {
    coeffs: Vec<Complex64>,
}

/// Wire form: `{"N": int, "coeffs": [[re, im], ...]}` for n = 0..N.
#[derive(Serialize, Deserialize)]
struct FieldRepr {
    #[serde(rename = "N")]
    n: usize,
    coeffs: Vec<[f64; 2]>,
}

impl TryFrom<FieldRepr> for TorusField {
    type Error = Error;

    fn try_from(repr: FieldRepr) -> Result<Self> {
        if repr.coeffs.len() != repr.n + 1 {
            return Err(Error::Format(format!(
                "field declares N = {} but lists {} coefficients",
                repr.n,
                repr.coeffs.len()
            )));
        }
        TorusField::from_coeffs(
            repr.coeffs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<TorusField> for FieldRepr {
    fn from(f: TorusField) -> Self {
        FieldRepr {
            n: f.modes(),
            coeffs: f.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TorusField {
    /// The zero field with `modes` retained frequencies.
    ///
    /// Panics if `modes == 0`.
    pub fn zeros(modes: usize) -> Self {
        assert!(modes >= 1, "a torus field needs at least one mode");
        TorusField {
            coeffs: vec![Complex64::new(0.0, 0.0); modes + 1],
        }
    }

    /// Builds a field from `(c_0, ..., c_N)`. The mean coefficient must be real.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidArgument(
                "a torus field needs at least one nonzero mode (N >= 1)".into(),
            ));
        }
        let residue = coeffs[0].im.abs();
        if residue > MEAN_IMAG_TOL * (1.0 + coeffs[0].re.abs()) {
            return Err(Error::RealnessViolation {
                residue,
                tolerance: MEAN_IMAG_TOL,
            });
        }
        coeffs[0].im = 0.0;
        Ok(TorusField { coeffs })
    }

    /// Builds a field from a coefficient rule evaluated at `n = 0..=modes`.
    pub fn from_fn(modes: usize, mut rule: impl FnMut(usize) -> Complex64) -> Result<Self> {
        Self::from_coeffs((0..=modes).map(&mut rule).collect())
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `f̂(k)` for any integer `k`; zero outside the retained band.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        match self.coeffs.get(idx) {
            Some(c) if k >= 0 => *c,
            Some(c) => c.conj(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Copy with the band changed to `modes`, zero-padding or truncating.
    pub fn with_modes(&self, modes: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(modes.max(1) + 1, Complex64::new(0.0, 0.0));
        TorusField { coeffs }
    }

    pub fn zero_mean(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = Complex64::new(0.0, 0.0);
        out
    }

    pub fn add_mean(&self, offset: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0].re += offset;
        out
    }

    /// Applies a Fourier multiplier given by its values on `n >= 0`.
    ///
    /// The caller is responsible for the multiplier being real-preserving;
    /// the mean coefficient keeps only its real part.
    pub fn apply_symbol(&self, mut symbol: impl FnMut(i64) -> Complex64) -> Self {
        let mut coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * symbol(n as i64))
            .collect();
        coeffs[0].im = 0.0;
        TorusField { coeffs }
    }

    /// `x ↦ f(x + theta)`.
    pub fn translate(&self, theta: f64) -> Self {
        self.apply_symbol(|n| Complex64::from_polar(1.0, n as f64 * theta))
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs[0].norm_sqr() + 2.0 * self.coeffs[1..].iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Upper bound for the sup norm: `Σ_n |f̂(n)|`.
    pub fn wiener_norm(&self) -> f64 {
        self.coeffs[0].norm() + 2.0 * self.coeffs[1..].iter().map(|c| c.norm()).sum::<f64>()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    fn zip_with(&self, other: &TorusField, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let modes = self.modes().max(other.modes());
        let coeffs = (0..=modes as i64)
            .map(|n| op(self.coeff(n), other.coeff(n)))
            .collect();
        TorusField { coeffs }
    }
}

impl Add for &TorusField {
    type Output = TorusField;
    fn add(self, rhs: &TorusField) -> TorusField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &TorusField {
    type Output = TorusField;
    fn sub(self, rhs: &TorusField) -> TorusField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &TorusField {
    type Output = TorusField;
    fn mul(self, rhs: f64) -> TorusField {
        TorusField {
            coeffs: self.coeffs.iter().map(|c| c * rhs).collect(),
        }
    }
}

/// Element of the truncated Hardy space `L²₊`: modes `0..=N`, no symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticField {
    coeffs: Vec<Complex64>,
}

impl AnalyticField {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        AnalyticField { coeffs }
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Re-projection onto nonnegative modes; a no-op by construction.
    pub fn project(&self) -> Self {
        self.clone()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self, other⟩ = Σ conj(self_n) other_n`.
    pub fn inner(&self, other: &AnalyticField) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// A regularity index `-1/2 < s < 0` together with `ε = (1/2)(1/2 - |s|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevRegularity {
    s: f64,
    eps: f64,
}

impl SobolevRegularity {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > -0.5 && s < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "regularity s must lie in (-1/2, 0), got {s}"
            )));
        }
        Ok(SobolevRegularity {
            s,
            eps: 0.5 * (0.5 - s.abs()),
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

/// Smallest `2^a 3^b 5^c` that is at least `min_len`.
pub fn fast_len(min_len: usize) -> usize {
    let mut n = min_len.max(1);
    loop {
        let mut m = n;
        for p in [2, 3, 5] {
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 1;
    }
}

/// Cached forward/inverse transforms on a uniform grid of `points` nodes.
#[derive(Clone)]
pub struct SpectralGrid {
    points: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid").field("points", &self.points).finish()
    }
}

impl SpectralGrid {
    pub fn new(points: usize) -> Self {
        let mut planner = FftPlanner::new();
        SpectralGrid {
            points,
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Samples of `Σ f̂(n) e^{inx}` at `x_j = 2πj/P`, written into `buf`.
    pub fn fill_samples(&self, f: &TorusField, buf: &mut Vec<Complex64>) {
        self.fill_from_coeffs(&f.coeffs, buf);
    }

    /// As [`fill_samples`](Self::fill_samples) for raw coefficients `c_0..c_N`;
    /// the mean coefficient contributes only its real part.
    pub fn fill_from_coeffs(&self, coeffs: &[Complex64], buf: &mut Vec<Complex64>) {
        let p = self.points;
        buf.clear();
        buf.resize(p, Complex64::new(0.0, 0.0));
        let band = (coeffs.len() - 1).min((p - 1) / 2);
        buf[0] = Complex64::new(coeffs[0].re, 0.0);
        for n in 1..=band {
            buf[n] = coeffs[n];
            buf[p - n] = coeffs[n].conj();
        }
        self.inverse.process(buf);
    }

    /// Normalized coefficients `0..=modes` of the samples in `buf` (consumed).
    pub fn coefficients(&self, buf: &mut [Complex64], modes: usize) -> Vec<Complex64> {
        self.forward.process(buf);
        let scale = 1.0 / self.points as f64;
        (0..=modes)
            .map(|n| {
                if n < self.points {
                    buf[n] * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect()
    }
}

/// Coefficients `0..=modes` of uniformly spaced samples on `[0, 2π)`.
pub fn analyze(samples: &[f64], modes: usize) -> Result<TorusField> {
    let required = 2 * modes + 1;
    if modes == 0 || samples.len() < required {
        return Err(Error::SampleCountTooSmall {
            modes,
            required,
            got: samples.len(),
        });
    }
    let grid = SpectralGrid::new(samples.len());
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut coeffs = grid.coefficients(&mut buf, modes);
    coeffs[0].im = 0.0;
    Ok(TorusField { coeffs })
}

/// Real samples of `f` on a uniform grid of `points` nodes.
pub fn synthesize(f: &TorusField, points: usize) -> Result<Vec<f64>> {
    let required = 2 * f.modes() + 1;
    if points < required {
        return Err(Error::SampleCountTooSmall {
            modes: f.modes(),
            required,
            got: points,
        });
    }
    let grid = SpectralGrid::new(points);
    let mut buf = Vec::new();
    grid.fill_samples(f, &mut buf);
    let residue = buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let tolerance = SYNTH_IMAG_TOL * f.wiener_norm().max(1.0);
    if residue > tolerance {
        return Err(Error::RealnessViolation { residue, tolerance });
    }
    Ok(buf.into_iter().map(|z| z.re).collect())
}

/// Hilbert transform, symbol `-i sgn(n)`.
pub fn hilbert(f: &TorusField) -> TorusField {
    f.apply_symbol(|n| match n {
        0 => Complex64::new(0.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    })
}

/// Szegő projector onto nonnegative modes.
pub fn szego_project(f: &TorusField) -> AnalyticField {
    AnalyticField::new(f.coeffs.clone())
}

/// Spectral derivative, symbol `in`.
pub fn derivative(f: &TorusField) -> TorusField {
    f.apply_symbol(|n| Complex64::new(0.0, n as f64))
}

/// `(Σ_n |f̂(n)|² (|n| + κ)^{2r})^{1/2}` over all retained modes of both signs.
pub fn sobolev_norm(f: &TorusField, r: f64, kappa: f64) -> Result<f64> {
    if !(kappa >= 1.0) {
        return Err(Error::KappaOutOfRange(kappa));
    }
    let weight = |n: usize| (n as f64 + kappa).powf(2.0 * r);
    let sum = f.coeffs[0].norm_sqr() * weight(0)
        + 2.0
            * f.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c.norm_sqr() * weight(i + 1))
                .sum::<f64>();
    Ok(sum.sqrt())
}

/// The `H^r` norm (κ = 1 weights) restricted to `|n| >= cutoff`.
pub fn tail_norm(f: &TorusField, r: f64, cutoff: usize) -> f64 {
    let weight = |n: usize| (n as f64 + 1.0).powf(2.0 * r);
    let mut sum = 0.0;
    for (n, c) in f.coeffs.iter().enumerate().skip(cutoff) {
        let mult = if n == 0 { 1.0 } else { 2.0 };
        sum += mult * c.norm_sqr() * weight(n);
    }
    sum.sqrt()
}
