//! Truncated Lax operator `L_u = -i∂_x - T_u` on the Hardy space and the
//! resolvent functionals built from it.
//!
//! On modes `0..M` the operator is the Hermitian matrix
//! `L[n][m] = n δ_{nm} - û(n - m)`. With `m = (L_u + κ)^{-1} Πu`,
//!
//! * `β(κ; u) = ⟨Πu, m⟩`,
//! * `β_s(κ; u) = ∫_κ^∞ β(ϰ; u) ϰ^{2s} dϰ`,
//! * `dβ[f] = ⟨(|m|² + m + m̄), f⟩`.
//!
//! All inner products use the normalized measure `dx/2π`, matching the
//! coefficient convention in [`crate::spectral`]. β-type quantities are
//! evaluated on the zero-mean representative of `u` (and of `f`).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{bo_vector_field, Trajectory};
use crate::quadrature::{weighted_tail_integral, TailIntegral};
use crate::spectral::{szego_project, AnalyticField, SobolevRegularity, TorusField};

/// Relative tolerance for the β_s quadrature.
pub const BETA_S_RTOL: f64 = 1e-8;
const THRESHOLD_MARGIN: f64 = 0.5;
const THRESHOLD_CAP: f64 = (1u64 << 30) as f64;
const IMAG_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct LaxMatrix {
    entries: DMatrix<Complex64>,
}

impl LaxMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, n: usize, m: usize) -> Complex64 {
        self.entries[(n, m)]
    }

    pub fn is_hermitian(&self) -> bool {
        let d = self.dim();
        (0..d).all(|n| (0..d).all(|m| self.entries[(n, m)] == self.entries[(m, n)].conj()))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    fn shifted(&self, kappa: f64) -> DMatrix<Complex64> {
        let mut a = self.entries.clone();
        for i in 0..self.dim() {
            a[(i, i)] += kappa;
        }
        a
    }

    fn is_positive_definite_above(&self, shift: f64) -> bool {
        HermitianCholesky::new(&self.shifted(shift)).is_some()
    }
}

/// `A = R R*` with `R` lower triangular, for Hermitian `A`. Fails unless every
/// pivot is real and strictly positive, i.e. unless `A` is positive definite.
struct HermitianCholesky {
    dim: usize,
    // row-major lower triangle
    factor: Vec<Complex64>,
}

impl HermitianCholesky {
    fn new(a: &DMatrix<Complex64>) -> Option<Self> {
        let dim = a.nrows();
        let mut r = vec![Complex64::new(0.0, 0.0); dim * dim];
        for j in 0..dim {
            let (head, rest) = r.split_at_mut(j * dim);
            let row_j = &mut rest[..dim];
            for k in 0..j {
                let row_k = &head[k * dim..k * dim + k + 1];
                let dot: Complex64 = row_j[..k].iter().zip(&row_k[..k]).map(|(x, y)| x * y.conj()).sum();
                row_j[k] = (a[(j, k)] - dot) / row_k[k].re;
            }
            let pivot = a[(j, j)].re - row_j[..j].iter().map(|x| x.norm_sqr()).sum::<f64>();
            if !(pivot > 0.0) || !pivot.is_finite() {
                return None;
            }
            row_j[j] = Complex64::new(pivot.sqrt(), 0.0);
        }
        Some(HermitianCholesky { dim, factor: r })
    }

    fn solve(&self, b: &DVector<Complex64>) -> DVector<Complex64> {
        let n = self.dim;
        let r = &self.factor;
        let mut y = b.clone();
        for i in 0..n {
            let row = &r[i * n..i * n + i];
            let dot: Complex64 = row.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - dot) / r[i * n + i].re;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for k in i + 1..n {
                acc -= r[k * n + i].conj() * y[k];
            }
            y[i] = acc / r[i * n + i].re;
        }
        y
    }
}

pub fn build_lax(u: &TorusField, dim: usize) -> Result<LaxMatrix> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("Lax truncation must be >= 2, got {dim}")));
    }
    let entries = DMatrix::from_fn(dim, dim, |n, m| {
        let diag = if n == m { n as f64 } else { 0.0 };
        Complex64::new(diag, 0.0) - u.coeff(n as i64 - m as i64)
    });
    Ok(LaxMatrix { entries })
}

/// Smallest `κ ∈ {1, 2, 4, ...}` with `λ_min(L + κ) > 1/2`.
///
/// The regularity `s` is validated; the positive-definiteness search itself
/// does not depend on it.
pub fn kappa_threshold(u: &TorusField, s: f64, dim: usize) -> Result<f64> {
    SobolevRegularity::new(s)?;
    let lax = build_lax(&u.zero_mean(), dim)?;
    let mut kappa = 1.0;
    while kappa <= THRESHOLD_CAP {
        if lax.is_positive_definite_above(kappa - THRESHOLD_MARGIN) {
            return Ok(kappa);
        }
        kappa *= 2.0;
    }
    Err(Error::ThresholdNotFound(THRESHOLD_CAP))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolventVector {
    pub coeffs: Vec<Complex64>,
    pub kappa: f64,
    pub residual: f64,
}

impl ResolventVector {
    pub fn as_analytic(&self) -> AnalyticField {
        AnalyticField::new(self.coeffs.clone())
    }
}

fn truncated(rhs: &AnalyticField, dim: usize) -> DVector<Complex64> {
    DVector::from_fn(dim, |n, _| rhs.coeff(n))
}

/// Solves `(L + κ) m = rhs` by Cholesky factorization.
pub fn resolvent_solve(lax: &LaxMatrix, kappa: f64, rhs: &AnalyticField) -> Result<ResolventVector> {
    let a = lax.shifted(kappa);
    let chol = HermitianCholesky::new(&a).ok_or(Error::NotPositiveDefinite(kappa))?;
    let b = truncated(rhs, lax.dim());
    let m = chol.solve(&b);
    let residual = (&a * &m - &b).norm();
    Ok(ResolventVector {
        coeffs: m.iter().copied().collect(),
        kappa,
        residual,
    })
}

fn real_part_checked(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL * z.re.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::RealnessViolation {
            residue: z.im.abs(),
            tolerance: IMAG_TOL,
        });
    }
    Ok(z.re)
}

fn solve_for(u: &TorusField, kappa: f64, dim: usize) -> Result<(AnalyticField, ResolventVector)> {
    let u0 = u.zero_mean();
    let lax = build_lax(&u0, dim)?;
    let rhs = szego_project(&u0);
    let m = resolvent_solve(&lax, kappa, &rhs)?;
    Ok((rhs, m))
}

/// `β(κ; u) = ⟨Πu, (L_u + κ)^{-1} Πu⟩`.
pub fn beta(u: &TorusField, kappa: f64, dim: usize) -> Result<f64> {
    let (rhs, m) = solve_for(u, kappa, dim)?;
    real_part_checked(rhs.inner(&m.as_analytic()))
}

/// `dβ[f] = ∫ (|m|² + m + m̄) f dx/2π`, with the products taken as Toeplitz
/// sums over the retained modes.
pub fn dbeta(u: &TorusField, kappa: f64, f: &TorusField, dim: usize) -> Result<f64> {
    let (_, res) = solve_for(u, kappa, dim)?;
    let f0 = f.zero_mean();
    let m = &res.coeffs;
    let linear: Complex64 = m
        .iter()
        .enumerate()
        .map(|(n, mn)| f0.coeff(n as i64).conj() * mn)
        .sum();
    let band = f0.modes() as i64;
    let mut quadratic = Complex64::new(0.0, 0.0);
    for (n, mn) in m.iter().enumerate() {
        let lo = (n as i64 - band).max(0) as usize;
        let hi = ((n as i64 + band) as usize).min(m.len() - 1);
        let mut row = Complex64::new(0.0, 0.0);
        for (k, mk) in m.iter().enumerate().take(hi + 1).skip(lo) {
            row += f0.coeff(n as i64 - k as i64) * mk;
        }
        quadratic += mn.conj() * row;
    }
    Ok(2.0 * linear.re + quadratic.re)
}

/// `|dβ[H∂²_x u - 2u∂_x u]|` normalized by `‖u‖²(1 + ‖u‖)`.
pub fn bo_direction_check(u: &TorusField, kappa: f64, dim: usize) -> Result<f64> {
    let u0 = u.zero_mean();
    let norm = u0.l2_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let g = bo_vector_field(&u0);
    Ok(dbeta(&u0, kappa, &g, dim)?.abs() / (norm * norm * (1.0 + norm)))
}

/// Spectral form `β(ϰ) = Σ_j w_j / (λ_j + ϰ)` with `w_j = |⟨v_j, Πu⟩|²`,
/// valid for every `ϰ > -λ_min` after a single eigendecomposition.
#[derive(Clone, Debug)]
pub struct BetaSpectrum {
    eigenvalues: Vec<f64>,
    weights: Vec<f64>,
}

impl BetaSpectrum {
    pub fn new(u: &TorusField, dim: usize) -> Result<Self> {
        let u0 = u.zero_mean();
        let lax = build_lax(&u0, dim)?;
        let b = truncated(&szego_project(&u0), dim);
        let eig = lax.entries.clone().symmetric_eigen();
        let weights = eig
            .eigenvectors
            .column_iter()
            .map(|v| v.dotc(&b).norm_sqr())
            .collect();
        Ok(BetaSpectrum {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            weights,
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `‖Πu‖²` over the retained modes, the coefficient of `1/ϰ` at infinity.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn beta(&self, kappa: f64) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| w / (l + kappa))
            .sum()
    }

    pub fn beta_s(&self, s: f64, kappa: f64) -> Result<TailIntegral> {
        SobolevRegularity::new(s)?;
        if self.min_eigenvalue() + kappa <= 0.0 {
            return Err(Error::NotPositiveDefinite(kappa));
        }
        weighted_tail_integral(|k| Ok(self.beta(k)), self.total_weight(), s, kappa, BETA_S_RTOL)
    }
}

/// `β_s(κ; u) = ∫_κ^∞ β(ϰ; u) ϰ^{2s} dϰ`.
pub fn beta_s(u: &TorusField, s: f64, kappa: f64, dim: usize) -> Result<f64> {
    Ok(BetaSpectrum::new(u, dim)?.beta_s(s, kappa)?.value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaProfile {
    pub kappas: Vec<f64>,
    pub betas: Vec<f64>,
    pub s: f64,
    pub beta_s: f64,
    pub quad_error: f64,
}

/// β on an increasing κ-grid plus `β_s` at the first grid point.
pub fn beta_profile(u: &TorusField, s: f64, kappas: &[f64], dim: usize) -> Result<BetaProfile> {
    if kappas.is_empty() || kappas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("kappa grid must be nonempty and strictly increasing".into()));
    }
    let betas = kappas
        .par_iter()
        .map(|&k| beta(u, k, dim))
        .collect::<Result<Vec<_>>>()?;
    let integral = BetaSpectrum::new(u, dim)?.beta_s(s, kappas[0])?;
    Ok(BetaProfile {
        kappas: kappas.to_vec(),
        betas,
        s,
        beta_s: integral.value,
        quad_error: integral.quad_error + integral.tail_error,
    })
}

/// `γ_n = λ_n - λ_{n-1} - 1` for `1 <= n <= count`.
pub fn eigen_gaps(lax: &LaxMatrix, count: usize) -> Result<Vec<f64>> {
    if count >= lax.dim() {
        return Err(Error::CountExceedsDim {
            count,
            dim: lax.dim(),
        });
    }
    let ev = lax.eigenvalues();
    Ok((1..=count).map(|n| ev[n] - ev[n - 1] - 1.0).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub t: f64,
    pub beta: f64,
    pub beta_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub kappa: f64,
    pub s: f64,
    pub dim: usize,
    pub rows: Vec<DriftRow>,
    pub max_rel_drift_beta: f64,
    pub max_rel_drift_beta_s: f64,
    /// `max_{t>0} t⁻¹ log(β_s(t)/β_s(0))`.
    pub k_fit: f64,
    pub max_quad_error: f64,
}

fn rel_drift(value: f64, initial: f64) -> f64 {
    if initial == 0.0 {
        if value == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (value / initial - 1.0).abs()
    }
}

impl DriftReport {
    pub fn rel_drifts(&self) -> Vec<f64> {
        let b0 = self.rows.first().map_or(0.0, |r| r.beta);
        self.rows.iter().map(|r| rel_drift(r.beta, b0)).collect()
    }

    /// `log(β_s(t)/β_s(0))` per row (0 where undefined).
    pub fn log_growth(&self) -> Vec<f64> {
        let b0 = self.rows.first().map_or(0.0, |r| r.beta_s);
        self.rows
            .iter()
            .map(|r| if b0 > 0.0 && r.beta_s > 0.0 { (r.beta_s / b0).ln() } else { 0.0 })
            .collect()
    }
}

pub fn beta_drift_report(traj: &Trajectory, kappa: f64, s: f64, dim: usize) -> Result<DriftReport> {
    let evaluated = traj
        .times
        .par_iter()
        .zip(traj.states.par_iter())
        .map(|(&t, u)| {
            let b = beta(u, kappa, dim)?;
            let bs = BetaSpectrum::new(u, dim)?.beta_s(s, kappa)?;
            Ok((DriftRow { t, beta: b, beta_s: bs.value }, bs.quad_error + bs.tail_error))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_quad_error = evaluated.iter().map(|e| e.1).fold(0.0, f64::max);
    let rows: Vec<DriftRow> = evaluated.into_iter().map(|e| e.0).collect();
    let (b0, bs0) = rows.first().map_or((0.0, 0.0), |r| (r.beta, r.beta_s));
    let max_rel_drift_beta = rows.iter().map(|r| rel_drift(r.beta, b0)).fold(0.0, f64::max);
    let max_rel_drift_beta_s = rows.iter().map(|r| rel_drift(r.beta_s, bs0)).fold(0.0, f64::max);
    let k_fit = if bs0 > 0.0 {
        rows.iter()
            .filter(|r| r.t > 0.0)
            .map(|r| (r.beta_s / bs0).ln() / r.t)
            .fold(f64::NEG_INFINITY, f64::max)
    } else {
        0.0
    };
    Ok(DriftReport {
        kappa,
        s,
        dim,
        rows,
        max_rel_drift_beta,
        max_rel_drift_beta_s,
        k_fit: if k_fit.is_finite() { k_fit } else { 0.0 },
        max_quad_error,
    })
}
