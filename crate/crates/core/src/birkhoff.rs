//! Sequence-side diagnostics: frequencies `ω_n`, the homogeneous Birkhoff
//! flow `ζ_n(t) = e^{itω_n} ζ_n(0)`, and weighted `h^s` sequence norms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonnegative actions `γ_k`, stored from `k = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionSequence {
    gamma: Vec<f64>,
}

impl ActionSequence {
    /// `gamma[0]` is `γ_1`.
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        if let Some(bad) = gamma.iter().find(|g| !(**g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidArgument(format!("actions must be finite and >= 0, got {bad}")));
        }
        Ok(ActionSequence { gamma })
    }

    /// Clamps small negative values (e.g. roundoff in eigenvalue gaps) to zero.
    pub fn from_gaps(gaps: &[f64]) -> Self {
        ActionSequence {
            gamma: gaps.iter().map(|g| g.max(0.0)).collect(),
        }
    }

    pub fn from_state(z: &BirkhoffState) -> Self {
        ActionSequence {
            gamma: z.zeta.iter().map(|c| c.norm_sqr()).collect(),
        }
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn total(&self) -> f64 {
        self.gamma.iter().sum()
    }
}

/// Complex coordinates `ζ_n`, stored from `n = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffState {
    #[serde(with = "pairs")]
    pub zeta: Vec<Complex64>,
}

mod pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl BirkhoffState {
    /// Coordinates with the given actions and zero phases.
    pub fn from_actions(actions: &ActionSequence) -> Self {
        BirkhoffState {
            zeta: actions.gamma.iter().map(|g| Complex64::new(g.sqrt(), 0.0)).collect(),
        }
    }
}

/// `ω_n = n² - 2 Σ_{k>=1} min{k, n} γ_k`.
pub fn omega(actions: &ActionSequence, n: usize) -> f64 {
    let nf = n as f64;
    let coupling: f64 = actions
        .gamma
        .iter()
        .enumerate()
        .map(|(i, g)| ((i + 1).min(n)) as f64 * g)
        .sum();
    nf * nf - 2.0 * coupling
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSchedule {
    pub omegas: Vec<f64>,
    pub time: f64,
}

impl PhaseSchedule {
    /// Frequencies for `n = 1..=count`, frozen in time (autonomous case).
    pub fn new(actions: &ActionSequence, count: usize) -> Self {
        PhaseSchedule {
            omegas: (1..=count).map(|n| omega(actions, n)).collect(),
            time: 0.0,
        }
    }

    pub fn phases(&self, t: f64) -> Vec<f64> {
        self.omegas.iter().map(|w| w * t).collect()
    }
}

pub fn linear_flow(z0: &BirkhoffState, actions: &ActionSequence, t: f64) -> BirkhoffState {
    BirkhoffState {
        zeta: z0
            .zeta
            .iter()
            .enumerate()
            .map(|(i, z)| z * Complex64::from_polar(1.0, t * omega(actions, i + 1)))
            .collect(),
    }
}

/// `(Σ_{n>=1} n^{2s+1} |z_n|²)^{1/2}`.
pub fn h_norm(z: &BirkhoffState, s: f64) -> f64 {
    h_tail_norm(z, s, 1)
}

/// [`h_norm`] restricted to `n >= cutoff`.
pub fn h_tail_norm(z: &BirkhoffState, s: f64, cutoff: usize) -> f64 {
    z.zeta
        .iter()
        .enumerate()
        .map(|(i, c)| (i + 1, c))
        .filter(|(n, _)| *n >= cutoff)
        .map(|(n, c)| (n as f64).powf(2.0 * s + 1.0) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn actions(g: &[f64]) -> ActionSequence {
        ActionSequence::new(g.to_vec()).unwrap()
    }

    #[test]
    fn free_frequencies() {
        let a = actions(&[0.0; 5]);
        for n in 1..10 {
            assert_eq!(omega(&a, n), (n * n) as f64);
        }
    }

    #[test]
    fn frequency_examples() {
        let a = actions(&[0.25]);
        assert_abs_diff_eq!(omega(&a, 1), 0.5);
        assert_abs_diff_eq!(omega(&a, 2), 3.5);
        let a = actions(&[0.0, 0.1]);
        assert_abs_diff_eq!(omega(&a, 1), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(omega(&a, 3), 8.6, epsilon = 1e-15);
    }

    #[test]
    fn negative_actions_rejected() {
        assert!(ActionSequence::new(vec![0.1, -0.2]).is_err());
        assert_eq!(ActionSequence::from_gaps(&[1e-13, -1e-13]).gamma(), &[1e-13, 0.0]);
    }

    #[test]
    fn flow_basics() {
        let z0 = BirkhoffState {
            zeta: vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4), Complex64::new(0.05, 0.0)],
        };
        let a = ActionSequence::from_state(&z0);
        assert_eq!(linear_flow(&z0, &a, 0.0), z0);
        let zt = linear_flow(&z0, &a, 1.7);
        for (x, y) in zt.zeta.iter().zip(&z0.zeta) {
            assert_abs_diff_eq!(x.norm(), y.norm(), epsilon = 1e-15);
        }
        let back = linear_flow(&zt, &a, -1.7);
        for (x, y) in back.zeta.iter().zip(&z0.zeta) {
            assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(h_norm(&zt, -0.25), h_norm(&z0, -0.25), epsilon = 1e-15);
    }

    #[test]
    fn norms() {
        assert_eq!(h_norm(&BirkhoffState { zeta: vec![Complex64::new(0.0, 0.0); 3] }, -0.25), 0.0);
        let z = BirkhoffState {
            zeta: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        };
        assert_abs_diff_eq!(h_norm(&z, -0.25), 2f64.powf(0.25), epsilon = 1e-15);
        assert_eq!(h_tail_norm(&z, -0.25, 3), 0.0);

        let z = BirkhoffState {
            zeta: (1..=6).map(|n| Complex64::new(1.0 / n as f64, 0.5)).collect(),
        };
        assert_eq!(h_tail_norm(&z, 0.1, 1), h_norm(&z, 0.1));
        let brute: f64 = (4..=6)
            .map(|n| (n as f64).powf(1.2) * (1.0 / (n * n) as f64 + 0.25))
            .sum();
        assert_abs_diff_eq!(h_tail_norm(&z, 0.1, 4), brute.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn json_wire_form() {
        let z = BirkhoffState {
            zeta: vec![Complex64::new(1.0, -0.5)],
        };
        assert_eq!(serde_json::to_string(&z).unwrap(), r#"{"zeta":[[1.0,-0.5]]}"#);
    }
}
