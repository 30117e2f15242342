//! Order-zero Fourier multipliers `A` with `(Af)^(n) = a(n) f̂(n)`.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-14;
/// Above this exponent the ILW correction is below 1e-300 and is dropped.
const EXP_GUARD: f64 = 700.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SymbolKind {
    Zero,
    Constant { re: f64, im: f64 },
    /// `-in/δ + 2in|n| / (e^{2|δn|} - 1)`.
    IlwFull { delta: f64 },
    /// The ILW symbol with the drift `-in/δ` removed.
    IlwBoosted { delta: f64 },
    /// `in√(1+n²) - i sgn(n) n²`.
    Smith,
    /// Explicit values; `(n, re, im)` sorted by `n`, missing `n` evaluate to 0.
    Table { entries: Vec<(i64, f64, f64)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSymbol {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub claims_bounded: bool,
    pub kind: SymbolKind,
}

fn ilw_correction(delta: f64, n: i64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let exponent = 2.0 * delta * nf.abs();
    if exponent > EXP_GUARD {
        0.0
    } else {
        2.0 * nf * nf.abs() / exponent.exp_m1()
    }
}

fn check_depth(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::NonpositiveDepth(delta))
    }
}

impl MultiplierSymbol {
    fn new(name: &str, params: &[(&str, f64)], claims_bounded: bool, kind: SymbolKind) -> Self {
        MultiplierSymbol {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            claims_bounded,
            kind,
        }
    }

    pub fn eval(&self, n: i64) -> Complex64 {
        match &self.kind {
            SymbolKind::Zero => Complex64::new(0.0, 0.0),
            SymbolKind::Constant { re, im } => Complex64::new(*re, *im),
            SymbolKind::IlwFull { delta } => {
                Complex64::new(0.0, -(n as f64) / delta + ilw_correction(*delta, n))
            }
            SymbolKind::IlwBoosted { delta } => Complex64::new(0.0, ilw_correction(*delta, n)),
            SymbolKind::Smith => {
                // n(√(1+n²) - |n|) rewritten without the cancellation
                let nf = n as f64;
                let abs = nf.abs();
                Complex64::new(0.0, nf.signum() * abs / ((1.0 + nf * nf).sqrt() + abs))
            }
            SymbolKind::Table { entries } => entries
                .binary_search_by_key(&n, |e| e.0)
                .map(|i| Complex64::new(entries[i].1, entries[i].2))
                .unwrap_or_default(),
        }
    }

    /// `a(0), a(1), ..., a(n_max)`.
    pub fn tabulate(&self, n_max: usize) -> Vec<Complex64> {
        (0..=n_max as i64).map(|n| self.eval(n)).collect()
    }

    pub fn delta(&self) -> Option<f64> {
        match self.kind {
            SymbolKind::IlwFull { delta } | SymbolKind::IlwBoosted { delta } => Some(delta),
            _ => None,
        }
    }

    /// Custom symbol from `{"entries": [[n, re, im], ...]}`.
    pub fn from_table_json(name: &str, json: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct TableFile {
            entries: Vec<(i64, f64, f64)>,
        }
        let file: TableFile = serde_json::from_str(json)?;
        let mut entries = file.entries;
        entries.sort_by_key(|e| e.0);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Format("symbol table lists a mode twice".into()));
        }
        if entries.iter().any(|e| !e.1.is_finite() || !e.2.is_finite()) {
            return Err(Error::Format("symbol table has non-finite entries".into()));
        }
        log::warn!(
            "symbol table `{name}` lists {} modes; all other modes evaluate to 0",
            entries.len()
        );
        Ok(Self::new(name, &[], true, SymbolKind::Table { entries }))
    }

    pub fn load_table(path: &Path) -> Result<Self> {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "table".into());
        Self::from_table_json(&name, &std::fs::read_to_string(path)?)
    }
}

pub fn ilw_full_symbol(delta: f64) -> Result<MultiplierSymbol> {
    check_depth(delta)?;
    Ok(MultiplierSymbol::new(
        "ilw",
        &[("delta", delta)],
        false,
        SymbolKind::IlwFull { delta },
    ))
}

pub fn ilw_boosted_symbol(delta: f64) -> Result<MultiplierSymbol> {
    check_depth(delta)?;
    Ok(MultiplierSymbol::new(
        "ilw-boosted",
        &[("delta", delta)],
        true,
        SymbolKind::IlwBoosted { delta },
    ))
}

pub fn smith_symbol() -> MultiplierSymbol {
    MultiplierSymbol::new("smith", &[], true, SymbolKind::Smith)
}

/// `a ≡ gamma`: Rayleigh damping for `gamma < 0`, anti-dissipation for `gamma > 0`.
pub fn rayleigh_symbol(gamma: f64) -> MultiplierSymbol {
    MultiplierSymbol::new(
        "rayleigh",
        &[("gamma", gamma)],
        true,
        SymbolKind::Constant { re: gamma, im: 0.0 },
    )
}

/// A constant complex symbol. Only real-preserving when `value` is real.
pub fn constant_symbol(value: Complex64) -> MultiplierSymbol {
    MultiplierSymbol::new(
        "constant",
        &[("re", value.re), ("im", value.im)],
        true,
        SymbolKind::Constant {
            re: value.re,
            im: value.im,
        },
    )
}

/// The unperturbed Benjamin-Ono case.
pub fn zero_symbol() -> MultiplierSymbol {
    MultiplierSymbol::new("zero", &[], true, SymbolKind::Zero)
}

/// Whether `|a(-n) - conj(a(n))| <= 1e-14 (1 + |a(n)|)` for `1 <= n <= n_max`.
pub fn check_real_symmetry(sym: &MultiplierSymbol, n_max: usize) -> bool {
    first_asymmetry(sym, n_max).is_none() && sym.eval(0).im.abs() <= SYMMETRY_TOL
}

pub(crate) fn first_asymmetry(sym: &MultiplierSymbol, n_max: usize) -> Option<i64> {
    (1..=n_max as i64).find(|&n| {
        let a = sym.eval(n);
        (sym.eval(-n) - a.conj()).norm() > SYMMETRY_TOL * (1.0 + a.norm())
    })
}

/// `max_{|n| <= n_max} |a(n)|`.
pub fn sup_norm(sym: &MultiplierSymbol, n_max: usize) -> f64 {
    (-(n_max as i64)..=n_max as i64)
        .map(|n| sym.eval(n).norm())
        .fold(0.0, f64::max)
}
