//! Flat `key=value` run configuration.
//!
//! One setting per line, `#` starts a comment, keys carry a dotted section
//! prefix (`solver.N=128`). Every key has a default; unknown keys are errors.
//! [`Scenario::from_config`] turns the text form into validated, typed
//! settings before anything is computed.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{rough_initial_data, standard_initial_data, SolverConfig};
use crate::multipliers::{
    ilw_boosted_symbol, ilw_full_symbol, rayleigh_symbol, smith_symbol, zero_symbol, MultiplierSymbol,
};
use crate::spectral::{SobolevRegularity, TorusField};

/// `(key, default, description)` for every recognized key.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("scenario.kind", "", "scenario to run; empty selects the subcommand's default"),
    ("seed", "0", "seed for randomized initial data"),
    ("solver.N", "128", "highest retained Fourier mode"),
    ("solver.dt", "1e-3", "time step upper bound"),
    ("solver.T", "1", "final time"),
    ("solver.dealias_fraction", "0.6666666666666666", "modes above this fraction of N are zeroed"),
    ("solver.sample_every", "50", "steps between stored samples"),
    ("solver.nonlinearity", "true", "include -2u u_x"),
    ("solver.symbol", "zero", "zero | rayleigh | ilw-full | ilw-boosted | smith | table"),
    ("symbol.delta", "1", "depth for the ILW symbols"),
    ("symbol.gamma", "-1", "constant for the rayleigh symbol"),
    ("symbol.table", "", "JSON table {\"entries\": [[n, re, im], ...]} for the table symbol"),
    ("initial.kind", "standard", "zero | standard | cosine | rough"),
    ("initial.amplitude", "1", "scale applied to the profile"),
    ("initial.mean", "0", "mean added after scaling"),
    ("initial.s", "-0.25", "regularity of the rough profile"),
    ("lax.kappa", "8", "spectral parameter for beta and beta_s"),
    ("lax.s", "-0.25", "regularity for beta_s, in (-1/2, 0)"),
    ("lax.M", "0", "Lax truncation; 0 means 2N"),
    ("lax.gaps", "8", "number of eigenvalues/gaps tracked"),
    ("limit.deltas", "2,4,8,16", "depth ladder for ilw-limit"),
    ("limit.s", "-0.25", "Sobolev index of the ilw-limit error norm"),
    ("tightness.deltas", "1,2,4,8,16", "depth ladder for tightness (BO is always added)"),
    ("tightness.s", "-0.25", "regularity of the tail norms"),
    ("check.self", "true", "run the dt/2 self-check and record it"),
    ("check.tolerance", "0", "if positive, the self-check becomes a verdict with this bound"),
];

/// Raw settings: defaults overlaid with file contents and overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            values: KEYS.iter().map(|(k, v, _)| (k.to_string(), v.to_string())).collect(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            cfg.apply(line)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Config::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies one `key=value` assignment.
    pub fn apply(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got `{assignment}`")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(Error::Config(format!("unknown key `{key}`"))),
        }
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        self.get(key)
            .parse()
            .map_err(|e| Error::Config(format!("{key} = `{}`: {e}", self.get(key))))
    }

    fn list(&self, key: &str) -> Result<Vec<f64>> {
        self.get(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e| Error::Config(format!("{key}: `{s}`: {e}"))))
            .collect()
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.values {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Evolve,
    BoConservation,
    ExpBound,
    IlwLimit,
    GaugeCheck,
    SymbolAudit,
    Isospectral,
    Tightness,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        ScenarioKind::Evolve,
        ScenarioKind::BoConservation,
        ScenarioKind::ExpBound,
        ScenarioKind::IlwLimit,
        ScenarioKind::GaugeCheck,
        ScenarioKind::SymbolAudit,
        ScenarioKind::Isospectral,
        ScenarioKind::Tightness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Evolve => "evolve",
            ScenarioKind::BoConservation => "bo-conservation",
            ScenarioKind::ExpBound => "exp-bound",
            ScenarioKind::IlwLimit => "ilw-limit",
            ScenarioKind::GaugeCheck => "gauge-check",
            ScenarioKind::SymbolAudit => "symbol-audit",
            ScenarioKind::Isospectral => "isospectral",
            ScenarioKind::Tightness => "tightness",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    Zero,
    /// `2cos x + 0.5 sin 2x`
    Standard,
    /// `2cos x`
    Cosine,
    Rough,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub mean: f64,
    pub s: f64,
}

impl InitialData {
    pub fn build(&self, modes: usize, seed: u64) -> Result<TorusField> {
        let profile = match self.kind {
            InitialKind::Zero => TorusField::zeros(modes),
            InitialKind::Standard => standard_initial_data(modes),
            InitialKind::Cosine => standard_initial_data(modes).apply_symbol(|n| {
                if n.abs() == 1 {
                    num_complex::Complex64::new(1.0, 0.0)
                } else {
                    num_complex::Complex64::new(0.0, 0.0)
                }
            }),
            InitialKind::Rough => rough_initial_data(modes, self.s, seed),
        };
        Ok((&profile * self.amplitude).add_mean(self.mean))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaxSettings {
    pub kappa: f64,
    pub s: f64,
    /// Truncation size, already resolved from `lax.M = 0`.
    pub dim: usize,
    pub gaps: usize,
}

/// Fully validated scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub solver: SolverConfig,
    pub initial: InitialData,
    pub lax: LaxSettings,
    pub limit_deltas: Vec<f64>,
    pub limit_s: f64,
    pub tightness_deltas: Vec<f64>,
    pub tightness_s: f64,
    pub self_check: bool,
    pub self_check_tolerance: f64,
    pub output: Option<PathBuf>,
    /// Echo of the raw settings.
    pub config: Config,
}

fn symbol_from(cfg: &Config) -> Result<MultiplierSymbol> {
    let delta: f64 = cfg.parsed("symbol.delta")?;
    match cfg.get("solver.symbol") {
        "zero" => Ok(zero_symbol()),
        "rayleigh" => Ok(rayleigh_symbol(cfg.parsed("symbol.gamma")?)),
        "ilw-full" => ilw_full_symbol(delta),
        "ilw-boosted" => ilw_boosted_symbol(delta),
        "smith" => Ok(smith_symbol()),
        "table" => {
            let path = cfg.get("symbol.table");
            if path.is_empty() {
                return Err(Error::Config("solver.symbol = table needs symbol.table".into()));
            }
            MultiplierSymbol::load_table(Path::new(path))
        }
        other => Err(Error::Config(format!("unknown symbol `{other}`"))),
    }
}

fn depth_ladder(cfg: &Config, key: &str) -> Result<Vec<f64>> {
    let deltas = cfg.list(key)?;
    if deltas.is_empty() {
        return Err(Error::Config(format!("{key} is empty")));
    }
    if let Some(bad) = deltas.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(Error::Config(format!("{key}: depth {bad} is not positive")));
    }
    if deltas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("{key} must be strictly increasing")));
    }
    Ok(deltas)
}

fn regularity(cfg: &Config, key: &str) -> Result<f64> {
    let s: f64 = cfg.parsed(key)?;
    SobolevRegularity::new(s).map_err(|e| Error::Config(format!("{key}: {e}")))?;
    Ok(s)
}

impl Scenario {
    /// `fallback` is used when `scenario.kind` is empty.
    pub fn from_config(cfg: &Config, fallback: ScenarioKind) -> Result<Self> {
        let kind = match cfg.get("scenario.kind") {
            "" => fallback,
            name => name.parse()?,
        };
        let seed: u64 = cfg.parsed("seed")?;
        let modes: usize = cfg.parsed("solver.N")?;
        let mut solver = SolverConfig::new(modes, symbol_from(cfg)?);
        solver.dt = cfg.parsed("solver.dt")?;
        solver.horizon = cfg.parsed("solver.T")?;
        solver.dealias_fraction = cfg.parsed("solver.dealias_fraction")?;
        solver.sample_every = cfg.parsed("solver.sample_every")?;
        solver.nonlinearity_enabled = cfg.parsed("solver.nonlinearity")?;
        solver.seed = seed;
        solver.validate().map_err(|e| Error::Config(e.to_string()))?;

        let initial = InitialData {
            kind: match cfg.get("initial.kind") {
                "zero" => InitialKind::Zero,
                "standard" => InitialKind::Standard,
                "cosine" => InitialKind::Cosine,
                "rough" => InitialKind::Rough,
                other => return Err(Error::Config(format!("unknown initial.kind `{other}`"))),
            },
            amplitude: cfg.parsed("initial.amplitude")?,
            mean: cfg.parsed("initial.mean")?,
            s: cfg.parsed("initial.s")?,
        };
        if !(initial.amplitude.is_finite() && initial.mean.is_finite()) {
            return Err(Error::Config("initial amplitude and mean must be finite".into()));
        }
        if initial.kind == InitialKind::Rough {
            regularity(cfg, "initial.s")?;
        }

        let kappa: f64 = cfg.parsed("lax.kappa")?;
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Config(format!("lax.kappa must be positive, got {kappa}")));
        }
        let dim = match cfg.parsed::<usize>("lax.M")? {
            0 => 2 * modes,
            m => m,
        };
        if dim < 2 {
            return Err(Error::Config(format!("lax.M must be at least 2, got {dim}")));
        }
        let gaps: usize = cfg.parsed("lax.gaps")?;
        if gaps == 0 || gaps >= dim {
            return Err(Error::Config(format!("lax.gaps must lie in 1..{dim}, got {gaps}")));
        }
        let lax = LaxSettings {
            kappa,
            s: regularity(cfg, "lax.s")?,
            dim,
            gaps,
        };

        let self_check_tolerance: f64 = cfg.parsed("check.tolerance")?;
        if !(self_check_tolerance >= 0.0) {
            return Err(Error::Config("check.tolerance must be nonnegative".into()));
        }

        Ok(Scenario {
            kind,
            seed,
            solver,
            initial,
            lax,
            limit_deltas: depth_ladder(cfg, "limit.deltas")?,
            limit_s: regularity(cfg, "limit.s")?,
            tightness_deltas: depth_ladder(cfg, "tightness.deltas")?,
            tightness_s: regularity(cfg, "tightness.s")?,
            self_check: cfg.parsed("check.self")?,
            self_check_tolerance,
            output: None,
            config: cfg.clone(),
        })
    }

    pub fn initial_state(&self) -> Result<TorusField> {
        self.initial.build(self.solver.modes, self.seed)
    }
}
