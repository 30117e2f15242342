//! Scenario execution and report emission.
//!
//! A [`Scenario`] runs to a [`RunRecord`]: a manifest, numeric tables and
//! pass/fail verdicts. Errors raised by any stage become failing verdicts, so
//! a record never passes silently. [`emit_report`] writes the record as
//!
//! ```text
//! manifest.json      config echo, version, seed, wall time, table list
//! <table>.csv        one file per table, first column is the x axis
//! verdicts.csv       criterion, measured, comparison, tolerance, passed, note
//! verdicts.txt       human-readable summary
//! trajectory.json    only for `evolve`
//! trajectory.bin
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::birkhoff::{h_tail_norm, omega, ActionSequence, BirkhoffState};
use crate::config::{Scenario, ScenarioKind};
use crate::error::{Error, Result};
use crate::evolution::{evolve, self_check, SolverConfig, Trajectory};
use crate::gauge::{boost_frame, from_zero_mean, gauge_params, to_zero_mean, GaugeParams};
use crate::lax::{beta_drift_report, bo_direction_check, build_lax, eigen_gaps, DriftReport};
use crate::multipliers::{
    check_real_symmetry, ilw_boosted_symbol, ilw_full_symbol, rayleigh_symbol, smith_symbol, sup_norm,
    zero_symbol, MultiplierSymbol, SymbolKind,
};
use crate::snapshot::{load_snapshot, save_binary, save_snapshot};
use crate::spectral::{sobolev_norm, tail_norm, TorusField};

pub const BETA_DRIFT_TOL: f64 = 1e-6;
pub const MEAN_DRIFT_TOL: f64 = 1e-12;
pub const EIGEN_DRIFT_TOL: f64 = 1e-4;
pub const OMEGA_DRIFT_TOL: f64 = 1e-3;
pub const K_FIT_STABILITY: f64 = 0.1;
pub const DISSIPATIVE_K_FIT_MAX: f64 = 1e-3;
pub const GROWTH_BOUND_SLACK: f64 = 1e-12;
pub const LIMIT_ORDER_MIN: f64 = 1.8;
pub const FRAME_MISMATCH_TOL: f64 = 1e-10;
pub const GAUGE_TOL: f64 = 1e-8;
pub const ROUND_TRIP_TOL: f64 = 1e-12;
pub const SYMBOL_NMAX: usize = 512;
pub const SUP_STABILITY_TOL: f64 = 1e-12;
pub const BOOSTED_ORDER_MIN: f64 = 1.9;
pub const BOOSTED_SUP_CONSTANT: f64 = 3.0;
pub const SMITH_DEVIATION_CONSTANT: f64 = 0.25;
pub const TIGHTNESS_RATIO: f64 = 0.01;
/// Depths used by the symbol audit.
pub const AUDIT_DEPTHS: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
}

impl Comparison {
    fn holds(self, measured: f64, tolerance: f64) -> bool {
        match self {
            Comparison::AtMost => measured <= tolerance,
            Comparison::AtLeast => measured >= tolerance,
            Comparison::Below => measured < tolerance,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
            Comparison::Below => "<",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: String,
    pub measured: f64,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub passed: bool,
    pub note: String,
}

impl Verdict {
    /// Passes only if both numbers are present (not NaN) and the comparison holds.
    pub fn check(criterion: &str, measured: f64, comparison: Comparison, tolerance: f64) -> Self {
        let passed = !measured.is_nan() && !tolerance.is_nan() && comparison.holds(measured, tolerance);
        Verdict {
            criterion: criterion.to_string(),
            measured,
            comparison,
            tolerance,
            passed,
            note: String::new(),
        }
    }

    pub fn failed(criterion: &str, note: impl Into<String>) -> Self {
        Verdict {
            criterion: criterion.to_string(),
            measured: f64::NAN,
            comparison: Comparison::AtMost,
            tolerance: f64::NAN,
            passed: false,
            note: note.into(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: measured {:e} {} {:e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.measured,
            self.comparison.symbol(),
            self.tolerance
        )?;
        if !self.note.is_empty() {
            write!(f, " ({})", self.note)?;
        }
        Ok(())
    }
}

/// A CSV table; cells are kept as text so that re-emission is byte-identical.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        self.push_cells(row.iter().map(|x| x.to_string()).collect());
    }

    pub fn push_cells(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch in table {}", self.name);
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    /// Column `name` parsed as numbers.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[idx].parse().ok()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub wall_time_s: f64,
    pub tables: Vec<String>,
    pub snapshots: Vec<String>,
    pub diagnostics: BTreeMap<String, f64>,
    pub gauge: Option<GaugeParams>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub manifest: Manifest,
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
    pub trajectory: Option<Trajectory>,
}

impl RunRecord {
    pub fn new(scenario: &str, seed: u64, config: BTreeMap<String, String>) -> Self {
        RunRecord {
            manifest: Manifest {
                tool: "bopert".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                scenario: scenario.into(),
                seed,
                config,
                wall_time_s: 0.0,
                tables: Vec::new(),
                snapshots: Vec::new(),
                diagnostics: BTreeMap::new(),
                gauge: None,
            },
            tables: Vec::new(),
            verdicts: Vec::new(),
            trajectory: None,
        }
    }

    /// True iff every verdict passed (vacuously true without verdicts).
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn verdict(&self, criterion: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.criterion == criterion)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        let failed = self.verdicts.iter().filter(|v| !v.passed).count();
        out.push_str(&format!(
            "{} {}: {} of {} verdicts failed\n",
            if failed == 0 { "PASS" } else { "FAIL" },
            self.manifest.scenario,
            failed,
            self.verdicts.len()
        ));
        out
    }
}

#[derive(Default)]
struct Outcome {
    tables: Vec<Table>,
    verdicts: Vec<Verdict>,
    diagnostics: BTreeMap<String, f64>,
    gauge: Option<GaugeParams>,
    trajectory: Option<Trajectory>,
}

impl Outcome {
    fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    fn diag(&mut self, key: &str, value: f64) {
        self.diagnostics.insert(key.to_string(), value);
    }
}

/// Runs the scenario; errors are captured as a failing verdict named after the scenario.
pub fn run_scenario(sc: &Scenario) -> RunRecord {
    let start = Instant::now();
    let mut record = RunRecord::new(sc.kind.name(), sc.seed, sc.config.values().clone());
    let mut out = Outcome::default();
    let result = match sc.kind {
        ScenarioKind::Evolve => run_evolve(sc, &mut out),
        ScenarioKind::BoConservation => run_bo_conservation(sc, &mut out),
        ScenarioKind::ExpBound => run_exp_bound(sc, &mut out),
        ScenarioKind::IlwLimit => run_ilw_limit(sc, &mut out),
        ScenarioKind::GaugeCheck => run_gauge_check(sc, &mut out),
        ScenarioKind::SymbolAudit => run_symbol_audit(&mut out, Some(&sc.solver.symbol)),
        ScenarioKind::Isospectral => run_isospectral(sc, &mut out),
        ScenarioKind::Tightness => run_tightness(sc, &mut out),
    };
    if let Err(e) = result {
        log::error!("{} failed: {e}", sc.kind);
        out.verdict(Verdict::failed(sc.kind.name(), e.to_string()));
    }
    record.manifest.wall_time_s = start.elapsed().as_secs_f64();
    record.manifest.tables = out.tables.iter().map(Table::file_name).collect();
    record.manifest.diagnostics = out.diagnostics;
    record.manifest.gauge = out.gauge;
    record.tables = out.tables;
    record.verdicts = out.verdicts;
    record.trajectory = out.trajectory;
    record
}

/// `-slope` of the least-squares line through `(ln x, ln y)`; nonpositive `y` are skipped.
pub fn fitted_order(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return if ys.iter().all(|y| *y == 0.0) { f64::INFINITY } else { f64::NAN };
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    -sxy / sxx
}

fn record_self_check(sc: &Scenario, u0: &TorusField, cfg: &SolverConfig, out: &mut Outcome) -> Result<()> {
    if !sc.self_check {
        return Ok(());
    }
    let estimate = self_check(u0, cfg)?;
    out.diag("self_check", estimate);
    if sc.self_check_tolerance > 0.0 {
        out.verdict(Verdict::check(
            "self-check",
            estimate,
            Comparison::AtMost,
            sc.self_check_tolerance,
        ));
    }
    Ok(())
}

/// `sup_t |mean u(t) - mean u(0) e^{a(0) t}|`, relative to `1 + |mean u(0)| e^{a(0) t}`.
fn mean_law_residual(traj: &Trajectory) -> f64 {
    let a0 = traj.config.symbol.eval(0).re;
    let m0 = traj.states.first().map_or(0.0, TorusField::mean);
    traj.iter()
        .map(|(t, u)| {
            let expected = m0 * (a0 * t).exp();
            (u.mean() - expected).abs() / (1.0 + expected.abs())
        })
        .fold(0.0, f64::max)
}

fn run_evolve(sc: &Scenario, out: &mut Outcome) -> Result<()> {
    let u0 = sc.initial_state()?;
    let traj = evolve(&u0, &sc.solver)?;
    let mut table = Table::new("evolution", &["t", "l2_norm", "mean"]);
    for (t, u) in traj.iter() {
        table.push(&[t, u.l2_norm(), u.mean()]);
    }
    out.tables.push(table);
    out.verdict(Verdict::check(
        "mean-law",
        mean_law_residual(&traj),
        Comparison::AtMost,
        MEAN_DRIFT_TOL,
    ));
    record_self_check(sc, &u0, &sc.solver, out)?;
    out.trajectory = Some(traj);
    Ok(())
}

fn drift_tables(report: &DriftReport) -> (Table, Table) {
    let mut drift = Table::new("drift", &["t", "beta", "rel_drift"]);
    let mut beta = Table::new("beta", &["t", "kappa", "beta", "beta_s"]);
    for (row, rel) in report.rows.iter().zip(report.rel_drifts()) {
        drift.push(&[row.t, row.beta, rel]);
        beta.push(&[row.t, report.kappa, row.beta, row.beta_s]);
    }
    (drift, beta)
}

fn run_bo_conservation(sc: &Scenario, out: &mut Outcome) -> Result<()> {
    let u0 = sc.initial_state()?;
    let traj = evolve(&u0, &sc.solver)?;
    let report = beta_drift_report(&traj, sc.lax.kappa, sc.lax.s, sc.lax.dim)?;
    let (drift, beta) = drift_tables(&report);
    out.tables.push(drift);
    out.tables.push(beta);
    out.diag("M", sc.lax.dim as f64);
    out.diag("max_rel_drift_beta_s", report.max_rel_drift_beta_s);
    out.diag("max_quadrature_error", report.max_quad_error);
    out.diag("bo_direction_t0", bo_direction_check(&u0, sc.lax.kappa, sc.lax.dim)?);
    out.verdict(Verdict::check(
        "beta-drift",
        report.max_rel_drift_beta,
        Comparison::AtMost,
        BETA_DRIFT_TOL,
    ));
    out.verdict(Verdict::check(
        "mean-law",
        mean_law_residual(&traj),
        Comparison::AtMost,
        MEAN_DRIFT_TOL,
    ));
    record_self_check(sc, &u0, &sc.solver, out)
}

/// Real symbol with `a(n) <= 0` on the working band and not identically zero.
fn is_dissipative(sym: &MultiplierSymbol, modes: usize) -> bool {
    let values = sym.tabulate(modes);
    values.iter().all(|a| a.im == 0.0 && a.re <= 0.0) && values.iter().any(|a| a.re < 0.0)
}

fn relative_change(reference: f64, other: f64) -> f64 {
    if reference == other {
        0.0
    } else {
        (other - reference).abs() / reference.abs()
    }
}

fn run_exp_bound(sc: &Scenario, out: &mut Outcome) -> Result<()> {
    let u0 = sc.initial_state()?;
    let (kappa, s, dim) = (sc.lax.kappa, sc.lax.s, sc.lax.dim);
    let mut half = sc.solver.clone();
    half.dt /= 2.0;
    half.sample_every *= 2;
    let (base, fine) = rayon::join(|| evolve(&u0, &sc.solver), || evolve(&u0, &half));
    let (base, fine) = (base?, fine?);
    let reports = [(&base, dim), (&fine, dim), (&base, 2 * dim)]
        .par_iter()
        .map(|(traj, m)| beta_drift_report(traj, kappa, s, *m))
        .collect::<Result<Vec<_>>>()?;
    let (r0, r_dt, r_m) = (&reports[0], &reports[1], &reports[2]);
    let k = r0.k_fit;

    let mut growth = Table::new("growth", &["t", "beta_s", "log_growth", "bound"]);
    let mut excess = f64::NEG_INFINITY;
    for (row, lg) in r0.rows.iter().zip(r0.log_growth()) {
        growth.push(&[row.t, row.beta_s, lg, k * row.t]);
        excess = excess.max(lg - k * row.t);
    }
    let mut fits = Table::new("k_fit", &["dt", "M", "k_fit"]);
    fits.push(&[sc.solver.dt, dim as f64, k]);
    fits.push(&[half.dt, dim as f64, r_dt.k_fit]);
    fits.push(&[sc.solver.dt, (2 * dim) as f64, r_m.k_fit]);
    out.tables.push(growth);
    out.tables.push(fits);
    out.diag("k_fit", k);
    out.diag("max_quadrature_error", r0.max_quad_error);

    out.verdict(
        Verdict::check(
            "growth-bound",
            if k.is_finite() { excess } else { f64::NAN },
            Comparison::AtMost,
            GROWTH_BOUND_SLACK,
        )
        .with_note(format!("K_fit = {k:e}")),
    );
    out.verdict(Verdict::check(
        "k-fit-dt-stability",
        relative_change(k, r_dt.k_fit),
        Comparison::AtMost,
        K_FIT_STABILITY,
    ));
    out.verdict(Verdict::check(
        "k-fit-M-stability",
        relative_change(k, r_m.k_fit),
        Comparison::AtMost,
        K_FIT_STABILITY,
    ));
    if is_dissipative(&sc.solver.symbol, sc.solver.modes) {
        out.verdict(Verdict::check(
            "k-fit-dissipative",
            k,
            Comparison::AtMost,
            DISSIPATIVE_K_FIT_MAX,
        ));
    }
    record_self_check(sc, &u0, &sc.solver, out)
}

fn with_symbol(cfg: &SolverConfig, symbol: MultiplierSymbol) -> SolverConfig {
    let mut c = cfg.clone();
    c.symbol = symbol;
    c
}

fn sup_distance(a: &Trajectory, b: &Trajectory, mut dist: impl FnMut(f64, &TorusField, &TorusField) -> Result<f64>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for ((t, x), y) in a.iter().zip(&b.states) {
        worst = worst.max(dist(t, x, y)?);
    }
    Ok(worst)
}

fn run_ilw_limit(sc: &Scenario, out: &mut Outcome) -> Result<()> {
    let u0 = sc.initial_state()?;
    let r = sc.limit_s;
    let reference = evolve(&u0, &with_symbol(&sc.solver, zero_symbol()))?;
    let rows = sc
        .limit_deltas
        .par_iter()
        .map(|&delta| -> Result<[f64; 4]> {
            let lab = evolve(&u0, &with_symbol(&sc.solver, ilw_full_symbol(delta)?))?;
            let boosted = evolve(&u0, &with_symbol(&sc.solver, ilw_boosted_symbol(delta)?))?;
            let lab_err = sup_distance(&lab, &reference, |_, x, y| sobolev_norm(&(x - y), r, 1.0))?;
            let boosted_err = sup_distance(&boosted, &reference, |_, x, y| sobolev_norm(&(x - y), r, 1.0))?;
            let mismatch = sup_distance(&lab, &boosted, |t, x, y| Ok((&boost_frame(x, t, delta) - y).l2_norm()))?;
            Ok([delta, lab_err, boosted_err, mismatch])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new("limit", &["delta", "lab_error", "boosted_error", "frame_mismatch"]);
    for row in &rows {
        table.push(row);
    }
    out.tables.push(table);
    let deltas: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let lab: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let boosted: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let order = fitted_order(&deltas, &boosted);
    out.diag("lab_order", fitted_order(&deltas, &lab));
    out.verdict(Verdict::check("boosted-order", order, Comparison::AtLeast, LIMIT_ORDER_MIN));
    let increases = lab.windows(2).filter(|w| !(w[1] < w[0])).count();
    out.verdict(
        Verdict::check("lab-decreasing", increases as f64, Comparison::AtMost, 0.0)
            .with_note("count of non-decreasing steps along the ladder"),
    );
    let mismatch = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    out.verdict(Verdict::check(
        "frame-consistency",
        mismatch,
        Comparison::AtMost,
        FRAME_MISMATCH_TOL,
    ));
    record_self_check(sc, &u0, &with_symbol(&sc.solver, zero_symbol()), out)
}

fn run_gauge_check(sc: &Scenario, out: &mut Outcome) -> Result<()> {
    let u0 = sc.initial_state()?;
    let a0 = sc.solver.symbol.eval(0).re;
    let gp = gauge_params(a0, &u0);
    let v0 = to_zero_mean(&u0, 0.0, &gp)?;
    let (direct, gauged) = rayon::join(|| evolve(&u0, &sc.solver), || evolve(&v0, &sc.solver));
    let (direct, gauged) = (direct?, gauged?);

    let mut table = Table::new("gauge", &["t", "c", "d", "l2_difference", "zero_mean_residual"]);
    let mut worst_mean: f64 = 0.0;
    let mut worst_trip: f64 = 0.0;
    let mut final_diff = f64::NAN;
    for ((t, u), v) in direct.iter().zip(&gauged.states) {
        let diff = (&from_zero_mean(v, t, &gp) - u).l2_norm();
        let trip = (&from_zero_mean(&to_zero_mean(u, t, &gp)?, t, &gp) - u).l2_norm() / (1.0 + u.l2_norm());
        table.push(&[t, gp.c(t), gp.d(t), diff, v.mean()]);
        worst_mean = worst_mean.max(v.mean().abs());
        worst_trip = worst_trip.max(trip);
        final_diff = diff;
    }
    out.tables.push(table);
    out.gauge = Some(gp);
    out.verdict(
        Verdict::check("gauge-equivalence", final_diff, Comparison::AtMost, GAUGE_TOL)
            .with_note(format!("L2 distance at T = {}", sc.solver.horizon)),
    );
    out.verdict(Verdict::check("zero-mean", worst_mean, Comparison::AtMost, MEAN_DRIFT_TOL));
    out.verdict(Verdict::check("round-trip", worst_trip, Comparison::AtMost, ROUND_TRIP_TOL));
    out.verdict(Verdict::check(
        "mean-law",
        mean_law_residual(&direct),
        Comparison::AtMost,
        MEAN_DRIFT_TOL,
    ));
    record_self_check(sc, &u0, &sc.solver, out)
}

/// Every shipped bounded symbol, plus `extra` if it claims boundedness.
pub fn audited_symbols(extra: Option<&MultiplierSymbol>) -> Result<Vec<MultiplierSymbol>> {
    let mut symbols = vec![zero_symbol(), rayleigh_symbol(-1.0), rayleigh_symbol(1.0), smith_symbol()];
    for delta in AUDIT_DEPTHS {
        symbols.push(ilw_boosted_symbol(delta)?);
    }
    if let Some(sym) = extra {
        if sym.claims_bounded && !symbols.contains(sym) {
            symbols.push(sym.clone());
        }
    }
    Ok(symbols)
}

fn run_symbol_audit(out: &mut Outcome, extra: Option<&MultiplierSymbol>) -> Result<()> {
    let symbols = audited_symbols(extra)?;
    let mut table = Table::new("symbols", &["name", "delta", "sup_256", "sup_512", "real_symmetric"]);
    let mut asymmetric = 0;
    let mut worst_stability: f64 = 0.0;
    for sym in &symbols {
        let (s1, s2) = (sup_norm(sym, SYMBOL_NMAX / 2), sup_norm(sym, SYMBOL_NMAX));
        let symmetric = check_real_symmetry(sym, SYMBOL_NMAX);
        if !symmetric {
            asymmetric += 1;
        }
        // Smith approaches its supremum 1/2 only like n^{-2}; smith-asymptotics covers it.
        if sym.kind != SymbolKind::Smith {
            worst_stability = worst_stability.max(relative_change(s1, s2));
        }
        table.push_cells(vec![
            sym.name.clone(),
            sym.delta().map_or_else(|| "".into(), |d| d.to_string()),
            s1.to_string(),
            s2.to_string(),
            u8::from(symmetric).to_string(),
        ]);
    }
    out.tables.push(table);
    out.verdict(Verdict::check("real-symmetry", asymmetric as f64, Comparison::AtMost, 0.0));
    out.verdict(
        Verdict::check("sup-stability", worst_stability, Comparison::Below, SUP_STABILITY_TOL)
            .with_note("relative change of sup|a(n)| from n <= 256 to n <= 512, smith excluded"),
    );

    let mut sups = Table::new("boosted_sup", &["delta", "sup"]);
    let mut scaled: f64 = 0.0;
    let mut fit = (Vec::new(), Vec::new());
    for delta in AUDIT_DEPTHS {
        let sup = sup_norm(&ilw_boosted_symbol(delta)?, SYMBOL_NMAX / 2);
        sups.push(&[delta, sup]);
        scaled = scaled.max(sup * delta * delta);
        if delta >= 2.0 {
            fit.0.push(delta);
            fit.1.push(sup);
        }
    }
    out.tables.push(sups);
    out.verdict(Verdict::check(
        "boosted-sup-order",
        fitted_order(&fit.0, &fit.1),
        Comparison::AtLeast,
        BOOSTED_ORDER_MIN,
    ));
    out.verdict(
        Verdict::check("boosted-sup-bound", scaled, Comparison::AtMost, BOOSTED_SUP_CONSTANT)
            .with_note("max over depths of delta^2 sup|a(n)|"),
    );

    let smith = smith_symbol();
    let mut dev = Table::new("smith_deviation", &["n", "deviation"]);
    let mut worst: f64 = 0.0;
    for n in 2..=SYMBOL_NMAX as i64 {
        let d = (smith.eval(n) - Complex64::new(0.0, 0.5)).norm();
        dev.push(&[n as f64, d]);
        worst = worst.max(d * (n * n) as f64);
    }
    out.tables.push(dev);
    out.verdict(
        Verdict::check("smith-asymptotics", worst, Comparison::AtMost, SMITH_DEVIATION_CONSTANT)
            .with_note("max over 2 <= n <= 512 of n^2 |a(n) - i/2|"),
    );
    Ok(())
}

fn run_isospectral(sc: &Scenario, out: &mut Outcome) -> Result<()> {
    let u0 = sc.initial_state()?;
    let traj = evolve(&u0, &sc.solver)?;
    let count = sc.lax.gaps;
    let spectra = traj
        .states
        .par_iter()
        .map(|u| -> Result<(Vec<f64>, Vec<f64>)> {
            let lax = build_lax(&u.zero_mean(), sc.lax.dim)?;
            let mut ev = lax.eigenvalues();
            ev.truncate(count);
            Ok((ev, eigen_gaps(&lax, count)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let numbered = |prefix: &str, from: usize| -> Vec<String> {
        std::iter::once("t".to_string())
            .chain((from..from + count).map(|i| format!("{prefix}_{i}")))
            .collect()
    };
    let mk = |name: &str, cols: Vec<String>| Table {
        name: name.into(),
        columns: cols,
        rows: Vec::new(),
    };
    let mut eig_table = mk("eigenvalues", numbered("lambda", 0));
    let mut gap_table = mk("gaps", numbered("gamma", 1));
    let mut omega_table = mk("omega", numbered("omega", 1));
    let (ev0, gaps0) = &spectra[0];
    let omega0: Vec<f64> = (1..=count).map(|n| omega(&ActionSequence::from_gaps(gaps0), n)).collect();
    let mut eig_drift: f64 = 0.0;
    let mut omega_drift: f64 = 0.0;
    for (t, (ev, gaps)) in traj.times.iter().zip(&spectra) {
        let actions = ActionSequence::from_gaps(gaps);
        let om: Vec<f64> = (1..=count).map(|n| omega(&actions, n)).collect();
        eig_drift = ev.iter().zip(ev0).map(|(a, b)| (a - b).abs()).fold(eig_drift, f64::max);
        omega_drift = om.iter().zip(&omega0).map(|(a, b)| (a - b).abs()).fold(omega_drift, f64::max);
        let row = |vals: &[f64]| std::iter::once(*t).chain(vals.iter().copied()).collect::<Vec<f64>>();
        eig_table.push(&row(ev));
        gap_table.push(&row(gaps));
        omega_table.push(&row(&om));
    }
    out.tables.extend([eig_table, gap_table, omega_table]);
    out.diag("M", sc.lax.dim as f64);
    out.verdict(Verdict::check(
        "eigenvalue-drift",
        eig_drift,
        Comparison::AtMost,
        EIGEN_DRIFT_TOL,
    ));
    out.verdict(
        Verdict::check("omega-invariance", omega_drift, Comparison::AtMost, OMEGA_DRIFT_TOL)
            .with_note("diagnostic: eigenvalue gaps used as actions"),
    );
    record_self_check(sc, &u0, &sc.solver, out)
}

/// Cutoffs `1, 2, 4, ...` up to `N`, plus `N/2`.
pub fn tail_cutoffs(modes: usize) -> Vec<usize> {
    let mut cuts: Vec<usize> = std::iter::successors(Some(1usize), |c| Some(c * 2))
        .take_while(|c| *c <= modes)
        .collect();
    cuts.push((modes / 2).max(1));
    cuts.sort_unstable();
    cuts.dedup();
    cuts
}

/// (sequence tails, Fourier tails) per cutoff, maximized over one trajectory.
type MemberTails = (Vec<f64>, Vec<f64>);

fn run_tightness(sc: &Scenario, out: &mut Outcome) -> Result<()> {
    let u0 = sc.initial_state()?;
    let s = sc.tightness_s;
    let modes = sc.solver.modes;
    let cutoffs = tail_cutoffs(modes);
    let gap_count = modes.min(sc.lax.dim - 1);
    let mut family: Vec<MultiplierSymbol> = sc
        .tightness_deltas
        .iter()
        .map(|&d| ilw_boosted_symbol(d))
        .collect::<Result<_>>()?;
    family.push(zero_symbol());

    let per_member = family
        .par_iter()
        .map(|sym| -> Result<MemberTails> {
            let traj = evolve(&u0, &with_symbol(&sc.solver, sym.clone()))?;
            let mut seq = vec![0.0f64; cutoffs.len()];
            let mut fourier = vec![0.0f64; cutoffs.len()];
            for u in &traj.states {
                let lax = build_lax(&u.zero_mean(), sc.lax.dim)?;
                let z = BirkhoffState::from_actions(&ActionSequence::from_gaps(&eigen_gaps(&lax, gap_count)?));
                for (i, &c) in cutoffs.iter().enumerate() {
                    seq[i] = seq[i].max(h_tail_norm(&z, s, c));
                    fourier[i] = fourier[i].max(tail_norm(u, s, c));
                }
            }
            Ok((seq, fourier))
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_over = |pick: fn(&MemberTails) -> &Vec<f64>| -> Vec<f64> {
        (0..cutoffs.len())
            .map(|i| per_member.iter().map(|m| pick(m)[i]).fold(0.0, f64::max))
            .collect()
    };
    let seq = sup_over(|m| &m.0);
    let fourier = sup_over(|m| &m.1);

    let mut table = Table::new("tightness", &["cutoff", "sequence_tail", "fourier_tail"]);
    for (i, &c) in cutoffs.iter().enumerate() {
        table.push(&[c as f64, seq[i], fourier[i]]);
    }
    out.tables.push(table);
    let half = cutoffs.iter().position(|&c| c == (modes / 2).max(1)).expect("N/2 is a cutoff");
    for (label, tails) in [("sequence", &seq), ("fourier", &fourier)] {
        let rises = tails.windows(2).filter(|w| w[1] > w[0]).count();
        out.verdict(Verdict::check(
            &format!("{label}-tail-monotone"),
            rises as f64,
            Comparison::AtMost,
            0.0,
        ));
        let ratio = if tails[0] == 0.0 { 0.0 } else { tails[half] / tails[0] };
        out.verdict(
            Verdict::check(&format!("{label}-tail-ratio"), ratio, Comparison::Below, TIGHTNESS_RATIO)
                .with_note(format!("tail at cutoff {} over full norm", cutoffs[half])),
        );
    }
    Ok(())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn table_bytes(table: &Table) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| Error::Format(e.to_string()))
}

/// Writes the record into `dir`; returns the paths written. Re-emitting the
/// same record produces the same files.
pub fn emit_report(rec: &RunRecord, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut manifest = rec.manifest.clone();
    manifest.tables = rec.tables.iter().map(Table::file_name).collect();
    manifest.snapshots.clear();

    for table in &rec.tables {
        let path = dir.join(table.file_name());
        write_atomic(&path, &table_bytes(table)?)?;
        written.push(path);
    }
    if !rec.verdicts.is_empty() {
        let mut w = csv::Writer::from_writer(Vec::new());
        for v in &rec.verdicts {
            w.serialize(v)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        let path = dir.join("verdicts.csv");
        write_atomic(&path, &bytes)?;
        written.push(path);
        let path = dir.join("verdicts.txt");
        write_atomic(&path, rec.summary().as_bytes())?;
        written.push(path);
    }
    if let Some(traj) = &rec.trajectory {
        for name in ["trajectory.json", "trajectory.bin"] {
            let path = dir.join(name);
            if name.ends_with("json") {
                save_snapshot(traj, &path)?;
            } else {
                save_binary(traj, &path)?;
            }
            manifest.snapshots.push(name.into());
            written.push(path);
        }
    }
    let path = dir.join("manifest.json");
    write_atomic(&path, serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    written.push(path);
    Ok(written)
}

/// Reads back a record written by [`emit_report`].
pub fn load_record(dir: &Path) -> Result<RunRecord> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let mut tables = Vec::new();
    for file in &manifest.tables {
        let mut reader = csv::Reader::from_path(dir.join(file))?;
        let columns = reader.headers()?.iter().map(String::from).collect();
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(String::from).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
        tables.push(Table {
            name: file.trim_end_matches(".csv").to_string(),
            columns,
            rows,
        });
    }
    let verdict_path = dir.join("verdicts.csv");
    let verdicts = if verdict_path.exists() {
        csv::Reader::from_path(verdict_path)?
            .deserialize()
            .collect::<std::result::Result<Vec<Verdict>, _>>()?
    } else {
        Vec::new()
    };
    let trajectory = if manifest.snapshots.iter().any(|s| s == "trajectory.json") {
        Some(load_snapshot(&dir.join("trajectory.json"))?)
    } else {
        None
    };
    Ok(RunRecord {
        manifest,
        tables,
        verdicts,
        trajectory,
    })
}
