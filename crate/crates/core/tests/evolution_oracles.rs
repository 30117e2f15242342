//! Frozen values for the standard datum `2cos x + 0.5 sin 2x` under BO,
//! N = 128, dt = 1e-3, T = 1, cross-checked against an independent
//! integrating-factor implementation.

use bopert::evolution::{evolve, self_check, standard_initial_data, SolverConfig};
use bopert::lax::beta_drift_report;
use bopert::multipliers::{smith_symbol, zero_symbol};

fn bo_config(modes: usize) -> SolverConfig {
    let mut cfg = SolverConfig::new(modes, zero_symbol());
    cfg.sample_every = 50;
    cfg
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn standard_run_matches_frozen_values() {
    let u0 = standard_initial_data(128);
    let cfg = bo_config(128);
    let traj = evolve(&u0, &cfg).unwrap();
    assert_eq!(traj.len(), 21);
    assert!((traj.times[20] - 1.0).abs() <= 1e-15);

    let l2_drift = (traj.final_state().unwrap().l2_norm() - u0.l2_norm()).abs();
    assert!(rel(l2_drift, 2.2999e-6) <= 1e-3, "{l2_drift:e}");

    let report = beta_drift_report(&traj, 8.0, -0.25, 256).unwrap();
    assert!(rel(report.rows[0].beta, 0.120_754_938_819_857_06) <= 1e-12);
    assert!(rel(report.max_rel_drift_beta, 3.4866e-6) <= 1e-3, "{:e}", report.max_rel_drift_beta);

    let mut final_only = cfg.clone();
    final_only.sample_every = 1_000_000;
    let at_final = self_check(&u0, &final_only).unwrap();
    assert!(rel(at_final, 1.419_886_7e-5) <= 1e-4, "{at_final:e}");
    assert!(self_check(&u0, &cfg).unwrap() >= at_final);
}

#[test]
fn time_stepping_is_fourth_order() {
    let u0 = standard_initial_data(32);
    let mut cfg = bo_config(32);
    cfg.horizon = 0.25;
    cfg.sample_every = 1_000_000;
    let errors: Vec<f64> = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| {
            cfg.dt = dt;
            self_check(&u0, &cfg).unwrap()
        })
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 3.7, "{errors:?}");
    }
}

#[test]
fn mean_is_conserved_for_mean_free_symbols() {
    let u0 = standard_initial_data(64).add_mean(0.5);
    for symbol in [zero_symbol(), smith_symbol()] {
        let mut cfg = bo_config(64);
        cfg.symbol = symbol;
        let traj = evolve(&u0, &cfg).unwrap();
        for u in &traj.states {
            assert!((u.mean() - 0.5).abs() <= 1e-12);
        }
    }
}
