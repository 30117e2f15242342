use bopert::birkhoff::{h_norm, h_tail_norm, linear_flow, omega, ActionSequence, BirkhoffState};
use bopert::evolution::{evolve, rough_initial_data, SolverConfig};
use bopert::multipliers::smith_symbol;
use bopert::snapshot::{from_json, load_binary, load_snapshot, read_binary, save_binary, save_snapshot, to_json, write_binary};
use bopert::{Complex64, Trajectory};
use proptest::prelude::*;

fn short_run(modes: usize, seed: u64) -> Trajectory {
    let mut cfg = SolverConfig::new(modes, smith_symbol());
    cfg.horizon = 0.01;
    cfg.dt = 1e-3;
    cfg.sample_every = 3;
    evolve(&(&rough_initial_data(modes, -0.25, seed) * 0.2), &cfg).unwrap()
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let traj = short_run(8, 3);
    save_snapshot(&traj, &dir.path().join("t.json")).unwrap();
    save_binary(&traj, &dir.path().join("t.bin")).unwrap();
    assert_eq!(load_snapshot(&dir.path().join("t.json")).unwrap(), traj);
    let dump = load_binary(&dir.path().join("t.bin")).unwrap();
    assert_eq!((dump.modes, &dump.times, &dump.states), (8, &traj.times, &traj.states));
    assert!(load_snapshot(&dir.path().join("t.bin")).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn json_and_binary_are_lossless(modes in 2usize..12, seed in any::<u64>()) {
        let traj = short_run(modes, seed);
        prop_assert_eq!(&from_json(&to_json(&traj).unwrap()).unwrap(), &traj);
        let mut bytes = Vec::new();
        write_binary(&traj, &mut bytes).unwrap();
        prop_assert_eq!(bytes.len(), 16 + traj.len() * 8 * (1 + 2 * (modes + 1)));
        let dump = read_binary(bytes.as_slice()).unwrap();
        prop_assert_eq!(dump.states, traj.states);
        prop_assert_eq!(dump.times, traj.times);
    }

    #[test]
    fn linear_flow_preserves_actions(gamma in prop::collection::vec(0.0..1.0f64, 1..16), t in -5.0..5.0f64) {
        let actions = ActionSequence::new(gamma).unwrap();
        let z0 = BirkhoffState::from_actions(&actions);
        let zt = linear_flow(&z0, &actions, t);
        for (a, b) in ActionSequence::from_state(&zt).gamma().iter().zip(actions.gamma()) {
            prop_assert!((a - b).abs() <= 1e-14);
        }
        prop_assert!((h_norm(&zt, -0.25) - h_norm(&z0, -0.25)).abs() <= 1e-14);
    }

    #[test]
    fn frequencies_follow_the_closed_form(gamma in prop::collection::vec(0.0..1.0f64, 1..12), n in 1usize..16) {
        let actions = ActionSequence::new(gamma.clone()).unwrap();
        let coupling: f64 = gamma.iter().enumerate().map(|(i, g)| (i + 1).min(n) as f64 * g).sum();
        prop_assert!((omega(&actions, n) - ((n * n) as f64 - 2.0 * coupling)).abs() <= 1e-12);
    }

    #[test]
    fn h_tails_are_monotone(zeta in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..16), s in -0.5..0.5f64) {
        let z = BirkhoffState { zeta: zeta.into_iter().map(|(a, b)| Complex64::new(a, b)).collect() };
        let tails: Vec<f64> = (1..=z.zeta.len() + 1).map(|c| h_tail_norm(&z, s, c)).collect();
        prop_assert!(tails.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(tails[0], h_norm(&z, s));
    }
}
