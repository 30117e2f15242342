use bopert::spectral::{analyze, derivative, hilbert, sobolev_norm, synthesize, szego_project, tail_norm};
use bopert::{Complex64, TorusField};
use proptest::prelude::*;

fn field(max_modes: usize) -> impl Strategy<Value = TorusField> {
    (1..=max_modes).prop_flat_map(|n| {
        (-2.0..2.0f64, prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n)).prop_map(|(mean, rest)| {
            let mut coeffs = vec![Complex64::new(mean, 0.0)];
            coeffs.extend(rest.into_iter().map(|(re, im)| Complex64::new(re, im)));
            TorusField::from_coeffs(coeffs).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn synthesis_round_trips(u in field(24), extra in 0usize..9) {
        let points = 2 * u.modes() + 1 + extra;
        let samples = synthesize(&u, points).unwrap();
        let back = analyze(&samples, u.modes()).unwrap();
        prop_assert!((&back - &u).l2_norm() <= 1e-13 * (1.0 + u.l2_norm()));
    }

    #[test]
    fn parseval(u in field(24)) {
        let points = 2 * u.modes() + 1;
        let samples = synthesize(&u, points).unwrap();
        let mean_sq = samples.iter().map(|x| x * x).sum::<f64>() / points as f64;
        prop_assert!((mean_sq - u.l2_norm_sq()).abs() <= 1e-12 * (1.0 + mean_sq));
    }

    #[test]
    fn translation_is_an_isometry(u in field(16), theta in -10.0..10.0f64) {
        let v = u.translate(theta);
        prop_assert!((v.l2_norm() - u.l2_norm()).abs() <= 1e-12 * (1.0 + u.l2_norm()));
        prop_assert_eq!(v.mean(), u.mean());
        prop_assert!((&v.translate(-theta) - &u).l2_norm() <= 1e-12 * (1.0 + u.l2_norm()));
    }

    #[test]
    fn hilbert_squares_to_minus_identity_off_the_mean(u in field(16)) {
        let hh = hilbert(&hilbert(&u));
        prop_assert!((&hh + &u.zero_mean()).l2_norm() <= 1e-14 * (1.0 + u.l2_norm()));
    }

    #[test]
    fn derivative_kills_constants(u in field(16)) {
        prop_assert_eq!(derivative(&u).mean(), 0.0);
        prop_assert_eq!(derivative(&u.add_mean(1.5)), derivative(&u));
    }

    #[test]
    fn sobolev_norm_is_monotone(u in field(16), r in -1.0..1.0f64, dr in 0.0..1.0f64, kappa in 1.0..8.0f64) {
        let lo = sobolev_norm(&u, r, kappa).unwrap();
        let hi = sobolev_norm(&u, r + dr, kappa).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-14));
    }

    #[test]
    fn tails_shrink_with_the_cutoff(u in field(32), s in -0.5..0.5f64) {
        let tails: Vec<f64> = (0..=u.modes() + 1).map(|c| tail_norm(&u, s, c)).collect();
        prop_assert!(tails.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(*tails.last().unwrap(), 0.0);
    }

    #[test]
    fn szego_keeps_half_the_oscillation(u in field(16)) {
        let p = szego_project(&u.zero_mean());
        let half = u.zero_mean().l2_norm_sq() / 2.0;
        prop_assert!((p.norm_sq() - half).abs() <= 1e-13 * (1.0 + half));
    }
}
