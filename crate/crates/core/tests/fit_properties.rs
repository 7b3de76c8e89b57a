use equil_core::fit::{fit_named, MIN_R2};
use equil_core::{fit_loglog, Error};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn one_percent_noise_keeps_the_slope() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let xs = [0.1, 0.05, 0.025];
    for _ in 0..200 {
        let a = rng.gen_range(-2.0..3.0);
        let c = rng.gen_range(0.1..10.0);
        let ys: Vec<f64> = xs.iter().map(|&x: &f64| c * x.powf(a) * (1.0 + rng.gen_range(-0.01..0.01))).collect();
        let f = fit_loglog(&xs, &ys, a, 0.05).unwrap();
        assert!((f.slope - a).abs() <= 0.05, "{f:?}");
    }
}

#[test]
fn quantity_name_is_kept() {
    let f = fit_named("supp_y", &[1.0, 2.0, 4.0], &[1.0, 2.0, 4.0], 1.0, 0.2).unwrap();
    assert_eq!(f.quantity, "supp_y");
    assert!(f.pass);
}

#[test]
fn mismatched_lengths_are_rejected() {
    assert!(matches!(fit_loglog(&[1.0, 2.0, 3.0], &[1.0, 2.0], 1.0, 0.1), Err(Error::Precondition(_))));
}

proptest! {
    #[test]
    fn exact_power_laws_are_recovered(
        a in -4.0f64..4.0,
        c in 1e-3f64..1e3,
        xs in prop::collection::btree_set(1u32..1000, 3..8),
    ) {
        let xs: Vec<f64> = xs.into_iter().map(|k| k as f64 * 1e-3).collect();
        let ys: Vec<f64> = xs.iter().map(|x| c * x.powf(a)).collect();
        let f = fit_loglog(&xs, &ys, a, 1e-6).unwrap();
        prop_assert!((f.slope - a).abs() <= 1e-9);
        prop_assert!((f.intercept - c.ln()).abs() <= 1e-8);
        prop_assert!(f.pass);
    }

    #[test]
    fn verdict_matches_its_definition(
        ys in prop::collection::vec(0.01f64..100.0, 4),
        predicted in -3.0f64..3.0,
        tol in 0.0f64..1.0,
    ) {
        let xs = [0.1, 0.2, 0.4, 0.8];
        let f = fit_loglog(&xs, &ys, predicted, tol).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f.r2));
        prop_assert_eq!(f.pass, (f.slope - predicted).abs() <= tol && f.r2 >= MIN_R2);
    }

    #[test]
    fn rescaling_data_only_moves_the_intercept(k in 0.01f64..100.0, ys in prop::collection::vec(0.01f64..100.0, 3)) {
        let xs = [1.0, 2.0, 3.0];
        let a = fit_loglog(&xs, &ys, 0.0, 1.0).unwrap();
        let scaled: Vec<f64> = ys.iter().map(|y| k * y).collect();
        let b = fit_loglog(&xs, &scaled, 0.0, 1.0).unwrap();
        prop_assert!((a.slope - b.slope).abs() <= 1e-9);
        prop_assert!((b.intercept - a.intercept - k.ln()).abs() <= 1e-9);
    }
}
