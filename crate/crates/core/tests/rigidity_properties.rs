mod common;

use common::cos4_bump;
use equil_core::poisson::solve;
use equil_core::rigidity::{critical_layer, energy_identity_stats, euler_frame, LayerRegime};
use equil_core::{ChannelGrid, Field, PoissonSolution};
use proptest::prelude::*;

/// `ψ = (1 − y²)² e^{−x²}` with its exact vorticity and velocity.
fn manufactured(g: ChannelGrid) -> (Field, PoissonSolution) {
    let psi = Field::from_fn(g, |x, y| (1.0 - y * y).powi(2) * (-x * x).exp());
    let omega = Field::from_fn(g, |x, y| {
        let e = (-x * x).exp();
        -((4.0 * x * x - 2.0) * e * (1.0 - y * y).powi(2) + e * (12.0 * y * y - 4.0))
    });
    let ux = Field::from_fn(g, |x, y| -4.0 * y * (1.0 - y * y) * (-x * x).exp());
    let uy = Field::from_fn(g, |x, y| 2.0 * x * (1.0 - y * y).powi(2) * (-x * x).exp());
    let sol = PoissonSolution {
        psi,
        ux,
        uy,
        residual_l2: 0.0,
        warnings: Vec::new(),
    };
    (omega, sol)
}

#[test]
fn energy_identity_on_a_manufactured_field() {
    let mut errs = Vec::new();
    for (nx, ny) in [(129, 33), (257, 65), (513, 129)] {
        let g = ChannelGrid::new(nx, ny, 6.0).unwrap();
        let (omega, sol) = manufactured(g);
        let st = energy_identity_stats(&omega, &sol, 0.0).unwrap();
        let e = st.identity_error().unwrap();
        assert!(e <= 0.02, "{nx}x{ny}: {e:e}");
        errs.push(e);
    }
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.8, "{errs:?}");
    }
}

#[test]
fn energy_identity_with_the_fast_solver() {
    let g = ChannelGrid::new(257, 129, 4.0).unwrap();
    let omega = cos4_bump(g, 0.0, 0.1, 1.0, 0.5);
    let sol = solve(&omega).unwrap();
    let e = energy_identity_stats(&omega, &sol, 0.0).unwrap().identity_error().unwrap();
    assert!(e <= 0.02, "{e:e}");
}

#[test]
fn shear_flow_has_no_vertical_velocity() {
    let g = ChannelGrid::new(33, 17, 2.0).unwrap();
    let omega = Field::from_fn(g, |_, y| 1.0 - y * y);
    let sol = solve(&omega).unwrap();
    let st = energy_identity_stats(&omega, &sol, 0.0).unwrap();
    assert!(st.lhs.abs() < 1e-20 && st.rhs_direct.abs() < 1e-20, "{st:?}");

    // With an exactly vanishing u^y the ratio is undefined.
    let exact = PoissonSolution {
        uy: Field::zeros(g),
        ..sol
    };
    let st = energy_identity_stats(&omega, &exact, 0.0).unwrap();
    assert_eq!((st.lhs, st.rhs_direct), (0.0, 0.0));
    assert!(st.ratio.is_none() && st.identity_error().is_none());
}

#[test]
fn couette_layer_sits_at_the_centre_line() {
    let g = ChannelGrid::new(17, 9, 2.0).unwrap();
    let zero = Field::zeros(g);
    let l = critical_layer(&zero, 0.0);
    assert!(l.monotone_ok);
    assert!(l.ystar.iter().all(|&y| y == 0.0));
    assert!(l.regime.iter().all(|&r| r == LayerRegime::InteriorRoot));

    let l = critical_layer(&zero, 2.0);
    assert!(l.ystar.iter().all(|&y| y == -1.0));
    assert!(l.regime.iter().all(|&r| r == LayerRegime::ClampedLow));
    let l = critical_layer(&zero, -2.0);
    assert!(l.regime.iter().all(|&r| r == LayerRegime::ClampedHigh));
}

#[test]
fn euler_frame_flips_signs() {
    let g = ChannelGrid::new(17, 9, 2.0).unwrap();
    let w = cos4_bump(g, 0.0, 0.0, 1.0, 0.5);
    let (e, c) = euler_frame(&w, 0.3);
    assert_eq!(c, -0.3);
    assert_eq!(e.values()[g.index(g.center_i(), g.center_j())], -1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn layer_bounds_hold_for_weak_flows(
        amp in -0.5f64..0.5,
        x0 in -0.5f64..0.5,
        y0 in -0.4f64..0.4,
        c in -0.9f64..0.9,
    ) {
        let g = ChannelGrid::new(65, 33, 3.0).unwrap();
        let omega = cos4_bump(g, x0, y0, 0.8, 0.4).scaled(amp);
        let sol = solve(&omega).unwrap();
        let layer = critical_layer(&sol.ux, c);
        if layer.monotone_ok {
            prop_assert!(layer.lower_bound_holds(&sol.ux), "margin {}", layer.lower_bound_margin(&sol.ux));
            for r in layer.root_residuals(&sol.ux) {
                prop_assert!(r.abs() <= 1e-9, "residual {}", r);
            }
        }
    }
}
