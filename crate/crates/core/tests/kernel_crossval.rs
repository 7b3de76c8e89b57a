mod common;

use common::{cos4_bump, mask, rel_l2};
use equil_core::greenkernel::convolve;
use equil_core::poisson::solve;
use equil_core::variational::steiner;
use equil_core::{ChannelGrid, Field};
use std::f64::consts::PI;

fn grid() -> ChannelGrid {
    ChannelGrid::new(129, 65, 8.0).unwrap()
}

#[test]
fn convolution_matches_fast_solver_on_three_inputs() {
    let g = grid();
    let inputs = [
        cos4_bump(g, 0.0, 0.0, 1.5, 0.6),
        cos4_bump(g, 0.7, -0.3, 1.0, 0.4),
        Field::from_fn(g, |x, y| mask(x - 0.4, 2.0) * (1.0 - y * y).powi(3) * (1.0 + 0.5 * (2.0 * x).sin())),
    ];
    for (n, w) in inputs.iter().enumerate() {
        let direct = convolve(w);
        let fast = solve(w).unwrap().psi;
        let e = rel_l2(&direct, &fast);
        assert!(e <= 1e-3, "input {n}: relative L2 difference {e:e}");
    }
}

#[test]
fn modulated_sine_matches_convolution() {
    let g = grid();
    let (k, lx) = (2.0, g.lx());
    let w = Field::from_fn(g, |x, y| (PI * k * x / lx).sin() * (PI * (y + 1.0) / 2.0).sin() * mask(x, 2.0));
    let e = rel_l2(&convolve(&w), &solve(&w).unwrap().psi);
    assert!(e <= 1e-3, "{e:e}");
}

#[test]
fn potential_of_nonnegative_vorticity_is_positive_inside() {
    let g = ChannelGrid::new(65, 33, 4.0).unwrap();
    let w = cos4_bump(g, 0.3, 0.2, 0.8, 0.3);
    let psi = convolve(&w);
    for i in 0..g.nx() {
        for j in 1..g.ny() - 1 {
            assert!(psi.get(i, j) > 0.0, "psi({i},{j}) = {}", psi.get(i, j));
        }
    }
}

#[test]
fn symmetric_potential_decays_like_mass_over_distance() {
    let g = ChannelGrid::new(161, 65, 8.0).unwrap();
    let w = steiner(&cos4_bump(g, 0.35, 0.1, 1.2, 0.5)).unwrap();
    let m = w.integrate();
    let psi = solve(&w).unwrap().psi;
    for i in 0..g.nx() {
        let x = g.x(i);
        if x.abs() >= 2.0 {
            for j in 0..g.ny() {
                assert!(psi.get(i, j) <= 5.0 * m / x.abs(), "x = {x}");
            }
        }
    }
}

#[test]
fn potential_bound_scales_like_mass_times_log() {
    // The most concentrated admissible datum: a disk at the amplitude cap
    // carrying mass ε².
    let q = 0.05;
    for eps in [0.1, 0.05, 0.025f64] {
        let g = ChannelGrid::new(257, 257, 2.0).unwrap();
        let amp = eps.powf(1.0 - q);
        let r = (eps * eps / (PI * amp)).sqrt();
        let mut w = Field::from_fn(g, |x, y| if x * x + y * y <= r * r { amp } else { 0.0 });
        let m = w.integrate();
        w = w.scaled((eps * eps / m).min(1.0));
        assert!(w.integrate() <= eps * eps * (1.0 + 1e-12) && w.max() <= amp);
        let psi = solve(&w).unwrap().psi;
        let c = psi.max_abs() / (eps * eps * eps.ln().abs());
        assert!(c <= 20.0, "eps {eps}: constant {c}");
    }
}
