mod common;

use common::cos4_bump;
use equil_core::grid::{gradient, inner};
use equil_core::poisson::{solve, PoissonSolver};
use equil_core::{ChannelGrid, Field};
use proptest::prelude::*;

#[test]
fn energy_identity_holds_on_refined_grids() {
    for (nx, ny) in [(257, 129), (513, 257)] {
        let g = ChannelGrid::new(nx, ny, 6.0).unwrap();
        let w = cos4_bump(g, 0.2, 0.1, 1.2, 0.5);
        let sol = solve(&w).unwrap();
        let lhs = inner(&w, &sol.psi).unwrap();
        let (px, py) = gradient(&sol.psi);
        let rhs = inner(&px, &px).unwrap() + inner(&py, &py).unwrap();
        let e = (lhs - rhs).abs() / lhs;
        assert!(e <= 1e-2, "{nx}x{ny}: {e:e}");
    }
}

#[test]
fn doubling_the_box_leaves_the_potential_unchanged() {
    // Same hx on both boxes so the nodes coincide.
    let n = 129;
    let a = ChannelGrid::new(n, 65, 8.0).unwrap();
    let b = ChannelGrid::new(2 * n - 1, 65, 8.0 * (2 * n - 1) as f64 / n as f64).unwrap();
    assert!((a.hx() - b.hx()).abs() < 1e-14);
    let wa = cos4_bump(a, 0.0, 0.0, 1.5, 0.4);
    let wb = cos4_bump(b, 0.0, 0.0, 1.5, 0.4);
    let pa = solve(&wa).unwrap().psi;
    let pb = solve(&wb).unwrap().psi;
    let shift = b.center_i() - a.center_i();
    let mut diff: f64 = 0.0;
    let mut top: f64 = 0.0;
    for i in 0..a.nx() {
        for j in 0..a.ny() {
            if wa.get(i, j) > 0.0 {
                diff = diff.max((pa.get(i, j) - pb.get(i + shift, j)).abs());
                top = top.max(pb.get(i + shift, j).abs());
            }
        }
    }
    assert!(diff <= 1e-4 * top, "{:e}", diff / top);
}

#[test]
fn zero_vorticity_gives_zero_flow() {
    let g = ChannelGrid::new(33, 17, 4.0).unwrap();
    let sol = solve(&Field::zeros(g)).unwrap();
    assert_eq!(sol.psi.max_abs(), 0.0);
    assert_eq!(sol.ux.max_abs(), 0.0);
    assert_eq!(sol.uy.max_abs(), 0.0);
}

#[test]
fn support_near_the_box_edge_is_flagged() {
    let g = ChannelGrid::new(65, 17, 4.0).unwrap();
    let w = cos4_bump(g, 3.7, 0.0, 0.4, 0.4);
    assert!(!solve(&w).unwrap().warnings.is_empty());
    let inside = cos4_bump(g, 0.0, 0.0, 0.8, 0.4);
    assert!(solve(&inside).unwrap().warnings.is_empty());
}

fn random_field(g: ChannelGrid, vals: &[f64]) -> Field {
    // Nonnegative data on a central patch away from the x-truncation.
    let mut f = Field::zeros(g);
    let c = g.center_i();
    let mut k = 0;
    for i in c - 4..=c + 4 {
        for j in 1..g.ny() - 1 {
            f.set(i, j, vals[k % vals.len()]);
            k += 1;
        }
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn maximum_principle(vals in prop::collection::vec(0.0f64..1.0, 40)) {
        let g = ChannelGrid::new(33, 17, 3.0).unwrap();
        let w = random_field(g, &vals);
        let psi = solve(&w).unwrap().psi;
        prop_assert!(psi.min() >= -1e-10);
    }

    #[test]
    fn walls_are_streamlines_and_residual_is_small(vals in prop::collection::vec(-1.0f64..1.0, 40)) {
        let g = ChannelGrid::new(33, 17, 3.0).unwrap();
        let w = random_field(g, &vals);
        let sol = solve(&w).unwrap();
        for i in 0..g.nx() {
            prop_assert_eq!(sol.psi.get(i, 0), 0.0);
            prop_assert_eq!(sol.psi.get(i, g.ny() - 1), 0.0);
        }
        if w.max_abs() > 0.0 {
            prop_assert!(sol.residual_l2 <= 1e-8);
        }
    }

    #[test]
    fn solve_is_linear(a in prop::collection::vec(-1.0f64..1.0, 40), b in prop::collection::vec(-1.0f64..1.0, 40), t in -3.0f64..3.0) {
        let g = ChannelGrid::new(33, 17, 3.0).unwrap();
        let s = PoissonSolver::new(g);
        let (wa, wb) = (random_field(g, &a), random_field(g, &b));
        let sum = wa.zip_map(&wb, |x, y| x + t * y).unwrap();
        let lhs = s.stream_function(&sum).unwrap();
        let pa = s.stream_function(&wa).unwrap();
        let pb = s.stream_function(&wb).unwrap();
        let rhs = pa.zip_map(&pb, |x, y| x + t * y).unwrap();
        let scale = rhs.max_abs().max(1e-12);
        let d = lhs.zip_map(&rhs, |x, y| (x - y).abs()).unwrap().max();
        prop_assert!(d <= 1e-12 * scale.max(1.0));
    }
}
