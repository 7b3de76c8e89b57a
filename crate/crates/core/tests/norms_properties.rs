mod common;

use common::{cos4_bump, mask};
use equil_core::norms::{norm, slice_norm_check, slice_norms, NormSpec};
use equil_core::{ChannelGrid, Field};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn value(f: &Field, spec: NormSpec) -> f64 {
    norm(f, &spec).unwrap().value
}

fn semi(f: &Field, spec: NormSpec) -> f64 {
    norm(f, &spec).unwrap().seminorm
}

/// Composite 5-point Gauss–Legendre on `[a, b]`.
fn gauss(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    const X: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
    const W: [f64; 5] = [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for k in 0..panels {
        let m = a + (k as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(W) {
            s += 0.5 * h * w * f(m + 0.5 * h * x);
        }
    }
    s
}

#[test]
fn zero_field_has_zero_norms() {
    let g = ChannelGrid::new(33, 17, 2.0).unwrap();
    let z = Field::zeros(g);
    for spec in [
        NormSpec::lp(1.0),
        NormSpec::lp(f64::INFINITY),
        NormSpec::wsp(0.5, 2.0),
        NormSpec::wsp(1.4, 2.0),
        NormSpec::hs(0.5),
        NormSpec::holder(1, 0.5),
        NormSpec::deriv_sup(2),
    ] {
        assert_eq!(value(&z, spec), 0.0, "{}", spec.label());
    }
    assert_eq!(slice_norm_check(&z, 0.5, 2.0).unwrap(), 0.0);
}

#[test]
fn gagliardo_and_fourier_seminorms_agree_on_a_gaussian() {
    let g = ChannelGrid::new(129, 201, 0.645).unwrap();
    let sig: f64 = 0.07;
    let f = Field::from_fn(g, |x, y| {
        let r2 = x * x + y * y;
        (-r2 / (2.0 * sig * sig)).exp() * mask(r2.sqrt(), 0.6)
    });
    let a = semi(&f, NormSpec::wsp(0.5, 2.0));
    let b = semi(&f, NormSpec::hs(0.5));
    assert!((a / b - 1.0).abs() <= 0.05, "Gagliardo {a}, Fourier {b}");
}

/// A plateau of height 1 on a disk of radius `R` with a cosine edge of
/// width `w`. Its `W^{1/2,2}` seminorm squared grows like `4·2πR·ln(1/w)`:
/// the half-plane kernel integrates to `2/d²` across the edge and each
/// ordered pair counts once.
#[test]
fn sharp_interface_seminorm_diverges_logarithmically() {
    let g = ChannelGrid::new(201, 401, 0.5).unwrap();
    let radius = 0.1;
    let widths = [0.064, 0.032, 0.016];
    let sq: Vec<f64> = widths
        .iter()
        .map(|&w| {
            let f = Field::from_fn(g, |x, y| {
                let d = ((x * x + y * y).sqrt() - (radius - 0.5 * w)) / w;
                if d <= 0.0 {
                    1.0
                } else if d >= 1.0 {
                    0.0
                } else {
                    0.5 * (1.0 + (PI * d).cos())
                }
            });
            semi(&f, NormSpec::wsp(0.5, 2.0)).powi(2)
        })
        .collect();
    let predicted = 4.0 * 2.0 * PI * radius * 2f64.ln();
    for k in 1..sq.len() {
        let step = sq[k] - sq[k - 1];
        assert!(step > 0.0, "{sq:?}");
        assert!((step / predicted - 1.0).abs() <= 0.25, "step {step}, predicted {predicted}, {sq:?}");
    }
}

#[test]
fn fractional_norm_sits_between_its_endpoints() {
    let g = ChannelGrid::new(129, 65, 3.0).unwrap();
    let f = cos4_bump(g, 0.0, 0.0, 1.5, 0.6);
    let l2 = value(&f, NormSpec::hs(0.0));
    let h1 = value(&f, NormSpec::hs(1.0));
    for s in [0.25, 0.5, 0.75] {
        let hs = value(&f, NormSpec::hs(s));
        let bound = l2.powf(1.0 - s) * h1.powf(s);
        assert!(hs >= l2 * (1.0 - 1e-12) && hs <= h1 * (1.0 + 1e-12), "s = {s}");
        assert!(hs <= 1.05 * bound, "s = {s}: {hs} vs {bound}");
    }
}

#[test]
fn gagliardo_value_converges_under_refinement() {
    let mut vals = Vec::new();
    for (nx, ny) in [(65, 33), (129, 65), (257, 129)] {
        let g = ChannelGrid::new(nx, ny, 2.0).unwrap();
        vals.push(value(&cos4_bump(g, 0.0, 0.0, 1.0, 0.5), NormSpec::wsp(0.5, 2.0)));
    }
    let last = (vals[2] - vals[1]).abs() / vals[2];
    assert!(last <= 1e-2, "{vals:?}");
    assert!((vals[2] - vals[1]).abs() <= (vals[1] - vals[0]).abs(), "{vals:?}");
}

#[test]
fn slices_are_controlled_by_the_full_norm() {
    let g = ChannelGrid::new(65, 33, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 0..20 {
        let (x0, y0) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.3..0.3));
        let (a, b) = (rng.gen_range(0.3..1.0), rng.gen_range(0.2..0.6));
        let k = rng.gen_range(0.0..4.0);
        let base = cos4_bump(g, x0, y0, a, b);
        let f = base.map_xy(|x, y, v| v * (1.0 + 0.5 * (k * x + y).sin()));
        let r = slice_norm_check(&f, 0.5, 2.0).unwrap();
        assert!(r > 0.0 && r <= 10.0, "field {n}: {r}");
    }
}

/// One-dimensional `‖u‖_{L^p} + [u]_{W^{s,p}}` by quadrature; the pair
/// integrand for `(s, p) = (1/2, 2)` is bounded on the diagonal.
fn line_norm_half_two(u: &dyn Fn(f64) -> f64, du: &dyn Fn(f64) -> f64, a: f64, b: f64, tail: bool) -> f64 {
    let lp = gauss(a, b, 400, |t| u(t) * u(t));
    let pairs = gauss(a, b, 200, |t| {
        gauss(a, b, 200, |r| {
            let d = t - r;
            if d.abs() < 1e-9 {
                du(t) * du(t)
            } else {
                (u(t) - u(r)).powi(2) / (d * d)
            }
        })
    });
    // Beyond [a, b] the function vanishes: ∫_{r ∉ [a,b]} |t − r|^{-2} dr.
    let outside = if tail { 2.0 * gauss(a, b, 400, |t| u(t) * u(t) * (1.0 / (t - a) + 1.0 / (b - t))) } else { 0.0 };
    lp.sqrt() + (pairs + outside).sqrt()
}

#[test]
fn separable_fields_factor_into_one_dimensional_norms() {
    let g = ChannelGrid::new(257, 129, 2.0).unwrap();
    let w = 1.2;
    let a = |x: f64| mask(x, w);
    let da = |x: f64| {
        if x.abs() < w {
            let c = (0.5 * PI * x / w).cos();
            -4.0 * c.powi(3) * (0.5 * PI * x / w).sin() * 0.5 * PI / w
        } else {
            0.0
        }
    };
    let b = |y: f64| (1.0 - y * y).powi(2);
    let db = |y: f64| -4.0 * y * (1.0 - y * y);
    let f = Field::from_fn(g, |x, y| a(x) * b(y));
    let (xp, yp) = slice_norms(&f, 0.5, 2.0).unwrap();

    let a_l2 = gauss(-w, w, 400, |x| a(x) * a(x)).sqrt();
    let b_l2 = gauss(-1.0, 1.0, 400, |y| b(y) * b(y)).sqrt();
    let expect_x = a_l2 * line_norm_half_two(&b, &db, -1.0, 1.0, false);
    let expect_y = b_l2 * line_norm_half_two(&a, &da, -w, w, true);
    assert!((xp / expect_x - 1.0).abs() <= 0.05, "{xp} vs {expect_x}");
    assert!((yp / expect_y - 1.0).abs() <= 0.05, "{yp} vs {expect_y}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn norms_are_homogeneous(lambda in -5.0f64..5.0, kind in 0usize..6) {
        let g = ChannelGrid::new(33, 17, 2.0).unwrap();
        let f = cos4_bump(g, 0.1, 0.0, 1.0, 0.5);
        let spec = [
            NormSpec::lp(1.5),
            NormSpec::wsp(0.5, 2.0),
            NormSpec::wsp(1.3, 1.0),
            NormSpec::hs(0.7),
            NormSpec::holder(0, 0.9),
            NormSpec::deriv_sup(1),
        ][kind];
        let a = value(&f.scaled(lambda), spec);
        let b = lambda.abs() * value(&f, spec);
        prop_assert!((a - b).abs() <= 1e-10 * b.max(1e-300), "{} {} {}", spec.label(), a, b);
    }

    #[test]
    fn lp_norms_are_nondecreasing_in_p_on_a_unit_box(p in 1.0f64..6.0, dp in 0.0f64..3.0) {
        // The box has area 1, so Hölder gives ‖f‖_p ≤ ‖f‖_{p+dp}.
        let g = ChannelGrid::new(33, 17, 0.25).unwrap();
        let f = cos4_bump(g, 0.0, 0.0, 0.2, 0.4).scaled(0.5);
        prop_assert!(value(&f, NormSpec::lp(p)) <= value(&f, NormSpec::lp(p + dp)) * (1.0 + 1e-12));
    }
}
