#![allow(dead_code)]

use equil_core::{ChannelGrid, Field};
use std::f64::consts::PI;

/// `cos⁴(π r/2)` inside the ellipse `r < 1` with semi-axes `(a, b)` centred
/// at `(x0, y0)`, zero outside.
pub fn cos4_bump(g: ChannelGrid, x0: f64, y0: f64, a: f64, b: f64) -> Field {
    Field::from_fn(g, |x, y| {
        let r2 = ((x - x0) / a).powi(2) + ((y - y0) / b).powi(2);
        if r2 < 1.0 {
            (0.5 * PI * r2.sqrt()).cos().powi(4)
        } else {
            0.0
        }
    })
}

/// Smooth compactly supported mask `cos⁴(π x/(2w))` on `|x| < w`.
pub fn mask(x: f64, w: f64) -> f64 {
    if x.abs() < w {
        (0.5 * PI * x / w).cos().powi(4)
    } else {
        0.0
    }
}

pub fn rel_l2(a: &Field, b: &Field) -> f64 {
    let d = a.zip_map(b, |x, y| x - y).unwrap();
    d.l2_norm() / b.l2_norm()
}
