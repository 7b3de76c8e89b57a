//! Green function of the Dirichlet Laplacian on the channel `ℝ × [-1, 1]`.
//!
//! In wall-shifted coordinates `ỹ = y + 1 ∈ [0, 2]` the kernel of the width-2
//! strip is
//!
//! ```text
//! G = (1/4π) ln[(cosh(πX/2) − cos(π(ỹ+ỹ')/2)) / (cosh(πX/2) − cos(π(ỹ−ỹ')/2))],
//! ```
//!
//! `X = x − x'`. Writing `cosh u − cos θ = 2 sinh²(u/2) + 2 sin²(θ/2)` and
//! returning to `y` gives the form evaluated here,
//!
//! ```text
//! G = (1/4π) ln(1 + cos(πy/2) cos(πy'/2) / (sinh²(πX/4) + sin²(π(y−y')/4))),
//! ```
//!
//! which has no cancellation anywhere and vanishes on `y = ±1`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::grid::{ChannelGrid, Field};
use crate::{Error, Result};

/// Beyond this horizontal separation `sinh²` is replaced by its exponential
/// asymptote.
pub const FAR_FIELD: f64 = 30.0;
/// Separations below this are labelled near-diagonal.
pub const NEAR_DIAGONAL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    NearDiagonal,
    FarField,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub value: f64,
    pub regime: Regime,
}

/// `G(z, z')`.
pub fn green(z: Point, zp: Point) -> Result<KernelEval> {
    for p in [z, zp] {
        if !(p.x.is_finite() && p.y.is_finite()) || p.y.abs() > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("point ({}, {}) is outside the channel", p.x, p.y)));
        }
    }
    let dx = z.x - zp.x;
    let dy = z.y - zp.y;
    let r = libm::hypot(dx, dy);
    if r == 0.0 {
        return Err(Error::Domain("G is singular at coincident points".into()));
    }
    let cc = wall_factor(z.y) * wall_factor(zp.y);
    let regime = if r < NEAR_DIAGONAL {
        Regime::NearDiagonal
    } else if dx.abs() > FAR_FIELD {
        Regime::FarField
    } else {
        Regime::Generic
    };
    let value = match regime {
        Regime::FarField => {
            // sinh²(πX/4) = e^{π|X|/2}/4 up to a relative e^{-π|X|} error.
            let e = libm::exp(-0.5 * PI * dx.abs());
            let s = libm::sin(0.25 * PI * dy);
            cc * e / (PI * (1.0 + 4.0 * s * s * e))
        }
        _ => kernel(cc, sinh_sq(0.25 * PI * dx), sin_sq(0.25 * PI * dy), r, z.y),
    };
    Ok(KernelEval { value, regime })
}

/// `cos(πy/2)`, clamped to zero on the walls.
#[inline]
pub(crate) fn wall_factor(y: f64) -> f64 {
    if y.abs() >= 1.0 {
        0.0
    } else {
        libm::cos(0.5 * PI * y)
    }
}

#[inline]
fn sinh_sq(u: f64) -> f64 {
    let s = libm::sinh(u);
    s * s
}

#[inline]
fn sin_sq(u: f64) -> f64 {
    let s = libm::sin(u);
    s * s
}

#[inline]
fn kernel(cc: f64, sh2: f64, sn2: f64, r: f64, y: f64) -> f64 {
    let den = sh2 + sn2;
    if den < 1e-280 {
        // Leading singular term plus the regular part on the diagonal.
        return -libm::log(r) / (2.0 * PI) + regular_part(y);
    }
    libm::log1p(cc / den) / (4.0 * PI)
}

/// `H(z, z) = lim (G(z, z') + (1/2π) ln|z − z'|) = (1/2π) ln(4 cos(πy/2) / π)`.
pub fn regular_part(y: f64) -> f64 {
    libm::log(4.0 * wall_factor(y) / PI) / (2.0 * PI)
}

/// Mean of `ln r` over the rectangle `[-a, a] × [-b, b]`.
pub fn mean_log_over_cell(a: f64, b: f64) -> f64 {
    // ∫∫_{[0,a]×[0,b]} ln(x²+y²) = ab ln(a²+b²) − 3ab + a² atan(b/a) + b² atan(a/b).
    let i = a * b * libm::log(a * a + b * b) - 3.0 * a * b
        + a * a * libm::atan(b / a)
        + b * b * libm::atan(a / b);
    0.5 * i / (a * b)
}

/// Diagonal weight `c(hx, hy)` of the punctured trapezoid rule for `ln r`:
/// `∫ φ ln r ≈ hx·hy·(c φ(0) + Σ_{(m,n)≠0} φ(mhx, nhy) ln r_mn)` up to
/// `O(h²)` for smooth `φ`.
///
/// Fitted on Gaussians `φ = e^{−r²/s²}`, whose integral against `ln r` is
/// `πs²(ln s − γ/2)`, at two widths and extrapolated in `s⁻²`.
pub fn lattice_log_weight(hx: f64, hy: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let at = |s: f64| {
        let m = libm::ceil(7.0 * s / hx) as i64;
        let n = libm::ceil(7.0 * s / hy) as i64;
        let mut sum = 0.0;
        for a in -m..=m {
            let x2 = (a as f64 * hx) * (a as f64 * hx);
            for b in -n..=n {
                if a == 0 && b == 0 {
                    continue;
                }
                let r2 = x2 + (b as f64 * hy) * (b as f64 * hy);
                sum += libm::exp(-r2 / (s * s)) * 0.5 * libm::log(r2);
            }
        }
        let exact = PI * s * s * (libm::log(s) - 0.5 * EULER_GAMMA);
        (exact - sum * hx * hy) / (hx * hy)
    };
    let s = 8.0 * hx.max(hy);
    let (w1, w2) = (at(s), at(2.0 * s));
    w2 + (w2 - w1) / 3.0
}

/// Direct quadrature `ψ(z_i) = Σ_j w_j G(z_i, z_j) ω(z_j)` over the nonzero
/// nodes of `ω`. The self node carries the punctured-trapezoid weight of the
/// logarithmic singularity ([`lattice_log_weight`]) plus the regular part.
pub fn convolve(omega: &Field) -> Field {
    let g = *omega.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let sources: Vec<(usize, usize, f64)> = (0..nx)
        .flat_map(|i| (0..ny).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let v = omega.get(i, j);
            (v != 0.0).then(|| (i, j, v * g.weight(j)))
        })
        .collect();
    let mut out = Field::zeros(g);
    if sources.is_empty() {
        return out;
    }
    let tables = KernelTables::new(&g);
    let diag = -lattice_log_weight(g.hx(), g.hy()) / (2.0 * PI);
    for i in 0..nx {
        for j in 1..ny - 1 {
            let mut s = 0.0;
            for &(si, sj, wv) in &sources {
                let gv = if si == i && sj == j {
                    diag + regular_part(g.y(j))
                } else {
                    tables.eval(i, j, si, sj)
                };
                s += gv * wv;
            }
            out.set(i, j, s);
        }
    }
    out
}

/// Lattice tables of the three factors of the kernel.
struct KernelTables {
    cos_y: Vec<f64>,
    sinh2: Vec<f64>,
    sin2: Vec<f64>,
    far: Vec<bool>,
    far_exp: Vec<f64>,
}

impl KernelTables {
    fn new(g: &ChannelGrid) -> Self {
        let cos_y = (0..g.ny()).map(|j| wall_factor(g.y(j))).collect();
        let sinh2 = (0..g.nx()).map(|d| sinh_sq(0.25 * PI * d as f64 * g.hx())).collect();
        let far = (0..g.nx()).map(|d| d as f64 * g.hx() > FAR_FIELD).collect();
        let far_exp = (0..g.nx()).map(|d| libm::exp(-0.5 * PI * d as f64 * g.hx())).collect();
        let sin2 = (0..g.ny()).map(|d| sin_sq(0.25 * PI * d as f64 * g.hy())).collect();
        Self {
            cos_y,
            sinh2,
            sin2,
            far,
            far_exp,
        }
    }

    #[inline]
    fn eval(&self, i: usize, j: usize, si: usize, sj: usize) -> f64 {
        let di = i.abs_diff(si);
        let dj = j.abs_diff(sj);
        let cc = self.cos_y[j] * self.cos_y[sj];
        if self.far[di] {
            let e = self.far_exp[di];
            return cc * e / (PI * (1.0 + 4.0 * self.sin2[dj] * e));
        }
        libm::log1p(cc / (self.sinh2[di] + self.sin2[dj])) / (4.0 * PI)
    }
}
