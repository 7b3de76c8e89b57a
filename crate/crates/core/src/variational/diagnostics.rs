use crate::grid::{self, Field};
use crate::penalty::PenaltyFamily;
use crate::Result;

use super::{AdmissibleSpec, EnergyFunctional, SolveReport};

/// Nodes with `ω > SUPPORT_THRESHOLD·max ω` count as support.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;
/// Looser cut used to report the sensitivity of the extents.
const LOOSE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SupportExtents {
    pub x_halfwidth: f64,
    pub y_halfwidth: f64,
    pub x_center: f64,
    pub y_center: f64,
    /// `x_halfwidth·|ln ε|`.
    pub rx: f64,
    /// `y_halfwidth/(ε|ln ε|^{1/2})`.
    pub ry: f64,
    /// `y_halfwidth` at the looser `10⁻⁶` cut.
    pub y_halfwidth_loose: f64,
}

fn bounding_box(omega: &Field, rel: f64) -> Option<(f64, f64, f64, f64)> {
    let g = omega.grid();
    let cut = rel * omega.max();
    let mut b: Option<(f64, f64, f64, f64)> = None;
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            if omega.get(i, j) > cut {
                let (x, y) = (g.x(i), g.y(j));
                b = Some(match b {
                    None => (x, x, y, y),
                    Some((x0, x1, y0, y1)) => (x0.min(x), x1.max(x), y0.min(y), y1.max(y)),
                });
            }
        }
    }
    b
}

/// Smallest axis-aligned rectangle containing `{ω > 10⁻⁸ max ω}`.
pub fn support_extents_of(omega: &Field, fam: &PenaltyFamily) -> SupportExtents {
    let Some((x0, x1, y0, y1)) = bounding_box(omega, SUPPORT_THRESHOLD) else {
        return SupportExtents::default();
    };
    let xh = 0.5 * (x1 - x0);
    let yh = 0.5 * (y1 - y0);
    let loose = bounding_box(omega, LOOSE_THRESHOLD).map_or(0.0, |b| 0.5 * (b.3 - b.2));
    let (eps, l) = (fam.eps(), fam.l());
    SupportExtents {
        x_halfwidth: xh,
        y_halfwidth: yh,
        x_center: 0.5 * (x0 + x1),
        y_center: 0.5 * (y0 + y1),
        rx: xh * l,
        ry: yh / (eps * libm::sqrt(l)),
        y_halfwidth_loose: loose,
    }
}

pub fn support_extents(rep: &SolveReport, fam: &PenaltyFamily) -> SupportExtents {
    support_extents_of(&rep.omega, fam)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierDiagnostics {
    /// `α/(ε²|ln ε|)`.
    pub alpha_over_eps2l: f64,
    /// `∫(ωF'(ω) − 2F(ω))/ε²`.
    pub claim_integral_over_eps2: f64,
}

/// `∫(ωF'(ω) − 2F(ω))`.
pub fn claim_integral(omega: &Field, fam: &PenaltyFamily) -> Result<f64> {
    let g = omega.grid();
    let mut s = 0.0;
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            let w = omega.get(i, j);
            if w != 0.0 {
                s += g.weight(j) * (w * fam.penalty_prime(w)? - 2.0 * fam.penalty(w)?);
            }
        }
    }
    Ok(s)
}

pub fn multiplier_diagnostics(rep: &SolveReport, fam: &PenaltyFamily) -> Result<MultiplierDiagnostics> {
    let eps2 = fam.eps() * fam.eps();
    Ok(MultiplierDiagnostics {
        alpha_over_eps2l: rep.alpha / (eps2 * fam.l()),
        claim_integral_over_eps2: claim_integral(&rep.omega, fam)? / eps2,
    })
}

/// `‖(y − c − u^x)∂xω − u^y∂yω‖_{L²}` with `(u^x, u^y) = (∂yψ, −∂xψ)`.
///
/// A maximizer is a function of `ψ − (y−c)²/2`, so this transport term
/// vanishes for an exact solution: the flow induced by the Euler vorticity
/// `−ω` is `−u`, and in the frame moving with speed `c` the Couette
/// background is `y − c`.
pub fn transport_residual(omega: &Field, psi: &Field, center: f64) -> Result<f64> {
    let (wx, wy) = grid::gradient(omega);
    let (px, py) = grid::gradient(psi);
    let g = *omega.grid();
    if psi.grid() != &g {
        return Err(crate::Error::GridMismatch);
    }
    let mut r = Field::zeros(g);
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            let ux = py.get(i, j);
            let uy = -px.get(i, j);
            let v = (g.y(j) - center - ux) * wx.get(i, j) - uy * wy.get(i, j);
            r.set(i, j, v);
        }
    }
    Ok(r.l2_norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck {
    /// `(𝓔(ω+tδ) − 𝓔(ω−tδ))/(2t)`.
    pub finite_difference: f64,
    /// `∫Hδ`.
    pub predicted: f64,
    pub rel_error: f64,
}

/// Compares a centred difference of the energy along `δ` with the first
/// variation `∫Hδ`.
pub fn gradient_check(
    omega: &Field,
    delta: &Field,
    spec: &AdmissibleSpec,
    fam: &PenaltyFamily,
    t: f64,
) -> Result<GradientCheck> {
    let ev = EnergyFunctional::new(*omega.grid(), *spec, fam)?;
    let plus = omega.zip_map(delta, |a, b| a + t * b)?;
    let minus = omega.zip_map(delta, |a, b| a - t * b)?;
    let ep = ev.evaluate(&plus)?.0.total;
    let em = ev.evaluate(&minus)?.0.total;
    let fd = (ep - em) / (2.0 * t);
    let psi = ev.psi_on_strip(omega)?;
    let h = ev.first_variation(omega, &psi)?;
    let predicted = grid::inner(&h, delta)?;
    Ok(GradientCheck {
        finite_difference: fd,
        predicted,
        rel_error: (fd - predicted).abs() / predicted.abs(),
    })
}
