//! Critical-layer quantities for a candidate traveling wave of
//! `(y + c + u^x)∂xω + u^y∂yω = 0`, `u = ∇^⊥ψ = (∂yψ, −∂xψ)`, `−Δψ = ω`.
//!
//! These fields use the Euler sign convention. A maximizer `ω` of the
//! variational problem centred at `y = c` corresponds to the Euler pair
//! `(−ω, −c)`; see [`euler_frame`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::fit::{fit_named, ScalingFit};
use crate::grid::{self, Field};
use crate::norms::{norm, NormSpec};
use crate::poisson::PoissonSolution;
use crate::variational::SolveReport;
use crate::{Error, Result};

/// Regularization of `|F_x|` in the weighted integrand.
pub const LAYER_FLOOR: f64 = 1e-6;
/// `lhs` below this leaves the ratio undefined.
pub const LHS_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerRegime {
    InteriorRoot,
    /// `F_x > 0` on `[−1, 1]`: `y₊ = −1`.
    ClampedLow,
    /// `F_x < 0` on `[−1, 1]`: `y₊ = +1`.
    ClampedHigh,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalLayer {
    /// `y₊(x)` per column.
    pub ystar: Vec<f64>,
    pub regime: Vec<LayerRegime>,
    /// `max |∂y u^x| ≤ 1/2`.
    pub monotone_ok: bool,
    pub max_dy_ux: f64,
    pub c: f64,
}

/// `(−ω, −c)`: the Euler vorticity and speed parameter of a maximizer
/// centred at `y = c`.
pub fn euler_frame(omega: &Field, center: f64) -> (Field, f64) {
    (omega.scaled(-1.0), -center)
}

/// `F_x(y) = y + c + u^x` at node `(i, j)`.
fn f_x(ux: &Field, c: f64, i: usize, j: usize) -> f64 {
    ux.grid().y(j) + c + ux.get(i, j)
}

/// Per column, the root of the piecewise-linear `F_x` in the first bracketing
/// cell, or the clamp `∓1` when `F_x` keeps one sign.
pub fn critical_layer(ux: &Field, c: f64) -> CriticalLayer {
    let g = *ux.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let max_dy_ux = grid::d_dy(ux).max_abs();
    let mut ystar = Vec::with_capacity(nx);
    let mut regime = Vec::with_capacity(nx);
    for i in 0..nx {
        let mut found = None;
        for j in 0..ny {
            let a = f_x(ux, c, i, j);
            if a == 0.0 {
                found = Some(g.y(j));
                break;
            }
            if j + 1 < ny {
                let b = f_x(ux, c, i, j + 1);
                if (a < 0.0) != (b < 0.0) && b != 0.0 {
                    let t = a / (a - b);
                    found = Some(g.y(j) + t * g.hy());
                    break;
                }
            }
        }
        match found {
            Some(y) => {
                ystar.push(y);
                regime.push(LayerRegime::InteriorRoot);
            }
            None if f_x(ux, c, i, 0) > 0.0 => {
                ystar.push(-1.0);
                regime.push(LayerRegime::ClampedLow);
            }
            None => {
                ystar.push(1.0);
                regime.push(LayerRegime::ClampedHigh);
            }
        }
    }
    CriticalLayer {
        ystar,
        regime,
        monotone_ok: max_dy_ux <= 0.5,
        max_dy_ux,
        c,
    }
}

impl CriticalLayer {
    /// `F_x(y₊(x))` on the linear interpolant, per interior-root column.
    pub fn root_residuals(&self, ux: &Field) -> Vec<f64> {
        let g = *ux.grid();
        (0..g.nx())
            .filter(|&i| self.regime[i] == LayerRegime::InteriorRoot)
            .map(|i| {
                let y = self.ystar[i];
                let t = (y + 1.0) / g.hy();
                let j = (libm::floor(t) as usize).min(g.ny() - 2);
                let w = t - j as f64;
                let u = (1.0 - w) * ux.get(i, j) + w * ux.get(i, j + 1);
                y + self.c + u
            })
            .collect()
    }

    /// `min |F_x(y)| / (½|y − y₊(x)|)` over grid points off the layer
    /// (`+∞` if every point lies on it).
    pub fn lower_bound_margin(&self, ux: &Field) -> f64 {
        let g = *ux.grid();
        let mut worst = f64::INFINITY;
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                let d = 0.5 * (g.y(j) - self.ystar[i]).abs();
                if d > 0.0 {
                    worst = worst.min(f_x(ux, self.c, i, j).abs() / d);
                }
            }
        }
        worst
    }

    /// `|F_x(y)| ≥ ½|y − y₊(x)|` at every grid point (to round-off).
    pub fn lower_bound_holds(&self, ux: &Field) -> bool {
        self.lower_bound_margin(ux) >= 1.0 - 1e-12
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyIdentity {
    /// `‖∇u^y‖²`.
    pub lhs: f64,
    /// `−∫ u^y ∂xω`.
    pub rhs_direct: f64,
    /// `∫ |u^y|²|∂yω| / max(|F_x|, 10⁻⁶)`.
    pub rhs_weighted: f64,
    /// The same with the floor halved.
    pub rhs_weighted_half_floor: f64,
    /// `rhs_weighted / lhs`; `None` when `lhs < 10⁻³⁰`.
    pub ratio: Option<f64>,
    pub monotone_ok: bool,
}

impl EnergyIdentity {
    /// `|lhs − rhs_direct| / lhs`.
    pub fn identity_error(&self) -> Option<f64> {
        (self.lhs >= LHS_FLOOR).then(|| (self.lhs - self.rhs_direct).abs() / self.lhs)
    }
}

/// Energy identity and weighted bound for `ω` with velocity `sol`.
pub fn energy_identity_stats(omega: &Field, sol: &PoissonSolution, c: f64) -> Result<EnergyIdentity> {
    let g = *omega.grid();
    if sol.uy.grid() != &g || sol.ux.grid() != &g {
        return Err(Error::GridMismatch);
    }
    let layer = critical_layer(&sol.ux, c);
    let (uyx, uyy) = grid::gradient(&sol.uy);
    let (wx, wy) = grid::gradient(omega);
    let lhs = grid::integrate(&uyx.zip_map(&uyy, |a, b| a * a + b * b)?);
    let rhs_direct = -grid::inner(&sol.uy, &wx)?;
    let weighted = |floor: f64| {
        let mut s = 0.0;
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                let u = sol.uy.get(i, j);
                let num = u * u * wy.get(i, j).abs();
                if num != 0.0 {
                    s += g.weight(j) * num / f_x(&sol.ux, c, i, j).abs().max(floor);
                }
            }
        }
        s
    };
    let rhs_weighted = weighted(LAYER_FLOOR);
    Ok(EnergyIdentity {
        lhs,
        rhs_direct,
        rhs_weighted,
        rhs_weighted_half_floor: weighted(0.5 * LAYER_FLOOR),
        ratio: (lhs >= LHS_FLOOR).then(|| rhs_weighted / lhs),
        monotone_ok: layer.monotone_ok,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopePoint {
    pub s: f64,
    pub fit: ScalingFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdWitness {
    pub p: f64,
    pub q: f64,
    pub slopes: Vec<SlopePoint>,
    /// Interpolated zero of the slope as a function of `s`.
    pub s0: Option<f64>,
    /// `1 + 1/p − 2q`.
    pub predicted_s0: f64,
    /// `[1 + 1/p − 2q − 0.2, 1 + 1/p + 0.1]`.
    pub band: (f64, f64),
    pub in_band: bool,
    /// Some slope fit has `r² < 0.9`.
    pub low_confidence: bool,
    pub holder_c0_09: ScalingFit,
    pub holder_c1_05: ScalingFit,
    pub notes: String,
}

/// Fits `log‖ω_ε‖_{W^{s,p}}` against `log ε` for each `s` in `s_grid` and
/// locates the zero crossing of the slope; also fits the `C^{0,0.9}` and
/// `C^{1,0.5}` norms.
pub fn threshold_witness(reports: &[SolveReport], q: f64, p: f64, s_grid: &[f64]) -> Result<ThresholdWitness> {
    let runs: Vec<&SolveReport> = reports.iter().filter(|r| r.converged).collect();
    if runs.len() < 3 {
        return Err(Error::Precondition(format!(
            "threshold witness needs at least 3 converged reports, got {}",
            runs.len()
        )));
    }
    let eps: Vec<f64> = runs.iter().map(|r| r.spec.eps).collect();
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("reports must be ordered by strictly decreasing eps".into()));
    }
    let fit_spec = |spec: NormSpec, predicted: f64, tol: f64| -> Result<ScalingFit> {
        let ys = runs
            .iter()
            .map(|r| norm(&r.omega, &spec).map(|n| n.value))
            .collect::<Result<Vec<f64>>>()?;
        fit_named(&spec.label(), &eps, &ys, predicted, tol)
    };
    let mut slopes = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let predicted = 1.0 - s + 1.0 / p - 2.0 * q;
        slopes.push(SlopePoint {
            s,
            fit: fit_spec(NormSpec::wsp(s, p), predicted, 0.15)?,
        });
    }
    let mut s0 = None;
    for w in slopes.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.fit.slope == 0.0 {
            s0 = Some(a.s);
            break;
        }
        if (a.fit.slope > 0.0) != (b.fit.slope > 0.0) {
            let t = a.fit.slope / (a.fit.slope - b.fit.slope);
            s0 = Some(a.s + t * (b.s - a.s));
            break;
        }
    }
    let predicted_s0 = 1.0 + 1.0 / p - 2.0 * q;
    let band = (predicted_s0 - 0.2, 1.0 + 1.0 / p + 0.1);
    let in_band = s0.is_some_and(|v| v >= band.0 && v <= band.1);
    let low_confidence = slopes.iter().any(|sp| sp.fit.r2 < crate::fit::MIN_R2);
    let holder_c0_09 = fit_spec(NormSpec::holder(0, 0.9), 1.0 - 2.0 * q - 0.9, f64::INFINITY)?;
    let holder_c1_05 = fit_spec(NormSpec::holder(1, 0.5), 1.0 - 2.0 * q - 1.5, f64::INFINITY)?;
    let notes = match s0 {
        Some(v) => format!("slope changes sign at s = {v:.3}"),
        None => String::from("slope keeps one sign over the scan grid"),
    };
    Ok(ThresholdWitness {
        p,
        q,
        slopes,
        s0,
        predicted_s0,
        band,
        in_band,
        low_confidence,
        holder_c0_09,
        holder_c1_05,
        notes,
    })
}
