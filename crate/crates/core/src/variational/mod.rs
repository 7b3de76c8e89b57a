//! Penalized energy
//!
//! ```text
//! 𝓔(ω) = ½∫ω𝒢ω − ½∫(y−c)²ω − ε²∫F(ω)
//! ```
//!
//! over the admissible class `0 ≤ ω ≤ ε^{1-q}`, `∫ω ≤ ε²`,
//! `supp ω ⊂ {|y−c| ≤ ε^{1-q}}`, together with Steiner symmetrization, the
//! two-phase maximizer and its diagnostics.
//!
//! `c = 0` is the steady problem; `c ≠ 0` gives traveling waves.

mod diagnostics;
mod solver;
mod steiner;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;

use crate::grid::{self, ChannelGrid, Field};
use crate::penalty::PenaltyFamily;
use crate::poisson::PoissonSolver;
use crate::{Error, Result};

pub use diagnostics::{
    claim_integral, gradient_check, multiplier_diagnostics, support_extents, support_extents_of,
    transport_residual, GradientCheck, MultiplierDiagnostics, SupportExtents, SUPPORT_THRESHOLD,
};
pub use solver::{ascend, maximize, AscentReport};
pub use steiner::{steiner, symmetrize_even};

/// Constraints of the admissible class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibleSpec {
    pub eps: f64,
    pub q: f64,
    /// Height `c` of the strip (0 for steady states).
    pub center: f64,
    /// `ε^{1-q}`.
    pub amp_cap: f64,
    /// `ε²`.
    pub mass_cap: f64,
    /// `ε^{1-q}`.
    pub strip_halfwidth: f64,
}

impl AdmissibleSpec {
    pub fn new(eps: f64, q: f64, center: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) || !(q > 0.0 && q <= 0.5) {
            return Err(Error::InvalidInput(format!("need 0 < eps < 1 and 0 < q <= 1/2, got eps = {eps}, q = {q}")));
        }
        let cap = libm::pow(eps, 1.0 - q);
        if !(center.abs() + cap < 1.0) {
            return Err(Error::InvalidInput(format!(
                "strip |y - {center}| <= {cap} does not fit inside the channel"
            )));
        }
        Ok(Self {
            eps,
            q,
            center,
            amp_cap: cap,
            mass_cap: eps * eps,
            strip_halfwidth: cap,
        })
    }

    pub fn steady(eps: f64, q: f64) -> Result<Self> {
        Self::new(eps, q, 0.0)
    }

    /// Grid rows inside the strip.
    pub fn strip_rows(&self, grid: &ChannelGrid) -> RangeInclusive<usize> {
        grid.rows_within(self.center, self.strip_halfwidth)
    }

    /// Lists every violated constraint, or `Ok` for an admissible field.
    pub fn check(&self, omega: &Field) -> Result<()> {
        let g = omega.grid();
        let rows = self.strip_rows(g);
        let mut problems: Vec<String> = Vec::new();
        let min = omega.min();
        if min < 0.0 {
            problems.push(format!("negative value {min:e}"));
        }
        let max = omega.max();
        if max > self.amp_cap * (1.0 + 1e-12) {
            problems.push(format!("amplitude {max:e} exceeds cap {:e}", self.amp_cap));
        }
        let mass = omega.integrate();
        if mass > self.mass_cap * (1.0 + 1e-6) {
            problems.push(format!("mass {mass:e} exceeds cap {:e}", self.mass_cap));
        }
        let outside = (0..g.nx())
            .flat_map(|i| (0..g.ny()).map(move |j| (i, j)))
            .any(|(i, j)| !rows.contains(&j) && omega.get(i, j) != 0.0);
        if outside {
            problems.push(format!(
                "nonzero outside the strip |y - {}| <= {:e}",
                self.center, self.strip_halfwidth
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Inadmissible(problems.join("; ")))
        }
    }
}

/// `𝓔 = e1 + e2 + e3`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    /// `½∫ω𝒢ω`.
    pub e1: f64,
    /// `−½∫(y−c)²ω`.
    pub e2: f64,
    /// `−ε²∫F(ω)`.
    pub e3: f64,
    pub total: f64,
}

/// Knobs of [`maximize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Damping of the Euler–Lagrange fixed point.
    pub theta: f64,
    /// Iteration cap of the fixed point.
    pub max_iters: usize,
    /// Relative `L¹` change at which the fixed point stops.
    pub tol: f64,
    /// Steiner symmetrization cadence during ascent.
    pub steiner_every: usize,
    /// Projected-ascent steps before the fixed point.
    pub phase1_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            theta: 0.3,
            max_iters: 5000,
            tol: 1e-8,
            steiner_every: 10,
            phase1_steps: 200,
        }
    }
}

/// Output of [`maximize`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub spec: AdmissibleSpec,
    pub omega: Field,
    pub psi: Field,
    pub alpha: f64,
    pub energy: EnergyBreakdown,
    /// `sup_{supp} |H − α| / α`.
    pub el_residual_on_supp: f64,
    /// `max_{off supp} (H − α)₊ / α`.
    pub el_violation_off_supp: f64,
    pub supp_x_halfwidth: f64,
    pub supp_y_halfwidth: f64,
    pub max_amp: f64,
    pub mass: f64,
    /// Ascent steps plus fixed-point iterations.
    pub iterations: usize,
    pub converged: bool,
    /// Energy after every accepted ascent step, starting with the initial
    /// state.
    pub phase1_energies: Vec<f64>,
    pub warnings: Vec<String>,
}

/// The energy functional on one grid, with its Poisson solver and the strip
/// rows on which admissible fields live.
#[derive(Debug, Clone)]
pub struct EnergyFunctional<'a> {
    spec: AdmissibleSpec,
    fam: &'a PenaltyFamily,
    solver: PoissonSolver,
    rows: RangeInclusive<usize>,
}

impl<'a> EnergyFunctional<'a> {
    pub fn new(grid: ChannelGrid, spec: AdmissibleSpec, fam: &'a PenaltyFamily) -> Result<Self> {
        check_family(&spec, fam)?;
        Ok(Self {
            spec,
            fam,
            solver: PoissonSolver::new(grid),
            rows: spec.strip_rows(&grid),
        })
    }

    pub fn spec(&self) -> &AdmissibleSpec {
        &self.spec
    }

    pub fn family(&self) -> &PenaltyFamily {
        self.fam
    }

    pub fn grid(&self) -> &ChannelGrid {
        self.solver.grid()
    }

    pub fn strip_rows(&self) -> RangeInclusive<usize> {
        self.rows.clone()
    }

    /// `𝒢ω` on the strip rows (zero elsewhere).
    pub fn psi_on_strip(&self, omega: &Field) -> Result<Field> {
        self.solver.stream_function_rows(omega, self.rows.clone())
    }

    /// `𝒢ω` everywhere.
    pub fn psi(&self, omega: &Field) -> Result<Field> {
        self.solver.stream_function(omega)
    }

    /// Energy without the admissibility check, with the `ψ` it used.
    pub fn evaluate(&self, omega: &Field) -> Result<(EnergyBreakdown, Field)> {
        let psi = self.psi_on_strip(omega)?;
        let e = self.evaluate_with(omega, &psi)?;
        Ok((e, psi))
    }

    /// Energy given `ψ = 𝒢ω` on at least the support of `ω`.
    pub fn evaluate_with(&self, omega: &Field, psi: &Field) -> Result<EnergyBreakdown> {
        let e1 = 0.5 * grid::inner(omega, psi)?;
        let g = self.grid();
        let c = self.spec.center;
        let mut moment = 0.0;
        let mut penalty = 0.0;
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                let w = omega.get(i, j);
                if w == 0.0 {
                    continue;
                }
                let dy = g.y(j) - c;
                moment += g.weight(j) * dy * dy * w;
                penalty += g.weight(j) * self.fam.penalty(w)?;
            }
        }
        let e2 = -0.5 * moment;
        let e3 = -self.spec.eps * self.spec.eps * penalty;
        Ok(EnergyBreakdown {
            e1,
            e2,
            e3,
            total: e1 + e2 + e3,
        })
    }

    /// First variation `H = ψ − (y−c)²/2 − ε²F'(ω)`.
    pub fn first_variation(&self, omega: &Field, psi: &Field) -> Result<Field> {
        let eps2 = self.spec.eps * self.spec.eps;
        let c = self.spec.center;
        let g = *self.grid();
        let mut h = Field::zeros(g);
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                let dy = g.y(j) - c;
                let v = psi.get(i, j) - 0.5 * dy * dy - eps2 * self.fam.penalty_prime(omega.get(i, j))?;
                h.set(i, j, v);
            }
        }
        Ok(h)
    }
}

fn check_family(spec: &AdmissibleSpec, fam: &PenaltyFamily) -> Result<()> {
    if spec.eps != fam.eps() || spec.q != fam.q() {
        return Err(Error::InvalidInput(format!(
            "admissible class (eps {}, q {}) and penalty family (eps {}, q {}) disagree",
            spec.eps,
            spec.q,
            fam.eps(),
            fam.q()
        )));
    }
    Ok(())
}

/// `𝓔(ω)` for an admissible `ω`.
pub fn energy(omega: &Field, spec: &AdmissibleSpec, fam: &PenaltyFamily) -> Result<EnergyBreakdown> {
    spec.check(omega)?;
    let ev = EnergyFunctional::new(*omega.grid(), *spec, fam)?;
    Ok(ev.evaluate(omega)?.0)
}

/// The thin-ellipse trial state `ω = ε^{1-q}/(π|ln ε|²)·1_B` with
/// `B = {(x/a)² + ((y−c)/ε)² ≤ 1}`, `a = ε^q|ln ε|²`, whose mass is `ε²`.
///
/// Each node carries the fraction of its cell covered by `B`, so the
/// discrete mass matches the continuous one up to the strip cut; a sampling
/// overshoot of the mass cap is scaled away.
pub fn trial_ellipse(grid: &ChannelGrid, spec: &AdmissibleSpec, fam: &PenaltyFamily) -> Result<Field> {
    check_family(spec, fam)?;
    let (eps, l) = (spec.eps, fam.l());
    let a = libm::pow(eps, spec.q) * l * l;
    let b = eps;
    if grid.hy() > 0.25 * b {
        return Err(Error::Resolution(format!("hy = {} exceeds eps/4 = {}", grid.hy(), 0.25 * b)));
    }
    if grid.hx() > 0.125 * a {
        return Err(Error::Resolution(format!(
            "hx = {} exceeds a/8 = {} for the ellipse semi-axis a = {a}",
            grid.hx(),
            0.125 * a
        )));
    }
    if a + grid.hx() >= grid.lx() {
        return Err(Error::Resolution(format!(
            "ellipse semi-axis a = {a} does not fit in the box |x| <= {}",
            grid.lx()
        )));
    }
    let amp = spec.amp_cap / (PI * l * l);
    let c = spec.center;
    let rows = spec.strip_rows(grid);
    let (hx, hy) = (grid.hx(), grid.hy());
    let inside = |x: f64, y: f64| (x / a) * (x / a) + ((y - c) / b) * ((y - c) / b) <= 1.0;
    let sub = 16;
    let mut out = Field::zeros(*grid);
    for i in 0..grid.nx() {
        let x = grid.x(i);
        if x.abs() > a + hx {
            continue;
        }
        for j in rows.clone() {
            let y = grid.y(j);
            if (y - c).abs() > b + hy {
                continue;
            }
            let mut hits = 0usize;
            for p in 0..sub {
                for r in 0..sub {
                    let sx = x + ((p as f64 + 0.5) / sub as f64 - 0.5) * hx;
                    let sy = y + ((r as f64 + 0.5) / sub as f64 - 0.5) * hy;
                    hits += inside(sx, sy) as usize;
                }
            }
            if hits > 0 {
                out.set(i, j, amp * hits as f64 / (sub * sub) as f64);
            }
        }
    }
    // Sub-cell sampling can overshoot the mass by a few parts in 10⁴.
    let mass = out.integrate();
    if mass > spec.mass_cap {
        let s = spec.mass_cap / mass;
        for v in out.values_mut() {
            *v *= s;
        }
    }
    Ok(out)
}

/// Projection onto the admissible set: clamp to `[0, cap]`, zero outside the
/// strip, and rescale if the mass exceeds `ε²`.
pub fn project(omega: &Field, spec: &AdmissibleSpec) -> Field {
    let g = *omega.grid();
    let rows = spec.strip_rows(&g);
    let mut out = Field::zeros(g);
    for i in 0..g.nx() {
        for j in rows.clone() {
            out.set(i, j, omega.get(i, j).clamp(0.0, spec.amp_cap));
        }
    }
    let mass = out.integrate();
    if mass > spec.mass_cap {
        let s = spec.mass_cap / mass;
        for v in out.values_mut() {
            *v *= s;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(eps: f64, q: f64, c: f64) -> (AdmissibleSpec, PenaltyFamily) {
        (AdmissibleSpec::new(eps, q, c).unwrap(), PenaltyFamily::new(eps, q).unwrap())
    }

    #[test]
    fn zero_field_has_zero_energy() {
        let (spec, fam) = setup(0.1, 0.25, 0.0);
        let g = ChannelGrid::new(65, 81, 8.0).unwrap();
        let e = energy(&Field::zeros(g), &spec, &fam).unwrap();
        assert_eq!(e, EnergyBreakdown::default());
    }

    #[test]
    fn inadmissible_fields_are_named() {
        let (spec, fam) = setup(0.1, 0.25, 0.0);
        let g = ChannelGrid::new(65, 81, 8.0).unwrap();
        let mut w = Field::zeros(g);
        w.set(32, 0, 1.0);
        w.set(32, 40, -1.0);
        match energy(&w, &spec, &fam) {
            Err(Error::Inadmissible(msg)) => {
                assert!(msg.contains("negative"));
                assert!(msg.contains("amplitude"));
                assert!(msg.contains("strip"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trial_ellipse_mass_and_amplitude() {
        let (spec, fam) = setup(0.05, 0.25, 0.0);
        let g = ChannelGrid::new(257, 161, 8.0).unwrap();
        let w = trial_ellipse(&g, &spec, &fam).unwrap();
        assert!((w.integrate() / (0.05 * 0.05) - 1.0).abs() < 0.02);
        let amp = spec.amp_cap / (PI * fam.l() * fam.l());
        assert!((w.max() / amp - 1.0).abs() < 1e-3);
        assert!(w.max() <= spec.amp_cap);
        spec.check(&w).unwrap();
    }

    #[test]
    fn trial_ellipse_follows_the_strip() {
        let (spec, fam) = setup(0.05, 0.25, 0.5);
        let g = ChannelGrid::new(257, 161, 8.0).unwrap();
        let w = trial_ellipse(&g, &spec, &fam).unwrap();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                if w.get(i, j) > 0.0 {
                    lo = lo.min(g.y(j));
                    hi = hi.max(g.y(j));
                }
            }
        }
        assert!((0.5 * (lo + hi) - 0.5).abs() <= g.hy());
    }

    #[test]
    fn trial_ellipse_needs_resolution() {
        let (spec, fam) = setup(0.05, 0.25, 0.0);
        let coarse = ChannelGrid::new(257, 33, 8.0).unwrap();
        assert!(matches!(trial_ellipse(&coarse, &spec, &fam), Err(Error::Resolution(_))));
        let short = ChannelGrid::new(257, 161, 3.0).unwrap();
        assert!(matches!(trial_ellipse(&short, &spec, &fam), Err(Error::Resolution(_))));
    }

    #[test]
    fn projection_is_admissible() {
        let (spec, _) = setup(0.1, 0.25, 0.0);
        let g = ChannelGrid::new(65, 81, 8.0).unwrap();
        let w = Field::from_fn(g, |x, y| 3.0 * libm::cos(x) - y);
        let p = project(&w, &spec);
        spec.check(&p).unwrap();
    }
}
