use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::diagnostics::{support_extents_of, SUPPORT_THRESHOLD};
use super::steiner::{steiner, symmetrize_even};
use super::{project, trial_ellipse, AdmissibleSpec, EnergyBreakdown, EnergyFunctional, SolveReport, SolverOptions};
use crate::grid::{ChannelGrid, Field};
use crate::penalty::PenaltyFamily;
use crate::{Error, Result};

/// Collapse threshold as a fraction of `ε²`.
const DEGENERATE_FRACTION: f64 = 1e-3;
const MAX_HALVINGS: usize = 60;

/// Result of the projected ascent.
#[derive(Debug, Clone, PartialEq)]
pub struct AscentReport {
    pub omega: Field,
    /// `𝒢ω` on the strip rows.
    pub psi: Field,
    pub energy: EnergyBreakdown,
    /// Energy of the initial state followed by every accepted step.
    pub energies: Vec<f64>,
    pub steps: usize,
    /// The last step changed `ω` by less than the tolerance.
    pub stationary: bool,
    pub warnings: Vec<String>,
}

fn rel_l1_change(a: &Field, b: &Field) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.values().iter().zip(b.values()) {
        num += (x - y).abs();
        den += y.abs();
    }
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

fn add_scaled(a: &Field, b: &Field, t: f64) -> Field {
    let mut out = a.clone();
    for (o, v) in out.values_mut().iter_mut().zip(b.values()) {
        *o += t * v;
    }
    out
}

/// Projected gradient ascent along `H = δ𝓔/δω` with a backtracking line
/// search that never lets the energy decrease. Every `steiner_every` steps
/// the iterate is Steiner-symmetrized; the symmetrized state is kept only if
/// its energy is not lower.
pub fn ascend(
    initial: &Field,
    spec: &AdmissibleSpec,
    fam: &PenaltyFamily,
    opts: &SolverOptions,
) -> Result<AscentReport> {
    let ev = EnergyFunctional::new(*initial.grid(), *spec, fam)?;
    let threshold = DEGENERATE_FRACTION * spec.mass_cap;
    let mut omega = project(initial, spec);
    let (mut energy, mut psi) = ev.evaluate(&omega)?;
    let mut energies = Vec::with_capacity(opts.phase1_steps + 1);
    energies.push(energy.total);
    let mut warnings = Vec::new();
    let mut tau = 0.0;
    let mut stationary = false;
    let mut steps = 0;

    for step in 1..=opts.phase1_steps {
        let h = ev.first_variation(&omega, &psi)?;
        if tau == 0.0 {
            let hmax = h.max_abs();
            if hmax == 0.0 {
                stationary = true;
                break;
            }
            tau = 0.1 * spec.amp_cap.min(omega.max().max(f64::MIN_POSITIVE)) / hmax;
        }
        let mut accepted = None;
        let mut last_change = f64::INFINITY;
        for _ in 0..MAX_HALVINGS {
            let cand = project(&add_scaled(&omega, &h, tau), spec);
            let (e, p) = ev.evaluate(&cand)?;
            last_change = rel_l1_change(&cand, &omega);
            if e.total >= energy.total {
                accepted = Some((cand, e, p));
                break;
            }
            tau *= 0.5;
        }
        let Some((cand, e, p)) = accepted else {
            if last_change < opts.tol {
                stationary = true;
                break;
            }
            return Err(Error::LineSearch {
                iteration: step,
                energy: energy.total,
            });
        };
        let change = rel_l1_change(&cand, &omega);
        omega = cand;
        energy = e;
        psi = p;
        tau *= 2.0;
        steps = step;

        if opts.steiner_every > 0 && step % opts.steiner_every == 0 {
            let sym = steiner(&omega)?;
            let (es, ps) = ev.evaluate(&sym)?;
            if es.total >= energy.total {
                omega = sym;
                energy = es;
                psi = ps;
            } else {
                warnings.push(format!(
                    "step {step}: Steiner symmetrization lowered the energy by {:e}; reverted",
                    energy.total - es.total
                ));
            }
        }
        energies.push(energy.total);

        let mass = omega.integrate();
        if mass < threshold {
            return Err(Error::DegenerateMaximizer { mass, threshold });
        }
        if change < opts.tol {
            stationary = true;
            break;
        }
    }
    Ok(AscentReport {
        omega,
        psi,
        energy,
        energies,
        steps,
        stationary,
        warnings,
    })
}

/// Mass of `f((b − α)/ε²)` (capped) over the strip nodes.
struct MassMap<'a> {
    base: Vec<(usize, usize, f64)>,
    weights: Vec<f64>,
    fam: &'a PenaltyFamily,
    eps2: f64,
    cap: f64,
}

impl MassMap<'_> {
    fn value(&self, b: f64, alpha: f64) -> f64 {
        self.fam.f_eval((b - alpha) / self.eps2).min(self.cap)
    }

    fn mass(&self, alpha: f64) -> f64 {
        self.base
            .iter()
            .zip(&self.weights)
            .map(|(&(_, _, b), w)| w * self.value(b, alpha))
            .sum()
    }

    /// `α` with `mass(α) = target`, by a safeguarded secant (Illinois) iteration.
    fn solve(&self, target: f64, guess: f64) -> Result<f64> {
        let top = self.base.iter().map(|t| t.2).fold(f64::NEG_INFINITY, f64::max);
        let mut hi = top;
        let mut f_hi = -target;
        let mut step = self.eps2;
        let mut lo = guess.min(top - step);
        let mut f_lo = self.mass(lo) - target;
        let mut tries = 0;
        while f_lo < 0.0 {
            hi = lo;
            f_hi = f_lo;
            lo -= step;
            step *= 2.0;
            f_lo = self.mass(lo) - target;
            tries += 1;
            if tries > 200 {
                return Err(Error::InvalidInput(
                    "no multiplier reaches the target mass inside the strip".into(),
                ));
            }
        }
        if f_lo == 0.0 {
            return Ok(lo);
        }
        // f_lo > 0 > f_hi, and mass is nonincreasing in α.
        let mut side = 0i8;
        for _ in 0..200 {
            let a = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            let a = if a > lo && a < hi { a } else { 0.5 * (lo + hi) };
            let fa = self.mass(a) - target;
            if fa.abs() <= 1e-13 * target || (hi - lo) <= 1e-15 * (hi.abs() + lo.abs()) {
                return Ok(a);
            }
            if fa > 0.0 {
                lo = a;
                f_lo = fa;
                if side == 1 {
                    f_hi *= 0.5;
                }
                side = 1;
            } else {
                hi = a;
                f_hi = fa;
                if side == -1 {
                    f_lo *= 0.5;
                }
                side = -1;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Two-phase maximizer: projected ascent from the trial ellipse, then the
/// damped Euler–Lagrange fixed point
/// `ω ← (1−θ)ω + θ f(ε^{-2}(ψ − (y−c)²/2 − α))` with `α` fixed each sweep by
/// `∫ω = ε²`.
pub fn maximize(
    grid: &ChannelGrid,
    spec: &AdmissibleSpec,
    fam: &PenaltyFamily,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    if !(opts.theta > 0.0 && opts.theta <= 1.0) {
        return Err(Error::InvalidInput(format!("theta must lie in (0, 1], got {}", opts.theta)));
    }
    let start = trial_ellipse(grid, spec, fam)?;
    let ascent = ascend(&start, spec, fam, opts)?;
    let mut warnings = ascent.warnings.clone();
    let ev = EnergyFunctional::new(*grid, *spec, fam)?;
    let threshold = DEGENERATE_FRACTION * spec.mass_cap;
    let eps2 = spec.eps * spec.eps;
    let c = spec.center;
    let rows = ev.strip_rows();

    let nodes: Vec<(usize, usize)> = (0..grid.nx())
        .flat_map(|i| rows.clone().map(move |j| (i, j)))
        .collect();
    let weights: Vec<f64> = nodes.iter().map(|&(_, j)| grid.weight(j)).collect();

    let mut omega = symmetrize_even(&ascent.omega);
    let mut alpha = 0.0;
    let mut converged = false;
    let mut iterations = ascent.steps;
    for _ in 0..opts.max_iters {
        iterations += 1;
        let psi = ev.psi_on_strip(&omega)?;
        let base = nodes
            .iter()
            .map(|&(i, j)| {
                let dy = grid.y(j) - c;
                (i, j, psi.get(i, j) - 0.5 * dy * dy)
            })
            .collect();
        let map = MassMap {
            base,
            weights: weights.clone(),
            fam,
            eps2,
            cap: spec.amp_cap,
        };
        alpha = map.solve(spec.mass_cap, alpha)?;
        let mut next = omega.scaled(1.0 - opts.theta);
        for &(i, j, b) in &map.base {
            let v = next.get(i, j) + opts.theta * map.value(b, alpha);
            next.set(i, j, v);
        }
        let change = rel_l1_change(&next, &omega);
        omega = next;
        let mass = omega.integrate();
        if mass < threshold {
            return Err(Error::DegenerateMaximizer { mass, threshold });
        }
        if change <= opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        warnings.push(format!(
            "fixed point did not reach relative change {} within {} iterations",
            opts.tol, opts.max_iters
        ));
    }
    if alpha <= 0.0 {
        warnings.push(format!("multiplier alpha = {alpha:e} is not positive"));
    }

    let psi = ev.psi(&omega)?;
    let energy = ev.evaluate_with(&omega, &psi)?;
    let h = ev.first_variation(&omega, &psi)?;
    let max_amp = omega.max();
    let cut = SUPPORT_THRESHOLD * max_amp;
    let mut on = 0.0f64;
    let mut off = 0.0f64;
    for i in 0..grid.nx() {
        for j in 1..grid.ny() - 1 {
            let d = h.get(i, j) - alpha;
            if omega.get(i, j) > cut {
                on = on.max(d.abs());
            } else {
                off = off.max(d);
            }
        }
    }
    let scale = alpha.abs();
    let extents = support_extents_of(&omega, fam);
    Ok(SolveReport {
        spec: *spec,
        mass: omega.integrate(),
        omega,
        psi,
        alpha,
        energy,
        el_residual_on_supp: on / scale,
        el_violation_off_supp: off / scale,
        supp_x_halfwidth: extents.x_halfwidth,
        supp_y_halfwidth: extents.y_halfwidth,
        max_amp,
        iterations,
        converged,
        phase1_energies: ascent.energies,
        warnings,
    })
}
