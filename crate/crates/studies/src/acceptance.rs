//! The ten acceptance criteria, each evaluated to one [`Verdict`].
//!
//! Criteria quantified over "every converged run" or "every constructed
//! maximizer" fail when the sweep produced none: there is nothing to certify.

use std::fmt;
use std::time::Instant;

use equil_core::greenkernel::convolve;
use equil_core::poisson::solve;
use equil_core::rigidity::{critical_layer, energy_identity_stats, threshold_witness};
use equil_core::variational::{energy, maximize, transport_residual, trial_ellipse};
use equil_core::{ChannelGrid, Field, PenaltyFamily, PoissonSolution, SolveReport};

use crate::fits::supp_x_monotone;
use crate::manifest::RunManifest;
use crate::sweep::{self, results_csv, spec_for, RunRecord, RunStatus, SweepOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} [{:>2}] {}: {}", self.id, self.name, self.detail)
    }
}

fn verdict(id: u8, name: &'static str, pass: bool, detail: String) -> Verdict {
    Verdict { id, name, pass, detail }
}

fn failures(o: &SweepOutcome) -> String {
    o.runs
        .iter()
        .map(|r| match &r.status {
            RunStatus::Failed(m) => format!("eps {}: {m}", r.eps),
            s => format!("eps {}: {}", r.eps, s.label()),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn converged(o: &SweepOutcome) -> Vec<(&RunRecord, &SolveReport)> {
    o.runs
        .iter()
        .filter(|r| r.converged())
        .filter_map(|r| r.report.as_ref().map(|p| (r, p)))
        .collect()
}

fn bump(g: ChannelGrid, x0: f64, y0: f64, a: f64, b: f64) -> Field {
    Field::from_fn(g, |x, y| {
        let r2 = ((x - x0) / a).powi(2) + ((y - y0) / b).powi(2);
        if r2 < 1.0 {
            (0.5 * std::f64::consts::PI * r2.sqrt()).cos().powi(4)
        } else {
            0.0
        }
    })
}

fn rel_l2(a: &Field, b: &Field) -> f64 {
    a.zip_map(b, |x, y| x - y).expect("same grid").l2_norm() / b.l2_norm()
}

/// 1. Direct convolution against the fast solver on 129×65.
pub fn crossval() -> Verdict {
    let start = Instant::now();
    let g = ChannelGrid::new(129, 65, 8.0).expect("grid");
    let inputs = [
        bump(g, 0.0, 0.0, 1.5, 0.6),
        bump(g, 0.7, -0.3, 1.0, 0.4),
        bump(g, -0.4, 0.2, 2.0, 0.7).map_xy(|x, _, v| v * (1.0 + 0.5 * (2.0 * x).sin())),
    ];
    let mut errs = Vec::new();
    for w in &inputs {
        match solve(w) {
            Ok(s) => errs.push(rel_l2(&convolve(w), &s.psi)),
            Err(e) => return verdict(1, "solver cross-validation", false, e.to_string()),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    verdict(
        1,
        "solver cross-validation",
        worst <= 1e-3 && secs < 30.0,
        format!("max rel L2 {worst:.2e} (<= 1e-3), {secs:.1} s (< 30 s)"),
    )
}

fn spread(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// 2. The four penalty properties with ε-stable constants.
pub fn penalty_suite(eps_list: &[f64], q: f64) -> Verdict {
    let mut legendre = Vec::new();
    let mut linear = Vec::new();
    let mut ok = true;
    let mut notes = Vec::new();
    for &eps in eps_list {
        let fam = match PenaltyFamily::new(eps, q) {
            Ok(f) => f,
            Err(e) => return verdict(2, "penalty suite", false, e.to_string()),
        };
        let sl = fam.slope();
        let n = 3000;
        let grid: Vec<f64> = (0..=n).map(|k| 3.0 * sl * k as f64 / n as f64).collect();
        let fp: Vec<f64> = grid.iter().map(|&s| fam.penalty_prime(s).unwrap_or(f64::NAN)).collect();
        let ff: Vec<f64> = grid.iter().map(|&s| fam.penalty(s).unwrap_or(f64::NAN)).collect();
        // sF'(s) − 2F(s) ≤ C·slope; the size of the excess is the constant.
        let excess: Vec<f64> = grid.iter().zip(fp.iter().zip(&ff)).map(|(s, (p, f))| (s * p - 2.0 * f) / sl).collect();
        let sup = excess.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let c1 = excess.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        // F(s) ≤ C·s on (0, slope].
        let c2 = grid.iter().zip(&ff).skip(1).filter(|(s, _)| **s <= sl).map(|(s, f)| f / s).fold(0.0, f64::max);
        // F'(s) = |ln ε|²ε^{q−1}s above the slope.
        let k = fam.l() * fam.l() * eps.powf(q - 1.0);
        let lin = grid.iter().zip(&fp).filter(|(s, _)| **s >= sl).map(|(s, p)| (p - k * s).abs() / (k * s)).fold(0.0, f64::max);
        // Convexity.
        let scale = ff.last().copied().unwrap_or(1.0).abs();
        let convex = ff.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] >= -1e-12 * scale);
        let good = sup <= 10.0 && c1 <= 10.0 && c2 <= 2.0 && lin <= 1e-12 && convex && c1.is_finite();
        ok &= good;
        legendre.push(c1);
        linear.push(c2);
        notes.push(format!("eps {eps}: C1 {c1:.3}, C3 {c2:.3}, F' rel err {lin:.1e}, convex {convex}"));
    }
    let stable = spread(&legendre) <= 2.0 && spread(&linear) <= 2.0;
    verdict(
        2,
        "penalty suite",
        ok && stable,
        format!("{}; constant spreads {:.3}, {:.3} (<= 2)", notes.join("; "), spread(&legendre), spread(&linear)),
    )
}

/// 3. `𝓔(trial ellipse) ≥ 0.01|ln ε|ε⁴ > 0` at every ε.
pub fn positivity(o: &SweepOutcome, id: u8) -> Verdict {
    let mut ok = !o.runs.is_empty();
    let mut parts = Vec::new();
    for r in &o.runs {
        match r.trial {
            Some(t) => {
                let floor = 0.01 * r.eps.ln().abs() * r.eps.powi(4);
                ok &= t.total > 0.0 && t.total >= floor;
                parts.push(format!("eps {}: E/(|ln eps| eps^4) = {:.4}", r.eps, t.total / (floor / 0.01)));
            }
            None => {
                ok = false;
                parts.push(format!("eps {}: no trial energy", r.eps));
            }
        }
    }
    verdict(id, "positivity", ok, format!("{} (need >= 0.01)", parts.join("; ")))
}

/// 4. Euler–Lagrange structure and multiplier bounds of every converged run.
pub fn maximizer_structure(sweeps: &[&SweepOutcome]) -> Verdict {
    let mut n = 0;
    let mut bad = Vec::new();
    for o in sweeps {
        for (r, p) in converged(o) {
            n += 1;
            let d = r.diagnostics.as_ref();
            let eps = r.eps;
            let cap = eps.powf(o.manifest.q);
            let cap = eps / cap;
            let checks = [
                ("el_res", p.el_residual_on_supp <= 0.05),
                ("el_viol", p.el_violation_off_supp <= 0.05),
                ("max_amp", p.max_amp < 0.9 * cap),
                ("alpha>0", p.alpha > 0.0),
                ("alpha/(eps^2 L)", d.is_some_and(|d| d.alpha_over_eps2l >= 0.05)),
                ("claim", d.is_some_and(|d| d.claim_over_eps2 <= 20.0)),
            ];
            for (name, good) in checks {
                if !good {
                    bad.push(format!("{} eps {eps}: {name}", o.manifest.mode));
                }
            }
        }
    }
    if n == 0 {
        let why = sweeps.iter().map(|o| failures(o)).collect::<Vec<_>>().join("; ");
        return verdict(4, "maximizer structure", false, format!("no converged runs ({why})"));
    }
    let pass = bad.is_empty();
    verdict(
        4,
        "maximizer structure",
        pass,
        if pass { format!("{n} converged runs within bounds") } else { bad.join("; ") },
    )
}

fn doubled(g: &ChannelGrid) -> equil_core::Result<ChannelGrid> {
    ChannelGrid::new(2 * g.nx() - 1, 2 * g.ny() - 1, g.lx())
}

/// 5. Transport residual order ≥ 1 under grid doubling at the largest ε.
pub fn steadiness(o: &SweepOutcome, id: u8) -> Verdict {
    let name = "steadiness";
    let Some(r) = o.runs.first() else {
        return verdict(id, name, false, "empty sweep".into());
    };
    let Some(coarse) = r.report.as_ref().filter(|_| r.converged()) else {
        return verdict(id, name, false, format!("no converged maximizer at eps {} ({})", r.eps, failures(o)));
    };
    let run = || -> equil_core::Result<(f64, f64)> {
        let (spec, fam) = spec_for(&o.manifest, r.eps).map_err(|e| equil_core::Error::InvalidInput(e.to_string()))?;
        let fine_grid = doubled(coarse.omega.grid())?;
        let fine = maximize(&fine_grid, &spec, &fam, &o.manifest.solver.into())?;
        if !fine.converged {
            return Err(equil_core::Error::InvalidInput("refined run did not converge".into()));
        }
        let a = transport_residual(&coarse.omega, &coarse.psi, spec.center)?;
        let b = transport_residual(&fine.omega, &fine.psi, spec.center)?;
        Ok((a, b))
    };
    match run() {
        Ok((a, b)) => {
            let order = (a / b).log2();
            verdict(id, name, order >= 1.0, format!("eps {}: residual {a:.3e} -> {b:.3e}, order {order:.2} (>= 1)", r.eps))
        }
        Err(e) => verdict(id, name, false, format!("eps {}: {e}", r.eps)),
    }
}

/// 6. Scaling fits of the solution norms and support widths.
pub fn scaling_fits(o: &SweepOutcome, id: u8) -> Verdict {
    let wanted = ["norm:lp:0:1", "norm:lp:0:inf", "norm:dsup:1", "norm:wsp:0.5:2", "norm:wsp:1:2", "norm:wsp:1.4:2", "supp_y"];
    let mut ok = true;
    let mut parts = Vec::new();
    for q in wanted {
        match o.fits.iter().find(|f| f.quantity == q) {
            Some(row) => {
                ok &= row.pass();
                parts.push(match &row.fit {
                    Some(f) => format!("{q} slope {:.3} vs {:.3}±{}", f.slope, f.predicted, f.tolerance),
                    None => format!("{q}: {}", row.note),
                });
            }
            None => {
                ok = false;
                parts.push(format!("{q}: missing"));
            }
        }
    }
    let mono = supp_x_monotone(&o.runs);
    ok &= mono == Some(true);
    parts.push(format!("supp_x monotone: {}", mono.map_or("undetermined".into(), |b| b.to_string())));
    verdict(id, "scaling fits", ok, parts.join("; "))
}

/// 7. Zero crossing of the `W^{s,2}` slope and the Hölder slope signs.
pub fn threshold(o: &SweepOutcome, id: u8) -> Verdict {
    let reports: Vec<SolveReport> = converged(o).into_iter().map(|(_, p)| p.clone()).collect();
    let q = o.manifest.q;
    let s_grid = [0.0, 0.5, 1.0, 1.5 - 2.0 * q - 0.1, 1.45, 1.7];
    match threshold_witness(&reports, q, 2.0, &s_grid) {
        Ok(w) => {
            let c0 = w.holder_c0_09.slope;
            let c1 = w.holder_c1_05.slope;
            let pass = w.in_band && c0 > 0.0 && c1 < 0.0;
            verdict(
                id,
                "threshold witness",
                pass,
                format!(
                    "s0 {} in [{:.2}, {:.2}]; C^(0,0.9) slope {c0:.3} (> 0); C^(1,0.5) slope {c1:.3} (< 0){}",
                    w.s0.map_or("none".into(), |v| format!("{v:.3}")),
                    w.band.0,
                    w.band.1,
                    if w.low_confidence { "; low confidence" } else { "" }
                ),
            )
        }
        Err(e) => verdict(id, "threshold witness", false, format!("{e} ({})", failures(o))),
    }
}

/// 8. Criteria 3–7 in traveling mode plus centring of the support at `c`.
pub fn traveling_parity(o: &SweepOutcome) -> Verdict {
    let sub = [positivity(o, 8), maximizer_structure(&[o]), steadiness(o, 8), scaling_fits(o, 8), threshold(o, 8)];
    let mut ok = sub.iter().all(|v| v.pass);
    let c = o.manifest.c;
    let runs = converged(o);
    ok &= !runs.is_empty();
    for (r, p) in &runs {
        let hy = p.omega.grid().hy();
        let centre = r.diagnostics.as_ref().map_or(f64::NAN, |d| d.supp_y_center);
        ok &= (centre - c).abs() <= 2.0 * hy;
    }
    let failed: Vec<&str> = sub.iter().filter(|v| !v.pass).map(|v| v.name).collect();
    verdict(
        8,
        "traveling-wave parity",
        ok,
        format!(
            "c = {c}; failing sub-criteria: [{}]; {} converged runs checked for centring",
            failed.join(", "),
            runs.len()
        ),
    )
}

/// `ψ = (1 − y²)² e^{−x²}` with exact vorticity and velocity.
fn manufactured(g: ChannelGrid) -> (Field, PoissonSolution) {
    let psi = Field::from_fn(g, |x, y| (1.0 - y * y).powi(2) * (-x * x).exp());
    let omega = Field::from_fn(g, |x, y| {
        let e = (-x * x).exp();
        -((4.0 * x * x - 2.0) * e * (1.0 - y * y).powi(2) + e * (12.0 * y * y - 4.0))
    });
    let ux = Field::from_fn(g, |x, y| -4.0 * y * (1.0 - y * y) * (-x * x).exp());
    let uy = Field::from_fn(g, |x, y| 2.0 * x * (1.0 - y * y).powi(2) * (-x * x).exp());
    (omega, PoissonSolution { psi, ux, uy, residual_l2: 0.0, warnings: Vec::new() })
}

/// 9. Energy identity on manufactured fields, contraction ratio on the
/// maximizers, and the critical-layer lower bound.
pub fn rigidity_probe(sweeps: &[&SweepOutcome]) -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;

    let mut worst: f64 = 0.0;
    let g = ChannelGrid::new(257, 65, 6.0).expect("grid");
    let (w, sol) = manufactured(g);
    match energy_identity_stats(&w, &sol, 0.0).map(|s| s.identity_error()) {
        Ok(Some(e)) => worst = worst.max(e),
        _ => ok = false,
    }
    let g = ChannelGrid::new(257, 129, 4.0).expect("grid");
    let w = bump(g, 0.0, 0.1, 1.0, 0.5);
    match solve(&w).and_then(|s| energy_identity_stats(&w, &s, 0.0)).map(|s| s.identity_error()) {
        Ok(Some(e)) => worst = worst.max(e),
        _ => ok = false,
    }
    ok &= worst <= 0.05;
    parts.push(format!("manufactured identity error {worst:.2e} (<= 5%)"));

    let mut ratios = Vec::new();
    for o in sweeps {
        for (r, _) in converged(o) {
            ratios.push(r.diagnostics.as_ref().and_then(|d| d.identity.ratio).unwrap_or(f64::NAN));
        }
    }
    if ratios.is_empty() {
        ok = false;
        parts.push("no constructed maximizers for the contraction ratio".into());
    } else {
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        ok &= ratios.iter().all(|r| *r >= 1.0);
        parts.push(format!("min contraction ratio {min:.3} over {} maximizers (>= 1)", ratios.len()));
    }

    let g = ChannelGrid::new(65, 33, 3.0).expect("grid");
    let mut layers = 0;
    let mut bound_ok = true;
    for (amp, x0, y0, c) in [(0.3, 0.0, 0.0, 0.0), (-0.4, 0.3, 0.2, 0.4), (0.2, -0.5, -0.3, -0.6), (0.5, 0.1, 0.0, 0.95)] {
        if let Ok(s) = solve(&bump(g, x0, y0, 0.8, 0.4).scaled(amp)) {
            let l = critical_layer(&s.ux, c);
            if l.monotone_ok {
                layers += 1;
                bound_ok &= l.lower_bound_holds(&s.ux) && l.root_residuals(&s.ux).iter().all(|r| r.abs() <= 1e-9);
            }
        }
    }
    for o in sweeps {
        for (_, p) in converged(o) {
            let (w, c) = equil_core::rigidity::euler_frame(&p.omega, p.spec.center);
            if let Ok(s) = solve(&w) {
                let l = critical_layer(&s.ux, c);
                if l.monotone_ok {
                    layers += 1;
                    bound_ok &= l.lower_bound_holds(&s.ux) && l.root_residuals(&s.ux).iter().all(|r| r.abs() <= 1e-9);
                }
            }
        }
    }
    ok &= bound_ok && layers > 0;
    parts.push(format!("layer lower bound on {layers} monotone layers: {bound_ok}"));
    verdict(9, "rigidity probe", ok, parts.join("; "))
}

/// 10. Two runs of one manifest, the second parsed back from its JSON echo,
/// give identical `results.csv` bytes.
pub fn determinism(m: &RunManifest) -> Verdict {
    let run = |m: &RunManifest| -> crate::Result<Vec<u8>> { results_csv(&sweep::execute(m)?) };
    let outcome = (|| -> crate::Result<(Vec<u8>, Vec<u8>)> {
        let a = run(m)?;
        let echoed = RunManifest::from_json(&m.to_json()?)?;
        Ok((a, run(&echoed)?))
    })();
    match outcome {
        Ok((a, b)) => verdict(
            10,
            "determinism",
            a == b && !a.is_empty(),
            format!("{} bytes, identical: {}", a.len(), a == b),
        ),
        Err(e) => verdict(10, "determinism", false, e.to_string()),
    }
}

/// Trial-ellipse energy of one `ε`, for reports.
pub fn trial_energy(m: &RunManifest, eps: f64) -> crate::Result<equil_core::EnergyBreakdown> {
    let g = m.grid_for(eps)?;
    let (spec, fam) = spec_for(m, eps)?;
    Ok(energy(&trial_ellipse(&g, &spec, &fam)?, &spec, &fam)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_line_format() {
        let v = verdict(3, "positivity", false, "x".into());
        assert_eq!(v.to_string(), "FAIL [ 3] positivity: x");
    }

    #[test]
    fn criteria_over_no_runs_fail() {
        let m = RunManifest::desk_sweep(crate::Mode::Steady, 0.0);
        let o = SweepOutcome { manifest: m, runs: Vec::new(), fits: Vec::new(), partial: false };
        assert!(!maximizer_structure(&[&o]).pass);
        assert!(!positivity(&o, 3).pass);
        assert!(!steadiness(&o, 5).pass);
        assert!(!threshold(&o, 7).pass);
    }
}
