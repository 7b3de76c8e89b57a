//! ε-sweeps: one maximization per ε on a worker pool, then diagnostics, the
//! norm battery, scaling fits and the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use equil_core::poisson::solve;
use equil_core::rigidity::{critical_layer, energy_identity_stats, euler_frame, EnergyIdentity};
use equil_core::variational::{
    energy, gradient_check, maximize, multiplier_diagnostics, support_extents, transport_residual, trial_ellipse,
};
use equil_core::{AdmissibleSpec, ChannelGrid, EnergyBreakdown, Field, PenaltyFamily, SolveReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::battery::{self, NormValue};
use crate::error::{io_err, Result};
use crate::fieldio;
use crate::fits::{self, FitRow};
use crate::manifest::{Mode, RunManifest};
use crate::plot;

/// Pool size override.
pub const THREADS_ENV: &str = "EQUIL_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Converged,
    NotConverged,
    Failed(String),
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::NotConverged => "not_converged",
            RunStatus::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub alpha_over_eps2l: f64,
    pub claim_over_eps2: f64,
    /// `supp_x·|ln ε|`.
    pub rx: f64,
    /// `supp_y/(ε|ln ε|^{1/2})`.
    pub ry: f64,
    /// Centre of the support rectangle in `y`.
    pub supp_y_center: f64,
    pub transport_residual: f64,
    pub grad_check_rel_err: f64,
    /// Energy identity of the Euler pair `(−ω, −c)`.
    pub identity: EnergyIdentity,
    pub layer_monotone: bool,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub eps: f64,
    pub grid: Option<ChannelGrid>,
    pub status: RunStatus,
    pub trial: Option<EnergyBreakdown>,
    pub report: Option<SolveReport>,
    pub diagnostics: Option<Diagnostics>,
    pub norms: Vec<NormValue>,
}

impl RunRecord {
    pub fn converged(&self) -> bool {
        self.status == RunStatus::Converged
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub manifest: RunManifest,
    pub runs: Vec<RunRecord>,
    pub fits: Vec<FitRow>,
    /// Some run did not converge.
    pub partial: bool,
}

pub fn spec_for(m: &RunManifest, eps: f64) -> Result<(AdmissibleSpec, PenaltyFamily)> {
    let c = match m.mode {
        Mode::Steady => 0.0,
        Mode::Traveling => m.c,
    };
    Ok((AdmissibleSpec::new(eps, m.q, c)?, PenaltyFamily::new(eps, m.q)?))
}

/// Mean-zero perturbation supported where `ω > 0`, proportional to `ω`.
fn random_perturbation(omega: &Field, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cut = 1e-6 * omega.max();
    let supp = omega.map(|v| if v > cut { 1.0 } else { 0.0 });
    let d = omega.map(|v| if v > cut { rng.gen_range(-1.0..1.0) * v } else { 0.0 });
    let shift = d.integrate() / supp.integrate().max(f64::MIN_POSITIVE);
    d.zip_map(&supp, |a, s| a - shift * s).expect("same grid")
}

pub fn diagnose(rep: &SolveReport, fam: &PenaltyFamily, seed: u64) -> Result<Diagnostics> {
    let spec = rep.spec;
    let md = multiplier_diagnostics(rep, fam)?;
    let ext = support_extents(rep, fam);
    let transport = transport_residual(&rep.omega, &rep.psi, spec.center)?;
    let grad = gradient_check(&rep.omega, &random_perturbation(&rep.omega, seed), &spec, fam, 1e-6)?;
    let (w, c) = euler_frame(&rep.omega, spec.center);
    let sol = solve(&w)?;
    let layer = critical_layer(&sol.ux, c);
    let identity = energy_identity_stats(&w, &sol, c)?;
    Ok(Diagnostics {
        alpha_over_eps2l: md.alpha_over_eps2l,
        claim_over_eps2: md.claim_integral_over_eps2,
        rx: ext.rx,
        ry: ext.ry,
        supp_y_center: ext.y_center,
        transport_residual: transport,
        grad_check_rel_err: grad.rel_error,
        identity,
        layer_monotone: layer.monotone_ok,
    })
}

/// Maximization, diagnostics and norm battery at one `ε`.
pub fn run_one(m: &RunManifest, index: usize) -> RunRecord {
    let eps = m.eps_list[index];
    let mut rec = RunRecord {
        eps,
        grid: None,
        status: RunStatus::Failed(String::new()),
        trial: None,
        report: None,
        diagnostics: None,
        norms: Vec::new(),
    };
    let result = (|| -> Result<()> {
        let grid = m.grid_for(eps)?;
        rec.grid = Some(grid);
        let (spec, fam) = spec_for(m, eps)?;
        rec.trial = Some(energy(&trial_ellipse(&grid, &spec, &fam)?, &spec, &fam)?);
        let rep = maximize(&grid, &spec, &fam, &m.solver.into())?;
        rec.status = if rep.converged { RunStatus::Converged } else { RunStatus::NotConverged };
        if rep.converged {
            rec.diagnostics = Some(diagnose(&rep, &fam, m.seed ^ index as u64)?);
            rec.norms = battery::evaluate(&rep.omega, &battery::battery(m.q))?;
        }
        rec.report = Some(rep);
        Ok(())
    })();
    if let Err(e) = result {
        rec.status = RunStatus::Failed(e.to_string());
    }
    rec
}

fn pool_size() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs every `ε` of the manifest (in parallel) and fits the scaling laws.
pub fn execute(m: &RunManifest) -> Result<SweepOutcome> {
    m.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = pool_size() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().expect("thread pool");
    let runs: Vec<RunRecord> = pool.install(|| (0..m.eps_list.len()).into_par_iter().map(|k| run_one(m, k)).collect());
    let fits = fits::fit_sweep(&runs, m.q);
    let partial = runs.iter().any(|r| !r.converged());
    Ok(SweepOutcome {
        manifest: m.clone(),
        runs,
        fits,
        partial,
    })
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".into(), num)
}

/// Columns of `results.csv`, one entry per run.
pub fn result_rows(o: &SweepOutcome) -> (Vec<String>, Vec<Vec<String>>) {
    let labels: Vec<String> = battery::battery(o.manifest.q)
        .iter()
        .map(|s| format!("norm:{}", s.label()))
        .collect();
    let mut header: Vec<String> = [
        "eps", "status", "nx", "ny", "lx", "trial_e1", "trial_e2", "trial_e3", "trial_total", "energy_e1",
        "energy_e2", "energy_e3", "energy_total", "alpha", "mass", "max_amp", "supp_x", "supp_y", "el_res",
        "el_viol", "iterations", "alpha_over_eps2L", "claim_over_eps2", "rx", "ry", "supp_y_center",
        "transport_residual", "grad_check_rel_err", "identity_lhs", "identity_rhs_direct", "identity_rhs_weighted",
        "identity_rhs_weighted_half_floor", "contraction_ratio", "layer_monotone", "error",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(labels.iter().cloned());
    let rows = o
        .runs
        .iter()
        .map(|r| {
            let g = r.grid;
            let t = r.trial;
            let rep = r.report.as_ref();
            let e = rep.map(|p| p.energy);
            let d = r.diagnostics.as_ref();
            let mut row = vec![
                num(r.eps),
                r.status.label().to_string(),
                g.map_or("NaN".into(), |g| g.nx().to_string()),
                g.map_or("NaN".into(), |g| g.ny().to_string()),
                opt(g.map(|g| g.lx())),
                opt(t.map(|t| t.e1)),
                opt(t.map(|t| t.e2)),
                opt(t.map(|t| t.e3)),
                opt(t.map(|t| t.total)),
                opt(e.map(|e| e.e1)),
                opt(e.map(|e| e.e2)),
                opt(e.map(|e| e.e3)),
                opt(e.map(|e| e.total)),
                opt(rep.map(|p| p.alpha)),
                opt(rep.map(|p| p.mass)),
                opt(rep.map(|p| p.max_amp)),
                opt(rep.map(|p| p.supp_x_halfwidth)),
                opt(rep.map(|p| p.supp_y_halfwidth)),
                opt(rep.map(|p| p.el_residual_on_supp)),
                opt(rep.map(|p| p.el_violation_off_supp)),
                rep.map_or("NaN".into(), |p| p.iterations.to_string()),
                opt(d.map(|d| d.alpha_over_eps2l)),
                opt(d.map(|d| d.claim_over_eps2)),
                opt(d.map(|d| d.rx)),
                opt(d.map(|d| d.ry)),
                opt(d.map(|d| d.supp_y_center)),
                opt(d.map(|d| d.transport_residual)),
                opt(d.map(|d| d.grad_check_rel_err)),
                opt(d.map(|d| d.identity.lhs)),
                opt(d.map(|d| d.identity.rhs_direct)),
                opt(d.map(|d| d.identity.rhs_weighted)),
                opt(d.map(|d| d.identity.rhs_weighted_half_floor)),
                opt(d.and_then(|d| d.identity.ratio)),
                d.map_or("NaN".into(), |d| d.layer_monotone.to_string()),
                match &r.status {
                    RunStatus::Failed(msg) => msg.clone(),
                    _ => String::new(),
                },
            ];
            for l in &labels {
                row.push(opt(r.norms.iter().find(|n| &format!("norm:{}", n.spec.label()) == l).map(|n| n.value)));
            }
            row
        })
        .collect();
    (header, rows)
}

pub fn results_csv(o: &SweepOutcome) -> Result<Vec<u8>> {
    let (header, rows) = result_rows(o);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| io_err("<memory>")(e.into_error()))
}

fn current_git_hash() -> Option<String> {
    let out = std::process::Command::new("git").args(["rev-parse", "HEAD"]).output().ok()?;
    out.status
        .success()
        .then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
        .filter(|s| !s.is_empty())
}

fn eps_tag(eps: f64) -> String {
    format!("{eps}").replace('.', "p")
}

/// Writes `results.csv`, `fits.csv`, `manifest.json`, `fields/*.bin` and
/// `plots/*.svg` under `out`.
pub fn write_outputs(o: &SweepOutcome, out: &Path) -> Result<()> {
    let fields = out.join("fields");
    let plots = out.join("plots");
    for d in [out, &fields, &plots] {
        fs::create_dir_all(d).map_err(io_err(d))?;
    }
    fieldio::write_atomic(&out.join("results.csv"), &results_csv(o)?)?;
    fieldio::write_atomic(&out.join("fits.csv"), &fits::fits_csv(&o.fits)?)?;
    let mut echo = o.manifest.clone();
    if echo.git_hash.is_none() {
        echo.git_hash = current_git_hash();
    }
    fieldio::write_atomic(&out.join("manifest.json"), echo.to_json()?.as_bytes())?;
    for r in &o.runs {
        if let Some(rep) = &r.report {
            let tag = eps_tag(r.eps);
            fieldio::write_field(&fields.join(format!("omega_eps{tag}.bin")), &rep.omega)?;
            fieldio::write_field(&fields.join(format!("psi_eps{tag}.bin")), &rep.psi)?;
        }
    }
    for f in &o.fits {
        if let Some(svg) = plot::fit_svg(f) {
            let name: String = f
                .quantity
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '_' { c } else { '_' })
                .collect();
            let path: PathBuf = plots.join(format!("{name}.svg"));
            fieldio::write_atomic(&path, svg.as_bytes())?;
        }
    }
    Ok(())
}

/// [`execute`] followed by [`write_outputs`].
pub fn run_sweep(m: &RunManifest, out: &Path) -> Result<SweepOutcome> {
    let o = execute(m)?;
    write_outputs(&o, out)?;
    Ok(o)
}
