//! Scaling fits across a sweep.

use equil_core::fit::fit_named;
use equil_core::norms::{NormKind, NormSpec};
use equil_core::ScalingFit;

use crate::battery;
use crate::error::{io_err, Result};
use crate::sweep::RunRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub quantity: String,
    pub predicted: f64,
    pub tolerance: f64,
    /// Data behind the fit: `ε` and the measured quantity, converged runs only.
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub fit: Option<ScalingFit>,
    pub note: String,
}

impl FitRow {
    pub fn pass(&self) -> bool {
        self.fit.as_ref().is_some_and(|f| f.pass)
    }
}

fn make(quantity: String, predicted: f64, tolerance: f64, data: Vec<(f64, f64)>) -> FitRow {
    let (xs, ys): (Vec<f64>, Vec<f64>) = data.into_iter().unzip();
    let (fit, note) = match fit_named(&quantity, &xs, &ys, predicted, tolerance) {
        Ok(f) => (Some(f), String::new()),
        Err(e) => (None, e.to_string()),
    };
    FitRow {
        quantity,
        predicted,
        tolerance,
        xs,
        ys,
        fit,
        note,
    }
}

/// Predicted slope and tolerance of a battery norm, if it has one.
pub fn norm_prediction(spec: &NormSpec, q: f64) -> Option<(f64, f64)> {
    match spec.kind {
        NormKind::Lp if spec.p == 1.0 => Some((2.0, 0.2)),
        NormKind::Lp if spec.p.is_infinite() => Some((1.0 - 2.0 * q, 0.2)),
        NormKind::Lp => Some((1.0 + 1.0 / spec.p - 2.0 * q, 0.15)),
        NormKind::DerivSup => Some((1.0 - 2.0 * q - spec.k as f64, 0.3)),
        NormKind::WspGagliardo if spec.p.is_finite() => Some((1.0 - spec.s + 1.0 / spec.p - 2.0 * q, 0.15)),
        NormKind::Holder => Some((1.0 - 2.0 * q - spec.k as f64 - spec.s, f64::INFINITY)),
        _ => None,
    }
}

/// Fits of every battery norm, the support widths and `α` against `ε` over
/// the converged runs (ordered as in the sweep).
pub fn fit_sweep(runs: &[RunRecord], q: f64) -> Vec<FitRow> {
    let ok: Vec<&RunRecord> = runs.iter().filter(|r| r.converged()).collect();
    let mut out = Vec::new();
    for spec in battery::battery(q) {
        if let Some((pred, tol)) = norm_prediction(&spec, q) {
            let data = ok
                .iter()
                .filter_map(|r| r.norms.iter().find(|n| n.spec.label() == spec.label()).map(|n| (r.eps, n.value)))
                .collect();
            out.push(make(format!("norm:{}", spec.label()), pred, tol, data));
        }
    }
    let field = |get: fn(&equil_core::SolveReport) -> f64| -> Vec<(f64, f64)> {
        ok.iter().filter_map(|r| r.report.as_ref().map(|p| (r.eps, get(p)))).collect()
    };
    out.push(make("supp_y".into(), 1.0, 0.2, field(|p| p.supp_y_halfwidth)));
    // `α ≳ ε²|ln ε|`, the logarithm absorbed in the tolerance.
    out.push(make("alpha".into(), 2.0, 0.3, field(|p| p.alpha)));
    out
}

/// `supp_x` never grows with `ε` across the converged runs (sorted by
/// decreasing `ε`).
pub fn supp_x_monotone(runs: &[RunRecord]) -> Option<bool> {
    let xs: Vec<f64> = runs
        .iter()
        .filter(|r| r.converged())
        .filter_map(|r| r.report.as_ref().map(|p| p.supp_x_halfwidth))
        .collect();
    (xs.len() >= 2).then(|| xs.windows(2).all(|w| w[1] >= w[0]))
}

pub fn fits_csv(rows: &[FitRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "slope", "intercept", "r2", "predicted", "tolerance", "pass", "n_runs", "note"])?;
    for r in rows {
        let (slope, intercept, r2) = match &r.fit {
            Some(f) => (f.slope.to_string(), f.intercept.to_string(), f.r2.to_string()),
            None => ("NaN".into(), "NaN".into(), "NaN".into()),
        };
        w.write_record([
            r.quantity.clone(),
            slope,
            intercept,
            r2,
            r.predicted.to_string(),
            r.tolerance.to_string(),
            r.pass().to_string(),
            r.xs.len().to_string(),
            r.note.clone(),
        ])?;
    }
    w.into_inner().map_err(|e| io_err("<memory>")(e.into_error()))
}
