//! Log-log least squares for scaling exponents.

use alloc::format;
use alloc::string::String;

use crate::{Error, Result};

/// Power-law fit `y ≈ e^{intercept}·x^{slope}` with a pass/fail verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub quantity: String,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub predicted: f64,
    pub tolerance: f64,
    /// `|slope − predicted| ≤ tolerance` and `r2 ≥ 0.9`.
    pub pass: bool,
}

pub const MIN_R2: f64 = 0.9;

/// Least squares on `(ln x, ln y)`.
pub fn fit_loglog(xs: &[f64], ys: &[f64], predicted: f64, tol: f64) -> Result<ScalingFit> {
    fit_named("", xs, ys, predicted, tol)
}

pub fn fit_named(quantity: &str, xs: &[f64], ys: &[f64], predicted: f64, tol: f64) -> Result<ScalingFit> {
    if xs.len() != ys.len() {
        return Err(Error::Precondition(format!("{} abscissae but {} values", xs.len(), ys.len())));
    }
    if xs.len() < 3 {
        return Err(Error::Precondition(format!("a fit needs at least 3 points, got {}", xs.len())));
    }
    if let Some(v) = xs.iter().chain(ys).find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Domain(format!("log-log fit needs positive finite data, got {v}")));
    }
    let n = xs.len() as f64;
    let lx: alloc::vec::Vec<f64> = xs.iter().map(|&x| libm::log(x)).collect();
    let ly: alloc::vec::Vec<f64> = ys.iter().map(|&y| libm::log(y)).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (a, b) in lx.iter().zip(&ly) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 {
        return Err(Error::Precondition("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    // A constant series is fitted exactly.
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    let pass = (slope - predicted).abs() <= tol && r2 >= MIN_R2;
    Ok(ScalingFit {
        quantity: quantity.into(),
        slope,
        intercept,
        r2,
        predicted,
        tolerance: tol,
        pass,
    })
}
