//! The vorticity function `f`, its inverse `F'` and the convex penalty `F`.
//!
//! `f(t) = slope·g(t)` with `slope = ε^{1-q}/|ln ε|²` and the profile
//!
//! ```text
//! g(t) = 0 (t ≤ 0),   t·φ(t) (0 < t < 1),   t (t ≥ 1),
//! φ(t) = h(t) / (h(t) + h(1 - t)),   h(s) = e^{-1/s}.
//! ```
//!
//! `F'` is the inverse of `f` on `[0, ∞)` and `F(s) = ∫₀^s F'`. With
//! `t = F'(s)` the Legendre identity gives `F(s) = s·t − slope·∫₀^t g`, so `F`
//! only needs the antiderivative of the explicit profile.

use alloc::format;
use alloc::vec::Vec;

use crate::quad::GaussLegendre;
use crate::{Error, Result};

const TABLE_CELLS: usize = 4096;
const NEWTON_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct PenaltyFamily {
    eps: f64,
    q: f64,
    l: f64,
    slope: f64,
    /// `g` at `t_i = i / TABLE_CELLS`.
    g_table: Vec<f64>,
    /// `∫₀^{t_i} g`.
    g_cum: Vec<f64>,
    gl: GaussLegendre,
}

/// Logistic function without overflow.
#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `σ(z)(1 − σ(z))`.
#[inline]
fn sigmoid_slope(z: f64) -> f64 {
    let e = libm::exp(-z.abs());
    e / ((1.0 + e) * (1.0 + e))
}

/// Smooth step `φ` on `(0, 1)`.
#[inline]
fn phi(t: f64) -> f64 {
    sigmoid(1.0 / (1.0 - t) - 1.0 / t)
}

/// The profile `g`.
#[inline]
pub(crate) fn profile(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        t
    } else {
        t * phi(t)
    }
}

/// `g'`.
#[inline]
pub(crate) fn profile_deriv(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = 1.0 / (1.0 - t);
        let b = 1.0 / t;
        let z = a - b;
        sigmoid(z) + t * sigmoid_slope(z) * (a * a + b * b)
    }
}

impl PenaltyFamily {
    /// Builds the family and checks numerically that `f` is strictly
    /// increasing on the transition.
    pub fn new(eps: f64, q: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidInput(format!("eps must lie in (0, 1), got {eps}")));
        }
        if !(q > 0.0 && q <= 0.5) {
            return Err(Error::InvalidInput(format!("q must lie in (0, 1/2], got {q}")));
        }
        let l = libm::log(eps).abs();
        let slope = libm::pow(eps, 1.0 - q) / (l * l);
        let gl = GaussLegendre::new(8);
        let h = 1.0 / TABLE_CELLS as f64;
        let mut g_table = Vec::with_capacity(TABLE_CELLS + 1);
        let mut g_cum = Vec::with_capacity(TABLE_CELLS + 1);
        let mut acc = 0.0;
        for i in 0..=TABLE_CELLS {
            let t = i as f64 * h;
            if i > 0 {
                acc += gl.integrate(t - h, t, profile);
            }
            g_table.push(profile(t));
            g_cum.push(acc);
        }
        // Where g underflows to zero the check is vacuous; elsewhere both the
        // samples and g' must increase strictly.
        for i in 1..=TABLE_CELLS {
            let t = i as f64 * h;
            let d = profile_deriv(t);
            let flat = g_table[i] == 0.0;
            if !flat && (g_table[i] <= g_table[i - 1] || !(d > 0.0)) {
                return Err(Error::InvalidInput(format!(
                    "vorticity profile is not strictly increasing near t = {t}"
                )));
            }
        }
        Ok(Self {
            eps,
            q,
            l,
            slope,
            g_table,
            g_cum,
            gl,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `|ln ε|`.
    pub fn l(&self) -> f64 {
        self.l
    }

    /// `ε^{1-q}/|ln ε|²`, the slope of the linear branch of `f`.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    /// Amplitude cap `ε^{1-q}`.
    pub fn amp_cap(&self) -> f64 {
        libm::pow(self.eps, 1.0 - self.q)
    }

    /// `f(t)`.
    pub fn f_eval(&self, t: f64) -> f64 {
        self.slope * profile(t)
    }

    /// `f'(t)`.
    pub fn f_deriv(&self, t: f64) -> f64 {
        self.slope * profile_deriv(t)
    }

    /// `f^{(n)}(t)` for `n ≤ 4`: analytic for `n ≤ 1`, central differences
    /// of `f'` otherwise.
    pub fn f_derivative(&self, n: u32, t: f64) -> Result<f64> {
        let h = 1e-3;
        let d = |s: f64| profile_deriv(s);
        let g = match n {
            0 => profile(t),
            1 => d(t),
            2 => (d(t + h) - d(t - h)) / (2.0 * h),
            3 => (d(t + h) - 2.0 * d(t) + d(t - h)) / (h * h),
            4 => (d(t + 2.0 * h) - 2.0 * d(t + h) + 2.0 * d(t - h) - d(t - 2.0 * h)) / (2.0 * h * h * h),
            _ => return Err(Error::InvalidInput(format!("derivative order {n} is not in 0..=4"))),
        };
        Ok(self.slope * g)
    }

    /// `max |f^{(n)}(t)|·|ln ε|²·ε^{q-1}` over `[0, 2]`.
    pub fn fprime_bound_check(&self, n: u32) -> Result<f64> {
        self.fprime_bound_check_on(n, 0.0, 2.0)
    }

    /// As [`fprime_bound_check`](Self::fprime_bound_check) over `[lo, hi]`.
    pub fn fprime_bound_check_on(&self, n: u32, lo: f64, hi: f64) -> Result<f64> {
        if !(1..=4).contains(&n) {
            return Err(Error::InvalidInput(format!("derivative order {n} is not in 1..=4")));
        }
        if !(hi >= lo) {
            return Err(Error::InvalidInput("empty sampling interval".into()));
        }
        let samples = 20_000;
        let mut best: f64 = 0.0;
        for k in 0..=samples {
            let t = lo + (hi - lo) * k as f64 / samples as f64;
            best = best.max(self.f_derivative(n, t)?.abs());
        }
        Ok(best / self.slope)
    }

    /// `F'(s)`, the inverse of `f`.
    pub fn penalty_prime(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("F' is defined for s >= 0, got {s}")));
        }
        Ok(self.invert(s / self.slope))
    }

    /// `F(s) = ∫₀^s F'`.
    pub fn penalty(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("F is defined for s >= 0, got {s}")));
        }
        if s > self.slope {
            let base = self.slope * (1.0 - self.profile_integral(1.0));
            return Ok(base + 0.5 * (s * s - self.slope * self.slope) / self.slope);
        }
        let t = self.invert(s / self.slope);
        Ok((s * t - self.slope * self.profile_integral(t)).max(0.0))
    }

    /// `F''(s) = 1/f'(F'(s))`; infinite at `s = 0`.
    pub fn penalty_second(&self, s: f64) -> Result<f64> {
        let t = self.penalty_prime(s)?;
        Ok(1.0 / self.f_deriv(t))
    }

    /// Solves `g(t) = u` for `u ≥ 0`.
    fn invert(&self, u: f64) -> f64 {
        if u >= 1.0 {
            return u;
        }
        if u <= 0.0 {
            return 0.0;
        }
        let hi_idx = self.g_table.partition_point(|&g| g <= u);
        let h = 1.0 / TABLE_CELLS as f64;
        let mut lo = (hi_idx - 1) as f64 * h;
        let mut hi = hi_idx as f64 * h;
        let mut t = 0.5 * (lo + hi);
        for _ in 0..100 {
            let r = profile(t) - u;
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = profile_deriv(t);
            let mut next = t - r / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - t).abs();
            t = next;
            if step < NEWTON_TOL || hi - lo < NEWTON_TOL {
                break;
            }
        }
        t
    }

    /// `∫₀^t g`.
    fn profile_integral(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return self.g_cum[TABLE_CELLS] + 0.5 * (t * t - 1.0);
        }
        let h = 1.0 / TABLE_CELLS as f64;
        let i = ((t / h) as usize).min(TABLE_CELLS - 1);
        let t0 = i as f64 * h;
        self.g_cum[i] + self.gl.integrate(t0, t, profile)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fam(eps: f64) -> PenaltyFamily {
        PenaltyFamily::new(eps, 0.25).unwrap()
    }

    #[test]
    fn linear_branch_value() {
        let p = fam(0.1);
        assert_eq!(p.f_eval(-3.0), 0.0);
        let ln10 = core::f64::consts::LN_10;
        let want = 2.0 * libm::pow(0.1, 0.75) / (ln10 * ln10);
        assert!((p.f_eval(2.0) - want).abs() < 1e-15);
        assert!((p.f_eval(2.0) - 0.0671).abs() < 5e-5);
        assert_eq!(p.f_eval(1.0), p.slope());
    }

    #[test]
    fn strictly_increasing_on_transition() {
        let p = fam(0.05);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let a: f64 = rng.gen_range(0.02..1.0);
            let b: f64 = rng.gen_range(0.02..1.0);
            let (t1, t2) = if a < b { (a, b) } else { (b, a) };
            if t2 - t1 > 1e-9 {
                assert!(p.f_eval(t2) > p.f_eval(t1), "{t1} {t2}");
            }
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for &t in &[0.05, 0.2, 0.5, 0.8, 0.97] {
            let h = 1e-6;
            let fd = (profile(t + h) - profile(t - h)) / (2.0 * h);
            assert!((fd - profile_deriv(t)).abs() < 1e-7 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn derivative_bounds_on_linear_branch() {
        let p = fam(0.1);
        assert!((p.fprime_bound_check_on(1, 1.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(p.fprime_bound_check_on(2, 1.01, 2.0).unwrap(), 0.0);
        let r = p.fprime_bound_check(1).unwrap() / fam(0.05).fprime_bound_check(1).unwrap();
        assert!((0.5..=2.0).contains(&r));
        assert!(p.fprime_bound_check(5).is_err());
    }

    #[test]
    fn inverse_anchor_points() {
        let p = fam(0.05);
        assert_eq!(p.penalty_prime(p.slope()).unwrap(), 1.0);
        assert!((p.penalty_prime(2.0 * p.slope()).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(p.penalty_prime(0.0).unwrap(), 0.0);
        assert!(p.penalty_prime(-1.0).is_err());
        assert!(p.penalty(-1.0).is_err());
        assert_eq!(p.penalty(0.0).unwrap(), 0.0);
    }

    #[test]
    fn penalty_matches_direct_quadrature() {
        let p = fam(0.05);
        for &frac in &[0.01, 0.3, 0.7, 1.0, 1.8] {
            let s = frac * p.slope();
            let direct = crate::quad::adaptive_simpson(|x| p.penalty_prime(x).unwrap(), 0.0, s, 1e-16);
            let v = p.penalty(s).unwrap();
            assert!((v - direct).abs() <= 1e-8 * direct, "{frac}: {v} vs {direct}");
        }
    }

    #[test]
    fn penalty_is_continuous_at_slope() {
        let p = fam(0.1);
        let s = p.slope();
        let below = p.penalty(s * (1.0 - 1e-12)).unwrap();
        let above = p.penalty(s * (1.0 + 1e-12)).unwrap();
        assert!((below - above).abs() < 1e-10 * below);
    }

    #[test]
    fn second_derivative_is_reciprocal() {
        let p = fam(0.1);
        let s = 0.4 * p.slope();
        let h = 1e-6 * p.slope();
        let fd = (p.penalty_prime(s + h).unwrap() - p.penalty_prime(s - h).unwrap()) / (2.0 * h);
        let want = p.penalty_second(s).unwrap();
        assert!((fd - want).abs() < 1e-6 * want);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PenaltyFamily::new(0.0, 0.25).is_err());
        assert!(PenaltyFamily::new(1.0, 0.25).is_err());
        assert!(PenaltyFamily::new(0.1, 0.0).is_err());
        assert!(PenaltyFamily::new(0.1, 0.6).is_err());
    }
}
