//! Fast solver for `-Δψ = ω` in the truncated channel with `ψ = 0` on
//! `y = ±1`.
//!
//! The operator is the fourth-order five-wide difference
//! `(−1, 16, −30, 16, −1)/(12hx²)` in `x`, periodic on the truncated box, plus
//! the second-order three-point difference in `y` with Dirichlet rows. A
//! discrete Fourier transform in `x` diagonalizes the `x` part (symbol
//! `(4/hx²)(s² + s⁴/3)`, `s = sin(πk/nx)`), leaving one real tridiagonal
//! system in `y` per Fourier mode. Two real rows share each complex FFT.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;

use num_complex::Complex64;

use crate::fft::Fft;
use crate::grid::{self, ChannelGrid, Field};
use crate::{Error, Result};

/// Stream function and velocity of a vorticity field.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSolution {
    pub psi: Field,
    /// `∂y ψ`.
    pub ux: Field,
    /// `-∂x ψ`.
    pub uy: Field,
    /// `‖Δ_h ψ + ω‖ / ‖ω‖` for the solver's own discrete Laplacian.
    pub residual_l2: f64,
    pub warnings: Vec<String>,
}

/// Precomputed transform and per-mode tridiagonal factors for one grid.
#[derive(Debug, Clone)]
pub struct PoissonSolver {
    grid: ChannelGrid,
    fft: Fft,
    /// Interior rows, `ny - 2`.
    m: usize,
    /// Thomas coefficients `c'` and `1/denominator`, mode-major.
    cp: Vec<f64>,
    inv_den: Vec<f64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl PoissonSolver {
    pub fn new(grid: ChannelGrid) -> Self {
        let (nx, ny) = (grid.nx(), grid.ny());
        let m = ny - 2;
        let modes = nx / 2 + 1;
        let a = 1.0 / (grid.hy() * grid.hy());
        let mut cp = vec![0.0; modes * m];
        let mut inv_den = vec![0.0; modes * m];
        for k in 0..modes {
            let s = libm::sin(PI * k as f64 / nx as f64);
            let lambda = 4.0 * s * s * (1.0 + s * s / 3.0) / (grid.hx() * grid.hx());
            let b = 2.0 * a + lambda;
            let row = k * m;
            let mut prev = 0.0;
            for j in 0..m {
                let den = b + a * prev;
                inv_den[row + j] = 1.0 / den;
                prev = -a / den;
                cp[row + j] = prev;
            }
        }
        Self {
            grid,
            fft: Fft::new(nx),
            m,
            cp,
            inv_den,
        }
    }

    pub fn grid(&self) -> &ChannelGrid {
        &self.grid
    }

    /// Stream function, velocities and the self-consistency residual.
    pub fn solve(&self, omega: &Field) -> Result<PoissonSolution> {
        let psi = self.stream_function(omega)?;
        let (ux, dpsi_dx) = (grid::d_dy(&psi), grid::d_dx(&psi));
        let uy = dpsi_dx.scaled(-1.0);
        let residual_l2 = self.residual(&psi, omega);
        let mut warnings = Vec::new();
        if let Some(i) = self.edge_support(omega) {
            warnings.push(format!(
                "support reaches column {i}, inside the outer 10% of the x-truncation; \
                 periodic images may contaminate the solution"
            ));
        }
        Ok(PoissonSolution {
            psi,
            ux,
            uy,
            residual_l2,
            warnings,
        })
    }

    /// `ψ` on the whole grid.
    pub fn stream_function(&self, omega: &Field) -> Result<Field> {
        self.stream_function_rows(omega, 0..=self.grid.ny() - 1)
    }

    /// `ψ` on the rows in `rows`; every other row of the output is zero.
    pub fn stream_function_rows(&self, omega: &Field, rows: RangeInclusive<usize>) -> Result<Field> {
        if omega.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let (nx, ny, m) = (self.grid.nx(), self.grid.ny(), self.m);
        let modes = nx / 2 + 1;
        let mut out = Field::zeros(self.grid);
        let v = omega.values();
        let active: Vec<usize> = (1..ny - 1)
            .filter(|&j| (0..nx).any(|i| v[i * ny + j] != 0.0))
            .collect();
        if active.is_empty() {
            return Ok(out);
        }

        let mut buf = vec![ZERO; nx];
        let mut scratch = Vec::new();
        let mut hat = vec![ZERO; modes * m];
        for pair in active.chunks(2) {
            let (j1, j2) = (pair[0], pair.get(1).copied());
            for i in 0..nx {
                let b = j2.map_or(0.0, |j| v[i * ny + j]);
                buf[i] = Complex64::new(v[i * ny + j1], b);
            }
            self.fft.forward(&mut buf, &mut scratch);
            for k in 0..modes {
                let z = buf[k];
                let zc = buf[(nx - k) % nx].conj();
                hat[k * m + j1 - 1] = 0.5 * (z + zc);
                if let Some(j2) = j2 {
                    hat[k * m + j2 - 1] = Complex64::new(0.0, -0.5) * (z - zc);
                }
            }
        }

        let a = 1.0 / (self.grid.hy() * self.grid.hy());
        for k in 0..modes {
            let d = &mut hat[k * m..(k + 1) * m];
            let cp = &self.cp[k * m..(k + 1) * m];
            let inv = &self.inv_den[k * m..(k + 1) * m];
            let mut prev = ZERO;
            for j in 0..m {
                prev = (d[j] + a * prev) * inv[j];
                d[j] = prev;
            }
            for j in (0..m - 1).rev() {
                d[j] = d[j] - cp[j] * d[j + 1];
            }
        }

        let lo = (*rows.start()).max(1);
        let hi = (*rows.end()).min(ny - 2);
        if lo > hi {
            return Ok(out);
        }
        let wanted: Vec<usize> = (lo..=hi).collect();
        let inv_n = 1.0 / nx as f64;
        let o = out.values_mut();
        for pair in wanted.chunks(2) {
            let (j1, j2) = (pair[0], pair.get(1).copied());
            for k in 0..modes {
                let a1 = hat[k * m + j1 - 1];
                let b1 = j2.map_or(ZERO, |j| hat[k * m + j - 1]);
                // Conjugated for an inverse transform through the forward one.
                buf[k] = (a1 + Complex64::i() * b1).conj();
                if k > 0 {
                    buf[nx - k] = (a1.conj() + Complex64::i() * b1.conj()).conj();
                }
            }
            self.fft.forward(&mut buf, &mut scratch);
            for i in 0..nx {
                let z = buf[i].conj() * inv_n;
                o[i * ny + j1] = z.re;
                if let Some(j2) = j2 {
                    o[i * ny + j2] = z.im;
                }
            }
        }
        Ok(out)
    }

    /// `-Δ_h ψ` with the solver's own stencil; zero on the walls.
    pub fn apply_neg_laplacian(&self, psi: &Field) -> Result<Field> {
        if psi.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let g = self.grid;
        let (nx, ny) = (g.nx(), g.ny());
        let (ax, ay) = (1.0 / (g.hx() * g.hx()), 1.0 / (g.hy() * g.hy()));
        let v = psi.values();
        let mut out = Field::zeros(g);
        let o = out.values_mut();
        for i in 0..nx {
            let (il, ir) = ((i + nx - 1) % nx, (i + 1) % nx);
            let (ill, irr) = ((i + nx - 2) % nx, (i + 2) % nx);
            for j in 1..ny - 1 {
                let c = v[i * ny + j];
                let near = v[il * ny + j] + v[ir * ny + j];
                let far = v[ill * ny + j] + v[irr * ny + j];
                o[i * ny + j] = ax * (2.5 * c - (4.0 / 3.0) * near + far / 12.0)
                    + ay * (2.0 * c - v[i * ny + j - 1] - v[i * ny + j + 1]);
            }
        }
        Ok(out)
    }

    fn residual(&self, psi: &Field, omega: &Field) -> f64 {
        let norm = omega.l2_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let lap = match self.apply_neg_laplacian(psi) {
            Ok(l) => l,
            Err(_) => return f64::INFINITY,
        };
        let g = self.grid;
        let mut s = 0.0;
        for i in 0..g.nx() {
            for j in 1..g.ny() - 1 {
                let d = lap.get(i, j) - omega.get(i, j);
                s += d * d;
            }
        }
        libm::sqrt(s * g.hx() * g.hy()) / norm
    }

    /// First column inside the outer 10% band (on either side) where `ω` is
    /// nonzero.
    fn edge_support(&self, omega: &Field) -> Option<usize> {
        let nx = self.grid.nx();
        let band = (nx / 10).max(1);
        (0..band)
            .chain(nx - band..nx)
            .find(|&i| omega.column(i).iter().any(|&v| v != 0.0))
    }
}

/// One-shot [`PoissonSolver::solve`].
pub fn solve(omega: &Field) -> Result<PoissonSolution> {
    PoissonSolver::new(*omega.grid()).solve(omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(g: ChannelGrid, x0: f64, y0: f64, r: f64) -> Field {
        Field::from_fn(g, |x, y| {
            let d2 = ((x - x0) * (x - x0) + (y - y0) * (y - y0)) / (r * r);
            if d2 < 1.0 {
                let c = libm::cos(0.5 * PI * d2);
                c * c
            } else {
                0.0
            }
        })
    }

    #[test]
    fn zero_input_gives_zero() {
        let g = ChannelGrid::new(33, 17, 4.0).unwrap();
        let s = solve(&Field::zeros(g)).unwrap();
        assert_eq!(s.psi.max_abs(), 0.0);
        assert_eq!(s.ux.max_abs(), 0.0);
        assert_eq!(s.uy.max_abs(), 0.0);
        assert_eq!(s.residual_l2, 0.0);
    }

    #[test]
    fn self_consistent_and_dirichlet() {
        for (nx, ny) in [(65, 33), (129, 65), (101, 41)] {
            let g = ChannelGrid::new(nx, ny, 8.0).unwrap();
            let w = bump(g, 0.3, -0.2, 0.6);
            let s = solve(&w).unwrap();
            assert!(s.residual_l2 <= 1e-8, "{}", s.residual_l2);
            for i in 0..nx {
                assert_eq!(s.psi.get(i, 0), 0.0);
                assert_eq!(s.psi.get(i, ny - 1), 0.0);
            }
            assert!(s.warnings.is_empty());
        }
    }

    #[test]
    fn odd_row_count_of_support_is_handled() {
        // Three active rows: the last one is transformed without a partner.
        let g = ChannelGrid::new(33, 17, 4.0).unwrap();
        let mut w = Field::zeros(g);
        for j in 7..=9 {
            w.set(16, j, 1.0);
        }
        let s = solve(&w).unwrap();
        assert!(s.residual_l2 <= 1e-10);
    }

    #[test]
    fn discrete_maximum_principle() {
        let g = ChannelGrid::new(65, 33, 8.0).unwrap();
        let mut w = Field::zeros(g);
        w.set(32, 16, 1.0);
        w.set(33, 20, 0.5);
        w.set(3, 2, 2.0);
        let s = solve(&w).unwrap();
        assert!(s.psi.min() >= -1e-10);
    }

    #[test]
    fn row_band_matches_full_solution() {
        let g = ChannelGrid::new(65, 33, 8.0).unwrap();
        let w = bump(g, 0.0, 0.0, 0.4);
        let solver = PoissonSolver::new(g);
        let full = solver.stream_function(&w).unwrap();
        let band = solver.stream_function_rows(&w, 12..=20).unwrap();
        for i in 0..65 {
            for j in 0..33 {
                let want = if (12..=20).contains(&j) { full.get(i, j) } else { 0.0 };
                assert!((band.get(i, j) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn operator_is_symmetric() {
        let g = ChannelGrid::new(45, 21, 3.0).unwrap();
        let a = bump(g, 0.2, 0.1, 0.7);
        let b = bump(g, -0.5, -0.3, 0.5);
        let solver = PoissonSolver::new(g);
        let ga = solver.stream_function(&a).unwrap();
        let gb = solver.stream_function(&b).unwrap();
        let lhs = grid::inner(&ga, &b).unwrap();
        let rhs = grid::inner(&a, &gb).unwrap();
        assert!((lhs - rhs).abs() < 1e-13 * lhs.abs());
    }

    #[test]
    fn manufactured_solution_converges_at_second_order() {
        let k = PI / 2.0;
        let exact = |x: f64, y: f64| libm::cos(k * y) * libm::exp(-x * x);
        let source = |x: f64, y: f64| libm::exp(-x * x) * libm::cos(k * y) * (2.0 - 4.0 * x * x + k * k);
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        for (nx, ny) in [(257, 33), (513, 65), (1025, 129)] {
            let g = ChannelGrid::new(nx, ny, 8.0).unwrap();
            let psi = solve(&Field::from_fn(g, source)).unwrap().psi;
            let err = psi.zip_map(&Field::from_fn(g, exact), |a, b| a - b).unwrap();
            errs.push(err.max_abs());
            hs.push(g.hy());
        }
        for k in 0..2 {
            let order = libm::log(errs[k] / errs[k + 1]) / libm::log(hs[k] / hs[k + 1]);
            assert!((1.8..=2.2).contains(&order), "order {order}");
        }
    }

    #[test]
    fn point_sources_give_nonnegative_potentials() {
        for (nx, ny, lx) in [(129, 65, 8.0), (65, 129, 8.0), (161, 481, 16.0), (33, 257, 2.0)] {
            let g = ChannelGrid::new(nx, ny, lx).unwrap();
            for jc in [1, ny / 4, g.center_j()] {
                let mut w = Field::zeros(g);
                w.set(g.center_i(), jc, 1.0);
                let psi = solve(&w).unwrap().psi;
                assert!(psi.min() >= -1e-16, "{nx}x{ny}, row {jc}: {}", psi.min());
            }
        }
    }

    #[test]
    fn polynomial_profile_in_y_is_recovered() {
        // The y difference is exact on (1 − y²), leaving the fourth-order x error.
        let exact = |x: f64, y: f64| (1.0 - y * y) * libm::exp(-x * x);
        let source = |x: f64, y: f64| libm::exp(-x * x) * (2.0 + (2.0 - 4.0 * x * x) * (1.0 - y * y));
        let mut errs = Vec::new();
        for (nx, ny) in [(65, 33), (129, 65)] {
            let g = ChannelGrid::new(nx, ny, 8.0).unwrap();
            let psi = solve(&Field::from_fn(g, source)).unwrap().psi;
            errs.push(psi.zip_map(&Field::from_fn(g, exact), |a, b| a - b).unwrap().max_abs());
        }
        assert!(errs[0] / errs[1] >= 4.0 * 0.9, "ratio {}", errs[0] / errs[1]);
    }

    #[test]
    fn warns_when_support_touches_truncation() {
        let g = ChannelGrid::new(41, 17, 4.0).unwrap();
        let mut w = Field::zeros(g);
        w.set(1, 8, 1.0);
        let s = solve(&w).unwrap();
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn rejects_foreign_grid() {
        let solver = PoissonSolver::new(ChannelGrid::new(33, 17, 4.0).unwrap());
        let other = Field::zeros(ChannelGrid::new(33, 17, 8.0).unwrap());
        assert_eq!(solver.solve(&other).unwrap_err(), Error::GridMismatch);
    }
}
