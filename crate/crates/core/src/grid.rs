//! Node-centred discretization of the truncated channel `[-Lx, Lx] × [-1, 1]`.
//!
//! Nodes sit at `x_i = (i - (nx-1)/2)·hx` with `hx = 2Lx/nx` and at
//! `y_j = -1 + j·hy` with `hy = 2/(ny-1)`. Both counts are odd so that `x = 0`
//! and `y ∈ {-1, 0, 1}` are nodes. In `x` the layout is that of a periodic box
//! of length `2Lx`; in `y` the rows `j = 0` and `j = ny-1` are the walls.
//!
//! Field storage is x-major: the value at `(i, j)` lives at `i·ny + j`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGrid {
    nx: usize,
    ny: usize,
    lx: f64,
    hx: f64,
    hy: f64,
}

impl ChannelGrid {
    pub fn new(nx: usize, ny: usize, lx: f64) -> Result<Self> {
        if nx < 3 || nx % 2 == 0 {
            return Err(Error::InvalidGrid(format!("nx = {nx} must be odd and >= 3")));
        }
        if ny < 3 || ny % 2 == 0 {
            return Err(Error::InvalidGrid(format!("ny = {ny} must be odd and >= 3")));
        }
        if !(lx.is_finite() && lx > 0.0) {
            return Err(Error::InvalidGrid(format!("Lx = {lx} must be positive")));
        }
        Ok(Self {
            nx,
            ny,
            lx,
            hx: 2.0 * lx / nx as f64,
            hy: 2.0 / (ny - 1) as f64,
        })
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn lx(&self) -> f64 {
        self.lx
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        self.hx
    }

    #[inline]
    pub fn hy(&self) -> f64 {
        self.hy
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the `x = 0` column.
    #[inline]
    pub fn center_i(&self) -> usize {
        (self.nx - 1) / 2
    }

    /// Index of the `y = 0` row.
    #[inline]
    pub fn center_j(&self) -> usize {
        (self.ny - 1) / 2
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.center_i() as f64) * self.hx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        if j == self.ny - 1 {
            1.0
        } else if j == self.center_j() {
            0.0
        } else {
            -1.0 + j as f64 * self.hy
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Trapezoid weight of row `j` in `y` (halved on the walls) times `hx`.
    #[inline]
    pub fn weight(&self, j: usize) -> f64 {
        if j == 0 || j == self.ny - 1 {
            0.5 * self.hx * self.hy
        } else {
            self.hx * self.hy
        }
    }

    /// Row index nearest to `y`, clamped to the channel.
    pub fn nearest_j(&self, y: f64) -> usize {
        let t = libm::floor((y + 1.0) / self.hy + 0.5);
        (t.max(0.0) as usize).min(self.ny - 1)
    }

    /// Rows `j` with `|y_j - center| <= halfwidth` (with a relative slack of
    /// `1e-12` so nodes exactly on the edge are included).
    pub fn rows_within(&self, center: f64, halfwidth: f64) -> core::ops::RangeInclusive<usize> {
        let slack = 1e-12 * self.hy;
        let lo = libm::ceil((center - halfwidth + 1.0 - slack) / self.hy).max(0.0) as usize;
        let hi = (libm::floor((center + halfwidth + 1.0 + slack) / self.hy) as usize).min(self.ny - 1);
        lo..=hi
    }

    /// The same physical nodes at every other position, when the counts allow
    /// it (`nx ≡ ny ≡ 1 mod 4`).
    pub fn coarsened(&self) -> Option<ChannelGrid> {
        if self.nx % 4 != 1 || self.ny % 4 != 1 || self.nx < 5 || self.ny < 5 {
            return None;
        }
        let nx = (self.nx + 1) / 2;
        let ny = (self.ny + 1) / 2;
        ChannelGrid::new(nx, ny, self.lx + 0.5 * self.hx).ok()
    }
}

/// A dense sample of a scalar on a [`ChannelGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: ChannelGrid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: ChannelGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: ChannelGrid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: ChannelGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nx() {
            let x = grid.x(i);
            for j in 0..grid.ny() {
                values.push(f(x, grid.y(j)));
            }
        }
        Self { grid, values }
    }

    /// Wraps raw x-major values, rejecting wrong lengths and non-finite entries.
    pub fn from_values(grid: ChannelGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at node ({}, {})",
                k / grid.ny(),
                k % grid.ny()
            )));
        }
        Ok(Self { grid, values })
    }

    #[inline]
    pub fn grid(&self) -> &ChannelGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.index(i, j);
        self.values[k] = v;
    }

    /// Column `i` (all `y` at fixed `x`).
    #[inline]
    pub fn column(&self, i: usize) -> &[f64] {
        let ny = self.grid.ny();
        &self.values[i * ny..(i + 1) * ny]
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &Field, mut f: impl FnMut(f64, f64) -> f64) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Applies `f(x, y, value)` at every node.
    pub fn map_xy(&self, mut f: impl FnMut(f64, f64, f64) -> f64) -> Field {
        let g = self.grid;
        let mut out = self.clone();
        for i in 0..g.nx() {
            let x = g.x(i);
            for j in 0..g.ny() {
                let k = g.index(i, j);
                out.values[k] = f(x, g.y(j), self.values[k]);
            }
        }
        out
    }

    pub fn scaled(&self, a: f64) -> Field {
        self.map(|v| a * v)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Trapezoid quadrature over the truncated channel.
    pub fn integrate(&self) -> f64 {
        integrate(self)
    }

    /// `(∫ |f|^2)^{1/2}` with the trapezoid weights.
    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(integrate_with(self, |v| v * v))
    }

    /// Subsample at every other node, when [`ChannelGrid::coarsened`] allows.
    pub fn coarsened(&self) -> Option<Field> {
        let cg = self.grid.coarsened()?;
        let mut out = Field::zeros(cg);
        for i in 0..cg.nx() {
            for j in 0..cg.ny() {
                out.set(i, j, self.get(2 * i, 2 * j));
            }
        }
        Some(out)
    }
}

/// Trapezoid quadrature of `f` over the truncated channel.
///
/// In `x` the nodes tile a periodic box, so every column carries weight `hx`;
/// in `y` the wall rows carry half weight.
pub fn integrate(f: &Field) -> f64 {
    integrate_with(f, |v| v)
}

/// `∫ g(f)` with the trapezoid weights.
pub fn integrate_with(f: &Field, mut g: impl FnMut(f64) -> f64) -> f64 {
    let grid = f.grid();
    let ny = grid.ny();
    let mut total = 0.0;
    for col in f.values().chunks_exact(ny) {
        let mut s = 0.5 * (g(col[0]) + g(col[ny - 1]));
        for &v in &col[1..ny - 1] {
            s += g(v);
        }
        total += s;
    }
    total * grid.hx() * grid.hy()
}

/// `∫ a·b` with the trapezoid weights.
pub fn inner(a: &Field, b: &Field) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = a.grid();
    let ny = grid.ny();
    let mut total = 0.0;
    for (ca, cb) in a.values().chunks_exact(ny).zip(b.values().chunks_exact(ny)) {
        let mut s = 0.5 * (ca[0] * cb[0] + ca[ny - 1] * cb[ny - 1]);
        for j in 1..ny - 1 {
            s += ca[j] * cb[j];
        }
        total += s;
    }
    Ok(total * grid.hx() * grid.hy())
}

/// `(∂x f, ∂y f)`: centred second-order differences inside, one-sided
/// second-order differences on the edges.
pub fn gradient(f: &Field) -> (Field, Field) {
    (d_dx(f), d_dy(f))
}

pub fn d_dx(f: &Field) -> Field {
    let g = *f.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let inv = 1.0 / (2.0 * g.hx());
    let mut out = Field::zeros(g);
    let v = f.values();
    let o = out.values_mut();
    for j in 0..ny {
        o[j] = (-3.0 * v[j] + 4.0 * v[ny + j] - v[2 * ny + j]) * inv;
        let last = (nx - 1) * ny + j;
        o[last] = (3.0 * v[last] - 4.0 * v[last - ny] + v[last - 2 * ny]) * inv;
    }
    for i in 1..nx - 1 {
        for j in 0..ny {
            let k = i * ny + j;
            o[k] = (v[k + ny] - v[k - ny]) * inv;
        }
    }
    out
}

pub fn d_dy(f: &Field) -> Field {
    let g = *f.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let inv = 1.0 / (2.0 * g.hy());
    let mut out = Field::zeros(g);
    let v = f.values();
    let o = out.values_mut();
    for i in 0..nx {
        let c = &v[i * ny..(i + 1) * ny];
        let d = &mut o[i * ny..(i + 1) * ny];
        d[0] = (-3.0 * c[0] + 4.0 * c[1] - c[2]) * inv;
        d[ny - 1] = (3.0 * c[ny - 1] - 4.0 * c[ny - 2] + c[ny - 3]) * inv;
        for j in 1..ny - 1 {
            d[j] = (c[j + 1] - c[j - 1]) * inv;
        }
    }
    out
}
