use alloc::format;
use alloc::vec::Vec;

use crate::grid::Field;
use crate::{Error, Result};

/// Discrete Steiner symmetrization: every row `y = y_j` is replaced by its
/// symmetric-decreasing rearrangement about `x = 0`. Sorted values go to
/// `x = 0, +hx, −hx, +2hx, −2hx, …`.
pub fn steiner(omega: &Field) -> Result<Field> {
    let g = *omega.grid();
    let (nx, ny) = (g.nx(), g.ny());
    if let Some(&v) = omega.values().iter().find(|&&v| v < 0.0) {
        return Err(Error::Domain(format!("Steiner symmetrization needs omega >= 0, found {v}")));
    }
    let center = g.center_i();
    let mut out = Field::zeros(g);
    let mut row: Vec<f64> = Vec::with_capacity(nx);
    for j in 0..ny {
        row.clear();
        row.extend((0..nx).map(|i| omega.get(i, j)));
        if row.iter().all(|&v| v == 0.0) {
            continue;
        }
        row.sort_by(|a, b| b.total_cmp(a));
        for (rank, &v) in row.iter().enumerate() {
            let k = (rank + 1) / 2;
            let i = if rank % 2 == 1 { center + k } else { center - k };
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// `(ω(x, y) + ω(−x, y)) / 2`.
pub fn symmetrize_even(omega: &Field) -> Field {
    let g = *omega.grid();
    let nx = g.nx();
    let mut out = Field::zeros(g);
    for i in 0..nx {
        for j in 0..g.ny() {
            out.set(i, j, 0.5 * (omega.get(i, j) + omega.get(nx - 1 - i, j)));
        }
    }
    out
}
