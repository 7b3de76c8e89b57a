//! Run manifests: everything needed to reproduce a sweep.

use std::fmt;
use std::str::FromStr;

use equil_core::{ChannelGrid, SolverOptions};
use serde::{Deserialize, Serialize};

use crate::error::{Result, StudiesError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Steady,
    Traveling,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Steady => "steady",
            Mode::Traveling => "traveling",
        })
    }
}

impl FromStr for Mode {
    type Err = StudiesError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "steady" => Ok(Mode::Steady),
            "traveling" | "travelling" => Ok(Mode::Traveling),
            _ => Err(StudiesError::Manifest(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
}

impl GridParams {
    pub fn build(&self) -> Result<ChannelGrid> {
        Ok(ChannelGrid::new(self.nx, self.ny, self.lx)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub theta: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub steiner_every: usize,
    pub phase1_steps: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverOptions::default().into()
    }
}

impl From<SolverOptions> for SolverParams {
    fn from(o: SolverOptions) -> Self {
        Self {
            theta: o.theta,
            max_iters: o.max_iters,
            tol: o.tol,
            steiner_every: o.steiner_every,
            phase1_steps: o.phase1_steps,
        }
    }
}

impl From<SolverParams> for SolverOptions {
    fn from(p: SolverParams) -> Self {
        Self {
            theta: p.theta,
            max_iters: p.max_iters,
            tol: p.tol,
            steiner_every: p.steiner_every,
            phase1_steps: p.phase1_steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub mode: Mode,
    /// Height of the strip; 0 in steady mode.
    pub c: f64,
    pub eps_list: Vec<f64>,
    pub q: f64,
    /// `δ = 4q`.
    pub delta: f64,
    /// `None` picks a grid per `ε` (see [`auto_grid`]).
    pub grid: Option<GridParams>,
    pub solver: SolverParams,
    pub seed: u64,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub git_hash: Option<String>,
}

pub const DEFAULT_EPS: [f64; 3] = [0.1, 0.05, 0.025];
pub const DEFAULT_Q: f64 = 0.05;

impl RunManifest {
    pub fn new(mode: Mode, c: f64, eps_list: Vec<f64>, q: f64) -> Self {
        Self {
            mode,
            c,
            eps_list,
            q,
            delta: 4.0 * q,
            grid: None,
            solver: SolverParams::default(),
            seed: 0,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            git_hash: None,
        }
    }

    pub fn desk_sweep(mode: Mode, c: f64) -> Self {
        Self::new(mode, c, DEFAULT_EPS.to_vec(), DEFAULT_Q)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(StudiesError::Manifest(m));
        if self.eps_list.is_empty() {
            return bad("eps_list is empty".into());
        }
        if let Some(e) = self.eps_list.iter().find(|&&e| !(e > 0.0 && e < 0.5)) {
            return bad(format!("eps {e} is outside (0, 0.5)"));
        }
        if self.eps_list.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("eps_list {:?} is not strictly decreasing", self.eps_list));
        }
        if !(self.q > 0.0 && self.q <= 0.5) {
            return bad(format!("q = {} is outside (0, 1/2]", self.q));
        }
        if (self.delta - 4.0 * self.q).abs() > 1e-12 * self.delta.abs().max(1.0) {
            return bad(format!("delta = {} does not equal 4q = {}", self.delta, 4.0 * self.q));
        }
        if !(self.c.abs() < 1.0) {
            return bad(format!("|c| = {} must be below 1", self.c.abs()));
        }
        if self.mode == Mode::Steady && self.c != 0.0 {
            return bad(format!("steady mode needs c = 0, got {}", self.c));
        }
        let s = &self.solver;
        if !(s.theta > 0.0 && s.theta <= 1.0) || !(s.tol > 0.0) || s.max_iters == 0 {
            return bad(format!("solver options {s:?} out of range"));
        }
        if let Some(g) = &self.grid {
            g.build()?;
        }
        Ok(())
    }

    pub fn grid_for(&self, eps: f64) -> Result<ChannelGrid> {
        match &self.grid {
            Some(g) => g.build(),
            None => auto_grid(eps, self.q),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(s)?;
        m.validate()?;
        Ok(m)
    }
}

/// Smallest odd integer `≥ v`.
fn odd_at_least(v: f64) -> usize {
    let n = v.ceil() as usize;
    n | 1
}

/// Grid resolving the trial ellipse at `ε`: `hy ≤ ε/6`,
/// `hx ≤ min(a/8, 0.05)` with `a = ε^q|ln ε|²`, and `Lx = 8`, widened to 16
/// when `1.5a > 8`.
pub fn auto_grid(eps: f64, q: f64) -> Result<ChannelGrid> {
    let l = eps.ln().abs();
    let a = eps.powf(q) * l * l;
    let lx = if 1.5 * a > 8.0 { 16.0 } else { 8.0 };
    let hx = (a / 8.0).min(0.05);
    let nx = odd_at_least(2.0 * lx / hx);
    // ny − 1 cells, an even number so that y = 0 is a node.
    let cells = (12.0 / eps).ceil() as usize;
    let ny = cells + cells % 2 + 1;
    Ok(ChannelGrid::new(nx, ny, lx)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_grid_meets_its_bounds() {
        for eps in DEFAULT_EPS {
            let g = auto_grid(eps, DEFAULT_Q).unwrap();
            let l = eps.ln().abs();
            let a = eps.powf(DEFAULT_Q) * l * l;
            assert!(g.hy() <= eps / 6.0, "eps {eps}: hy {}", g.hy());
            assert!(g.hx() <= (a / 8.0).min(0.05));
            assert!(a < g.lx());
        }
        assert_eq!(auto_grid(0.025, DEFAULT_Q).unwrap().lx(), 16.0);
        assert_eq!(auto_grid(0.1, DEFAULT_Q).unwrap().lx(), 8.0);
    }

    #[test]
    fn json_round_trip() {
        let mut m = RunManifest::desk_sweep(Mode::Traveling, 0.5);
        m.grid = Some(GridParams { nx: 65, ny: 33, lx: 4.0 });
        m.git_hash = Some("abc".into());
        let back = RunManifest::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn invalid_manifests_are_named() {
        let mut m = RunManifest::desk_sweep(Mode::Steady, 0.0);
        m.eps_list = vec![0.05, 0.1];
        assert!(matches!(m.validate(), Err(StudiesError::Manifest(_))));
        let mut m = RunManifest::desk_sweep(Mode::Steady, 0.0);
        m.delta = 0.3;
        assert!(m.validate().is_err());
        let m = RunManifest::desk_sweep(Mode::Steady, 0.5);
        assert!(m.validate().is_err());
        let m = RunManifest::desk_sweep(Mode::Traveling, 1.0);
        assert!(m.validate().is_err());
    }
}
