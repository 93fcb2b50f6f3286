//! Grids: the uniform state grid, inclusive action grids, the time
//! partition, and the piecewise-linear value interpolant.
//!
//! Everything downstream leans on a few hard guarantees made here:
//!
//! - grid endpoints are stored **exactly** (the last node is assigned, not
//!   accumulated), so boundary membership tests are reliable;
//! - interpolation returns the stored value **bit-for-bit** when the query
//!   hits a node, even when a neighbour is infinite;
//! - an infinite value at either bracketing node makes the interpolant
//!   infinite on the whole open cell — "possibly infeasible" must never be
//!   averaged down to a finite number.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{GameConfig, PerStep};

/// A discretization request that cannot be honoured.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DiscretizeError {
    #[error("invalid range: lo={lo}, hi={hi}, points={points}")]
    InvalidRange { lo: f64, hi: f64, points: usize },
}

/// Uniform grid over the admissible moisture interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateGrid {
    nodes: Vec<f64>,
    dx: f64,
}

/// Builds the uniform state grid `x_min = x_0 < x_1 < … = x_max` with the
/// given number of nodes (≥ 2); both endpoints are represented exactly.
pub fn build_state_grid(x_min: f64, x_max: f64, points: usize) -> Result<StateGrid, DiscretizeError> {
    if points < 2 || !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
        return Err(DiscretizeError::InvalidRange { lo: x_min, hi: x_max, points });
    }
    let dx = (x_max - x_min) / (points - 1) as f64;
    let mut nodes: Vec<f64> = (0..points).map(|j| x_min + j as f64 * dx).collect();
    *nodes.last_mut().unwrap() = x_max;
    Ok(StateGrid { nodes, dx })
}

impl StateGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by construction a grid has ≥ 2 nodes
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Clamps a state to the admissible interval.
    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.x_min(), self.x_max())
    }

    /// Index `j` of the cell `[x_j, x_{j+1}]` containing `x` (clamped);
    /// always in `0..len()-1`.
    pub(crate) fn locate_cell(&self, x: f64) -> usize {
        let x = self.clamp(x);
        let guess = ((x - self.x_min()) / self.dx).floor();
        let mut j = if guess < 0.0 { 0 } else { (guess as usize).min(self.nodes.len() - 2) };
        // One-off corrections for rounding in the division above.
        while j > 0 && x < self.nodes[j] {
            j -= 1;
        }
        while j + 2 < self.nodes.len() && x > self.nodes[j + 1] {
            j += 1;
        }
        j
    }

    /// Index of the node nearest to `x` (clamped); exact ties go to the
    /// lower-index node.
    pub fn nearest_node(&self, x: f64) -> usize {
        let x = self.clamp(x);
        let j = self.locate_cell(x);
        let d_lo = (x - self.nodes[j]).abs();
        let d_hi = (self.nodes[j + 1] - x).abs();
        if d_lo <= d_hi {
            j
        } else {
            j + 1
        }
    }
}

/// Piecewise-linear interpolation of node values at `x` (clamped to the
/// grid).
///
/// Exact node hits return the stored value unchanged; otherwise, if either
/// bracketing value is `+∞`, the result is `+∞`; otherwise the usual convex
/// combination. `values` must have one entry per node.
pub fn interp_value(grid: &StateGrid, values: &[f64], x: f64) -> f64 {
    assert_eq!(values.len(), grid.len(), "one value per grid node required");
    let x = grid.clamp(x);
    let j = grid.locate_cell(x);
    let (x0, x1) = (grid.nodes[j], grid.nodes[j + 1]);
    if x == x0 {
        return values[j];
    }
    if x == x1 {
        return values[j + 1];
    }
    let (v0, v1) = (values[j], values[j + 1]);
    if v0.is_infinite() || v1.is_infinite() {
        return f64::INFINITY;
    }
    let w = (x - x0) / (x1 - x0);
    v0 + w * (v1 - v0)
}

/// Inclusive uniform discretization of `[lo, hi]`.
///
/// A non-degenerate range needs ≥ 2 points; a degenerate range (`lo == hi`)
/// needs exactly 1. Both endpoints are represented exactly.
pub fn discretize_range(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, DiscretizeError> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(DiscretizeError::InvalidRange { lo, hi, points });
    }
    if lo == hi {
        if points != 1 {
            return Err(DiscretizeError::InvalidRange { lo, hi, points });
        }
        return Ok(vec![lo]);
    }
    if points < 2 {
        return Err(DiscretizeError::InvalidRange { lo, hi, points });
    }
    let step = (hi - lo) / (points - 1) as f64;
    let mut out: Vec<f64> = (0..points).map(|idx| lo + idx as f64 * step).collect();
    *out.last_mut().unwrap() = hi;
    Ok(out)
}

/// The uniform time partition `0 = τ_0 < τ_1 < … < τ_n = horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    times: Vec<f64>,
}

/// Splits `[0, horizon]` into `n` equal steps; `horizon` must be positive
/// and finite, `n ≥ 1`.
pub fn uniform_partition(horizon: f64, n: usize) -> Result<Partition, DiscretizeError> {
    if n < 1 || !(horizon > 0.0) || !horizon.is_finite() {
        return Err(DiscretizeError::InvalidRange { lo: 0.0, hi: horizon, points: n });
    }
    let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * horizon / n as f64).collect();
    *times.last_mut().unwrap() = horizon;
    Ok(Partition { times })
}

impl Partition {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of steps `n`.
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    /// Nominal step length `Δ`.
    pub fn dt(&self) -> f64 {
        *self.times.last().unwrap() / self.steps() as f64
    }
}

/// Per-step action grids `T_i` (temperatures) and `Q_i` (disturbances),
/// indexed by 1-based step number.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionGrids {
    controls: Vec<Vec<f64>>,
    disturbances: Vec<Vec<f64>>,
}

impl ActionGrids {
    /// Discretizes every step's ranges with the configured point counts.
    /// A degenerate range collapses to its single value regardless of the
    /// configured count.
    pub fn from_config(cfg: &GameConfig) -> Result<Self, DiscretizeError> {
        let effective = |lo: f64, hi: f64, points: usize| {
            let points = if lo == hi { 1 } else { points };
            discretize_range(lo, hi, points)
        };
        let mut controls = Vec::with_capacity(cfg.steps);
        let mut disturbances = Vec::with_capacity(cfg.steps);
        if let PerStep::Each(list) = &cfg.per_step {
            if list.len() != cfg.steps {
                return Err(DiscretizeError::InvalidRange {
                    lo: 0.0,
                    hi: cfg.steps as f64,
                    points: list.len(),
                });
            }
        }
        for i in 1..=cfg.steps {
            let r = cfg.step_ranges(i);
            controls.push(effective(r.control.lo, r.control.hi, cfg.control_points)?);
            disturbances.push(effective(r.disturbance.lo, r.disturbance.hi, cfg.disturbance_points)?);
        }
        Ok(ActionGrids { controls, disturbances })
    }

    /// Temperature grid of 1-based step `i`.
    pub fn control(&self, i: usize) -> &[f64] {
        &self.controls[i - 1]
    }

    /// Disturbance grid of 1-based step `i`.
    pub fn disturbance(&self, i: usize) -> &[f64] {
        &self.disturbances[i - 1]
    }

    pub fn steps(&self) -> usize {
        self.controls.len()
    }
}
