//! Shared instances and an independently written single-player reference
//! solver used to cross-check the game solver on degenerate instances.
//!
//! Each integration-test binary links this module separately and uses only a
//! subset of the fixtures, so per-item dead-code lints are suppressed.
#![allow(dead_code)]

use drygame::model::{
    DryingDynamics, EnergyModel, GameConfig, Interval, Objective, PerStep, StateGridSpec,
    StepRanges, TerminalSet,
};

/// Grid-aligned affine instance: every Euler image of every node lands on a
/// node, so discretization introduces no error at all. Matches
/// `configs/grid_aligned.json`.
pub fn grid_aligned_instance() -> GameConfig {
    GameConfig {
        horizon: 3.0,
        steps: 3,
        x0: 0.625,
        state_grid: StateGridSpec { x_min: 0.0, x_max: 1.25, points: 11 },
        per_step: PerStep::Uniform(StepRanges {
            control: Interval { lo: 64.0, hi: 192.0 },
            disturbance: Interval { lo: 0.0, hi: 2.0 },
        }),
        control_points: 3,
        disturbance_points: 3,
        dynamics: DryingDynamics::Affine { a: -0.001953125, b: 0.125, c: 0.0 },
        energy: EnergyModel { c0: 0.0, c1: 1.0, t_amb: 20.0 },
        terminal: TerminalSet { lo: 0.0, hi: 0.25 },
        objective: Objective::Energy,
    }
}

/// Thin-layer instance with a reachable band. Matches
/// `configs/lewis_reachable.json`.
pub fn lewis_reachable() -> GameConfig {
    GameConfig {
        horizon: 10.0,
        steps: 10,
        x0: 0.8,
        state_grid: StateGridSpec { x_min: 0.0, x_max: 1.0, points: 101 },
        per_step: PerStep::Uniform(StepRanges {
            control: Interval { lo: 40.0, hi: 80.0 },
            disturbance: Interval { lo: 0.05, hi: 0.25 },
        }),
        control_points: 5,
        disturbance_points: 5,
        dynamics: DryingDynamics::Lewis { k_ref: 0.2, beta: 0.03, t_ref: 50.0 },
        energy: EnergyModel { c0: 0.5, c1: 1.0, t_amb: 20.0 },
        terminal: TerminalSet { lo: 0.0, hi: 0.3 },
        objective: Objective::Energy,
    }
}

/// The same thin-layer instance with the tighter band `[0, 0.15]`. Matches
/// `configs/lewis_benchmark.json`. Under worst-case air humidity 0.25 the
/// state can never fall below 0.25, so this band is worst-case unreachable
/// and the guaranteed value is infinite at every resolution.
pub fn lewis_benchmark() -> GameConfig {
    let mut cfg = lewis_reachable();
    cfg.terminal = TerminalSet { lo: 0.0, hi: 0.15 };
    cfg
}

/// Constant-rate time-objective instance. Matches
/// `configs/time_constant_rate.json`.
pub fn time_constant_rate() -> GameConfig {
    GameConfig {
        horizon: 5.0,
        steps: 5,
        x0: 1.0,
        state_grid: StateGridSpec { x_min: 0.0, x_max: 1.0, points: 11 },
        per_step: PerStep::Uniform(StepRanges {
            control: Interval { lo: 40.0, hi: 80.0 },
            disturbance: Interval { lo: 0.0, hi: 1.0 },
        }),
        control_points: 2,
        disturbance_points: 2,
        dynamics: DryingDynamics::Affine { a: 0.0, b: 0.0, c: -0.2 },
        energy: EnergyModel { c0: 0.0, c1: 1.0, t_amb: 20.0 },
        terminal: TerminalSet { lo: 0.0, hi: 0.2 },
        objective: Objective::Time,
    }
}

/// Affine instance whose dynamics and stage cost ignore the disturbance
/// entirely (`b = 0`): every nature behavior produces the same play.
pub fn alpha_independent() -> GameConfig {
    GameConfig {
        horizon: 5.0,
        steps: 5,
        x0: 0.8,
        state_grid: StateGridSpec { x_min: 0.0, x_max: 1.0, points: 11 },
        per_step: PerStep::Uniform(StepRanges {
            control: Interval { lo: 50.0, hi: 100.0 },
            disturbance: Interval { lo: 0.0, hi: 1.0 },
        }),
        control_points: 2,
        disturbance_points: 3,
        dynamics: DryingDynamics::Affine { a: -0.002, b: 0.0, c: 0.0 },
        energy: EnergyModel { c0: 0.0, c1: 1.0, t_amb: 20.0 },
        terminal: TerminalSet { lo: 0.0, hi: 0.2 },
        objective: Objective::Energy,
    }
}

/// The instance refined the way the refinement study refines it: `2^level`
/// times the steps, matching state resolution, same physics.
pub fn refined(cfg: &GameConfig, level: usize) -> GameConfig {
    let factor = 1usize << level;
    let mut c = cfg.clone();
    c.steps = cfg.steps * factor;
    c.state_grid.points = (cfg.state_grid.points - 1) * factor + 1;
    c
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if lo == hi {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    let mut out: Vec<f64> = (0..points).map(|i| lo + i as f64 * step).collect();
    out[points - 1] = hi;
    out
}

fn interp(nodes: &[f64], values: &[f64], x: f64) -> f64 {
    let x = x.clamp(nodes[0], nodes[nodes.len() - 1]);
    // Binary search for the cell (deliberately not the library's walk).
    let mut lo = 0usize;
    let mut hi = nodes.len() - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if nodes[mid] <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if x == nodes[lo] {
        return values[lo];
    }
    if x == nodes[hi] {
        return values[hi];
    }
    if !values[lo].is_finite() || !values[hi].is_finite() {
        return f64::INFINITY;
    }
    let w = (x - nodes[lo]) / (nodes[hi] - nodes[lo]);
    values[lo] + w * (values[hi] - values[lo])
}

/// Single-player reference value: a from-scratch backward recursion for
/// instances whose disturbance range is a single point at every step.
///
/// `F_k(x) = min over the temperature grid of Δ·e(t) + F_{k−1}(x')` with
/// `x'` the clamped Euler image under the pinned disturbance; `F_k = 0` on
/// the band and `F_0 = ∞` off it.
pub fn plain_min_value(cfg: &GameConfig) -> f64 {
    let p = cfg.state_grid.points;
    let nodes = linspace(cfg.state_grid.x_min, cfg.state_grid.x_max, p);
    let dt = cfg.dt();

    let base: Vec<f64> = nodes
        .iter()
        .map(|&x| if cfg.terminal.contains(x) { 0.0 } else { f64::INFINITY })
        .collect();
    let mut prev = base;

    for k in 1..=cfg.steps {
        let i = cfg.steps - k + 1;
        let ranges = cfg.per_step.for_step(i);
        assert_eq!(
            ranges.disturbance.lo, ranges.disturbance.hi,
            "the reference solver only handles singleton disturbance ranges"
        );
        let alpha = ranges.disturbance.lo;
        let temps = linspace(ranges.control.lo, ranges.control.hi, cfg.control_points);

        let next: Vec<f64> = nodes
            .iter()
            .map(|&x| {
                if cfg.terminal.contains(x) {
                    return 0.0;
                }
                let mut best = f64::INFINITY;
                for &t in &temps {
                    let image = (x + dt * cfg.dynamics.rate(x, t, alpha))
                        .clamp(cfg.state_grid.x_min, cfg.state_grid.x_max);
                    let total = dt * cfg.energy.power(t, alpha, x) + interp(&nodes, &prev, image);
                    if total < best {
                        best = total;
                    }
                }
                best
            })
            .collect();
        prev = next;
    }

    interp(&nodes, &prev, cfg.x0)
}
