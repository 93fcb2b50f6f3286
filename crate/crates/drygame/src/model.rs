//! The physical drying game: moisture dynamics, energy model, target band,
//! per-step action ranges, and instance validation.
//!
//! A campaign runs on the time window `[0, horizon]` split into `steps`
//! equal intervals of length `Δ = horizon / steps`. On each interval the
//! operator holds one drying-air temperature `t` and nature holds one
//! disturbance `α`; the moisture `x` then moves by one explicit Euler step of
//! `ẋ = f(x, t, α)` and the operator pays `Δ · e(t, α, x)` of energy. Play
//! stops as soon as `x` enters the closed target band.

use serde::{Deserialize, Serialize};

/// Moisture-content dynamics `ẋ = f(x, t, α)`.
///
/// Two closed families are provided rather than an open plugin trait so that
/// configurations stay serializable and runs stay reproducible:
///
/// - `Affine`: `f = a·t + b·α + c`. Not meant to be physical; its value is
///   that parameters can be chosen to make every Euler image land exactly on
///   a state-grid node, which enables exact cross-checks against the
///   game-tree oracle.
/// - `Lewis`: the thin-layer (Newton/Lewis) drying law
///   `f = −k(t)·(x − α)` with `k(t) = k_ref·exp(beta·(t − t_ref))`, where
///   `α` plays the role of the equilibrium moisture content imposed by the
///   ambient air.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DryingDynamics {
    Affine { a: f64, b: f64, c: f64 },
    Lewis { k_ref: f64, beta: f64, t_ref: f64 },
}

impl DryingDynamics {
    /// Drying-rate coefficient `k(t)` of the lewis law (1 for affine, where
    /// it has no meaning).
    fn k(&self, t: f64) -> f64 {
        match *self {
            DryingDynamics::Affine { .. } => 1.0,
            DryingDynamics::Lewis { k_ref, beta, t_ref } => k_ref * (beta * (t - t_ref)).exp(),
        }
    }

    /// Evaluates `f(x, t, α)`.
    pub fn rate(&self, x: f64, t: f64, alpha: f64) -> f64 {
        match *self {
            DryingDynamics::Affine { a, b, c } => a * t + b * alpha + c,
            DryingDynamics::Lewis { .. } => -self.k(t) * (x - alpha),
        }
    }

    /// One explicit Euler step `x + Δ·f(x, t, α)`, unclamped.
    ///
    /// Physical bounds are the caller's business: the solver and the
    /// simulator clamp the image to the state grid and count the event.
    pub fn euler_step(&self, x: f64, t: f64, alpha: f64, dt: f64) -> f64 {
        x + dt * self.rate(x, t, alpha)
    }

    /// True when the state can never move (`affine` with `a = b = c = 0`).
    pub fn is_frozen(&self) -> bool {
        matches!(*self, DryingDynamics::Affine { a, b, c } if a == 0.0 && b == 0.0 && c == 0.0)
    }

    /// Interval bound on `f` over a state interval and one step's action
    /// ranges; used for the reachability warning in validation.
    pub(crate) fn rate_bounds(&self, x_lo: f64, x_hi: f64, ranges: &StepRanges) -> (f64, f64) {
        let corners: Vec<f64> = match *self {
            DryingDynamics::Affine { .. } => {
                // x-independent; extremes sit at control/disturbance corners.
                let mut v = Vec::with_capacity(4);
                for t in [ranges.control.lo, ranges.control.hi] {
                    for alpha in [ranges.disturbance.lo, ranges.disturbance.hi] {
                        v.push(self.rate(0.0, t, alpha));
                    }
                }
                v
            }
            DryingDynamics::Lewis { .. } => {
                // f = −k·(x − α) with k > 0 monotone in t; extremes of the
                // product lie at corners of the k-interval × (x−α)-interval.
                let k_a = self.k(ranges.control.lo);
                let k_b = self.k(ranges.control.hi);
                let d_lo = x_lo - ranges.disturbance.hi;
                let d_hi = x_hi - ranges.disturbance.lo;
                let mut v = Vec::with_capacity(4);
                for k in [k_a.min(k_b), k_a.max(k_b)] {
                    for d in [d_lo, d_hi] {
                        v.push(-k * d);
                    }
                }
                v
            }
        };
        let lo = corners.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Power draw `e(t, α, x) = c0 + c1·max(t − t_amb, 0)`.
///
/// The built-in model ignores `α` and `x`; the arguments stay in the
/// signature so alternative models slot in without call-site churn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyModel {
    pub c0: f64,
    pub c1: f64,
    pub t_amb: f64,
}

impl EnergyModel {
    pub fn power(&self, t: f64, _alpha: f64, _x: f64) -> f64 {
        self.c0 + self.c1 * (t - self.t_amb).max(0.0)
    }
}

/// The closed target moisture band; play is over once `lo ≤ x ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalSet {
    pub lo: f64,
    pub hi: f64,
}

impl TerminalSet {
    /// Boundary-inclusive membership test.
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Admissible action ranges for one step: temperatures in `control`,
/// disturbances in `disturbance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRanges {
    pub control: Interval,
    pub disturbance: Interval,
}

/// Per-step action ranges: one shared set, or one entry per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerStep {
    Uniform(StepRanges),
    Each(Vec<StepRanges>),
}

impl PerStep {
    /// Ranges for 1-based step `i`.
    pub fn for_step(&self, i: usize) -> &StepRanges {
        match self {
            PerStep::Uniform(r) => r,
            PerStep::Each(v) => &v[i - 1],
        }
    }

    /// True when one shared range set is declared for all steps. An `Each`
    /// list whose entries happen to be equal is treated as step-varying;
    /// callers use this only to enable shortcuts that require declared
    /// uniformity, so the conservative answer is always safe.
    pub fn is_uniform(&self) -> bool {
        matches!(self, PerStep::Uniform(_))
    }
}

/// Requested state-grid geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateGridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

/// What the operator optimizes: guaranteed energy or guaranteed step count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Energy,
    Time,
}

/// One complete, reproducible instance of the drying game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    /// Total drying window `J*` (time units).
    pub horizon: f64,
    /// Number `n` of equal steps; `Δ = horizon / steps`.
    pub steps: usize,
    /// Initial moisture content.
    pub x0: f64,
    pub state_grid: StateGridSpec,
    pub per_step: PerStep,
    /// Temperature grid size per step range (endpoints included).
    pub control_points: usize,
    /// Disturbance grid size per step range (endpoints included).
    pub disturbance_points: usize,
    pub dynamics: DryingDynamics,
    pub energy: EnergyModel,
    pub terminal: TerminalSet,
    pub objective: Objective,
}

impl GameConfig {
    /// Step length `Δ`.
    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// Action ranges of 1-based step `i`.
    pub fn step_ranges(&self, i: usize) -> &StepRanges {
        self.per_step.for_step(i)
    }

    /// Checks every instance invariant, reporting violations and advisory
    /// warnings; never fails.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let v = &mut report.violations;

        if self.steps < 1 {
            v.push("steps must be ≥ 1".into());
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            v.push("horizon must be finite and > 0".into());
        }
        let g = &self.state_grid;
        if !g.x_min.is_finite() || !g.x_max.is_finite() || g.x_min >= g.x_max {
            v.push("state grid requires finite x_min < x_max".into());
        }
        if g.points < 2 {
            v.push("state grid points must be ≥ 2".into());
        }
        if !self.x0.is_finite() || self.x0 < g.x_min || self.x0 > g.x_max {
            v.push("x0 must lie within [x_min, x_max]".into());
        }
        let ts = &self.terminal;
        if !(ts.lo <= ts.hi) {
            v.push("terminal set: lo ≤ hi required".into());
        }
        if ts.lo < 0.0 {
            v.push("terminal set: lo must be ≥ 0".into());
        }
        if ts.lo < g.x_min || ts.hi > g.x_max {
            v.push("terminal set must lie within [x_min, x_max]".into());
        }
        if let PerStep::Each(list) = &self.per_step {
            if self.steps >= 1 && list.len() != self.steps {
                v.push(format!(
                    "per_step list must have exactly {} entries, got {}",
                    self.steps,
                    list.len()
                ));
            }
        }
        if self.steps >= 1 {
            for i in 1..=self.steps_in_range() {
                let r = self.step_ranges(i);
                if !(r.control.lo <= r.control.hi) {
                    v.push(format!("step {i}: control range lo ≤ hi required"));
                }
                if !(r.disturbance.lo <= r.disturbance.hi) {
                    v.push(format!("step {i}: disturbance range lo ≤ hi required"));
                }
                if r.control.lo < r.control.hi && self.control_points < 2 {
                    v.push("control_points must be ≥ 2 for a non-degenerate control range".into());
                }
                if r.disturbance.lo < r.disturbance.hi && self.disturbance_points < 2 {
                    v.push(
                        "disturbance_points must be ≥ 2 for a non-degenerate disturbance range"
                            .into(),
                    );
                }
            }
        }
        if self.control_points < 1 {
            v.push("control_points must be ≥ 1".into());
        }
        if self.disturbance_points < 1 {
            v.push("disturbance_points must be ≥ 1".into());
        }
        match self.dynamics {
            DryingDynamics::Lewis { k_ref, .. } => {
                if !(k_ref > 0.0) {
                    v.push("lewis dynamics require k_ref > 0".into());
                }
            }
            DryingDynamics::Affine { .. } => {}
        }
        if self.energy.c0 < 0.0 || self.energy.c1 < 0.0 {
            v.push("energy model requires c0 ≥ 0 and c1 ≥ 0".into());
        }

        if report.violations.is_empty() {
            if self.dynamics.is_frozen() {
                report
                    .warnings
                    .push("dynamics are frozen (a = b = c = 0): the state never moves".into());
            }
            if !self.terminal_reachable_estimate() {
                report.warnings.push(
                    "terminal set may be unreachable: an outer reachability estimate never \
                     intersects it within the horizon"
                        .into(),
                );
            }
        }
        report
    }

    /// Number of steps that have well-defined ranges (guards indexing while
    /// validation is still collecting violations).
    fn steps_in_range(&self) -> usize {
        match &self.per_step {
            PerStep::Uniform(_) => self.steps,
            PerStep::Each(list) => self.steps.min(list.len()),
        }
    }

    /// Outer (superset) estimate of the states reachable from `x0`,
    /// propagated by interval arithmetic; returns whether the tube ever
    /// touches the terminal band. Sound for warning purposes: if the outer
    /// tube misses the band, so does every true trajectory.
    fn terminal_reachable_estimate(&self) -> bool {
        let dt = self.dt();
        let (mut lo, mut hi) = (self.x0, self.x0);
        let overlap = |lo: f64, hi: f64| lo <= self.terminal.hi && hi >= self.terminal.lo;
        if overlap(lo, hi) {
            return true;
        }
        for i in 1..=self.steps {
            let (r_lo, r_hi) = self.dynamics.rate_bounds(lo, hi, self.step_ranges(i));
            lo = (lo + dt * r_lo).clamp(self.state_grid.x_min, self.state_grid.x_max);
            hi = (hi + dt * r_hi).clamp(self.state_grid.x_min, self.state_grid.x_max);
            if overlap(lo, hi) {
                return true;
            }
        }
        false
    }
}

/// Outcome of [`GameConfig::validate`]: hard violations plus advisory
/// warnings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn demo_config() -> GameConfig {
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

    #[test]
    fn lewis_rate_matches_formula() {
        let d = DryingDynamics::Lewis { k_ref: 0.2, beta: 0.0, t_ref: 0.0 };
        assert_eq!(d.rate(0.5, 55.0, 0.1), -0.2 * (0.5 - 0.1));
    }

    #[test]
    fn affine_constant_rate() {
        let d = DryingDynamics::Affine { a: 0.0, b: 0.0, c: -0.2 };
        assert_eq!(d.rate(0.9, 75.0, 0.4), -0.2);
        assert_eq!(d.rate(0.0, 0.0, 0.0), -0.2);
    }

    #[test]
    fn lewis_rate_zero_at_equilibrium() {
        let d = DryingDynamics::Lewis { k_ref: 0.1, beta: 0.05, t_ref: 50.0 };
        assert_eq!(d.rate(0.3, 70.0, 0.3), 0.0);
    }

    #[test]
    fn euler_step_moves_by_dt_times_rate() {
        let d = DryingDynamics::Affine { a: 0.0, b: 0.0, c: -0.1 };
        assert_eq!(d.euler_step(0.5, 40.0, 0.0, 1.0), 0.4);
        // Degenerate Δ = 0 is rejected by validation, but the map itself is
        // total and reduces to the identity.
        assert_eq!(d.euler_step(0.5, 40.0, 0.0, 0.0), 0.5);
        // Operands are dyadic where it matters: x − α = 0.25 is exact, so the
        // rate is exactly −0.2·0.25 = −0.05 and the identity holds bit-for-bit.
        let lewis = DryingDynamics::Lewis { k_ref: 0.2, beta: 0.0, t_ref: 0.0 };
        assert_eq!(lewis.euler_step(0.5, 55.0, 0.25, 0.5), 0.5 + 0.5 * (-0.05));
    }

    #[test]
    fn energy_rate_examples() {
        let e = EnergyModel { c0: 0.0, c1: 1.0, t_amb: 20.0 };
        assert_eq!(e.power(60.0, 0.0, 0.0), 40.0);
        assert_eq!(e.power(10.0, 0.0, 0.0), 0.0); // no negative power
        let flat = EnergyModel { c0: 2.0, c1: 0.0, t_amb: 20.0 };
        assert_eq!(flat.power(500.0, 0.0, 0.0), 2.0);
    }

    #[test]
    fn terminal_band_is_boundary_inclusive() {
        let ts = TerminalSet { lo: 0.0, hi: 0.2 };
        assert!(ts.contains(0.2));
        assert!(ts.contains(0.0));
        assert!(!ts.contains(0.200001));
        assert!(!ts.contains(-0.000001));
    }

    #[test]
    fn valid_config_has_empty_report() {
        let report = demo_config().validate();
        assert!(report.is_valid(), "unexpected violations: {:?}", report.violations);
        assert!(report.warnings.is_empty(), "unexpected warnings: {:?}", report.warnings);
    }

    #[test]
    fn zero_steps_is_a_violation() {
        let mut cfg = demo_config();
        cfg.steps = 0;
        let report = cfg.validate();
        assert!(report.violations.iter().any(|m| m.contains("steps must be ≥ 1")));
    }

    #[test]
    fn inverted_terminal_band_is_a_violation() {
        let mut cfg = demo_config();
        cfg.terminal = TerminalSet { lo: 0.5, hi: 0.4 };
        let report = cfg.validate();
        assert!(report.violations.iter().any(|m| m.contains("lo ≤ hi required")));
    }

    #[test]
    fn frozen_dynamics_warn_but_validate() {
        let mut cfg = demo_config();
        cfg.dynamics = DryingDynamics::Affine { a: 0.0, b: 0.0, c: 0.0 };
        let report = cfg.validate();
        assert!(report.is_valid());
        assert!(report.warnings.iter().any(|m| m.contains("frozen")));
        assert!(report.warnings.iter().any(|m| m.contains("unreachable")));
    }

    #[test]
    fn per_step_length_mismatch_is_a_violation() {
        let mut cfg = demo_config();
        let r = *cfg.step_ranges(1);
        cfg.per_step = PerStep::Each(vec![r, r]); // needs 3
        assert!(!cfg.validate().is_valid());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = demo_config();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: GameConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    proptest! {
        #[test]
        fn lewis_rate_sign_tracks_equilibrium_gap(
            x in 0.0..1.5f64,
            alpha in 0.0..1.5f64,
            t in 0.0..200.0f64,
            k_ref in 0.01..2.0f64,
            beta in -0.05..0.05f64,
        ) {
            let d = DryingDynamics::Lewis { k_ref, beta, t_ref: 50.0 };
            let r = d.rate(x, t, alpha);
            if x > alpha {
                prop_assert!(r < 0.0);
            } else if x < alpha {
                prop_assert!(r > 0.0);
            } else {
                prop_assert_eq!(r, 0.0);
            }
        }

        #[test]
        fn energy_rate_is_nonnegative(
            t in -50.0..300.0f64,
            alpha in 0.0..1.0f64,
            x in 0.0..1.5f64,
            c0 in 0.0..10.0f64,
            c1 in 0.0..10.0f64,
        ) {
            let e = EnergyModel { c0, c1, t_amb: 20.0 };
            prop_assert!(e.power(t, alpha, x) >= 0.0);
        }

        #[test]
        fn euler_step_is_affine_in_dt(
            x in 0.0..1.5f64,
            t in 0.0..200.0f64,
            alpha in 0.0..1.0f64,
            dt in 0.001..2.0f64,
            lambda in 0.1..4.0f64,
        ) {
            let d = DryingDynamics::Lewis { k_ref: 0.2, beta: 0.03, t_ref: 50.0 };
            let one = d.euler_step(x, t, alpha, dt) - x;
            let scaled = d.euler_step(x, t, alpha, lambda * dt) - x;
            prop_assert!((scaled - lambda * one).abs() <= 1e-12);
        }

        #[test]
        fn hotter_air_dries_strictly_faster(
            x in 0.3..1.5f64,
            alpha in 0.0..0.29f64,
            t in 0.0..150.0f64,
            dt_extra in 1.0..50.0f64,
        ) {
            // beta > 0 and x > alpha: rate strictly decreasing in t.
            let d = DryingDynamics::Lewis { k_ref: 0.2, beta: 0.03, t_ref: 50.0 };
            prop_assert!(d.rate(x, t + dt_extra, alpha) < d.rate(x, t, alpha));
        }
    }
}
