//! Playing the game: rollouts of a temperature policy against disturbance
//! strategies, nature's best response, and numerical ε-saddle verification.
//!
//! A solved instance claims "`V` is guaranteed". This module is where that
//! claim is attacked from both sides:
//!
//! - **left** (nature deviates): no disturbance strategy should extract
//!   more than `V + ε` from the stored policy;
//! - **right** (operator deviates): no temperature strategy should beat
//!   `V − ε` against nature's stored responder.
//!
//! Payoffs use the convention that a play which never reaches the target
//! band costs `+∞` — a guarantee that sometimes fails to dry is no
//! guarantee at all.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::discretize::{build_state_grid, interp_value, uniform_partition, ActionGrids};
use crate::model::GameConfig;
use crate::solver::{EnergySolution, NatureResponder, OperatorPolicy, ValueTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
    #[error("strategy does not fit the instance: {0}")]
    StrategyMismatch(String),
    #[error("{combos} strategy combinations exceed the exhaustive-search limit of {limit}")]
    InstanceTooLarge { combos: u128, limit: u128 },
}

/// Open safety valve for exhaustive strategy enumeration.
pub const EXHAUSTIVE_LIMIT: u128 = 100_000;

/// How nature plays a rollout.
#[derive(Debug, Clone, PartialEq)]
pub enum NatureStrategy {
    /// One disturbance value held for the whole campaign; must be
    /// admissible at every step.
    Constant(f64),
    /// One disturbance per step (length must equal the horizon).
    Schedule(Vec<f64>),
    /// The solver's tabulated stage best reply.
    Responder(NatureResponder),
    /// One-step greedy ascent on a value table: at step `i` with `k` steps
    /// to go, pick the grid disturbance maximizing
    /// `Δ·e + F_{k−1}(image)`. Exact best response wherever play stays on
    /// grid nodes.
    Table(ValueTable),
}

/// One executed step of a rollout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryStep {
    /// 1-based step number.
    pub step: usize,
    /// Campaign time at the start of the step.
    pub tau: f64,
    /// Moisture at the start of the step.
    pub x: f64,
    pub control: f64,
    pub disturbance: f64,
    pub stage_energy: f64,
    /// Energy spent up to and including this step.
    pub cum_energy: f64,
    /// Whether the Euler image had to be clamped to the state interval.
    pub clamped: bool,
}

/// A finished rollout.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
    /// Moisture after the last executed step.
    pub final_x: f64,
    /// Whether the target band was reached within the horizon.
    pub reached: bool,
    pub total_energy: f64,
}

impl Trajectory {
    pub fn steps_used(&self) -> usize {
        self.steps.len()
    }

    /// Energy payoff under the guarantee convention: `+∞` when the band was
    /// never reached.
    pub fn guaranteed_payoff(&self) -> f64 {
        if self.reached {
            self.total_energy
        } else {
            f64::INFINITY
        }
    }
}

/// Nature's best response against a fixed policy.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    /// The payoff nature forces (under the `+∞` non-reaching convention).
    pub payoff: f64,
    /// The disturbance sequence that forces it (one value per executed
    /// step).
    pub schedule: Vec<f64>,
    pub trajectory: Trajectory,
}

/// Knobs for [`verify_saddle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleOptions {
    /// Tolerance ε for both inequality checks.
    pub epsilon: f64,
    /// Random nature deviations to try when exhaustive enumeration is too
    /// large.
    pub nature_deviations: usize,
    /// Budget per operator-deviation family (single-node swaps, per-step
    /// constants); families larger than this are randomly subsampled.
    pub operator_deviations: usize,
    /// RNG seed for all sampling — reports are reproducible.
    pub seed: u64,
}

impl Default for SaddleOptions {
    fn default() -> Self {
        SaddleOptions { epsilon: 1e-9, nature_deviations: 200, operator_deviations: 200, seed: 20260814 }
    }
}

/// The two-sided verification verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleReport {
    /// Payoff of policy vs. responder (the claimed value).
    pub value: f64,
    pub epsilon: f64,
    /// Worst excess any tried nature deviation extracted over `value`.
    pub left_violation: f64,
    /// Worst amount any tried operator deviation undercut `value` by.
    pub right_violation: f64,
    pub nature_candidates: usize,
    pub operator_candidates: usize,
    pub pass: bool,
}

struct Arena {
    cfg: GameConfig,
    grids: ActionGrids,
    taus: Vec<f64>,
    dt: f64,
}

fn arena(cfg: &GameConfig, policy: &OperatorPolicy) -> Result<Arena, GameError> {
    let report = cfg.validate();
    if !report.is_valid() {
        return Err(GameError::InvalidConfig(report.violations));
    }
    let grid = build_state_grid(cfg.state_grid.x_min, cfg.state_grid.x_max, cfg.state_grid.points)
        .map_err(|e| GameError::InvalidConfig(vec![e.to_string()]))?;
    if policy.grid() != &grid {
        return Err(GameError::StrategyMismatch(
            "policy state grid does not match the configuration".into(),
        ));
    }
    if policy.steps() != cfg.steps {
        return Err(GameError::StrategyMismatch(format!(
            "policy covers {} steps, the instance has {}",
            policy.steps(),
            cfg.steps
        )));
    }
    let grids = ActionGrids::from_config(cfg)
        .map_err(|e| GameError::InvalidConfig(vec![e.to_string()]))?;
    let partition = uniform_partition(cfg.horizon, cfg.steps)
        .map_err(|e| GameError::InvalidConfig(vec![e.to_string()]))?;
    Ok(Arena { cfg: cfg.clone(), grids, taus: partition.times().to_vec(), dt: cfg.dt() })
}

fn check_nature_fits(cfg: &GameConfig, nature: &NatureStrategy) -> Result<(), GameError> {
    let admissible = |i: usize, alpha: f64| {
        let r = cfg.step_ranges(i).disturbance;
        r.lo <= alpha && alpha <= r.hi
    };
    match nature {
        NatureStrategy::Constant(alpha) => {
            for i in 1..=cfg.steps {
                if !admissible(i, *alpha) {
                    return Err(GameError::StrategyMismatch(format!(
                        "constant disturbance {alpha} is outside the step-{i} range"
                    )));
                }
            }
        }
        NatureStrategy::Schedule(seq) => {
            if seq.len() != cfg.steps {
                return Err(GameError::StrategyMismatch(format!(
                    "schedule has {} entries, the instance has {} steps",
                    seq.len(),
                    cfg.steps
                )));
            }
            for (idx, alpha) in seq.iter().enumerate() {
                if !admissible(idx + 1, *alpha) {
                    return Err(GameError::StrategyMismatch(format!(
                        "schedule entry {alpha} at step {} is out of range",
                        idx + 1
                    )));
                }
            }
        }
        NatureStrategy::Responder(resp) => {
            if resp.steps() != cfg.steps {
                return Err(GameError::StrategyMismatch(format!(
                    "responder covers {} steps, the instance has {}",
                    resp.steps(),
                    cfg.steps
                )));
            }
        }
        NatureStrategy::Table(table) => {
            if table.steps() != cfg.steps {
                return Err(GameError::StrategyMismatch(format!(
                    "value table covers {} steps, the instance has {}",
                    table.steps(),
                    cfg.steps
                )));
            }
        }
    }
    Ok(())
}

/// Rolls the policy out against a disturbance strategy from `x0`.
///
/// Play stops as soon as the state is inside the target band (possibly
/// before the first step) or the horizon is exhausted.
pub fn simulate(
    cfg: &GameConfig,
    policy: &OperatorPolicy,
    nature: &NatureStrategy,
) -> Result<Trajectory, GameError> {
    let arena = arena(cfg, policy)?;
    check_nature_fits(cfg, nature)?;
    let mut x = cfg.x0;
    let mut steps = Vec::new();
    let mut cum = 0.0f64;
    let mut reached = cfg.terminal.contains(x);
    for i in 1..=cfg.steps {
        if reached {
            break;
        }
        let t = policy.control_at(i, x);
        let alpha = match nature {
            NatureStrategy::Constant(a) => *a,
            NatureStrategy::Schedule(seq) => seq[i - 1],
            NatureStrategy::Responder(resp) => resp.respond(i, x, t),
            NatureStrategy::Table(table) => {
                greedy_table_reply(&arena, table, i, x, t)
            }
        };
        let raw = cfg.dynamics.euler_step(x, t, alpha, arena.dt);
        let image = raw.clamp(cfg.state_grid.x_min, cfg.state_grid.x_max);
        let stage_energy = arena.dt * cfg.energy.power(t, alpha, x);
        cum += stage_energy;
        steps.push(TrajectoryStep {
            step: i,
            tau: arena.taus[i - 1],
            x,
            control: t,
            disturbance: alpha,
            stage_energy,
            cum_energy: cum,
            clamped: image != raw,
        });
        x = image;
        reached = cfg.terminal.contains(x);
    }
    Ok(Trajectory { steps, final_x: x, reached, total_energy: cum })
}

/// The `Table` strategy's stage reply: grid disturbance maximizing stage
/// cost plus interpolated tail, first index on ties.
fn greedy_table_reply(arena: &Arena, table: &ValueTable, i: usize, x: f64, t: f64) -> f64 {
    let k = arena.cfg.steps - i + 1; // steps-to-go entering step i
    let prev = table.slice(k - 1);
    let mut worst = f64::NEG_INFINITY;
    let disturbances = arena.grids.disturbance(i);
    let mut worst_alpha = disturbances[0];
    for &alpha in disturbances {
        let image = arena
            .cfg
            .dynamics
            .euler_step(x, t, alpha, arena.dt)
            .clamp(arena.cfg.state_grid.x_min, arena.cfg.state_grid.x_max);
        let cost = arena.dt * arena.cfg.energy.power(t, alpha, x)
            + interp_value(table.grid(), prev, image);
        if cost > worst {
            worst = cost;
            worst_alpha = alpha;
        }
    }
    worst_alpha
}

/// Nature's best response to a fixed policy.
///
/// With a value table, plays the one-step greedy ascent
/// ([`NatureStrategy::Table`]). Without one, enumerates **every**
/// disturbance schedule on the step grids — exact, because against a fixed
/// feedback policy the play is a function of the schedule alone — and
/// refuses instances with more than [`EXHAUSTIVE_LIMIT`] combinations.
pub fn best_response_nature(
    cfg: &GameConfig,
    policy: &OperatorPolicy,
    table: Option<&ValueTable>,
) -> Result<BestResponse, GameError> {
    if let Some(table) = table {
        let strategy = NatureStrategy::Table(table.clone());
        check_nature_fits(cfg, &strategy)?;
        let trajectory = simulate(cfg, policy, &strategy)?;
        let schedule = trajectory.steps.iter().map(|s| s.disturbance).collect();
        return Ok(BestResponse { payoff: trajectory.guaranteed_payoff(), schedule, trajectory });
    }

    let arena_ = arena(cfg, policy)?;
    let sizes: Vec<usize> = (1..=cfg.steps).map(|i| arena_.grids.disturbance(i).len()).collect();
    let combos = sizes.iter().fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
    if combos > EXHAUSTIVE_LIMIT {
        return Err(GameError::InstanceTooLarge { combos, limit: EXHAUSTIVE_LIMIT });
    }

    let mut indices = vec![0usize; cfg.steps];
    let mut best: Option<BestResponse> = None;
    loop {
        let schedule: Vec<f64> = indices
            .iter()
            .enumerate()
            .map(|(step0, &q)| arena_.grids.disturbance(step0 + 1)[q])
            .collect();
        let trajectory = simulate(cfg, policy, &NatureStrategy::Schedule(schedule))?;
        let payoff = trajectory.guaranteed_payoff();
        let better = match &best {
            None => true,
            Some(b) => payoff > b.payoff,
        };
        if better {
            let schedule = trajectory.steps.iter().map(|s| s.disturbance).collect();
            best = Some(BestResponse { payoff, schedule, trajectory });
        }
        // Odometer over per-step disturbance indices, last step fastest.
        let mut pos = cfg.steps;
        loop {
            if pos == 0 {
                return Ok(best.expect("at least one schedule was simulated"));
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < sizes[pos] {
                break;
            }
            indices[pos] = 0;
        }
    }
}

fn excess_over(value: f64, payoff: f64) -> f64 {
    // payoff − value, clipped below at 0, without ever forming ∞ − ∞.
    if payoff <= value {
        0.0
    } else {
        payoff - value
    }
}

fn shortfall_under(value: f64, payoff: f64) -> f64 {
    // value − payoff, clipped below at 0, without ever forming ∞ − ∞.
    if payoff >= value {
        0.0
    } else {
        value - payoff
    }
}

/// Two-sided numerical check that (policy, responder) is an ε-saddle point.
///
/// The claimed value `V` is the payoff of policy vs. responder.
/// Nature-side candidates: every admissible constant grid disturbance, the
/// exhaustive schedule set when small enough (otherwise seeded random
/// schedules), and the greedy table ascent. Operator-side candidates play
/// against the stored responder: every single-(step, node) temperature swap
/// and every per-step constant-temperature combination, each family
/// subsampled to the configured budget when larger.
pub fn verify_saddle(
    cfg: &GameConfig,
    solution: &EnergySolution,
    opts: &SaddleOptions,
) -> Result<SaddleReport, GameError> {
    let arena_ = arena(cfg, &solution.policy)?;
    let responder_strategy = NatureStrategy::Responder(solution.responder.clone());
    check_nature_fits(cfg, &responder_strategy)?;
    let value = simulate(cfg, &solution.policy, &responder_strategy)?.guaranteed_payoff();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    // ---- Left: nature deviations against the stored policy. ----
    let mut left_violation = 0.0f64;
    let mut nature_candidates = 0usize;
    let try_nature = |strategy: &NatureStrategy,
                          left_violation: &mut f64,
                          nature_candidates: &mut usize|
     -> Result<(), GameError> {
        let payoff = simulate(cfg, &solution.policy, strategy)?.guaranteed_payoff();
        *left_violation = left_violation.max(excess_over(value, payoff));
        *nature_candidates += 1;
        Ok(())
    };

    // Constants admissible at every step.
    let mut constants: Vec<f64> = Vec::new();
    for i in 1..=cfg.steps {
        for &alpha in arena_.grids.disturbance(i) {
            let everywhere = (1..=cfg.steps).all(|j| {
                let r = cfg.step_ranges(j).disturbance;
                r.lo <= alpha && alpha <= r.hi
            });
            if everywhere && !constants.contains(&alpha) {
                constants.push(alpha);
            }
        }
    }
    for &alpha in &constants {
        try_nature(&NatureStrategy::Constant(alpha), &mut left_violation, &mut nature_candidates)?;
    }

    // Greedy ascent on the solved table.
    try_nature(
        &NatureStrategy::Table(solution.table.clone()),
        &mut left_violation,
        &mut nature_candidates,
    )?;

    let sizes: Vec<usize> = (1..=cfg.steps).map(|i| arena_.grids.disturbance(i).len()).collect();
    let combos = sizes.iter().fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
    if combos <= EXHAUSTIVE_LIMIT {
        let br = best_response_nature(cfg, &solution.policy, None)?;
        left_violation = left_violation.max(excess_over(value, br.payoff));
        nature_candidates += combos as usize;
    } else {
        for _ in 0..opts.nature_deviations {
            let schedule: Vec<f64> = (1..=cfg.steps)
                .map(|i| {
                    let q = arena_.grids.disturbance(i);
                    q[rng.gen_range(0..q.len())]
                })
                .collect();
            try_nature(
                &NatureStrategy::Schedule(schedule),
                &mut left_violation,
                &mut nature_candidates,
            )?;
        }
    }

    // ---- Right: operator deviations against the stored responder. ----
    let mut right_violation = 0.0f64;
    let mut operator_candidates = 0usize;
    let try_operator = |policy: &OperatorPolicy,
                            right_violation: &mut f64,
                            operator_candidates: &mut usize|
     -> Result<(), GameError> {
        let payoff = simulate(cfg, policy, &responder_strategy)?.guaranteed_payoff();
        *right_violation = right_violation.max(shortfall_under(value, payoff));
        *operator_candidates += 1;
        Ok(())
    };

    // Family 1: single-(step, node) temperature swaps.
    let nodes = solution.policy.grid().len();
    let mut swaps: Vec<(usize, usize, f64)> = Vec::new();
    for i in 1..=cfg.steps {
        for j in 0..nodes {
            let held = solution.policy.row(i)[j];
            for &t in arena_.grids.control(i) {
                if t != held {
                    swaps.push((i, j, t));
                }
            }
        }
    }
    if swaps.len() > opts.operator_deviations {
        // Deterministic seeded subsample without replacement bias concerns:
        // draw indices uniformly; duplicates just repeat a candidate.
        let full = swaps;
        let mut picked = Vec::with_capacity(opts.operator_deviations);
        for _ in 0..opts.operator_deviations {
            picked.push(full[rng.gen_range(0..full.len())]);
        }
        swaps = picked;
    }
    for (i, j, t) in swaps {
        let deviant = solution.policy.with_control(i, j, t);
        try_operator(&deviant, &mut right_violation, &mut operator_candidates)?;
    }

    // Family 2: per-step constant temperatures.
    let control_sizes: Vec<usize> = (1..=cfg.steps).map(|i| arena_.grids.control(i).len()).collect();
    let control_combos =
        control_sizes.iter().fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
    if control_combos <= opts.operator_deviations as u128 {
        let mut indices = vec![0usize; cfg.steps];
        'outer: loop {
            let temps: Vec<f64> = indices
                .iter()
                .enumerate()
                .map(|(step0, &c)| arena_.grids.control(step0 + 1)[c])
                .collect();
            let deviant = OperatorPolicy::constant(solution.policy.grid().clone(), temps);
            try_operator(&deviant, &mut right_violation, &mut operator_candidates)?;
            let mut pos = cfg.steps;
            loop {
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                indices[pos] += 1;
                if indices[pos] < control_sizes[pos] {
                    break;
                }
                indices[pos] = 0;
            }
        }
    } else {
        for _ in 0..opts.operator_deviations {
            let temps: Vec<f64> = (1..=cfg.steps)
                .map(|i| {
                    let t = arena_.grids.control(i);
                    t[rng.gen_range(0..t.len())]
                })
                .collect();
            let deviant = OperatorPolicy::constant(solution.policy.grid().clone(), temps);
            try_operator(&deviant, &mut right_violation, &mut operator_candidates)?;
        }
    }

    Ok(SaddleReport {
        value,
        epsilon: opts.epsilon,
        left_violation,
        right_violation,
        nature_candidates,
        operator_candidates,
        pass: left_violation <= opts.epsilon && right_violation <= opts.epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::demo_config;
    use crate::solver::solve_energy;
    use proptest::prelude::*;

    #[test]
    fn responder_play_traces_the_guaranteed_path() {
        let cfg = demo_config();
        let sol = solve_energy(&cfg).unwrap();
        let traj =
            simulate(&cfg, &sol.policy, &NatureStrategy::Responder(sol.responder.clone())).unwrap();
        assert!(traj.reached);
        assert_eq!(traj.steps_used(), 3);
        assert_eq!(traj.total_energy, 516.0);
        assert_eq!(traj.guaranteed_payoff(), 516.0);
        let xs: Vec<f64> = traj.steps.iter().map(|s| s.x).collect();
        assert_eq!(xs, vec![0.625, 0.5, 0.375]);
        assert_eq!(traj.final_x, 0.0);
        let alphas: Vec<f64> = traj.steps.iter().map(|s| s.disturbance).collect();
        assert_eq!(alphas, vec![2.0, 2.0, 0.0]);
        let taus: Vec<f64> = traj.steps.iter().map(|s| s.tau).collect();
        assert_eq!(taus, vec![0.0, 1.0, 2.0]);
        assert!(traj.steps.iter().all(|s| s.control == 192.0));
        assert!(traj.steps.iter().all(|s| !s.clamped));
        assert_eq!(traj.steps.last().unwrap().cum_energy, 516.0);
    }

    #[test]
    fn benign_weather_ends_the_campaign_early() {
        let cfg = demo_config();
        let sol = solve_energy(&cfg).unwrap();
        let traj = simulate(&cfg, &sol.policy, &NatureStrategy::Constant(0.0)).unwrap();
        assert!(traj.reached);
        assert_eq!(traj.steps_used(), 1);
        assert_eq!(traj.total_energy, 172.0);
        assert_eq!(traj.final_x, 0.25);
    }

    #[test]
    fn initial_state_on_the_band_plays_nothing() {
        let mut cfg = demo_config();
        cfg.x0 = 0.125;
        let sol = solve_energy(&cfg).unwrap();
        let traj = simulate(&cfg, &sol.policy, &NatureStrategy::Constant(0.0)).unwrap();
        assert!(traj.reached);
        assert_eq!(traj.steps_used(), 0);
        assert_eq!(traj.total_energy, 0.0);
        assert_eq!(traj.final_x, 0.125);
    }

    #[test]
    fn non_reaching_play_costs_infinity() {
        let mut cfg = demo_config();
        cfg.x0 = 1.25; // no guarantee exists from the grid's wet corner
        let sol = solve_energy(&cfg).unwrap();
        let traj =
            simulate(&cfg, &sol.policy, &NatureStrategy::Responder(sol.responder.clone())).unwrap();
        assert!(!traj.reached);
        assert!(traj.guaranteed_payoff().is_infinite());
        assert!(traj.total_energy.is_finite());
    }

    #[test]
    fn ill_fitting_strategies_are_refused() {
        let cfg = demo_config();
        let sol = solve_energy(&cfg).unwrap();
        assert!(matches!(
            simulate(&cfg, &sol.policy, &NatureStrategy::Constant(3.0)),
            Err(GameError::StrategyMismatch(_))
        ));
        assert!(matches!(
            simulate(&cfg, &sol.policy, &NatureStrategy::Schedule(vec![0.0, 0.0])),
            Err(GameError::StrategyMismatch(_))
        ));
        assert!(matches!(
            simulate(&cfg, &sol.policy, &NatureStrategy::Schedule(vec![0.0, 0.0, 9.0])),
            Err(GameError::StrategyMismatch(_))
        ));
        // A policy solved for a different grid must be rejected.
        let mut other = demo_config();
        other.state_grid.points = 21;
        let foreign = solve_energy(&other).unwrap();
        assert!(matches!(
            simulate(&cfg, &foreign.policy, &NatureStrategy::Constant(0.0)),
            Err(GameError::StrategyMismatch(_))
        ));
    }

    #[test]
    fn exhaustive_best_response_recovers_the_value() {
        let cfg = demo_config();
        let sol = solve_energy(&cfg).unwrap();
        let br = best_response_nature(&cfg, &sol.policy, None).unwrap();
        assert_eq!(br.payoff, 516.0);
        assert_eq!(br.schedule, vec![2.0, 2.0, 0.0]);
        assert!(br.trajectory.reached);
    }

    #[test]
    fn greedy_table_response_matches_the_responder_here() {
        let cfg = demo_config();
        let sol = solve_energy(&cfg).unwrap();
        let br = best_response_nature(&cfg, &sol.policy, Some(&sol.table)).unwrap();
        assert_eq!(br.payoff, 516.0);
        assert_eq!(br.schedule, vec![2.0, 2.0, 0.0]);
    }

    #[test]
    fn oversized_exhaustive_searches_are_refused() {
        let mut cfg = demo_config();
        cfg.steps = 30;
        cfg.horizon = 30.0;
        let sol = solve_energy(&cfg).unwrap();
        match best_response_nature(&cfg, &sol.policy, None) {
            Err(GameError::InstanceTooLarge { combos, limit }) => {
                assert!(combos > limit);
                assert_eq!(limit, EXHAUSTIVE_LIMIT);
            }
            other => panic!("expected InstanceTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn solved_demo_instance_is_an_exact_saddle() {
        let cfg = demo_config();
        let sol = solve_energy(&cfg).unwrap();
        let report = verify_saddle(&cfg, &sol, &SaddleOptions::default()).unwrap();
        assert_eq!(report.value, 516.0);
        assert_eq!(report.left_violation, 0.0);
        assert_eq!(report.right_violation, 0.0);
        assert!(report.pass);
        assert!(report.nature_candidates >= 27);
        assert!(report.operator_candidates > 0);
    }

    #[test]
    fn sabotaged_policy_fails_the_right_check() {
        let cfg = demo_config();
        let sol = solve_energy(&cfg).unwrap();
        // Sabotage: at step 1 from the initial node, hold the coolest
        // temperature; nature stalls the state and the guarantee is gone.
        let node = sol.policy.grid().nearest_node(cfg.x0);
        let mut bad = sol.clone();
        bad.policy = bad.policy.with_control(1, node, 64.0);
        let report = verify_saddle(&cfg, &bad, &SaddleOptions::default()).unwrap();
        assert!(report.value.is_infinite());
        assert!(report.right_violation.is_infinite());
        assert_eq!(report.left_violation, 0.0);
        assert!(!report.pass);
    }

    proptest! {
        // The guarantee is a guarantee: no disturbance schedule extracts
        // more than the solved value from the optimal policy.
        #[test]
        fn no_schedule_beats_the_solved_value(
            picks in proptest::collection::vec(0usize..3, 3),
        ) {
            let cfg = demo_config();
            let sol = solve_energy(&cfg).unwrap();
            let schedule: Vec<f64> = picks.iter().map(|&q| [0.0, 1.0, 2.0][q]).collect();
            let traj = simulate(&cfg, &sol.policy, &NatureStrategy::Schedule(schedule)).unwrap();
            prop_assert!(traj.guaranteed_payoff() <= 516.0);
        }
    }
}
