//! Backward-induction min-max dynamic programs over the moisture grid.
//!
//! For the energy objective the solver computes value slices
//!
//! ```text
//! F_0(x) = 0 if x in the target band, +∞ otherwise
//! F_k(x) = 0 on the band, else
//!          min over t in T_i  max over α in Q_i of
//!              Δ·e(t, α, x) + F_{k−1}( clamp(x + Δ·f(x, t, α)) )
//! ```
//!
//! with `k` counting steps-to-go and `i = n − k + 1` the 1-based step whose
//! action ranges apply. Off-grid tails are read by piecewise-linear
//! interpolation; `+∞` is the infeasibility sentinel and is never replaced
//! by a large penalty. The time objective runs the same sweep with stage
//! cost 1, a zero-cost absorbing band, and nearest-node tail readout (step
//! counts are integers; averaging them would be meaningless).
//!
//! Ties are broken deterministically everywhere: the scan keeps the first
//! (lowest-index, i.e. coolest) minimizing temperature and the first
//! maximizing disturbance, so results are reproducible across runs and
//! across serial/parallel execution.

use rayon::prelude::*;
use thiserror::Error;

use crate::discretize::{build_state_grid, interp_value, ActionGrids, StateGrid};
use crate::model::GameConfig;

/// Solver failure: a bad instance, or a guarantee that does not exist.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
    #[error(
        "the target band is not guaranteed-reachable from x = {x0} within {steps} steps \
         (worst-case value is infinite)"
    )]
    NotReachable { x0: f64, steps: usize },
}

/// Execution knobs. `parallel` fans node sweeps out with rayon; results are
/// bit-identical to the serial sweep because nodes are independent and
/// collected in index order.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub parallel: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { parallel: true }
    }
}

/// Value of one guaranteed-energy stage problem at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageResult {
    /// The min-max stage value (possibly `+∞`).
    pub value: f64,
    /// Minimizing temperature; `NaN` when no temperature has finite value
    /// (and on the target band, where no move is played).
    pub control: f64,
    /// Maximizing disturbance against the chosen temperature; `NaN` exactly
    /// when `control` is `NaN`.
    pub disturbance: f64,
}

/// Guaranteed-energy value slices `F_0 … F_n` on the state grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    grid: StateGrid,
    slices: Vec<Vec<f64>>,
}

impl ValueTable {
    pub fn grid(&self) -> &StateGrid {
        &self.grid
    }

    /// Horizon `n` (the table holds `n + 1` slices).
    pub fn steps(&self) -> usize {
        self.slices.len() - 1
    }

    /// Slice `F_k` for `k` steps-to-go.
    pub fn slice(&self, k: usize) -> &[f64] {
        &self.slices[k]
    }

    /// `F_k` at an arbitrary state (clamped, interpolated).
    pub fn value(&self, k: usize, x: f64) -> f64 {
        interp_value(&self.grid, &self.slices[k], x)
    }

    /// The guaranteed cost from `x` with the full horizon available, or
    /// [`SolveError::NotReachable`] when no finite guarantee exists.
    pub fn final_value(&self, x: f64) -> Result<f64, SolveError> {
        let v = self.value(self.steps(), x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SolveError::NotReachable { x0: x, steps: self.steps() })
        }
    }

    /// A posteriori interpolation-error scale: `(n / 2) · max |ΔF|` over all
    /// adjacent same-slice node pairs with finite values. One interpolated
    /// tail readout errs by at most half the local node gap, and a rollout
    /// stacks at most `n` of them; this bound is what the ε-saddle and
    /// oracle comparisons use as their natural tolerance scale.
    pub fn interp_error_bound(&self) -> f64 {
        let mut gap = 0.0f64;
        for slice in &self.slices {
            for w in slice.windows(2) {
                if w[0].is_finite() && w[1].is_finite() {
                    gap = gap.max((w[1] - w[0]).abs());
                }
            }
        }
        self.steps() as f64 / 2.0 * gap
    }
}

/// Guaranteed-time slices `N_0 … N_n` (step counts stored as `f64` with the
/// `+∞` sentinel).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeValueTable {
    grid: StateGrid,
    slices: Vec<Vec<f64>>,
}

impl TimeValueTable {
    pub fn grid(&self) -> &StateGrid {
        &self.grid
    }

    pub fn steps(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn slice(&self, k: usize) -> &[f64] {
        &self.slices[k]
    }

    /// `N_n` at the node nearest to `x`, or `NotReachable` if infinite.
    pub fn final_value(&self, x: f64) -> Result<f64, SolveError> {
        let v = self.slices[self.steps()][self.grid.nearest_node(x)];
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SolveError::NotReachable { x0: x, steps: self.steps() })
        }
    }

    /// A posteriori node-snap error scale, the step-count analogue of
    /// [`ValueTable::interp_error_bound`]: each of the `n` nearest-node tail
    /// readouts can shift the count by at most the largest finite jump
    /// between adjacent nodes, halved because the snap moves at most half a
    /// cell.
    pub fn snap_error_bound(&self) -> f64 {
        let mut gap = 0.0f64;
        for slice in &self.slices {
            for w in slice.windows(2) {
                if w[0].is_finite() && w[1].is_finite() {
                    gap = gap.max((w[1] - w[0]).abs());
                }
            }
        }
        self.steps() as f64 / 2.0 * gap
    }
}

/// Feedback temperature policy: one temperature per (step, node).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPolicy {
    grid: StateGrid,
    rows: Vec<Vec<f64>>,
}

impl OperatorPolicy {
    pub fn grid(&self) -> &StateGrid {
        &self.grid
    }

    pub fn steps(&self) -> usize {
        self.rows.len()
    }

    /// Node temperatures for 1-based step `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i - 1]
    }

    /// Temperature played at step `i` from state `x` (nearest-node readout).
    pub fn control_at(&self, i: usize, x: f64) -> f64 {
        self.rows[i - 1][self.grid.nearest_node(x)]
    }

    /// A copy of this policy with the entry at (1-based step `i`, node `j`)
    /// replaced — the building block for operator-deviation tests.
    pub fn with_control(&self, i: usize, j: usize, t: f64) -> OperatorPolicy {
        let mut copy = self.clone();
        copy.rows[i - 1][j] = t;
        copy
    }

    /// A state-independent policy holding `temps[i−1]` during step `i`.
    pub fn constant(grid: StateGrid, temps: Vec<f64>) -> OperatorPolicy {
        let nodes = grid.len();
        OperatorPolicy { grid, rows: temps.into_iter().map(|t| vec![t; nodes]).collect() }
    }

    /// Builds a policy directly from per-step node rows; every row must
    /// have one temperature per grid node.
    pub fn from_rows(grid: StateGrid, rows: Vec<Vec<f64>>) -> Result<OperatorPolicy, SolveError> {
        if rows.iter().any(|r| r.len() != grid.len()) {
            return Err(SolveError::InvalidConfig(vec![format!(
                "every policy row needs exactly {} node entries",
                grid.len()
            )]));
        }
        Ok(OperatorPolicy { grid, rows })
    }
}

/// Nature's tabulated stage best reply: for every (step, node, temperature
/// index) the disturbance that maximizes the operator's guaranteed cost.
#[derive(Debug, Clone, PartialEq)]
pub struct NatureResponder {
    grid: StateGrid,
    controls: Vec<Vec<f64>>,
    rows: Vec<Vec<Vec<f64>>>,
}

impl NatureResponder {
    pub fn grid(&self) -> &StateGrid {
        &self.grid
    }

    pub fn steps(&self) -> usize {
        self.rows.len()
    }

    /// Temperature grid the responder is tabulated against at step `i`.
    pub fn control_grid(&self, i: usize) -> &[f64] {
        &self.controls[i - 1]
    }

    /// Stored replies at (step `i`, node `j`), one per temperature index.
    pub fn replies(&self, i: usize, j: usize) -> &[f64] {
        &self.rows[i - 1][j]
    }

    /// Rebuilds a responder from its parts (e.g. parsed from CSV):
    /// `controls[i−1]` is step `i`'s temperature grid and `rows[i−1][j]`
    /// holds one reply per temperature at node `j`.
    pub fn from_parts(
        grid: StateGrid,
        controls: Vec<Vec<f64>>,
        rows: Vec<Vec<Vec<f64>>>,
    ) -> Result<NatureResponder, SolveError> {
        let shape_ok = controls.len() == rows.len()
            && rows.iter().zip(&controls).all(|(nodes, grid_t)| {
                nodes.len() == grid.len() && nodes.iter().all(|r| r.len() == grid_t.len())
            });
        if !shape_ok {
            return Err(SolveError::InvalidConfig(vec![
                "responder shape must be steps × nodes × temperatures".into(),
            ]));
        }
        Ok(NatureResponder { grid, controls, rows })
    }

    /// Worst disturbance against temperature `t` at step `i`, state `x`.
    /// `x` snaps to the nearest node; `t` matches its grid entry exactly
    /// when possible, otherwise the nearest tabulated temperature is used.
    pub fn respond(&self, i: usize, x: f64, t: f64) -> f64 {
        let j = self.grid.nearest_node(x);
        let grid_t = &self.controls[i - 1];
        let idx = grid_t.iter().position(|&g| g == t).unwrap_or_else(|| {
            let mut best = 0usize;
            for (c, &g) in grid_t.iter().enumerate() {
                if (g - t).abs() < (grid_t[best] - t).abs() {
                    best = c;
                }
            }
            best
        });
        self.rows[i - 1][j][idx]
    }
}

/// Everything the energy solve produces.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySolution {
    pub table: ValueTable,
    pub policy: OperatorPolicy,
    pub responder: NatureResponder,
}

/// Everything the time solve produces.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSolution {
    pub table: TimeValueTable,
    pub policy: OperatorPolicy,
}

/// One level of a partition-refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct RefineLevel {
    pub steps: usize,
    pub dt: f64,
    pub dx: f64,
    pub value: f64,
    pub diff_from_prev: Option<f64>,
}

struct NodeOutcome {
    value: f64,
    control: f64,
    disturbance: f64,
    reply_per_control: Vec<f64>,
}

/// Shared pieces of one backward sweep.
struct SolveContext<'a> {
    cfg: &'a GameConfig,
    grid: StateGrid,
    grids: ActionGrids,
    dt: f64,
}

impl<'a> SolveContext<'a> {
    fn new(cfg: &'a GameConfig) -> Result<Self, SolveError> {
        let report = cfg.validate();
        if !report.is_valid() {
            return Err(SolveError::InvalidConfig(report.violations));
        }
        let g = &cfg.state_grid;
        let grid = build_state_grid(g.x_min, g.x_max, g.points)
            .map_err(|e| SolveError::InvalidConfig(vec![e.to_string()]))?;
        let grids = ActionGrids::from_config(cfg)
            .map_err(|e| SolveError::InvalidConfig(vec![e.to_string()]))?;
        Ok(SolveContext { cfg, grid, grids, dt: cfg.dt() })
    }

    /// `F_0` / `N_0`: zero on the target band, `+∞` elsewhere.
    fn base_slice(&self) -> Vec<f64> {
        self.grid
            .nodes()
            .iter()
            .map(|&x| if self.cfg.terminal.contains(x) { 0.0 } else { f64::INFINITY })
            .collect()
    }

    /// Full stage problem at state `x` against tail `prev`, including
    /// nature's reply to every temperature (needed by the responder table).
    /// `stage_cost(t, α, x)` is `Δ·e` for energy, `1` for time;
    /// `tail(prev, image)` is interpolation for energy, node snap for time.
    fn node_outcome(
        &self,
        i: usize,
        x: f64,
        prev: &[f64],
        stage_cost: &(dyn Fn(f64, f64, f64) -> f64 + Sync),
        tail: &(dyn Fn(&[f64], f64) -> f64 + Sync),
    ) -> NodeOutcome {
        let controls = self.grids.control(i);
        let disturbances = self.grids.disturbance(i);
        if self.cfg.terminal.contains(x) {
            return NodeOutcome {
                value: 0.0,
                control: f64::NAN,
                disturbance: f64::NAN,
                reply_per_control: vec![disturbances[0]; controls.len()],
            };
        }
        let mut best = f64::INFINITY;
        let mut best_t = f64::NAN;
        let mut best_alpha = f64::NAN;
        let mut replies = Vec::with_capacity(controls.len());
        for &t in controls {
            let mut worst = f64::NEG_INFINITY;
            let mut worst_alpha = disturbances[0];
            for &alpha in disturbances {
                let image = self.grid.clamp(self.cfg.dynamics.euler_step(x, t, alpha, self.dt));
                let cost = stage_cost(t, alpha, x) + tail(prev, image);
                if cost > worst {
                    worst = cost;
                    worst_alpha = alpha;
                }
            }
            replies.push(worst_alpha);
            if worst < best {
                best = worst;
                best_t = t;
                best_alpha = worst_alpha;
            }
        }
        NodeOutcome { value: best, control: best_t, disturbance: best_alpha, reply_per_control: replies }
    }

    fn sweep(
        &self,
        i: usize,
        prev: &[f64],
        parallel: bool,
        stage_cost: &(dyn Fn(f64, f64, f64) -> f64 + Sync),
        tail: &(dyn Fn(&[f64], f64) -> f64 + Sync),
    ) -> Vec<NodeOutcome> {
        let nodes = self.grid.nodes();
        if parallel {
            nodes
                .par_iter()
                .map(|&x| self.node_outcome(i, x, prev, stage_cost, tail))
                .collect()
        } else {
            nodes.iter().map(|&x| self.node_outcome(i, x, prev, stage_cost, tail)).collect()
        }
    }
}

/// One guaranteed-energy stage problem at an arbitrary state, against the
/// tail slice `prev` (one value per grid node), with step-`i` action grids.
pub fn stage_minmax(
    cfg: &GameConfig,
    grid: &StateGrid,
    grids: &ActionGrids,
    i: usize,
    prev: &[f64],
    x: f64,
) -> StageResult {
    let ctx = SolveContext {
        cfg,
        grid: grid.clone(),
        grids: grids.clone(),
        dt: cfg.dt(),
    };
    let dt = ctx.dt;
    let energy = cfg.energy;
    let out = ctx.node_outcome(
        i,
        x,
        prev,
        &move |t, alpha, x| dt * energy.power(t, alpha, x),
        &|prev, image| interp_value(&ctx.grid, prev, image),
    );
    StageResult { value: out.value, control: out.control, disturbance: out.disturbance }
}

/// Solves the guaranteed-energy game with default options.
pub fn solve_energy(cfg: &GameConfig) -> Result<EnergySolution, SolveError> {
    solve_energy_with(cfg, &SolveOptions::default())
}

/// Solves the guaranteed-energy game: n backward sweeps producing the value
/// table, the temperature policy, and nature's responder.
///
/// The returned table is defined at every grid node; states from which the
/// band cannot be guaranteed carry `+∞` and surface as
/// [`SolveError::NotReachable`] only when read through
/// [`ValueTable::final_value`]. Policy entries at band/infeasible nodes fall
/// back to the step's first (coolest) grid temperature so that every stored
/// temperature is admissible.
pub fn solve_energy_with(cfg: &GameConfig, opts: &SolveOptions) -> Result<EnergySolution, SolveError> {
    let ctx = SolveContext::new(cfg)?;
    let n = cfg.steps;
    let dt = ctx.dt;
    let energy = cfg.energy;
    let stage_cost = move |t: f64, alpha: f64, x: f64| dt * energy.power(t, alpha, x);
    let grid_ref = &ctx.grid;
    let tail = |prev: &[f64], image: f64| interp_value(grid_ref, prev, image);

    let mut slices = Vec::with_capacity(n + 1);
    slices.push(ctx.base_slice());
    let mut policy_rows: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut responder_rows: Vec<Vec<Vec<f64>>> = vec![Vec::new(); n];

    for k in 1..=n {
        let i = n - k + 1;
        let outcomes = ctx.sweep(i, &slices[k - 1], opts.parallel, &stage_cost, &tail);
        let fallback = ctx.grids.control(i)[0];
        let mut slice = Vec::with_capacity(outcomes.len());
        let mut row = Vec::with_capacity(outcomes.len());
        let mut replies = Vec::with_capacity(outcomes.len());
        for out in outcomes {
            slice.push(out.value);
            row.push(if out.control.is_nan() { fallback } else { out.control });
            replies.push(out.reply_per_control);
        }
        slices.push(slice);
        policy_rows[i - 1] = row;
        responder_rows[i - 1] = replies;
    }

    let controls: Vec<Vec<f64>> = (1..=n).map(|i| ctx.grids.control(i).to_vec()).collect();
    Ok(EnergySolution {
        table: ValueTable { grid: ctx.grid.clone(), slices },
        policy: OperatorPolicy { grid: ctx.grid.clone(), rows: policy_rows },
        responder: NatureResponder { grid: ctx.grid, controls, rows: responder_rows },
    })
}

/// Solves the guaranteed-time game with default options.
pub fn solve_time(cfg: &GameConfig) -> Result<TimeSolution, SolveError> {
    solve_time_with(cfg, &SolveOptions::default())
}

/// Solves the guaranteed-time game: same backward sweep with stage cost 1
/// and nearest-node tail readout.
///
/// When all steps share one action range the sweep is a monotone fixpoint
/// iteration; once a slice repeats, the remaining slices and policy rows
/// are filled by copying, which changes nothing observable.
pub fn solve_time_with(cfg: &GameConfig, opts: &SolveOptions) -> Result<TimeSolution, SolveError> {
    let ctx = SolveContext::new(cfg)?;
    let n = cfg.steps;
    let stage_cost = |_t: f64, _alpha: f64, _x: f64| 1.0;
    let grid_ref = &ctx.grid;
    let tail = |prev: &[f64], image: f64| prev[grid_ref.nearest_node(image)];

    let mut slices = Vec::with_capacity(n + 1);
    slices.push(ctx.base_slice());
    let mut policy_rows: Vec<Vec<f64>> = vec![Vec::new(); n];
    let uniform = cfg.per_step.is_uniform();

    let mut k = 1usize;
    while k <= n {
        let i = n - k + 1;
        let outcomes = ctx.sweep(i, &slices[k - 1], opts.parallel, &stage_cost, &tail);
        let fallback = ctx.grids.control(i)[0];
        let mut slice = Vec::with_capacity(outcomes.len());
        let mut row = Vec::with_capacity(outcomes.len());
        for out in outcomes {
            slice.push(out.value);
            row.push(if out.control.is_nan() { fallback } else { out.control });
        }
        let reached_fixpoint = uniform && slice == slices[k - 1];
        slices.push(slice);
        policy_rows[i - 1] = row;
        if reached_fixpoint {
            for k_rest in (k + 1)..=n {
                slices.push(slices[k].clone());
                policy_rows[n - k_rest] = policy_rows[i - 1].clone();
            }
            break;
        }
        k += 1;
    }

    Ok(TimeSolution {
        table: TimeValueTable { grid: ctx.grid.clone(), slices },
        policy: OperatorPolicy { grid: ctx.grid, rows: policy_rows },
    })
}

/// Re-solves the guaranteed-energy recursion on successively halved
/// partitions (and a matching halved state step), reporting the value per
/// level. The refinement study always targets the energy objective: it
/// approximates the continuous-time guarantee, which the step-count
/// objective (an integer per partition) does not converge to.
///
/// Level `ℓ` uses `n·2^ℓ` steps over the same window and `(p−1)·2^ℓ + 1`
/// grid nodes; per-step action ranges are inherited by time coverage (each
/// original step's ranges apply to all its sub-steps). At least two levels
/// are required so that a successive difference exists. Errors with
/// [`SolveError::NotReachable`] as soon as a level has no finite guarantee
/// at `x0`.
pub fn refine_and_solve(cfg: &GameConfig, levels: usize) -> Result<Vec<RefineLevel>, SolveError> {
    if levels < 2 {
        return Err(SolveError::InvalidConfig(vec![
            "refinement needs at least 2 levels".into(),
        ]));
    }
    let mut out = Vec::with_capacity(levels);
    let mut prev_value: Option<f64> = None;
    for level in 0..levels {
        let factor = 1usize << level;
        let mut c = cfg.clone();
        c.steps = cfg.steps * factor;
        c.state_grid.points = (cfg.state_grid.points - 1) * factor + 1;
        if let crate::model::PerStep::Each(list) = &cfg.per_step {
            let expanded: Vec<_> =
                list.iter().flat_map(|r| std::iter::repeat(*r).take(factor)).collect();
            c.per_step = crate::model::PerStep::Each(expanded);
        }
        let value = solve_energy(&c)?.table.final_value(c.x0)?;
        let dx = (c.state_grid.x_max - c.state_grid.x_min) / (c.state_grid.points - 1) as f64;
        out.push(RefineLevel {
            steps: c.steps,
            dt: c.dt(),
            dx,
            value,
            diff_from_prev: prev_value.map(|p| (value - p).abs()),
        });
        prev_value = Some(value);
    }
    Ok(out)
}
