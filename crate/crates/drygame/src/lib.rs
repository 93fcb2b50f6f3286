//! Worst-case optimal convective drying schedules.
//!
//! A batch dryer drives the product moisture content `x` down into a target
//! band by choosing the drying-air temperature, while ambient conditions
//! (modelled as an adversarial equilibrium-moisture disturbance) try to keep
//! the product wet. `drygame` treats one drying campaign as a two-player
//! zero-sum dynamic game on a time partition and computes, by backward
//! induction over a discretized moisture grid:
//!
//! - the minimum energy the operator can **guarantee** regardless of the
//!   disturbance, together with the temperature policy that achieves it,
//! - the minimum **guaranteed number of steps** to reach the target band,
//! - the disturbance responder (nature's stage-wise best reply), and
//! - numerical certificates: exhaustive game-tree cross-checks, partition
//!   refinement studies, and ε-saddle-point verification of a policy pair.
//!
//! # Modules
//!
//! - [`model`] — moisture dynamics, energy model, target band, configuration
//! - [`discretize`] — state grid, action grids, time partition, interpolation
//! - [`solver`] — backward-induction min-max dynamic programs
//! - [`game`] — rollouts, nature strategies, best responses, saddle checks
//! - [`oracle`] — exhaustive game-tree enumeration for small instances
//! - [`cli`] — file-based front end (JSON config in, CSV artifacts out)
//!
//! # Example
//!
//! ```
//! use drygame::model::*;
//! use drygame::solver::solve_energy;
//!
//! let cfg = GameConfig {
//!     horizon: 3.0,
//!     steps: 3,
//!     x0: 0.625,
//!     state_grid: StateGridSpec { x_min: 0.0, x_max: 1.25, points: 11 },
//!     per_step: PerStep::Uniform(StepRanges {
//!         control: Interval { lo: 64.0, hi: 192.0 },
//!         disturbance: Interval { lo: 0.0, hi: 2.0 },
//!     }),
//!     control_points: 3,
//!     disturbance_points: 3,
//!     dynamics: DryingDynamics::Affine { a: -0.001953125, b: 0.125, c: 0.0 },
//!     energy: EnergyModel { c0: 0.0, c1: 1.0, t_amb: 20.0 },
//!     terminal: TerminalSet { lo: 0.0, hi: 0.25 },
//!     objective: Objective::Energy,
//! };
//! let solution = solve_energy(&cfg).unwrap();
//! let guaranteed = solution.table.final_value(cfg.x0).unwrap();
//! assert!(guaranteed.is_finite());
//! ```
//!
//! Runnable demonstrations of each capability live in `examples/`:
//!
//! ```bash
//! cargo run --example solve_energy
//! cargo run --example solve_time
//! cargo run --example simulate_play
//! cargo run --example verify_saddle
//! cargo run --example refine_partitions
//! cargo run --example oracle_check
//! cargo run --example sweep_initial_moisture
//! ```
//!
//! The same functionality is scriptable through the thin `drygame` binary
//! (`solve`, `simulate`, `refine`, `oracle-check`, `sweep` subcommands); see
//! the README for the config and CSV schemas.

pub mod cli;
pub mod discretize;
pub mod game;
pub mod model;
pub mod oracle;
pub mod solver;

pub use model::GameConfig;
