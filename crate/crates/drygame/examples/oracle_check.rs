//! Cross-check the dynamic-programming solver against an exhaustive
//! game-tree enumeration on small instances.
//!
//! On the grid-aligned instance every Euler image lands on a grid node, so
//! the two must agree exactly. On an interpolated instance they differ by
//! grid error, bounded by the table's own error scale.
//!
//! Run with: `cargo run --example oracle_check`

use drygame::oracle::{brute_force_value, grid_aligned, OracleLimits};
use drygame::solver::solve_energy;
use drygame::GameConfig;

fn check(label: &str, cfg: &GameConfig) {
    let sol = solve_energy(cfg).unwrap();
    let oracle = brute_force_value(cfg, &OracleLimits::default()).unwrap();
    let solver_value = sol.table.value(sol.table.steps(), cfg.x0);
    let gap = (solver_value - oracle.value).abs();
    let bound = sol.table.interp_error_bound();

    println!("{label}:");
    println!("  grid aligned : {}", grid_aligned(cfg));
    println!("  solver value : {solver_value}");
    println!("  oracle value : {}", oracle.value);
    println!("  |gap|        : {gap}");
    println!("  error scale  : {bound}");
    println!("  first control: solver {} / oracle {}", sol.policy.control_at(1, cfg.x0), oracle.first_control);
    println!();
}

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/grid_aligned.json");
    let cfg: GameConfig = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    check("grid-aligned instance (exact agreement expected)", &cfg);

    // Shorten the thin-layer instance so the game tree stays enumerable:
    // 4 steps of 25 control/disturbance combinations each.
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/lewis_reachable.json");
    let mut cfg: GameConfig = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    cfg.horizon = 4.0;
    cfg.steps = 4;
    check("interpolated thin-layer instance (gap within error scale)", &cfg);
}
