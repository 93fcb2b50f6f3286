//! Solve a constant-rate instance for the minimum guaranteed number of
//! steps to reach the target band, whatever the air humidity does.
//!
//! Run with: `cargo run --example solve_time`

use drygame::solver::solve_time;
use drygame::GameConfig;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/time_constant_rate.json");
    let cfg: GameConfig = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();

    let sol = solve_time(&cfg).unwrap();
    let n = sol.table.steps();

    println!(
        "moisture falls by {} per step regardless of play; band is [{}, {}]",
        0.2, cfg.terminal.lo, cfg.terminal.hi
    );
    println!("guaranteed steps from x0 = {}: {}", cfg.x0, sol.table.final_value(cfg.x0).unwrap());
    println!();
    println!("steps needed from each grid node (within the {n}-step horizon):");
    for (j, &x) in sol.table.grid().nodes().iter().enumerate() {
        let v = sol.table.slice(n)[j];
        if v.is_finite() {
            println!("  x = {x:>4.2} -> {v} step(s)");
        } else {
            println!("  x = {x:>4.2} -> unreachable");
        }
    }
}
