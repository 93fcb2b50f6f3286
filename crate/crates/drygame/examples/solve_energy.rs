//! Solve the bundled grid-aligned instance for the minimum guaranteed
//! energy and inspect the value table and feedback policy.
//!
//! Run with: `cargo run --example solve_energy`

use drygame::solver::solve_energy;
use drygame::GameConfig;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/grid_aligned.json");
    let cfg: GameConfig = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();

    let sol = solve_energy(&cfg).unwrap();
    let n = sol.table.steps();

    println!("instance: {} steps over {} time units, band [{}, {}]", cfg.steps, cfg.horizon, cfg.terminal.lo, cfg.terminal.hi);
    println!("guaranteed energy from x0 = {}: {}", cfg.x0, sol.table.final_value(cfg.x0).unwrap());
    println!();

    println!("value by steps-to-go at a few nodes (inf = no guarantee):");
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "x", "F_0", "F_1", "F_2", "F_3");
    for (j, &x) in sol.table.grid().nodes().iter().enumerate() {
        print!("{x:>6.3}");
        for k in 0..=n {
            print!(" {:>10}", sol.table.slice(k)[j]);
        }
        println!();
    }

    println!();
    println!("first-step policy (temperature to apply at step 1):");
    for (j, &x) in sol.policy.grid().nodes().iter().enumerate() {
        println!("  x = {x:>5.3} -> t = {}", sol.policy.row(1)[j]);
    }
}
