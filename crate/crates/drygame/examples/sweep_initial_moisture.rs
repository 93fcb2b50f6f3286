//! Sweep the initial moisture content and read off the guaranteed energy
//! curve: wetter material never costs less to dry safely.
//!
//! Run with: `cargo run --example sweep_initial_moisture`

use drygame::solver::solve_energy;
use drygame::GameConfig;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/lewis_reachable.json");
    let cfg: GameConfig = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();

    let sol = solve_energy(&cfg).unwrap();
    let n = sol.table.steps();

    println!("guaranteed energy vs initial moisture (band [{}, {}]):", cfg.terminal.lo, cfg.terminal.hi);
    for i in 0..=10 {
        let x0 = cfg.state_grid.x_min
            + (cfg.state_grid.x_max - cfg.state_grid.x_min) * i as f64 / 10.0;
        let v = sol.table.value(n, x0);
        let first = sol.policy.control_at(1, x0);
        if v.is_finite() {
            let bar = "#".repeat((v / 10.0).round() as usize);
            println!("  x0 = {x0:>4.2}  E = {v:>10.4}  t1 = {first:>5.1}  {bar}");
        } else {
            println!("  x0 = {x0:>4.2}  no guarantee within the horizon");
        }
    }
}
