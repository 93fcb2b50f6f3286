//! Roll the optimal feedback policy out against different disturbance
//! behaviors: the stored worst-case responder, and benign constant air.
//!
//! Run with: `cargo run --example simulate_play`

use drygame::game::{simulate, NatureStrategy, Trajectory};
use drygame::solver::solve_energy;
use drygame::GameConfig;

fn show(label: &str, traj: &Trajectory) {
    println!("{label}:");
    println!("  {:>4} {:>8} {:>8} {:>8} {:>12} {:>12}", "step", "x", "t", "alpha", "stage E", "total E");
    for s in &traj.steps {
        println!(
            "  {:>4} {:>8.4} {:>8.1} {:>8.2} {:>12.2} {:>12.2}",
            s.step, s.x, s.control, s.disturbance, s.stage_energy, s.cum_energy
        );
    }
    println!(
        "  -> final x = {}, band reached: {}, energy {}",
        traj.final_x, traj.reached, traj.total_energy
    );
    println!();
}

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/grid_aligned.json");
    let cfg: GameConfig = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();

    let sol = solve_energy(&cfg).unwrap();
    let value = sol.table.final_value(cfg.x0).unwrap();
    println!("guaranteed energy: {value}\n");

    // Worst-case air: the responder tabulated during the solve. The rollout
    // attains the guarantee exactly on this grid-aligned instance.
    let worst = simulate(&cfg, &sol.policy, &NatureStrategy::Responder(sol.responder.clone()))
        .unwrap();
    show("against the worst-case responder", &worst);

    // Benign dry air: the same policy finishes earlier and cheaper — the
    // guarantee is an upper bound, not a forecast.
    let benign = simulate(&cfg, &sol.policy, &NatureStrategy::Constant(0.0)).unwrap();
    show("against constant dry air (alpha = 0)", &benign);
}
