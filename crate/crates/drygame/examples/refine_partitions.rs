//! Watch the guaranteed value settle as the time partition (and the state
//! grid with it) is refined — the discrete games approximate a continuous
//! one, and successive changes shrink.
//!
//! Run with: `cargo run --example refine_partitions`

use drygame::solver::refine_and_solve;
use drygame::GameConfig;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/lewis_reachable.json");
    let cfg: GameConfig = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();

    let levels = refine_and_solve(&cfg, 3).unwrap();
    println!("{:>6} {:>10} {:>10} {:>14} {:>14}", "n", "Δ", "dx", "value", "|change|");
    for l in &levels {
        match l.diff_from_prev {
            Some(d) => println!("{:>6} {:>10} {:>10} {:>14.6} {:>14.6}", l.steps, l.dt, l.dx, l.value, d),
            None => println!("{:>6} {:>10} {:>10} {:>14.6} {:>14}", l.steps, l.dt, l.dx, l.value, "—"),
        }
    }

    let diffs: Vec<f64> = levels.iter().filter_map(|l| l.diff_from_prev).collect();
    if diffs.windows(2).all(|w| w[1] <= w[0]) {
        println!("\nsuccessive changes are non-increasing: the values are settling.");
    } else {
        println!("\nwarning: changes grew — refine further or inspect the instance.");
    }
}
