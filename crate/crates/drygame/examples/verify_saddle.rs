//! Numerically certify that the computed strategy pair is an ε-saddle
//! point: neither player can gain more than ε by deviating unilaterally.
//!
//! Run with: `cargo run --example verify_saddle`

use drygame::game::{verify_saddle, SaddleOptions, SaddleReport};
use drygame::solver::solve_energy;
use drygame::GameConfig;

fn show(label: &str, report: &SaddleReport) {
    println!("{label}:");
    println!("  value under joint play : {}", report.value);
    println!("  epsilon                : {}", report.epsilon);
    println!("  nature deviations tried: {} (best gain {})", report.nature_candidates, report.left_violation);
    println!("  operator deviations    : {} (best gain {})", report.operator_candidates, report.right_violation);
    println!("  verdict                : {}", if report.pass { "ε-saddle confirmed" } else { "NOT a saddle" });
    println!();
}

fn load(name: &str) -> GameConfig {
    let path = format!("{}/configs/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn main() {
    // Grid-aligned instance: no interpolation error, so the saddle holds at
    // a tight 1e-9.
    let cfg = load("grid_aligned.json");
    let sol = solve_energy(&cfg).unwrap();
    let report = verify_saddle(&cfg, &sol, &SaddleOptions::default()).unwrap();
    show("grid-aligned instance (ε = 1e-9)", &report);

    // Interpolated thin-layer instance: deviations can exploit grid error,
    // so the honest ε is the table's own interpolation-error scale.
    let cfg = load("lewis_reachable.json");
    let sol = solve_energy(&cfg).unwrap();
    let eps = sol.table.interp_error_bound();
    let opts = SaddleOptions { epsilon: eps, ..SaddleOptions::default() };
    let report = verify_saddle(&cfg, &sol, &opts).unwrap();
    show(&format!("thin-layer instance (ε = interp bound = {eps:.1})"), &report);
}
