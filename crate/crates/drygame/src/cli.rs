//! File-based front end: JSON configuration in, CSV artifacts out.
//!
//! The five subcommands (`solve`, `simulate`, `refine`, `oracle-check`,
//! `sweep`) communicate only through files so that runs are scriptable and
//! auditable. Every run directory gets a `manifest.json` carrying a SHA-256
//! digest of the configuration bytes; `simulate` refuses to roll out a
//! policy whose manifest digest does not match the configuration it was
//! given, which catches the classic mistake of editing the config between
//! solving and simulating.
//!
//! Exit codes are part of the interface:
//!
//! | code | meaning                                              |
//! |------|------------------------------------------------------|
//! | 0    | success                                              |
//! | 1    | configuration or usage error                         |
//! | 2    | no guarantee exists from `x0` (infinite value)       |
//! | 3    | artifact/strategy mismatch (digest, shapes, ranges)  |
//! | 4    | oracle disagreement beyond tolerance                 |
//! | 5    | instance too large for exhaustive enumeration        |
//!
//! Floats in CSV files are written as `inf` / `-inf` / `nan` literals or in
//! scientific notation with 17 significant digits, which round-trips every
//! `f64` bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::discretize::{build_state_grid, ActionGrids, StateGrid};
use crate::game::{simulate, GameError, NatureStrategy, Trajectory};
use crate::model::{GameConfig, Objective};
use crate::oracle::{brute_force_time, brute_force_value, grid_aligned, OracleError, OracleLimits};
use crate::solver::{
    refine_and_solve, solve_energy, solve_time, EnergySolution, NatureResponder, OperatorPolicy,
    RefineLevel, SolveError, TimeSolution, TimeValueTable, ValueTable,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NOT_REACHABLE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_TOLERANCE: i32 = 4;
pub const EXIT_TOO_LARGE: i32 = 5;

/// Worst-case optimal convective drying schedules.
#[derive(Debug, Parser)]
#[command(name = "drygame", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance; writes value.csv, policy.csv, responder.csv.
    Solve {
        /// Instance configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output directory for artifacts.
        #[arg(long)]
        out: PathBuf,
    },
    /// Roll a stored policy out against a disturbance strategy.
    Simulate {
        /// Instance configuration (JSON); must match the artifacts' digest.
        #[arg(long)]
        config: PathBuf,
        /// policy.csv from `solve`; manifest.json and responder.csv are
        /// expected next to it.
        #[arg(long)]
        policy: PathBuf,
        /// `constant:<α>`, `schedule:<α,α,…>`, or `responder`.
        #[arg(long)]
        nature: String,
        /// Where to write trajectory.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-solve on successively halved partitions; writes refine.csv.
    Refine {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Number of levels (level ℓ uses n·2^ℓ steps).
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Cross-check the solver against exhaustive game-tree enumeration.
    OracleCheck {
        #[arg(long)]
        config: PathBuf,
        /// Optional directory for oracle_check.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comparison tolerance; default is 1e-12 on discretization-exact
        /// instances, otherwise the table's interpolation-error scale.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Game-tree node budget for the oracle.
        #[arg(long, default_value_t = 1_000_000)]
        max_nodes: u128,
    },
    /// Evaluate the guarantee from a list of initial states; writes sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated initial moisture values, e.g. `0.3,0.5,0.8`.
        #[arg(long)]
        x0: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Dispatches a parsed command line, returning the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Solve { config, out } => cmd_solve(&config, &out),
        Command::Simulate { config, policy, nature, out } => {
            cmd_simulate(&config, &policy, &nature, &out)
        }
        Command::Refine { config, out, levels } => cmd_refine(&config, &out, levels),
        Command::OracleCheck { config, out, tolerance, max_nodes } => {
            cmd_oracle_check(&config, out.as_deref(), tolerance, max_nodes)
        }
        Command::Sweep { config, x0, out } => cmd_sweep(&config, &x0, &out),
    }
}

// ---------------------------------------------------------------------------
// Float and CSV encoding
// ---------------------------------------------------------------------------

/// Renders a float for CSV/JSON artifacts: `inf`, `-inf`, `nan`, or
/// 17-significant-digit scientific notation (bit-exact round trip).
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Parses what [`fmt_float`] writes (plus plain decimal notation).
pub fn parse_float(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        t => t.parse::<f64>().map_err(|e| format!("bad float {t:?}: {e}")),
    }
}

/// SHA-256 of the raw configuration bytes, lowercase hex.
pub fn config_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Per-run provenance record stored next to the artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub command: String,
    pub artifacts: Vec<String>,
    pub solver_version: String,
    pub duration_seconds: f64,
}

/// `value.csv` for the energy objective: every slice `k = 0 … n`.
pub fn value_csv_energy(table: &ValueTable) -> String {
    let mut s = String::from("k,x,value\n");
    for k in 0..=table.steps() {
        for (j, &x) in table.grid().nodes().iter().enumerate() {
            let _ = writeln!(s, "{k},{},{}", fmt_float(x), fmt_float(table.slice(k)[j]));
        }
    }
    s
}

/// `value.csv` for the time objective: the final slice only (intermediate
/// counts are an implementation detail of the fixpoint iteration).
pub fn value_csv_time(table: &TimeValueTable) -> String {
    let mut s = String::from("k,x,value\n");
    let n = table.steps();
    for (j, &x) in table.grid().nodes().iter().enumerate() {
        let _ = writeln!(s, "{n},{},{}", fmt_float(x), fmt_float(table.slice(n)[j]));
    }
    s
}

/// `policy.csv`: one temperature per (step, node), step-major.
pub fn policy_csv(policy: &OperatorPolicy) -> String {
    let mut s = String::from("i,x,t\n");
    for i in 1..=policy.steps() {
        for (j, &x) in policy.grid().nodes().iter().enumerate() {
            let _ = writeln!(s, "{i},{},{}", fmt_float(x), fmt_float(policy.row(i)[j]));
        }
    }
    s
}

/// Strict positional parse of `policy.csv` (step-major node order, exactly
/// as [`policy_csv`] writes it).
pub fn parse_policy_csv(
    grid: &StateGrid,
    steps: usize,
    text: &str,
) -> Result<OperatorPolicy, String> {
    let body = csv_body(text, "i,x,t")?;
    let expected = steps * grid.len();
    if body.len() != expected {
        return Err(format!("policy.csv has {} rows, expected {expected}", body.len()));
    }
    let mut rows: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.len()); steps];
    for (r, cols) in body.iter().enumerate() {
        if cols.len() != 3 {
            return Err(format!("policy.csv row {} has {} columns, expected 3", r + 2, cols.len()));
        }
        let i = r / grid.len() + 1;
        let j = r % grid.len();
        let file_i: usize = cols[0].parse().map_err(|_| format!("bad step index {:?}", cols[0]))?;
        if file_i != i {
            return Err(format!("policy.csv row {}: step {file_i}, expected {i}", r + 2));
        }
        let x = parse_float(&cols[1])?;
        if x.to_bits() != grid.nodes()[j].to_bits() {
            return Err(format!("policy.csv row {}: node {x} does not match the grid", r + 2));
        }
        rows[i - 1].push(parse_float(&cols[2])?);
    }
    OperatorPolicy::from_rows(grid.clone(), rows).map_err(|e| e.to_string())
}

/// `responder.csv`: nature's reply per (step, node, temperature).
pub fn responder_csv(resp: &NatureResponder) -> String {
    let mut s = String::from("i,x,t,alpha\n");
    for i in 1..=resp.steps() {
        for (j, &x) in resp.grid().nodes().iter().enumerate() {
            for (c, &t) in resp.control_grid(i).iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{i},{},{},{}",
                    fmt_float(x),
                    fmt_float(t),
                    fmt_float(resp.replies(i, j)[c])
                );
            }
        }
    }
    s
}

/// Header-only `responder.csv` (time-objective runs tabulate no responder).
pub fn responder_csv_header() -> String {
    String::from("i,x,t,alpha\n")
}

/// Strict positional parse of `responder.csv` against the instance's grids.
pub fn parse_responder_csv(
    grid: &StateGrid,
    grids: &ActionGrids,
    text: &str,
) -> Result<NatureResponder, String> {
    let body = csv_body(text, "i,x,t,alpha")?;
    let expected: usize = (1..=grids.steps()).map(|i| grid.len() * grids.control(i).len()).sum();
    if body.len() != expected {
        return Err(format!(
            "responder.csv has {} rows, expected {expected} (a time-objective run stores none)",
            body.len()
        ));
    }
    let mut rows: Vec<Vec<Vec<f64>>> = Vec::with_capacity(grids.steps());
    let mut cursor = body.iter().enumerate();
    for i in 1..=grids.steps() {
        let control = grids.control(i);
        let mut nodes = Vec::with_capacity(grid.len());
        for j in 0..grid.len() {
            let mut replies = Vec::with_capacity(control.len());
            for (c, &t_expect) in control.iter().enumerate() {
                let (r, cols) = cursor.next().expect("row count was checked");
                if cols.len() != 4 {
                    return Err(format!(
                        "responder.csv row {} has {} columns, expected 4",
                        r + 2,
                        cols.len()
                    ));
                }
                let file_i: usize =
                    cols[0].parse().map_err(|_| format!("bad step index {:?}", cols[0]))?;
                let x = parse_float(&cols[1])?;
                let t = parse_float(&cols[2])?;
                if file_i != i
                    || x.to_bits() != grid.nodes()[j].to_bits()
                    || t.to_bits() != t_expect.to_bits()
                {
                    return Err(format!(
                        "responder.csv row {}: ({file_i}, {x}, {t}) does not match the expected \
                         (step {i}, node {}, temperature {t_expect}) layout",
                        r + 2,
                        grid.nodes()[j]
                    ));
                }
                let _ = c;
                replies.push(parse_float(&cols[3])?);
            }
            nodes.push(replies);
        }
        rows.push(nodes);
    }
    let controls: Vec<Vec<f64>> = (1..=grids.steps()).map(|i| grids.control(i).to_vec()).collect();
    NatureResponder::from_parts(grid.clone(), controls, rows).map_err(|e| e.to_string())
}

/// `trajectory.csv`: one row per executed step.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::from("step,tau,x,t,alpha,stage_energy,cum_energy,clamped\n");
    for st in &traj.steps {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            st.step,
            fmt_float(st.tau),
            fmt_float(st.x),
            fmt_float(st.control),
            fmt_float(st.disturbance),
            fmt_float(st.stage_energy),
            fmt_float(st.cum_energy),
            st.clamped
        );
    }
    s
}

/// `refine.csv`: one row per refinement level; the first row's
/// `diff_from_prev` is empty.
pub fn refine_csv(levels: &[RefineLevel]) -> String {
    let mut s = String::from("n,delta_t,dx,value,diff_from_prev\n");
    for l in levels {
        let diff = l.diff_from_prev.map(fmt_float).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{diff}",
            l.steps,
            fmt_float(l.dt),
            fmt_float(l.dx),
            fmt_float(l.value)
        );
    }
    s
}

/// `sweep.csv` rows for a list of initial states under the energy
/// objective (interpolated final-slice readout). Terminal initial states
/// cost 0 by definition; infeasible ones get an `inf` value and a `nan`
/// control, since no recommendation backs an absent guarantee.
pub fn sweep_csv_energy(cfg: &GameConfig, sol: &EnergySolution, x0s: &[f64]) -> String {
    let n = sol.table.steps();
    sweep_csv(cfg, x0s, |x| sol.table.value(n, x), &sol.policy)
}

/// `sweep.csv` rows under the time objective (nearest-node readout).
pub fn sweep_csv_time(cfg: &GameConfig, sol: &TimeSolution, x0s: &[f64]) -> String {
    let n = sol.table.steps();
    sweep_csv(cfg, x0s, |x| sol.table.slice(n)[sol.table.grid().nearest_node(x)], &sol.policy)
}

fn sweep_csv(
    cfg: &GameConfig,
    x0s: &[f64],
    readout: impl Fn(f64) -> f64,
    policy: &OperatorPolicy,
) -> String {
    let mut s = String::from("x0,value,first_control\n");
    for &x in x0s {
        let v = if cfg.terminal.contains(x) { 0.0 } else { readout(x) };
        let (value, control) = if v.is_finite() {
            (fmt_float(v), fmt_float(policy.control_at(1, x)))
        } else {
            ("inf".to_string(), "nan".to_string())
        };
        let _ = writeln!(s, "{},{value},{control}", fmt_float(x));
    }
    s
}

/// Splits a CSV into data rows after checking the exact header.
fn csv_body(text: &str, header: &str) -> Result<Vec<Vec<String>>, String> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
    match lines.next() {
        Some(first) if first == header => {}
        Some(first) => return Err(format!("expected header {header:?}, found {first:?}")),
        None => return Err("empty file".to_string()),
    }
    Ok(lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|c| c.to_string()).collect())
        .collect())
}

// ---------------------------------------------------------------------------
// Shared command plumbing
// ---------------------------------------------------------------------------

fn load_config(path: &Path) -> Result<(GameConfig, Vec<u8>), String> {
    let bytes = fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let cfg: GameConfig = serde_json::from_slice(&bytes)
        .map_err(|e| format!("cannot parse {}: {e}", path.display()))?;
    Ok((cfg, bytes))
}

/// Prints warnings, rejects invalid configurations.
fn gate_config(cfg: &GameConfig) -> Result<(), i32> {
    let report = cfg.validate();
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if !report.is_valid() {
        for v in &report.violations {
            eprintln!("error: {v}");
        }
        return Err(EXIT_CONFIG);
    }
    Ok(())
}

fn write_artifact(
    dir: &Path,
    name: &str,
    text: &str,
    produced: &mut Vec<String>,
) -> Result<(), String> {
    fs::write(dir.join(name), text).map_err(|e| format!("cannot write {name}: {e}"))?;
    produced.push(name.to_string());
    Ok(())
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(dir.join("manifest.json"), text).map_err(|e| format!("cannot write manifest.json: {e}"))
}

fn read_manifest(dir: &Path) -> Result<RunManifest, String> {
    let path = dir.join("manifest.json");
    let bytes = fs::read(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_slice(&bytes).map_err(|e| format!("cannot parse {}: {e}", path.display()))
}

fn solve_exit(e: &SolveError) -> i32 {
    match e {
        SolveError::InvalidConfig(msgs) => {
            for m in msgs {
                eprintln!("error: {m}");
            }
            EXIT_CONFIG
        }
        SolveError::NotReachable { .. } => {
            eprintln!("error: {e}");
            EXIT_NOT_REACHABLE
        }
    }
}

fn game_exit(e: &GameError) -> i32 {
    eprintln!("error: {e}");
    match e {
        GameError::InvalidConfig(_) => EXIT_CONFIG,
        GameError::StrategyMismatch(_) => EXIT_MISMATCH,
        GameError::InstanceTooLarge { .. } => EXIT_TOO_LARGE,
    }
}

fn oracle_exit(e: &OracleError) -> i32 {
    eprintln!("error: {e}");
    match e {
        OracleError::InvalidConfig(_) => EXIT_CONFIG,
        OracleError::InstanceTooLarge { .. } => EXIT_TOO_LARGE,
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// `solve`: write value/policy/responder tables and report the guarantee.
pub fn cmd_solve(config_path: &Path, out_dir: &Path) -> i32 {
    let started = Instant::now();
    let (cfg, bytes) = match load_config(config_path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(code) = gate_config(&cfg) {
        return code;
    }
    if let Err(e) = fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return EXIT_CONFIG;
    }

    let mut produced = Vec::new();
    let outcome: Result<(f64, &'static str), SolveError> = match cfg.objective {
        Objective::Energy => match solve_energy(&cfg) {
            Ok(sol) => {
                let io = write_artifact(out_dir, "value.csv", &value_csv_energy(&sol.table), &mut produced)
                    .and_then(|_| {
                        write_artifact(out_dir, "policy.csv", &policy_csv(&sol.policy), &mut produced)
                    })
                    .and_then(|_| {
                        write_artifact(
                            out_dir,
                            "responder.csv",
                            &responder_csv(&sol.responder),
                            &mut produced,
                        )
                    });
                if let Err(e) = io {
                    eprintln!("error: {e}");
                    return EXIT_CONFIG;
                }
                sol.table.final_value(cfg.x0).map(|v| (v, "guaranteed energy"))
            }
            Err(e) => Err(e),
        },
        Objective::Time => match solve_time(&cfg) {
            Ok(sol) => {
                let io = write_artifact(out_dir, "value.csv", &value_csv_time(&sol.table), &mut produced)
                    .and_then(|_| {
                        write_artifact(out_dir, "policy.csv", &policy_csv(&sol.policy), &mut produced)
                    })
                    .and_then(|_| {
                        write_artifact(out_dir, "responder.csv", &responder_csv_header(), &mut produced)
                    });
                if let Err(e) = io {
                    eprintln!("error: {e}");
                    return EXIT_CONFIG;
                }
                sol.table.final_value(cfg.x0).map(|v| (v, "guaranteed steps"))
            }
            Err(e) => Err(e),
        },
    };

    let manifest = RunManifest {
        config_digest: config_digest(&bytes),
        command: "solve".to_string(),
        artifacts: produced,
        solver_version: env!("CARGO_PKG_VERSION").to_string(),
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    if let Err(e) = write_manifest(out_dir, &manifest) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }

    match outcome {
        Ok((v, label)) => {
            println!("{label} from x0 = {}: {}", cfg.x0, fmt_float(v));
            println!("artifacts written to {}", out_dir.display());
            EXIT_OK
        }
        Err(e) => solve_exit(&e),
    }
}

/// `simulate`: roll the stored policy out against a disturbance strategy.
/// `manifest.json` (and, for `--nature responder`, `responder.csv`) are
/// looked up next to the policy file.
pub fn cmd_simulate(
    config_path: &Path,
    policy_path: &Path,
    nature_spec: &str,
    out_dir: &Path,
) -> i32 {
    let started = Instant::now();
    let (cfg, bytes) = match load_config(config_path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(code) = gate_config(&cfg) {
        return code;
    }

    let artifacts_dir = policy_path.parent().unwrap_or(Path::new("."));
    let manifest = match read_manifest(artifacts_dir) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e} (run `solve` first)");
            return EXIT_MISMATCH;
        }
    };
    let digest = config_digest(&bytes);
    if manifest.config_digest != digest {
        eprintln!(
            "error: artifacts next to {} were produced from a different configuration \
             (digest {}…, expected {}…)",
            policy_path.display(),
            &manifest.config_digest[..12],
            &digest[..12]
        );
        return EXIT_MISMATCH;
    }

    let grid = match build_state_grid(cfg.state_grid.x_min, cfg.state_grid.x_max, cfg.state_grid.points)
    {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let policy_text = match fs::read_to_string(policy_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", policy_path.display());
            return EXIT_MISMATCH;
        }
    };
    let policy = match parse_policy_csv(&grid, cfg.steps, &policy_text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_MISMATCH;
        }
    };

    let nature = match parse_nature_spec(nature_spec) {
        Ok(NatureSpec::Constant(alpha)) => NatureStrategy::Constant(alpha),
        Ok(NatureSpec::Schedule(seq)) => NatureStrategy::Schedule(seq),
        Ok(NatureSpec::Responder) => {
            let grids = match ActionGrids::from_config(&cfg) {
                Ok(g) => g,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_CONFIG;
                }
            };
            let text = match fs::read_to_string(artifacts_dir.join("responder.csv")) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read responder.csv: {e}");
                    return EXIT_MISMATCH;
                }
            };
            match parse_responder_csv(&grid, &grids, &text) {
                Ok(r) => NatureStrategy::Responder(r),
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_MISMATCH;
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };

    let traj = match simulate(&cfg, &policy, &nature) {
        Ok(t) => t,
        Err(e) => return game_exit(&e),
    };

    if let Err(e) = fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return EXIT_CONFIG;
    }
    let mut produced = Vec::new();
    if let Err(e) = write_artifact(out_dir, "trajectory.csv", &trajectory_csv(&traj), &mut produced)
    {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    // Writing into the solve directory must not orphan its artifact list.
    let same_dir = out_dir.canonicalize().ok() == artifacts_dir.canonicalize().ok();
    let artifacts = if same_dir {
        let mut a = manifest.artifacts.clone();
        for p in produced {
            if !a.contains(&p) {
                a.push(p);
            }
        }
        a
    } else {
        produced
    };
    let new_manifest = RunManifest {
        config_digest: digest,
        command: "simulate".to_string(),
        artifacts,
        solver_version: env!("CARGO_PKG_VERSION").to_string(),
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    if let Err(e) = write_manifest(out_dir, &new_manifest) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }

    println!(
        "played {} step(s); final moisture {}; band reached: {}",
        traj.steps_used(),
        fmt_float(traj.final_x),
        traj.reached
    );
    println!(
        "energy spent: {}; guarantee payoff: {}",
        fmt_float(traj.total_energy),
        fmt_float(traj.guaranteed_payoff())
    );
    EXIT_OK
}

/// `refine`: partition-refinement study.
pub fn cmd_refine(config_path: &Path, out_dir: &Path, levels: usize) -> i32 {
    let started = Instant::now();
    let (cfg, bytes) = match load_config(config_path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(code) = gate_config(&cfg) {
        return code;
    }
    let rows = match refine_and_solve(&cfg, levels) {
        Ok(r) => r,
        Err(e) => return solve_exit(&e),
    };
    if let Err(e) = fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return EXIT_CONFIG;
    }
    let mut produced = Vec::new();
    if let Err(e) = write_artifact(out_dir, "refine.csv", &refine_csv(&rows), &mut produced) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    let manifest = RunManifest {
        config_digest: config_digest(&bytes),
        command: "refine".to_string(),
        artifacts: produced,
        solver_version: env!("CARGO_PKG_VERSION").to_string(),
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    if let Err(e) = write_manifest(out_dir, &manifest) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    for l in &rows {
        let diff = l.diff_from_prev.map(fmt_float).unwrap_or_else(|| "—".to_string());
        println!(
            "n = {:>5}  Δ = {}  dx = {}  value = {}  |change| = {diff}",
            l.steps,
            fmt_float(l.dt),
            fmt_float(l.dx),
            fmt_float(l.value)
        );
    }
    EXIT_OK
}

/// Machine-readable outcome of `oracle-check` (floats as strings so that
/// `inf`/`nan` survive JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheckReport {
    pub objective: String,
    pub solver_value: String,
    pub oracle_value: String,
    pub solver_first_control: Option<String>,
    pub oracle_first_control: Option<String>,
    pub abs_diff: String,
    pub tolerance: String,
    pub grid_aligned: bool,
    pub pass: bool,
}

/// `oracle-check`: solver vs. exhaustive enumeration at `x0`.
pub fn cmd_oracle_check(
    config_path: &Path,
    out_dir: Option<&Path>,
    tolerance: Option<f64>,
    max_nodes: u128,
) -> i32 {
    let started = Instant::now();
    let (cfg, bytes) = match load_config(config_path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(code) = gate_config(&cfg) {
        return code;
    }
    let limits = OracleLimits { max_nodes };
    let aligned = grid_aligned(&cfg);

    let (objective, solver_value, oracle_value, controls, bound) = match cfg.objective {
        Objective::Energy => {
            let sol = match solve_energy(&cfg) {
                Ok(s) => s,
                Err(e) => return solve_exit(&e),
            };
            let oracle = match brute_force_value(&cfg, &limits) {
                Ok(o) => o,
                Err(e) => return oracle_exit(&e),
            };
            let v_s = sol.table.value(sol.table.steps(), cfg.x0);
            let t_s = sol.policy.control_at(1, cfg.x0);
            (
                "energy",
                v_s,
                oracle.value,
                Some((t_s, oracle.first_control)),
                sol.table.interp_error_bound(),
            )
        }
        Objective::Time => {
            let sol = match solve_time(&cfg) {
                Ok(s) => s,
                Err(e) => return solve_exit(&e),
            };
            let oracle = match brute_force_time(&cfg, &limits) {
                Ok(o) => o,
                Err(e) => return oracle_exit(&e),
            };
            let n = sol.table.steps();
            let v_s = sol.table.slice(n)[sol.table.grid().nearest_node(cfg.x0)];
            let v_o = oracle.map(|k| k as f64).unwrap_or(f64::INFINITY);
            ("time", v_s, v_o, None, sol.table.snap_error_bound())
        }
    };

    let tol = tolerance.unwrap_or(if aligned { 1e-12 } else { bound.max(1e-12) });
    let diff = if solver_value == oracle_value { 0.0 } else { (solver_value - oracle_value).abs() };
    let pass = diff <= tol;

    println!("objective:        {objective}");
    println!("grid aligned:     {aligned}");
    println!("solver value:     {}", fmt_float(solver_value));
    println!("oracle value:     {}", fmt_float(oracle_value));
    if let Some((t_s, t_o)) = controls {
        println!("solver control:   {}", fmt_float(t_s));
        println!("oracle control:   {}", fmt_float(t_o));
    }
    println!("|difference|:     {}", fmt_float(diff));
    println!("tolerance:        {}", fmt_float(tol));
    println!("verdict:          {}", if pass { "agree" } else { "DISAGREE" });

    if let Some(out) = out_dir {
        if let Err(e) = fs::create_dir_all(out) {
            eprintln!("error: cannot create {}: {e}", out.display());
            return EXIT_CONFIG;
        }
        let report = OracleCheckReport {
            objective: objective.to_string(),
            solver_value: fmt_float(solver_value),
            oracle_value: fmt_float(oracle_value),
            solver_first_control: controls.map(|(t, _)| fmt_float(t)),
            oracle_first_control: controls.map(|(_, t)| fmt_float(t)),
            abs_diff: fmt_float(diff),
            tolerance: fmt_float(tol),
            grid_aligned: aligned,
            pass,
        };
        let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
        text.push('\n');
        let mut produced = Vec::new();
        if let Err(e) = fs::write(out.join("oracle_check.json"), text) {
            eprintln!("error: cannot write oracle_check.json: {e}");
            return EXIT_CONFIG;
        }
        produced.push("oracle_check.json".to_string());
        let manifest = RunManifest {
            config_digest: config_digest(&bytes),
            command: "oracle-check".to_string(),
            artifacts: produced,
            solver_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds: started.elapsed().as_secs_f64(),
        };
        if let Err(e) = write_manifest(out, &manifest) {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    }

    if pass {
        EXIT_OK
    } else {
        EXIT_TOLERANCE
    }
}

/// Parses the `--x0` comma list; empty lists are a usage error.
pub fn parse_x0_list(spec: &str) -> Result<Vec<f64>, String> {
    let trimmed = spec.trim();
    if trimmed.is_empty() {
        return Err("the x0 list must not be empty".to_string());
    }
    trimmed.split(',').map(parse_float).collect()
}

/// `sweep`: the guarantee from each requested initial state.
pub fn cmd_sweep(config_path: &Path, x0_spec: &str, out_dir: &Path) -> i32 {
    let started = Instant::now();
    let x0s = match parse_x0_list(x0_spec) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let (cfg, bytes) = match load_config(config_path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(code) = gate_config(&cfg) {
        return code;
    }
    let csv = match cfg.objective {
        Objective::Energy => match solve_energy(&cfg) {
            Ok(sol) => sweep_csv_energy(&cfg, &sol, &x0s),
            Err(e) => return solve_exit(&e),
        },
        Objective::Time => match solve_time(&cfg) {
            Ok(sol) => sweep_csv_time(&cfg, &sol, &x0s),
            Err(e) => return solve_exit(&e),
        },
    };
    let feasible = csv.lines().skip(1).filter(|l| !l.contains(",inf,")).count();
    let total = x0s.len();
    if let Err(e) = fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return EXIT_CONFIG;
    }
    let mut produced = Vec::new();
    if let Err(e) = write_artifact(out_dir, "sweep.csv", &csv, &mut produced) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    let manifest = RunManifest {
        config_digest: config_digest(&bytes),
        command: "sweep".to_string(),
        artifacts: produced,
        solver_version: env!("CARGO_PKG_VERSION").to_string(),
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    if let Err(e) = write_manifest(out_dir, &manifest) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    println!("swept {total} initial states: {feasible} feasible, {} infeasible", total - feasible);
    EXIT_OK
}

/// A parsed `--nature` argument.
#[derive(Debug, Clone, PartialEq)]
pub enum NatureSpec {
    Constant(f64),
    Schedule(Vec<f64>),
    Responder,
}

/// Parses `constant:<α>`, `schedule:<α,α,…>`, or `responder`.
pub fn parse_nature_spec(spec: &str) -> Result<NatureSpec, String> {
    if spec == "responder" {
        return Ok(NatureSpec::Responder);
    }
    if let Some(rest) = spec.strip_prefix("constant:") {
        return Ok(NatureSpec::Constant(parse_float(rest)?));
    }
    if let Some(rest) = spec.strip_prefix("schedule:") {
        let seq: Result<Vec<f64>, String> = rest.split(',').map(parse_float).collect();
        return Ok(NatureSpec::Schedule(seq?));
    }
    Err(format!(
        "bad nature spec {spec:?}: use 'constant:<α>', 'schedule:<α,α,…>', or 'responder'"
    ))
}
