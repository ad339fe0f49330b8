//! The six subcommands. Each one computes everything first and writes files last, so a
//! failing run leaves nothing behind.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use qdynmaps::affine::{choi_min_eigenvalue, classify, fixed_points, is_gibbs_preserving};
use qdynmaps::constructions::{
    phi_app_d_general, phi_correlated, phi_e_general, phi_env_coherent, phi_gp_3qubit, phi_gp_finetuned, phi_pc,
    solve_gp_constraints, GpSolution, ThreeQubitParams, TwoQubitParams,
};
use qdynmaps::harness::{self, VerificationReport};
use qdynmaps::thermo::{convergence_steps, delta_d, Trajectory};
use qdynmaps::{AffineMap, BlochVector, CorrelationMatrix};

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{num, write_all, Pending};

pub const COMMANDS: [&str; 6] = ["map", "sweep-deltaD", "trajectories", "converge", "verify", "solve-gp"];

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Infeasible(String),
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Infeasible(_) => 2,
            CliError::Config(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid config: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible constraints: {m}"),
            CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<qdynmaps::Error> for CliError {
    fn from(e: qdynmaps::Error) -> Self {
        match e {
            qdynmaps::Error::VacuousControl(_) => CliError::Failed(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(format!("write failed: {e}"))
    }
}

pub fn run(command: &str, cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let (files, late_error) = match command {
        "map" => (cmd_map(cfg)?, None),
        "sweep-deltaD" => (cmd_sweep_delta_d(cfg)?, None),
        "trajectories" => (cmd_trajectories(cfg)?, None),
        "converge" => (cmd_converge(cfg)?, None),
        "verify" => cmd_verify(cfg)?,
        "solve-gp" => cmd_solve_gp(cfg)?,
        other => return Err(CliError::Config(format!("unknown command `{other}`"))),
    };
    let paths = write_all(out, &files)?;
    match late_error {
        Some(e) => Err(e),
        None => Ok(paths),
    }
}

fn reason(sol: &GpSolution) -> String {
    let name = sol
        .infeasibility
        .map(|r| serde_json::to_value(r).expect("enum serializes"))
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    format!("{name} (b3 = {}, rG = {})", sol.b3, sol.r_g)
}

fn feasible_solution(cfg: &ExperimentConfig) -> Result<GpSolution, CliError> {
    let sol = solve_gp_constraints(cfg.real("b3"), cfg.real("rG"))?;
    if !sol.feasible {
        return Err(CliError::Infeasible(reason(&sol)));
    }
    Ok(sol)
}

/// Three-qubit parameters whose coupling meets the Gibbs-preserving condition at time `t`.
fn three_qubit(cfg: &ExperimentConfig, sol: &GpSolution, f: [f64; 3]) -> Result<ThreeQubitParams, CliError> {
    let t = cfg.real("t");
    if !(t > 0.0) {
        return Err(CliError::Config("t must be positive for the three-qubit model".into()));
    }
    let norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 1.0 {
        return Err(CliError::Infeasible(format!(
            "resource_norm_exceeded (|f| = {norm} with f3 = {})",
            sol.f3
        )));
    }
    let j = sol.j.expect("feasible solutions carry a coupling") / t;
    Ok(ThreeQubitParams::new(j, cfg.real("h"), sol.b3, f)?)
}

/// PC, E and GP maps on the shared three-qubit model: resource `(0, 0, f3)`, `(f1, f2, 0)` and
/// `(f1, f2, f3)` respectively.
pub struct MapTriple {
    pub solution: GpSolution,
    pub coupling: f64,
    pub maps: Vec<(&'static str, AffineMap)>,
}

pub fn map_triple(cfg: &ExperimentConfig) -> Result<MapTriple, CliError> {
    let sol = feasible_solution(cfg)?;
    let (f1, f2, f3) = (cfg.real("f1"), cfg.real("f2"), sol.f3);
    let t = cfg.real("t");
    let mut maps = Vec::new();
    let mut coupling = 0.0;
    for (label, f) in [("PC", [0.0, 0.0, f3]), ("E", [f1, f2, 0.0]), ("GP", [f1, f2, f3])] {
        let p = three_qubit(cfg, &sol, f)?;
        coupling = p.j;
        maps.push((label, phi_gp_3qubit(&p, t)?));
    }
    Ok(MapTriple {
        solution: sol,
        coupling,
        maps,
    })
}

/// The configured construction plus construction-specific extras for the JSON record.
pub fn build_map(cfg: &ExperimentConfig) -> Result<(AffineMap, Map<String, Value>), CliError> {
    let (j, h, t) = (cfg.real("J"), cfg.real("h"), cfg.real("t"));
    let b = cfg.env();
    let c = cfg.chi();
    let mut extra = Map::new();
    let m = match cfg.construction.as_str() {
        "pc" => phi_pc(j, h, b.z(), t),
        "env_coherent" => phi_env_coherent(j, h, &b, t),
        "correlated" => phi_correlated(j, h, b.z(), c[2][0], c[2][1], 0.5 * (c[1][0] - c[0][1]), t),
        "gp_finetuned" => {
            let (m, chi) = phi_gp_finetuned(j, h, &b, cfg.real("rG"), t)?;
            extra.insert("correlations".into(), json!(chi.to_rows()));
            m
        }
        "gp_3qubit" => {
            let sol = feasible_solution(cfg)?;
            let p = three_qubit(cfg, &sol, [cfg.real("f1"), cfg.real("f2"), sol.f3])?;
            extra.insert("solution".into(), json!(sol));
            extra.insert("coupling".into(), json!(p.j));
            phi_gp_3qubit(&p, t)?
        }
        "appD" => phi_app_d_general(
            cfg.real("phi0"),
            cfg.real("phi1"),
            cfg.real("phi2"),
            cfg.real("alpha"),
            cfg.real("theta"),
            &b,
        ),
        "general2q" => {
            let p = TwoQubitParams::new(j, cfg.h1(), cfg.h2());
            phi_e_general(&p, &b, &CorrelationMatrix::from_rows(c), t)?
        }
        other => return Err(CliError::Config(format!("unknown construction `{other}`"))),
    };
    Ok((m, extra))
}

fn cmd_map(cfg: &ExperimentConfig) -> Result<Vec<Pending>, CliError> {
    let (m, extra) = build_map(cfg)?;
    let tol = cfg.real("tol");
    let mut body = Map::new();
    body.insert("construction".into(), json!(cfg.construction));
    body.insert("map".into(), serde_json::to_value(m).expect("map serializes"));
    body.insert("classification".into(), json!(classify(&m, tol, true)));
    let r_g = cfg.real("rG");
    body.insert(
        "gibbs_preserving_for_rG".into(),
        json!(is_gibbs_preserving(&m, r_g, tol)?),
    );
    body.insert(
        "fixed_point".into(),
        match fixed_points(&m) {
            Ok(fp) => json!(fp),
            Err(e) => json!({ "error": e.to_string() }),
        },
    );
    body.insert("choi_min_eigenvalue".into(), json!(choi_min_eigenvalue(&m)));
    body.extend(extra);

    let rows: Vec<String> = m.to_csv_block().lines().map(str::to_string).collect();
    Ok(vec![
        Pending::csv("map.csv", "map", cfg, "col0,col1,col2,col3", &rows),
        Pending::json("map.json", "map", cfg, body),
    ])
}

/// Evenly spaced `a3` values with `r_G` spliced in when it lies inside the range.
pub fn sweep_axis(cfg: &ExperimentConfig) -> Vec<f64> {
    let (lo, hi) = (cfg.real("a3_min"), cfg.real("a3_max"));
    let n = cfg.int("sweep_points") as usize;
    let mut axis: Vec<f64> = if n == 1 {
        vec![lo]
    } else {
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    };
    if n > 1 {
        axis[n - 1] = hi;
    }
    let r_g = cfg.real("rG");
    if (lo..=hi).contains(&r_g) {
        match axis.iter().position(|&x| (x - r_g).abs() < 1e-12) {
            Some(k) => axis[k] = r_g,
            None => {
                let k = axis.partition_point(|&x| x < r_g);
                axis.insert(k, r_g);
            }
        }
    }
    axis
}

fn cmd_sweep_delta_d(cfg: &ExperimentConfig) -> Result<Vec<Pending>, CliError> {
    let triple = map_triple(cfg)?;
    let r_g = cfg.real("rG");
    let mut rows = Vec::new();
    for a3 in sweep_axis(cfg) {
        let a0 = BlochVector::new(0.0, 0.0, a3);
        let d: Vec<f64> = triple
            .maps
            .iter()
            .map(|(_, m)| delta_d(m, &a0, r_g))
            .collect::<Result<_, _>>()?;
        let delta = d[2] - d[0];
        rows.push(format!(
            "{},{},{},{},{}",
            num(a3),
            num(d[0]),
            num(d[1]),
            num(d[2]),
            num(delta)
        ));
    }
    Ok(vec![Pending::csv(
        "sweep_deltaD.csv",
        "sweep-deltaD",
        cfg,
        "a3,deltaD_PC,deltaD_E,deltaD_GP,delta",
        &rows,
    )])
}

/// Fibonacci-sphere points on the unit sphere.
pub fn fibonacci_sphere(count: usize) -> Vec<BlochVector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let (s, c) = (golden * k as f64).sin_cos();
            BlochVector::new(r * c, r * s, z)
        })
        .collect()
}

fn cmd_trajectories(cfg: &ExperimentConfig) -> Result<Vec<Pending>, CliError> {
    let triple = map_triple(cfg)?;
    let a0 = cfg.initial();
    let n = cfg.int("steps") as usize;
    let mut rows = Vec::new();
    for (label, m) in &triple.maps {
        let params = BTreeMap::from([("J".to_string(), triple.coupling), ("rG".to_string(), cfg.real("rG"))]);
        let traj = Trajectory::generate(m, &a0, n, *label, params);
        rows.extend(traj.csv_rows().into_iter().map(|r| format!("{label},{r}")));
    }

    let mut cloud = Vec::new();
    for (k, a) in fibonacci_sphere(cfg.int("cloud_points") as usize).iter().enumerate() {
        for (label, m) in &triple.maps {
            let b = m.apply(a);
            cloud.push(format!(
                "{k},{label},{},{},{},{},{},{}",
                num(a.x()),
                num(a.y()),
                num(a.z()),
                num(b.x()),
                num(b.y()),
                num(b.z())
            ));
        }
    }
    Ok(vec![
        Pending::csv(
            "trajectories.csv",
            "trajectories",
            cfg,
            "map,step,a1,a2,a3,l1_coherence",
            &rows,
        ),
        Pending::csv(
            "cloud.csv",
            "trajectories",
            cfg,
            "point,map,a1,a2,a3,out1,out2,out3",
            &cloud,
        ),
    ])
}

fn cmd_converge(cfg: &ExperimentConfig) -> Result<Vec<Pending>, CliError> {
    let triple = map_triple(cfg)?;
    let a0 = cfg.initial();
    let rows = triple
        .maps
        .iter()
        .map(|(label, m)| {
            let c = convergence_steps(m, &a0, cfg.real("epsilon"), cfg.int("n_max") as usize)?;
            Ok(format!("{label},{},{}", c.steps, c.converged))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(vec![Pending::csv(
        "converge.csv",
        "converge",
        cfg,
        "map,steps,converged",
        &rows,
    )])
}

pub fn verification_reports(cfg: &ExperimentConfig) -> Result<Vec<VerificationReport>, CliError> {
    let n = cfg.int("n") as usize;
    let seed = cfg.int("seed");
    Ok(match cfg.claim.as_str() {
        "all" => harness::run_all(n, seed, cfg.trials())?,
        id => vec![harness::run_claim(
            id,
            n,
            cfg.trials().unwrap_or_else(|| harness::default_trials(n)),
            seed,
        )?],
    })
}

fn cmd_verify(cfg: &ExperimentConfig) -> Result<(Vec<Pending>, Option<CliError>), CliError> {
    let reports = verification_reports(cfg)?;
    let mut contents =
        serde_json::to_string(&json!({ "meta": crate::output::meta("verify", cfg) })).expect("json value serializes");
    contents.push('\n');
    contents += &harness::to_json_lines(&reports);
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.claim_id.as_str())
        .collect();
    let late = (!failed.is_empty()).then(|| CliError::Failed(format!("claims failed: {}", failed.join(", "))));
    Ok((
        vec![Pending {
            name: "verify.jsonl",
            contents,
        }],
        late,
    ))
}

fn cmd_solve_gp(cfg: &ExperimentConfig) -> Result<(Vec<Pending>, Option<CliError>), CliError> {
    let sol = solve_gp_constraints(cfg.real("b3"), cfg.real("rG"))?;
    let mut body = Map::new();
    body.insert("solution".into(), json!(sol));
    let late = (!sol.feasible).then(|| CliError::Infeasible(reason(&sol)));
    if sol.feasible {
        body.insert("fixed_point_rG".into(), json!(0.5 * (sol.b3 + sol.f3)));
    }
    Ok((vec![Pending::json("solve_gp.json", "solve-gp", cfg, body)], late))
}
