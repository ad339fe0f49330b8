use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qdynmaps_cli::{run, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "qdynmaps", version, about = "Qubit maps from U(1)-symmetric dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one construction and write the map, its classification and fixed point.
    Map(Common),
    /// Relative entropy to the Gibbs state along the z axis for the PC, E and GP maps.
    #[command(name = "sweep-deltaD")]
    SweepDeltaD(Common),
    /// Coherence trajectories and a Bloch-sphere image cloud.
    Trajectories(Common),
    /// Steps to convergence for each map.
    Converge(Common),
    /// Randomized verification campaigns, one JSON line per claim.
    Verify(Common),
    /// Coupling and resource polarization for a Gibbs-preserving three-qubit map.
    #[command(name = "solve-gp")]
    SolveGp(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key = value file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    construction: Option<String>,
    #[arg(long)]
    claim: Option<String>,
    /// Register size for the verification campaigns.
    #[arg(long)]
    n: Option<String>,
    #[arg(long = "J", allow_hyphen_values = true)]
    j: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    h: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b3: Option<String>,
    #[arg(long = "rG", allow_hyphen_values = true)]
    r_g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    f1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    f2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Any other config key, as key=value. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("seed", &self.seed),
            ("trials", &self.trials),
            ("construction", &self.construction),
            ("claim", &self.claim),
            ("n", &self.n),
            ("J", &self.j),
            ("h", &self.h),
            ("b3", &self.b3),
            ("rG", &self.r_g),
            ("f1", &self.f1),
            ("f2", &self.f2),
            ("t", &self.t),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for pair in &self.set {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{pair}`")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, common) = match &cli.command {
        Command::Map(c) => ("map", c),
        Command::SweepDeltaD(c) => ("sweep-deltaD", c),
        Command::Trajectories(c) => ("trajectories", c),
        Command::Converge(c) => ("converge", c),
        Command::Verify(c) => ("verify", c),
        Command::SolveGp(c) => ("solve-gp", c),
    };
    let result = common.config().and_then(|cfg| run(name, &cfg, &common.out));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
