use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zerosum_cli::config::OUT_DIR_ENV;
use zerosum_cli::{commands, CliError, Experiment, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "zerosum", version, about = "Zeros of sums of random polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample instances and find the zeros of each sum.
    Simulate(Common),
    /// Predicted limit density on a grid and weak integrals against the bumps.
    Predict(Common),
    /// Empirical linear statistics against the prediction; exit 1 if some |z| > 3.
    Compare(Common),
    /// Closed-form zero suites and the Walsh containment fuzz.
    Verify(Common),
    /// Ratio-event, gap-set and concentration diagnostics over the n list.
    Diagnose(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides $ZEROSUM_OUT_DIR and `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// Degrees, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    grid_h: Option<f64>,
}

fn resolve(c: &Common) -> Result<Experiment, CliError> {
    let cfg = match &c.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let overrides = Overrides { seed: c.seed, out: c.out.clone(), n: c.n.clone(), trials: c.trials, grid_h: c.grid_h };
    let env_out = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    Experiment::resolve(cfg, &overrides, env_out)
}

fn run(cli: Cli) -> Result<String, CliError> {
    let (name, common) = match &cli.command {
        Command::Simulate(c) => ("simulate", c),
        Command::Predict(c) => ("predict", c),
        Command::Compare(c) => ("compare", c),
        Command::Verify(c) => ("verify", c),
        Command::Diagnose(c) => ("diagnose", c),
    };
    let exp = resolve(common)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = common.threads {
        if t == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| CliError::Config(e.to_string()))?;
    let dir = pool.install(|| match name {
        "simulate" => commands::simulate::run(&exp).map(|r| r.0),
        "predict" => commands::predict::run(&exp).map(|r| r.0),
        "compare" => commands::compare::run(&exp).map(|r| r.0),
        "verify" => commands::verify::run(&exp).map(|r| r.0),
        _ => commands::diagnose::run(&exp).map(|r| r.0),
    })?;
    Ok(format!("{name}: wrote {}", dir.display()))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("zerosum: {e}");
            e.exit_code()
        }
    }
}
