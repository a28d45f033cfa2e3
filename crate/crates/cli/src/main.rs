use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qflqg_cli::commands::{cmd_oracle, cmd_pareto, cmd_simulate, cmd_solve};
use qflqg_cli::config::Flavor;
use qflqg_cli::{configure_threads, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "qflqg", version, about = "Quantized-feedback LQG experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Riccati recursions, offline schedule and quantizer tables.
    Solve(Args),
    /// Monte Carlo evaluation of one selection policy.
    Simulate(Args),
    /// Weighted sweep over the control/quantization trade-off.
    Pareto(Args),
    /// Exact policy on a discretized micro-instance, compared with the others.
    Oracle(Args),
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Offline,
    Greedy,
    Rollout,
    Oracle,
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
}

impl Args {
    fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(out) = &self.out {
            cfg.output.dir = out.to_string_lossy().into_owned();
        }
        if let Some(seed) = self.seed {
            cfg.run.seed = seed;
        }
        if let Some(runs) = self.runs {
            cfg.run.n_runs = runs;
        }
        if let Some(p) = self.policy {
            cfg.policy.flavor = match p {
                PolicyArg::Offline => Flavor::Offline,
                PolicyArg::Greedy => Flavor::Greedy,
                PolicyArg::Rollout => Flavor::Rollout,
                PolicyArg::Oracle => Flavor::Oracle,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Solve(a) => cmd_solve(&a.resolve()?),
        Command::Simulate(a) => cmd_simulate(&a.resolve()?),
        Command::Pareto(a) => cmd_pareto(&a.resolve()?),
        Command::Oracle(a) => cmd_oracle(&a.resolve()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
