use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gauss_teleport_cli::scenario::{parse_resource, ScenarioArgs};
use gauss_teleport_cli::{cmd_check, cmd_mc, cmd_sweep, cmd_teleport, CliError};
use serde::Serialize;

/// Gaussian phase-space teleportation: scenarios, realizability checks,
/// fidelity sweeps and Monte Carlo validation.
#[derive(Parser)]
#[command(name = "gtele", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Teleport a one-mode Gaussian input and report the output state.
    Teleport(Scenario),
    /// Classify a resource against the uncertainty bounds.
    Check {
        /// `a,b,c1,c2`, `tmss:R`, `mirror-tmss:R`, `epr`, `mirror` or `point`.
        #[arg(long, allow_hyphen_values = true)]
        resource: String,
    },
    /// Write coherent-state fidelities of the TMSS and its mirror as CSV.
    Sweep {
        r_min: f64,
        r_max: f64,
        steps: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the protocol and compare with the analytic results.
    Mc {
        #[command(flatten)]
        scenario: Scenario,
        /// Seed; defaults to `GT_SEED`, then to 42.
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        samples: Option<String>,
        #[arg(long)]
        streams: Option<String>,
        /// Half-width of the square β window (requires --beta).
        #[arg(long)]
        tol: Option<String>,
    },
}

#[derive(Args)]
struct Scenario {
    /// `key=value` file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `a,b,c1,c2`, `tmss:R`, `mirror-tmss:R`, `epr`, `mirror` or `point`.
    #[arg(long, allow_hyphen_values = true)]
    resource: Option<String>,
    /// `coherent` (alias `vacuum`): mean (0,0), covariance diag(1/2, 1/2).
    #[arg(long)]
    input: Option<String>,
    /// Input mean `q,p`.
    #[arg(long, allow_hyphen_values = true)]
    input_mean: Option<String>,
    /// Input covariance `vqq,vqp,vpp`.
    #[arg(long, allow_hyphen_values = true)]
    input_cov: Option<String>,
    /// `standard` or `classical`.
    #[arg(long)]
    variant: Option<String>,
    /// Measurement result `q,p` to condition on.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
}

impl Scenario {
    fn into_args(self, extra: ScenarioArgs) -> Result<ScenarioArgs, CliError> {
        let args = ScenarioArgs {
            resource: self.resource,
            input: self.input,
            input_mean: self.input_mean,
            input_cov: self.input_cov,
            variant: self.variant,
            beta: self.beta,
            ..extra
        };
        match &self.config {
            Some(path) => args.load_file(path),
            None => Ok(args),
        }
    }
}

fn print_json(value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Parse(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn default_seed() -> Result<u64, CliError> {
    match std::env::var("GT_SEED") {
        Ok(text) => text.trim().parse().map_err(|_| CliError::Parse(format!("invalid GT_SEED '{text}'"))),
        Err(_) => Ok(gauss_teleport::mc::McConfig::default().seed),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Teleport(scenario) => {
            let cfg = scenario.into_args(ScenarioArgs::default())?.parse()?;
            print_json(&cmd_teleport(&cfg)?)
        }
        Command::Check { resource } => print_json(&cmd_check(&parse_resource(&resource)?)),
        Command::Sweep { r_min, r_max, steps, out } => {
            let csv = cmd_sweep(r_min, r_max, steps, out.as_deref())?;
            if out.is_none() {
                print!("{csv}");
            }
            Ok(())
        }
        Command::Mc { scenario, seed, samples, streams, tol } => {
            let args = scenario.into_args(ScenarioArgs { seed, samples, streams, tol, ..Default::default() })?;
            let cfg = args.parse()?;
            let mc = args.mc_config(default_seed()?)?;
            print_json(&cmd_mc(&cfg, mc)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let CliError::Engine(_) = err {
                println!("{}", err.to_json());
            }
            eprintln!("gtele: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
