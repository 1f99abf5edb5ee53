use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stochastic_contact_cli::{
    cmd_converge, cmd_criticality, cmd_diagnose, cmd_simulate, CliError, ConfigFile, ExperimentConfig,
};

#[derive(Parser)]
#[command(
    name = "stochastic-contact",
    version,
    about = "Stochastic contact variational integrator experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate trajectories and write them as CSV.
    Simulate(RunArgs),
    /// Contact-form residuals and conformal-factor comparisons.
    Diagnose(RunArgs),
    /// Strong self-convergence under dyadic refinement.
    Converge(RunArgs),
    /// Stationarity of the final action in the interior positions.
    Criticality(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// damped-oscillator-additive | damped-multiplicative | kepler-drag
    #[arg(long)]
    model: Option<String>,
    /// contact | em | both
    #[arg(long)]
    scheme: Option<String>,
    /// Flat JSON configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    h: Option<f64>,
    /// Number of steps N.
    #[arg(long)]
    steps: Option<usize>,
    /// Final time; must equal N·h when both are given.
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of ensemble members, seeded consecutively from --seed.
    #[arg(long)]
    ensemble: Option<usize>,
    /// Pass threshold of the diagnostic.
    #[arg(long)]
    tol: Option<f64>,
    /// Relative finite-difference step.
    #[arg(long)]
    fd_step: Option<f64>,
    /// Refinement levels of the convergence study.
    #[arg(long)]
    levels: Option<u32>,
    /// Sample paths of the convergence study.
    #[arg(long)]
    paths: Option<usize>,
    /// Single interior index j for the criticality check.
    #[arg(long)]
    index: Option<usize>,
    /// Replace the Wiener increments by zeros.
    #[arg(long)]
    deterministic: bool,
}

impl RunArgs {
    fn resolve(self) -> Result<ExperimentConfig, CliError> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            model: self.model,
            scheme: self.scheme,
            seed: self.seed,
            h: self.h,
            steps: self.steps,
            t_final: self.t_final,
            out: self.out,
            ensemble: self.ensemble,
            tol: self.tol,
            fd_step: self.fd_step,
            levels: self.levels,
            paths: self.paths,
            index: self.index,
            deterministic: self.deterministic.then_some(true),
            ..ConfigFile::default()
        };
        ExperimentConfig::resolve(file.overridden_by(flags))
    }
}

type Run = fn(&ExperimentConfig) -> Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (RunArgs, Run) = match cli.command {
        Command::Simulate(a) => (a, cmd_simulate),
        Command::Diagnose(a) => (a, cmd_diagnose),
        Command::Converge(a) => (a, cmd_converge),
        Command::Criticality(a) => (a, cmd_criticality),
    };
    match args.resolve().and_then(|cfg| run(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
