//! The four subcommands.

mod converge;
mod criticality;
mod diagnose;
mod simulate;

use std::sync::Arc;

use stochastic_contact::{
    generate_path, integrate, ClosedFormContact, ClosedFormEm, ExampleModel, Stepper, Trajectory, WienerPath,
};

pub use converge::cmd_converge;
pub use criticality::cmd_criticality;
pub use diagnose::cmd_diagnose;
pub use simulate::cmd_simulate;

use crate::config::ExperimentConfig;
use crate::output::OutputDir;
use crate::CliError;

fn stepper(model: &Arc<dyn ExampleModel>, scheme: &str, cfg: &ExperimentConfig) -> Box<dyn Stepper> {
    match scheme {
        "contact" => {
            let mut s = ClosedFormContact::new(model.clone());
            s.opts = cfg.solver();
            Box::new(s)
        }
        _ => Box::new(ClosedFormEm { model: model.clone() }),
    }
}

fn noise_path(cfg: &ExperimentConfig, model: &dyn ExampleModel, seed: u64) -> Result<WienerPath, CliError> {
    if cfg.deterministic {
        return Ok(WienerPath::zero(model.noise_count(), cfg.steps, cfg.h));
    }
    generate_path(seed, model.noise_count(), cfg.steps, cfg.h).map_err(|e| CliError::Config(e.to_string()))
}

/// File-name suffix distinguishing ensemble members.
fn member_suffix(cfg: &ExperimentConfig, seed: u64) -> String {
    if cfg.ensemble > 1 {
        format!("_seed{seed}")
    } else {
        String::new()
    }
}

/// Integrates one member, keeping the partial trajectory of a failed run.
fn run_member(
    out: &mut OutputDir,
    stepper: &dyn Stepper,
    cfg: &ExperimentConfig,
    path: &WienerPath,
    label: &str,
) -> Result<(Trajectory, Option<String>), CliError> {
    let (traj, failure) = match integrate(stepper, cfg.initial()?, path) {
        Ok(t) => (t, None),
        Err(f) => {
            let msg = f.to_string();
            out.record_failure(format!("{label}: {msg}"));
            (f.partial, Some(msg))
        }
    };
    out.record_solver(traj.total_newton_iters(), traj.max_residual());
    Ok((traj, failure))
}

fn runtime(e: stochastic_contact::Error) -> CliError {
    CliError::Integration(e.to_string())
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}
