use serde_json::json;
use stochastic_contact::diagnostics::{criticality_profile, criticality_residual};

use super::{member_suffix, noise_path, num, run_member, runtime, stepper};
use crate::config::ExperimentConfig;
use crate::output::OutputDir;
use crate::{plots, CliError};

const DEFAULT_TOL: f64 = 1e-5;

/// `|∂s_N/∂q_j|` along each configured trajectory.
pub fn cmd_criticality(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let model = cfg.build_model()?;
    if !model.momentum_independent() {
        return Err(CliError::Config(format!(
            "model {} has a discrete Lagrangian that depends on momenta; criticality in q alone is undefined",
            cfg.model
        )));
    }
    if let Some(j) = cfg.index {
        if j == 0 || j >= cfg.steps {
            return Err(CliError::Config(format!(
                "index {j} is outside the interior range 1..={}",
                cfg.steps.saturating_sub(1)
            )));
        }
    }
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    let mut out = OutputDir::create(&cfg.out)?;
    let mut runs = Vec::new();
    let mut series = Vec::new();
    for seed in cfg.seeds() {
        let suffix = member_suffix(cfg, seed);
        let path = noise_path(cfg, &*model, seed)?;
        for &scheme in cfg.scheme.names() {
            let tag = format!("{scheme}{suffix}");
            let (traj, failure) = run_member(&mut out, &*stepper(&model, scheme, cfg), cfg, &path, &tag)?;
            let indexed: Vec<(usize, f64)> = match (cfg.index, &failure) {
                (_, Some(_)) => Vec::new(),
                (Some(j), None) => vec![(
                    j,
                    criticality_residual(&*model, &traj, j, cfg.fd_step).map_err(runtime)?,
                )],
                (None, None) => criticality_profile(&*model, &traj, cfg.fd_step)
                    .map_err(runtime)?
                    .into_iter()
                    .enumerate()
                    .map(|(i, r)| (i + 1, r))
                    .collect(),
            };
            let mut rows = vec!["j,residual".to_string()];
            rows.extend(indexed.iter().map(|(j, r)| format!("{j},{}", num(*r))));
            let csv = format!("criticality_{tag}.csv");
            out.write(&csv, (rows.join("\n") + "\n").as_bytes())?;
            series.push((tag, csv.clone()));
            let max = indexed.iter().fold(0.0_f64, |a, (_, r)| a.max(*r));
            let passed = failure.is_none() && max <= tol;
            runs.push(json!({
                "scheme": scheme,
                "seed": seed,
                "file": csv,
                "failure": failure,
                "max_residual": max,
                "argmax": indexed.iter().max_by(|a, b| a.1.total_cmp(&b.1)).map(|(j, _)| j),
                "tol": tol,
                "status": if passed { "pass" } else { "fail" },
            }));
        }
    }
    let summary = json!({
        "command": "criticality",
        "model": cfg.model.name(),
        "h": cfg.h,
        "steps": cfg.steps,
        "fd_step": cfg.fd_step,
        "runs": runs,
    });
    out.write_json("criticality.json", &summary)?;
    out.write("plot_criticality.gp", plots::criticality(&series).as_bytes())?;
    out.finish("criticality", cfg)
}
