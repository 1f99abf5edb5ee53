use std::collections::BTreeMap;

use serde_json::{json, Value};
use stochastic_contact::diagnostics::ensemble_norms;

use super::{csv_bytes, member_suffix, noise_path, run_member, stepper};
use crate::config::ExperimentConfig;
use crate::output::OutputDir;
use crate::{plots, CliError};

/// Trajectories of the configured schemes, one CSV per scheme and member.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let model = cfg.build_model()?;
    let mut out = OutputDir::create(&cfg.out)?;
    let mut members = Vec::new();
    let mut finals: BTreeMap<&str, Vec<_>> = BTreeMap::new();
    let mut series = Vec::new();
    for seed in cfg.seeds() {
        let suffix = member_suffix(cfg, seed);
        let path = noise_path(cfg, &*model, seed)?;
        out.write(&format!("noise{suffix}.csv"), &csv_bytes(|b| path.write_csv(b))?)?;
        for &scheme in cfg.scheme.names() {
            let name = format!("trajectory_{scheme}{suffix}.csv");
            let (traj, failure) = run_member(&mut out, &*stepper(&model, scheme, cfg), cfg, &path, &name)?;
            out.write(&name, &csv_bytes(|b| traj.write_csv(b))?)?;
            let last = traj.last();
            members.push(json!({
                "scheme": scheme,
                "seed": seed,
                "file": name,
                "steps_completed": traj.steps(),
                "final": { "t": last.t(), "q": last.q(), "p": last.p(), "s": last.s() },
                "total_newton_iters": traj.total_newton_iters(),
                "max_newton_residual": traj.max_residual(),
                "failure": failure,
            }));
            if failure.is_none() {
                finals.entry(scheme).or_default().push(last.clone());
            }
            series.push((format!("{scheme}{suffix}"), name));
        }
    }
    let mut ensemble = serde_json::Map::new();
    for (scheme, states) in &finals {
        let stats = ensemble_norms(states).map_err(super::runtime)?;
        ensemble.insert(
            scheme.to_string(),
            json!({ "samples": stats.samples, "total": stats.total, "q": stats.q, "p": stats.p, "s": stats.s }),
        );
    }
    let summary = json!({
        "command": "simulate",
        "model": cfg.model.name(),
        "h": cfg.h,
        "steps": cfg.steps,
        "T": cfg.t_final,
        "members": members,
        "final_state_norms": Value::Object(ensemble),
    });
    out.write_json("summary.json", &summary)?;
    out.write("plot_trajectories.gp", plots::trajectories(&series, 1).as_bytes())?;
    out.finish("simulate", cfg)
}
