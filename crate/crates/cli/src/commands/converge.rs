use serde_json::json;
use stochastic_contact::diagnostics::self_convergence;

use super::{num, runtime, stepper};
use crate::config::ExperimentConfig;
use crate::output::OutputDir;
use crate::{plots, CliError};

/// Dyadic strong self-convergence table per scheme.
pub fn cmd_converge(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let model = cfg.build_model()?;
    let mut out = OutputDir::create(&cfg.out)?;
    let mut tables = Vec::new();
    for &scheme in cfg.scheme.names() {
        let step = stepper(&model, scheme, cfg);
        let table = self_convergence(
            &*step,
            &cfg.initial()?,
            cfg.seed,
            cfg.h,
            cfg.steps,
            cfg.levels,
            cfg.paths,
            if cfg.deterministic { 0 } else { model.noise_count() },
        )
        .map_err(runtime)?;
        if table.failures > 0 {
            out.record_failure(format!(
                "{scheme}: {} of {} paths failed to integrate",
                table.failures, cfg.paths
            ));
        }
        let mut rows = vec!["level,h,steps,error".to_string()];
        rows.extend(
            table
                .rows
                .iter()
                .map(|r| format!("{},{},{},{}", r.level, num(r.h), r.steps, num(r.error))),
        );
        let csv = format!("convergence_{scheme}.csv");
        out.write(&csv, (rows.join("\n") + "\n").as_bytes())?;
        let gp = format!("plot_convergence_{scheme}.gp");
        out.write(&gp, plots::convergence(&csv, table.slope).as_bytes())?;
        let coarse: Vec<f64> = table.rows[..table.rows.len().saturating_sub(1)]
            .iter()
            .map(|r| r.error)
            .collect();
        let decreasing = coarse.windows(2).all(|w| w[1] < w[0]);
        tables.push(json!({
            "scheme": scheme,
            "file": csv,
            "rows": table.rows.iter().map(|r| json!({ "level": r.level, "h": r.h, "steps": r.steps, "error": r.error })).collect::<Vec<_>>(),
            "slope": table.slope,
            "strictly_decreasing": decreasing,
            "samples": table.samples,
            "failures": table.failures,
        }));
    }
    let summary = json!({
        "command": "converge",
        "model": cfg.model.name(),
        "base_h": cfg.h,
        "base_steps": cfg.steps,
        "levels": cfg.levels,
        "paths": cfg.paths,
        "base_seed": cfg.seed,
        "tables": tables,
    });
    out.write_json("converge.json", &summary)?;
    out.finish("converge", cfg)
}
