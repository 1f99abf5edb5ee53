use serde_json::{json, Value};
use stochastic_contact::diagnostics::{
    analytic_step_jacobian, conformal_compare, contact_residuals, contact_residuals_with, ConformalReference,
};

use super::{member_suffix, noise_path, num, run_member, runtime, stepper};
use crate::config::ExperimentConfig;
use crate::output::OutputDir;
use crate::{plots, CliError};

const DEFAULT_TOL: f64 = 1e-6;

/// What the residual column measures.
const RESIDUAL_DEFINITION: &str =
    "r_j = max-norm of J_j^T eta(x_{j+1}) - lambda_j eta(x_j), eta = ds - p dq, J_j the derivative of step j";

/// Contact-form residuals and conformal-factor comparisons.
pub fn cmd_diagnose(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let model = cfg.build_model()?;
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    let mut out = OutputDir::create(&cfg.out)?;
    let mut reports = Vec::new();
    let mut residual_series = Vec::new();
    for seed in cfg.seeds() {
        let suffix = member_suffix(cfg, seed);
        let path = noise_path(cfg, &*model, seed)?;
        for &scheme in cfg.scheme.names() {
            let step = stepper(&model, scheme, cfg);
            let tag = format!("{scheme}{suffix}");
            let (mut traj, failure) = run_member(&mut out, &*step, cfg, &path, &tag)?;
            let report = contact_residuals(&*step, &traj, cfg.fd_step).map_err(runtime)?;
            let analytic =
                if scheme == "contact" && model.analytic_step_jacobian(traj.initial(), cfg.h, &[0.0]).is_some() {
                    let r = contact_residuals_with(&traj, |x, h, dw| {
                        analytic_step_jacobian(&*model, x, h, dw).expect("model has an analytic jacobian")
                    })
                    .map_err(runtime)?;
                    Some(r)
                } else {
                    None
                };

            let mut header = "j,t,residual".to_string();
            if analytic.is_some() {
                header.push_str(",residual_analytic");
            }
            let mut rows = vec![header];
            for (j, r) in report.residuals.iter().enumerate() {
                let mut row = format!("{j},{},{}", num(traj.states[j].t()), num(*r));
                if let Some(a) = &analytic {
                    row.push_str(&format!(",{}", num(a.residuals[j])));
                }
                rows.push(row);
            }
            let residual_csv = format!("residuals_{tag}.csv");
            out.write(&residual_csv, (rows.join("\n") + "\n").as_bytes())?;
            residual_series.push((tag.clone(), residual_csv.clone()));

            if report.fitted {
                traj.lambdas = report.lambdas.iter().map(|&l| Some(l)).collect();
            }
            let modes = [
                ("continuous", ConformalReference::Continuous),
                ("discrete", ConformalReference::Discrete),
                ("nominal", ConformalReference::Nominal(model.nominal_rate())),
            ];
            let mut conformal = serde_json::Map::new();
            let mut columns = Vec::new();
            for (name, mode) in modes {
                let series = conformal_compare(&traj, &*model, mode).map_err(runtime)?;
                conformal.insert(name.into(), json!({ "max_abs_diff": series.max_abs_diff }));
                columns.push((name, series));
            }
            let mut rows = vec![format!(
                "j,t,lambda,{}",
                columns
                    .iter()
                    .map(|(n, _)| format!("ref_{n}"))
                    .collect::<Vec<_>>()
                    .join(",")
            )];
            for j in 0..traj.steps() {
                let mut row = format!("{j},{},{}", num(traj.states[j].t()), num(report.lambdas[j]));
                for (_, s) in &columns {
                    row.push(',');
                    row.push_str(&num(s.reference[j]));
                }
                rows.push(row);
            }
            let lambda_csv = format!("lambda_{tag}.csv");
            out.write(&lambda_csv, (rows.join("\n") + "\n").as_bytes())?;
            let refs: Vec<String> = columns.iter().map(|(n, _)| format!("ref_{n}")).collect();
            let refs: Vec<&str> = refs.iter().map(String::as_str).collect();
            out.write(
                &format!("plot_lambda_{tag}.gp"),
                plots::conformal(&lambda_csv, &refs).as_bytes(),
            )?;

            let (lo, hi) = report
                .lambdas
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &l| (a.min(l), b.max(l)));
            let passed = failure.is_none() && report.max <= tol;
            reports.push(json!({
                "scheme": scheme,
                "seed": seed,
                "steps_completed": traj.steps(),
                "failure": failure,
                "contact_check": {
                    "status": if passed { "pass" } else { "fail" },
                    "max_residual": report.max,
                    "mean_residual": report.mean(),
                    "tol": tol,
                    "jacobian": "finite-difference",
                    "fd_step": cfg.fd_step,
                    "max_residual_analytic": analytic.as_ref().map(|a| a.max),
                    "lambda_fitted": report.fitted,
                    "file": residual_csv,
                },
                "conformal": {
                    "lambda_min": lo,
                    "lambda_max": hi,
                    "nominal_rate": model.nominal_rate(),
                    "references": Value::Object(conformal),
                    "file": lambda_csv,
                },
            }));
        }
    }
    let summary = json!({
        "command": "diagnose",
        "model": cfg.model.name(),
        "h": cfg.h,
        "steps": cfg.steps,
        "residual_definition": RESIDUAL_DEFINITION,
        "runs": reports,
    });
    out.write_json("diagnose.json", &summary)?;
    out.write("plot_contact.gp", plots::contact(&residual_series).as_bytes())?;
    out.finish("diagnose", cfg)
}
