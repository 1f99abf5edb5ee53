//! Experiment configuration: a flat JSON file merged with command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stochastic_contact::{ContactState, ModelKind, ModelParams, SolverOptions};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Contact,
    Em,
    Both,
}

impl Scheme {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "contact" => Ok(Scheme::Contact),
            "em" => Ok(Scheme::Em),
            "both" => Ok(Scheme::Both),
            _ => Err(CliError::Config(format!(
                "unknown scheme '{s}'; valid schemes: contact, em, both"
            ))),
        }
    }

    pub fn names(self) -> &'static [&'static str] {
        match self {
            Scheme::Contact => &["contact"],
            Scheme::Em => &["em"],
            Scheme::Both => &["contact", "em"],
        }
    }
}

/// Every key is optional; missing keys take the reference defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<String>,
    pub scheme: Option<String>,
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub q_min: Option<f64>,
    pub q0: Option<f64>,
    pub p0: Option<f64>,
    pub s0: Option<f64>,
    pub h: Option<f64>,
    #[serde(alias = "N")]
    pub steps: Option<usize>,
    #[serde(rename = "T")]
    pub t_final: Option<f64>,
    pub seed: Option<u64>,
    pub ensemble: Option<usize>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub fd_step: Option<f64>,
    pub newton_tol: Option<f64>,
    pub newton_max_iters: Option<usize>,
    pub levels: Option<u32>,
    pub paths: Option<usize>,
    pub index: Option<usize>,
    pub deterministic: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    /// Values of `other` that are set replace those of `self`.
    pub fn overridden_by(self, other: ConfigFile) -> ConfigFile {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigFile { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            model,
            scheme,
            alpha,
            epsilon,
            beta,
            gamma,
            q_min,
            q0,
            p0,
            s0,
            h,
            steps,
            t_final,
            seed,
            ensemble,
            out,
            tol,
            fd_step,
            newton_tol,
            newton_max_iters,
            levels,
            paths,
            index,
            deterministic
        )
    }
}

/// Validated configuration of one run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    #[serde(serialize_with = "model_name")]
    pub model: ModelKind,
    pub scheme: Scheme,
    pub alpha: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
    pub q_min: f64,
    pub q0: f64,
    pub p0: f64,
    pub s0: f64,
    pub h: f64,
    pub steps: usize,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub seed: u64,
    pub ensemble: usize,
    pub out: PathBuf,
    pub tol: Option<f64>,
    pub fd_step: f64,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    pub levels: u32,
    pub paths: usize,
    pub index: Option<usize>,
    /// Drive the schemes with zero increments.
    pub deterministic: bool,
}

fn model_name<S: serde::Serializer>(kind: &ModelKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(kind.name())
}

impl ExperimentConfig {
    pub fn resolve(file: ConfigFile) -> Result<Self, CliError> {
        let params = ModelParams::default();
        let model = ModelKind::from_name(file.model.as_deref().unwrap_or("damped-oscillator-additive"))
            .map_err(|e| CliError::Config(e.to_string()))?;
        let scheme = Scheme::parse(file.scheme.as_deref().unwrap_or("both"))?;
        let h = file.h.unwrap_or(0.1);
        if !(h > 0.0 && h.is_finite()) {
            return Err(CliError::Config(format!(
                "step size h must be positive and finite, got {h}"
            )));
        }
        let steps = match (file.steps, file.t_final) {
            (Some(n), Some(t)) => {
                if (n as f64 * h - t).abs() > 1e-9 * t.abs().max(1.0) {
                    return Err(CliError::Config(format!(
                        "T = {t} conflicts with N = {n} and h = {h} (N·h = {})",
                        n as f64 * h
                    )));
                }
                n
            }
            (Some(n), None) => n,
            (None, Some(t)) => {
                let n = (t / h).round();
                if t <= 0.0 || t.is_nan() || (n * h - t).abs() > 1e-9 * t.max(1.0) {
                    return Err(CliError::Config(format!(
                        "T = {t} is not a positive multiple of h = {h}"
                    )));
                }
                n as usize
            }
            (None, None) => model.default_steps(),
        };
        if steps == 0 {
            return Err(CliError::Config("N must be at least 1".into()));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        let at_least_one = |name: &str, v: usize| {
            if v >= 1 {
                Ok(v)
            } else {
                Err(CliError::Config(format!("{name} must be at least 1")))
            }
        };
        let cfg = ExperimentConfig {
            model,
            scheme,
            alpha: file.alpha.unwrap_or(params.alpha),
            epsilon: file.epsilon.unwrap_or(params.epsilon),
            beta: file.beta.unwrap_or(params.beta),
            gamma: file.gamma.unwrap_or(params.gamma),
            q_min: file.q_min.unwrap_or(params.q_min),
            q0: file.q0.unwrap_or(0.75),
            p0: file.p0.unwrap_or(-0.25),
            s0: file.s0.unwrap_or(0.08),
            h,
            steps,
            t_final: steps as f64 * h,
            seed: file.seed.unwrap_or(0),
            ensemble: at_least_one("ensemble", file.ensemble.unwrap_or(1))?,
            out: file.out.unwrap_or_else(|| PathBuf::from("output")),
            tol: file.tol.map(|t| positive("tol", t)).transpose()?,
            fd_step: positive("fd_step", file.fd_step.unwrap_or(1e-6))?,
            newton_tol: positive("newton_tol", file.newton_tol.unwrap_or(1e-12))?,
            newton_max_iters: at_least_one("newton_max_iters", file.newton_max_iters.unwrap_or(50))?,
            levels: at_least_one("levels", file.levels.unwrap_or(4) as usize)? as u32,
            paths: at_least_one("paths", file.paths.unwrap_or(50))?,
            index: file.index,
            deterministic: file.deterministic.unwrap_or(false),
        };
        cfg.build_model()?;
        cfg.initial()?;
        Ok(cfg)
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            alpha: self.alpha,
            epsilon: self.epsilon,
            beta: self.beta,
            gamma: self.gamma,
            q_min: self.q_min,
        }
    }

    pub fn build_model(&self) -> Result<std::sync::Arc<dyn stochastic_contact::ExampleModel>, CliError> {
        stochastic_contact::build_model(self.model, &self.params()).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn initial(&self) -> Result<ContactState, CliError> {
        ContactState::scalar(self.q0, self.p0, self.s0, 0.0).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions {
            tol: self.newton_tol,
            max_iters: self.newton_max_iters,
        }
    }

    /// Seeds of the ensemble members, consecutive from `seed`.
    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.ensemble as u64).map(|i| self.seed.wrapping_add(i))
    }
}
