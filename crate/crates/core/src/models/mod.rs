//! The three one-dimensional example systems with their closed-form steppers.

mod damped_additive;
mod damped_multiplicative;
mod kepler;

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;
use std::sync::Arc;

pub use damped_additive::{
    damped_additive_contact_jacobian, damped_additive_contact_step, damped_additive_em_step, DampedAdditive,
};
pub use damped_multiplicative::{
    damped_multiplicative_contact_step, damped_multiplicative_em_step, DampedMultiplicative,
};
pub use kepler::{kepler_contact_step, kepler_em_step, KeplerDrag, KEPLER_Q_MIN};

use crate::error::{Error, Result};
use crate::herglotz::{check_dims, Dimensions, DiscreteLagrangian, StepResult};
use crate::integrate::Stepper;
use crate::model::ContactModel;
use crate::newton::SolverOptions;
use crate::state::ContactState;

/// A registered example: continuous model, discrete Lagrangian and the
/// closed-form contact and Euler–Maruyama steppers.
pub trait ExampleModel: ContactModel + DiscreteLagrangian {
    fn kind(&self) -> ModelKind;

    fn contact_step(&self, state: &ContactState, h: f64, dw: &[f64], opts: &SolverOptions) -> Result<StepResult>;

    fn em_step(&self, state: &ContactState, h: f64, dw: &[f64]) -> Result<ContactState>;

    /// Damping rate `c` of the nominal conformal factor `exp(−c h)`.
    fn nominal_rate(&self) -> f64;

    /// Exact derivative of the contact step, when available.
    fn analytic_step_jacobian(&self, _state: &ContactState, _h: f64, _dw: &[f64]) -> Option<Result<Vec<f64>>> {
        None
    }
}

pub(crate) fn scalar_noise(dw: &[f64]) -> Result<f64> {
    check_dims("noise increments", 1, dw.len())?;
    Ok(dw[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    DampedOscillatorAdditive,
    DampedMultiplicative,
    KeplerDrag,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [
        ModelKind::DampedOscillatorAdditive,
        ModelKind::DampedMultiplicative,
        ModelKind::KeplerDrag,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::DampedOscillatorAdditive => "damped-oscillator-additive",
            ModelKind::DampedMultiplicative => "damped-multiplicative",
            ModelKind::KeplerDrag => "kepler-drag",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
            Error::InvalidArgument(format!("unknown model '{name}'; valid models: {}", names.join(", ")))
        })
    }

    /// Trajectory length of the reference experiments at `h = 0.1`.
    pub fn default_steps(self) -> usize {
        match self {
            ModelKind::KeplerDrag => 2000,
            _ => 200,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_name(s)
    }
}

/// Scalar parameters of all three examples; each model reads its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
    pub q_min: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            epsilon: 0.02,
            beta: 0.01,
            gamma: 0.1,
            q_min: KEPLER_Q_MIN,
        }
    }
}

pub fn build_model(kind: ModelKind, params: &ModelParams) -> Result<Arc<dyn ExampleModel>> {
    Ok(match kind {
        ModelKind::DampedOscillatorAdditive => Arc::new(DampedAdditive::new(params.alpha, params.epsilon)?),
        ModelKind::DampedMultiplicative => Arc::new(DampedMultiplicative::new(params.alpha)?),
        ModelKind::KeplerDrag => Arc::new(KeplerDrag::with_guard(params.beta, params.gamma, params.q_min)?),
    })
}

/// Closed-form contact scheme of an example model.
#[derive(Debug, Clone)]
pub struct ClosedFormContact<P> {
    pub model: P,
    pub opts: SolverOptions,
}

impl<P> ClosedFormContact<P> {
    pub fn new(model: P) -> Self {
        Self {
            model,
            opts: SolverOptions::default(),
        }
    }
}

impl<P> Dimensions for ClosedFormContact<P>
where
    P: Deref,
    P::Target: ExampleModel,
{
    fn dim(&self) -> usize {
        self.model.dim()
    }
    fn noise_count(&self) -> usize {
        self.model.noise_count()
    }
}

impl<P> Stepper for ClosedFormContact<P>
where
    P: Deref + Send + Sync,
    P::Target: ExampleModel,
{
    fn step(&self, state: &ContactState, h: f64, dw: &[f64]) -> Result<StepResult> {
        self.model.contact_step(state, h, dw, &self.opts)
    }

    fn is_contact(&self) -> bool {
        true
    }
}

/// Closed-form Euler–Maruyama scheme of an example model.
#[derive(Debug, Clone)]
pub struct ClosedFormEm<P> {
    pub model: P,
}

impl<P> Dimensions for ClosedFormEm<P>
where
    P: Deref,
    P::Target: ExampleModel,
{
    fn dim(&self) -> usize {
        self.model.dim()
    }
    fn noise_count(&self) -> usize {
        self.model.noise_count()
    }
}

impl<P> Stepper for ClosedFormEm<P>
where
    P: Deref + Send + Sync,
    P::Target: ExampleModel,
{
    fn step(&self, state: &ContactState, h: f64, dw: &[f64]) -> Result<StepResult> {
        Ok(StepResult::explicit(self.model.em_step(state, h, dw)?, None))
    }

    fn is_contact(&self) -> bool {
        false
    }
}
