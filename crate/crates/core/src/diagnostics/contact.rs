use crate::error::{Error, Result};
use crate::integrate::{Stepper, Trajectory};
use crate::state::{contact_form_at, ContactState};

use super::jacobian::{step_jacobian, StepJacobian};

/// Per-step defect of the pullback identity `Jᵀ η(x_{j+1}) = λ_j η(x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactReport {
    /// `r_j = ‖Jᵀ_j η(x_{j+1}) − λ_j η(x_j)‖∞`.
    pub residuals: Vec<f64>,
    pub max: f64,
    pub lambdas: Vec<f64>,
    /// Whether `lambdas` were fitted rather than read from the trajectory.
    pub fitted: bool,
}

impl ContactReport {
    pub fn mean(&self) -> f64 {
        if self.residuals.is_empty() {
            return 0.0;
        }
        self.residuals.iter().sum::<f64>() / self.residuals.len() as f64
    }
}

/// Residual of one step given its Jacobian. With `lambda = None` the factor
/// is fitted as the `s`-component of the pullback.
pub fn step_residual(jac: &StepJacobian, from: &ContactState, to: &ContactState, lambda: Option<f64>) -> (f64, f64) {
    let pulled = jac.pullback(contact_form_at(to).coeffs());
    let eta = contact_form_at(from);
    let lambda = lambda.unwrap_or(pulled[pulled.len() - 1]);
    let r = pulled
        .iter()
        .zip(eta.coeffs())
        .fold(0.0_f64, |acc, (a, b)| acc.max((a - lambda * b).abs()));
    (r, lambda)
}

/// Contact residuals of `traj` using central-difference Jacobians of `stepper`.
///
/// Conformal factors come from the trajectory when it records them and are
/// fitted otherwise.
pub fn contact_residuals(stepper: &(impl Stepper + ?Sized), traj: &Trajectory, fd_step: f64) -> Result<ContactReport> {
    contact_residuals_with(traj, |x, h, dw| step_jacobian(stepper, x, h, dw, fd_step))
}

/// Contact residuals with a caller-supplied step Jacobian.
pub fn contact_residuals_with<F>(traj: &Trajectory, mut jacobian: F) -> Result<ContactReport>
where
    F: FnMut(&ContactState, f64, &[f64]) -> Result<StepJacobian>,
{
    let n = traj.steps();
    let recorded = traj.lambdas.iter().all(Option::is_some);
    let mut residuals = Vec::with_capacity(n);
    let mut lambdas = Vec::with_capacity(n);
    for j in 0..n {
        let jac = jacobian(&traj.states[j], traj.h, &traj.increments[j]).map_err(|e| Error::Step {
            step: j,
            source: Box::new(e),
        })?;
        let given = if recorded { traj.lambdas[j] } else { None };
        let (r, l) = step_residual(&jac, &traj.states[j], &traj.states[j + 1], given);
        residuals.push(r);
        lambdas.push(l);
    }
    let max = residuals.iter().fold(0.0_f64, |a, &b| a.max(b));
    Ok(ContactReport {
        residuals,
        max,
        lambdas,
        fitted: !recorded,
    })
}
