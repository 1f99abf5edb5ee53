//! Numerical checks of the structural properties of the integrators.
//!
//! Contact preservation is tested through the one-step linearization: for a
//! step `x_j ↦ x_{j+1}` with Jacobian `J_j` at fixed noise, a contact scheme
//! satisfies `J_jᵀ η(x_{j+1}) = λ_j η(x_j)` where `η = ds − p·dq`.

mod conformal;
mod contact;
mod convergence;
mod criticality;
mod ensemble;
mod jacobian;

pub use conformal::{conformal_compare, recompute_lambdas, ConformalReference, ConformalSeries};
pub use contact::{contact_residuals, contact_residuals_with, step_residual, ContactReport};
pub use convergence::{self_convergence, ConvergenceRow, ConvergenceTable};
pub use criticality::{criticality_profile, criticality_residual};
pub use ensemble::{ensemble_norms, EnsembleStats};
pub use jacobian::{analytic_step_jacobian, step_jacobian, JacobianMethod, StepJacobian, DEFAULT_FD_STEP};
