//! Stochastic contact variational integrators.
//!
//! A stochastic contact Hamiltonian system on `(q, p, s)` is discretized
//! through a discrete Lagrangian and the stochastic Herglotz action
//! recursion. The resulting one-step maps rescale the contact form
//! `η = ds − p·dq` by a computable conformal factor at every step. The crate
//! provides the generic integrator, three closed-form example systems with
//! Euler–Maruyama baselines, replayable Wiener paths and the diagnostics
//! that check these structural properties numerically.

pub mod diagnostics;
pub mod error;
pub mod herglotz;
pub mod integrate;
pub mod model;
pub mod models;
pub mod newton;
pub mod noise;
pub mod state;

pub use error::{Error, Result};
pub use herglotz::{
    action_recursion, conformal_factor, step_contact, DEQuantities, Dimensions, DiscreteLagrangian,
    DiscreteLagrangianData, StepResult,
};
pub use integrate::{
    integrate, step_euler_maruyama, GenericContact, GenericEm, IntegrationFailure, Stepper, Trajectory,
};
pub use model::{contact_vector_field, eval_gradients, eval_hamiltonian, ContactModel, Gradient, Potential};
pub use models::{build_model, ClosedFormContact, ClosedFormEm, ExampleModel, ModelKind, ModelParams};
pub use newton::SolverOptions;
pub use noise::{generate_path, refine, WienerPath};
pub use state::{contact_form_at, ContactForm, ContactState};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest round-trip-safe text form used in every CSV.
pub(crate) fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}
