//! Continuous-time stochastic contact Hamiltonian systems.
//!
//! A model supplies the drift Hamiltonian `H₀`, the noise Hamiltonians
//! `H₁..H_m`, their analytic partial derivatives and the Lagrangian obtained
//! from `L = p·q̇ − H₀`. In Darboux coordinates the Stratonovich system reads
//!
//! ```text
//! dq = ∂H₀/∂p dt + Σ ∂H_k/∂p ∘ dW^k
//! dp = −(∂H₀/∂q + p ∂H₀/∂s) dt − Σ (∂H_k/∂q + p ∂H_k/∂s) ∘ dW^k
//! ds = (p·∂H₀/∂p − H₀) dt + Σ (p·∂H_k/∂p − H_k) ∘ dW^k
//! ```

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::herglotz::Dimensions;
use crate::state::ContactState;

/// Partial derivatives of a Hamiltonian at a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub dq: Vec<f64>,
    pub dp: Vec<f64>,
    pub ds: f64,
}

impl Gradient {
    pub fn zero(n: usize) -> Self {
        Self {
            dq: vec![0.0; n],
            dp: vec![0.0; n],
            ds: 0.0,
        }
    }
}

/// A stochastic contact Hamiltonian system. Index `k = 0` is the drift
/// Hamiltonian, `1..=m` the noise Hamiltonians.
pub trait ContactModel: Dimensions + Send + Sync {
    /// `H_k(q, p, s)`; callers guarantee `k <= m`.
    fn hamiltonian(&self, k: usize, state: &ContactState) -> Result<f64>;

    /// Analytic partials of `H_k`; callers guarantee `k <= m`.
    fn gradient(&self, k: usize, state: &ContactState) -> Result<Gradient>;

    /// Continuous Lagrangian `L(q, q̇, s, t)`.
    fn lagrangian(&self, q: &[f64], qdot: &[f64], s: f64, t: f64) -> Result<f64>;

    /// Named parameters, for reporting.
    fn params(&self) -> Vec<(&'static str, f64)> {
        Vec::new()
    }
}

fn check_index(model: &(impl ContactModel + ?Sized), k: usize) -> Result<()> {
    if k > model.noise_count() {
        return Err(Error::IndexOutOfRange {
            index: k,
            lo: 0,
            hi: model.noise_count(),
        });
    }
    Ok(())
}

pub fn eval_hamiltonian(model: &(impl ContactModel + ?Sized), k: usize, state: &ContactState) -> Result<f64> {
    check_index(model, k)?;
    model.hamiltonian(k, state)
}

pub fn eval_gradients(model: &(impl ContactModel + ?Sized), k: usize, state: &ContactState) -> Result<Gradient> {
    check_index(model, k)?;
    model.gradient(k, state)
}

/// The vector field `(∂H/∂p, −(∂H/∂q + p ∂H/∂s), p·∂H/∂p − H)` of one
/// Hamiltonian, in flat `(q, p, s)` layout.
pub fn contact_vector_field(model: &(impl ContactModel + ?Sized), k: usize, state: &ContactState) -> Result<Vec<f64>> {
    let n = state.dim();
    let h = eval_hamiltonian(model, k, state)?;
    let g = eval_gradients(model, k, state)?;
    let p = state.p();
    let mut v = Vec::with_capacity(2 * n + 1);
    v.extend_from_slice(&g.dp);
    v.extend((0..n).map(|i| -(g.dq[i] + p[i] * g.ds)));
    let p_dot_dp: f64 = p.iter().zip(&g.dp).map(|(a, b)| a * b).sum();
    v.push(p_dot_dp - h);
    Ok(v)
}

type PotentialFn = dyn Fn(f64) -> (f64, f64) + Send + Sync;
type CurvatureFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A one-dimensional potential `V(q)` returning `(V, V′)`, optionally with
/// `V″` for analytic step Jacobians.
#[derive(Clone)]
pub struct Potential {
    eval: Arc<PotentialFn>,
    curvature: Option<Arc<CurvatureFn>>,
}

impl Potential {
    pub fn new(eval: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
            curvature: None,
        }
    }

    pub fn with_curvature(mut self, c: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.curvature = Some(Arc::new(c));
        self
    }

    /// `V(q) = q²/2`.
    pub fn harmonic() -> Self {
        Self::new(|q| (0.5 * q * q, q)).with_curvature(|_| 1.0)
    }

    pub fn value(&self, q: f64) -> f64 {
        (self.eval)(q).0
    }

    pub fn slope(&self, q: f64) -> f64 {
        (self.eval)(q).1
    }

    pub fn value_and_slope(&self, q: f64) -> (f64, f64) {
        (self.eval)(q)
    }

    pub fn curvature(&self, q: f64) -> Option<f64> {
        self.curvature.as_ref().map(|c| c(q))
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("curvature", &self.curvature.is_some())
            .finish_non_exhaustive()
    }
}

impl Default for Potential {
    fn default() -> Self {
        Self::harmonic()
    }
}
