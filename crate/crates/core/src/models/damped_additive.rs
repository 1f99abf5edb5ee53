//! Damped oscillator with additive noise in the action.
//!
//! `H₀ = ½p² + V(q) + αs`, `H₁ = ε`, `L = ½q̇² − V(q) − αs`, discretized as
//! `L_j = ½((q_{j+1} − q_j)/h)² − ½(V(q_j) + V(q_{j+1})) − αs_j` with
//! `H₁^j = ε`. The resulting contact scheme is explicit:
//!
//! ```text
//! q_{j+1} = q_j + h(1 − αh)p_j − ½h² V′(q_j)
//! p_{j+1} = (1 − αh)p_j − ½h (V′(q_j) + V′(q_{j+1}))
//! s_{j+1} = s_j + (q_{j+1} − q_j)²/(2h) − ½h (V(q_{j+1}) + V(q_j)) − αh s_j − ε ΔW_j
//! ```
//!
//! with constant conformal factor `λ = 1 − αh`.

use crate::error::{Error, Result};
use crate::herglotz::{check_dims, Dimensions, DiscreteLagrangian, DiscreteLagrangianData, StepResult};
use crate::model::{ContactModel, Gradient, Potential};
use crate::newton::SolverOptions;
use crate::state::ContactState;

use super::{scalar_noise, ExampleModel, ModelKind};

#[derive(Debug, Clone)]
pub struct DampedAdditive {
    pub alpha: f64,
    pub epsilon: f64,
    pub potential: Potential,
}

impl DampedAdditive {
    pub fn new(alpha: f64, epsilon: f64) -> Result<Self> {
        Self::with_potential(alpha, epsilon, Potential::harmonic())
    }

    pub fn with_potential(alpha: f64, epsilon: f64, potential: Potential) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "damping must be finite and >= 0 (alpha={alpha}, epsilon={epsilon})"
            )));
        }
        Ok(Self {
            alpha,
            epsilon,
            potential,
        })
    }
}

impl Default for DampedAdditive {
    fn default() -> Self {
        Self::new(0.1, 0.02).expect("default parameters are valid")
    }
}

pub fn damped_additive_contact_step(
    model: &DampedAdditive,
    state: &ContactState,
    h: f64,
    dw: f64,
) -> Result<StepResult> {
    check_dims("state dimension", 1, state.dim())?;
    let (q, p, s) = (state.q()[0], state.p()[0], state.s());
    let a = model.alpha;
    let (v0, dv0) = model.potential.value_and_slope(q);
    let q1 = q + h * (1.0 - h * a) * p - 0.5 * h * h * dv0;
    let (v1, dv1) = model.potential.value_and_slope(q1);
    let p1 = (1.0 - h * a) * p - 0.5 * h * (dv0 + dv1);
    let s1 = s + (q1 - q).powi(2) / (2.0 * h) - 0.5 * h * (v1 + v0) - a * h * s - model.epsilon * dw;
    let next = ContactState::scalar(q1, p1, s1, state.t() + h)?;
    Ok(StepResult::explicit(next, Some(1.0 - a * h)))
}

pub fn damped_additive_em_step(model: &DampedAdditive, state: &ContactState, h: f64, dw: f64) -> Result<ContactState> {
    check_dims("state dimension", 1, state.dim())?;
    let (q, p, s) = (state.q()[0], state.p()[0], state.s());
    let a = model.alpha;
    let (v, dv) = model.potential.value_and_slope(q);
    let q1 = q + h * p;
    let p1 = p - h * (dv + a * p);
    let s1 = s + 0.5 * h * p * p - h * v - a * h * s - model.epsilon * dw;
    ContactState::scalar(q1, p1, s1, state.t() + h)
}

/// Analytic derivative of the contact step, row-major `3 × 3` in `(q, p, s)`.
pub fn damped_additive_contact_jacobian(model: &DampedAdditive, state: &ContactState, h: f64) -> Result<Vec<f64>> {
    let q = state.q()[0];
    let a = model.alpha;
    let curvature = |x: f64| {
        model
            .potential
            .curvature(x)
            .ok_or_else(|| Error::InvalidArgument("potential has no curvature".into()))
    };
    let dv0 = model.potential.slope(q);
    let q1 = q + h * (1.0 - h * a) * state.p()[0] - 0.5 * h * h * dv0;
    let dv1 = model.potential.slope(q1);
    let (c0, c1) = (curvature(q)?, curvature(q1)?);

    let q1_q = 1.0 - 0.5 * h * h * c0;
    let q1_p = h * (1.0 - h * a);
    let p1_q = -0.5 * h * (c0 + c1 * q1_q);
    let p1_p = (1.0 - h * a) - 0.5 * h * c1 * q1_p;
    let v = (q1 - q) / h;
    let s1_q = v * (q1_q - 1.0) - 0.5 * h * (dv1 * q1_q + dv0);
    let s1_p = v * q1_p - 0.5 * h * dv1 * q1_p;
    let s1_s = 1.0 - a * h;
    Ok(vec![
        q1_q, q1_p, 0.0, //
        p1_q, p1_p, 0.0, //
        s1_q, s1_p, s1_s,
    ])
}

impl Dimensions for DampedAdditive {
    fn dim(&self) -> usize {
        1
    }
    fn noise_count(&self) -> usize {
        1
    }
}

impl ContactModel for DampedAdditive {
    fn hamiltonian(&self, k: usize, state: &ContactState) -> Result<f64> {
        let (q, p, s) = (state.q()[0], state.p()[0], state.s());
        Ok(match k {
            0 => 0.5 * p * p + self.potential.value(q) + self.alpha * s,
            _ => self.epsilon,
        })
    }

    fn gradient(&self, k: usize, state: &ContactState) -> Result<Gradient> {
        let (q, p) = (state.q()[0], state.p()[0]);
        Ok(match k {
            0 => Gradient {
                dq: vec![self.potential.slope(q)],
                dp: vec![p],
                ds: self.alpha,
            },
            _ => Gradient::zero(1),
        })
    }

    fn lagrangian(&self, q: &[f64], qdot: &[f64], s: f64, _t: f64) -> Result<f64> {
        Ok(0.5 * qdot[0] * qdot[0] - self.potential.value(q[0]) - self.alpha * s)
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("alpha", self.alpha), ("epsilon", self.epsilon)]
    }
}

impl DiscreteLagrangian for DampedAdditive {
    fn eval(
        &self,
        q_j: &[f64],
        q_next: &[f64],
        s_j: f64,
        _s_next: f64,
        h: f64,
        _t: f64,
    ) -> Result<DiscreteLagrangianData> {
        let (a, b) = (q_j[0], q_next[0]);
        let (va, dva) = self.potential.value_and_slope(a);
        let (vb, dvb) = self.potential.value_and_slope(b);
        let v = (b - a) / h;
        let mut d = DiscreteLagrangianData::zeros(1, 1);
        d.l = 0.5 * v * v - 0.5 * (va + vb) - self.alpha * s_j;
        d.h_k[0] = self.epsilon;
        d.dl_dq_j[0] = -v / h - 0.5 * dva;
        d.dl_dq_next[0] = v / h - 0.5 * dvb;
        d.dl_ds_j = -self.alpha;
        Ok(d)
    }

    fn continuous_lagrangian(&self, q: &[f64], qdot: &[f64], s: f64, t: f64) -> Result<f64> {
        self.lagrangian(q, qdot, s, t)
    }
}

impl ExampleModel for DampedAdditive {
    fn kind(&self) -> ModelKind {
        ModelKind::DampedOscillatorAdditive
    }

    fn contact_step(&self, state: &ContactState, h: f64, dw: &[f64], _opts: &SolverOptions) -> Result<StepResult> {
        damped_additive_contact_step(self, state, h, scalar_noise(dw)?)
    }

    fn em_step(&self, state: &ContactState, h: f64, dw: &[f64]) -> Result<ContactState> {
        damped_additive_em_step(self, state, h, scalar_noise(dw)?)
    }

    fn nominal_rate(&self) -> f64 {
        self.alpha
    }

    fn analytic_step_jacobian(&self, state: &ContactState, h: f64, _dw: &[f64]) -> Option<Result<Vec<f64>>> {
        self.potential
            .curvature(state.q()[0])
            .map(|_| damped_additive_contact_jacobian(self, state, h))
    }
}
