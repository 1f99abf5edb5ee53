//! Kepler problem with linear drag and position-dependent noise.
//!
//! `H₀ = ½p² − 1/|q| + βs`, `H₁ = γq` on the half-line `q > q_min`. The
//! discrete Lagrangian evaluates the potential at the midpoint,
//! `L_j = ½((q_{j+1} − q_j)/h)² + 2/|q_j + q_{j+1}| − ½β(s_j + s_{j+1})`,
//! with `H₁^j = γq_j`. The contact scheme couples `(q_{j+1}, p_{j+1})`:
//!
//! ```text
//! q_{j+1} = q_j + ½h[(1 + ½βh)p_{j+1} + (1 − ½βh)p_j − γΔW_j]
//! p_{j+1} = [(q_{j+1} − q_j)/h − 2h/σ²] / (1 + ½βh),   σ = q_{j+1} + q_j
//! s_{j+1}(1 + ½βh) = s_j(1 − ½βh) + (q_{j+1} − q_j)²/(2h) + 2h/|σ| − γq_jΔW_j
//! ```
//!
//! with `λ = (1 − ½βh)/(1 + ½βh)`. The action update carries `+2h/|σ|`, the
//! sign that `h·L_j` produces.
//!
//! Eliminating `p_{j+1}` leaves `σ − 2q_j + 2h²/σ² = h((1 − ½βh)p_j − γΔW_j)`,
//! whose left side is bounded below by `1.5·(4h²)^{1/3} − 2q_j` on `σ > 0`.
//! Fast infall towards the origin can push the right side under that bound, and
//! the step then has no solution; this is reported as a domain error.

use crate::error::{Error, Result};
use crate::herglotz::{check_dims, Dimensions, DiscreteLagrangian, DiscreteLagrangianData, StepResult};
use crate::model::{ContactModel, Gradient};
use crate::newton::{self, SolverOptions};
use crate::state::ContactState;

use super::{scalar_noise, ExampleModel, ModelKind};

/// Default singularity guard.
pub const KEPLER_Q_MIN: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct KeplerDrag {
    pub beta: f64,
    pub gamma: f64,
    pub q_min: f64,
}

impl KeplerDrag {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        Self::with_guard(beta, gamma, KEPLER_Q_MIN)
    }

    pub fn with_guard(beta: f64, gamma: f64, q_min: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) || !gamma.is_finite() || q_min.is_nan() || q_min <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "need beta >= 0, finite gamma and q_min > 0 (beta={beta}, gamma={gamma}, q_min={q_min})"
            )));
        }
        Ok(Self { beta, gamma, q_min })
    }

    fn guard(&self, q: f64) -> Result<()> {
        if !q.is_finite() || q <= self.q_min {
            return Err(Error::Domain(format!(
                "kepler singularity: q = {q} is not above q_min = {}",
                self.q_min
            )));
        }
        Ok(())
    }
}

impl Default for KeplerDrag {
    fn default() -> Self {
        Self::new(0.01, 0.1).expect("default parameters are valid")
    }
}

pub fn kepler_contact_step(
    model: &KeplerDrag,
    state: &ContactState,
    h: f64,
    dw: f64,
    opts: &SolverOptions,
) -> Result<StepResult> {
    check_dims("state dimension", 1, state.dim())?;
    let (q, p, s) = (state.q()[0], state.p()[0], state.s());
    model.guard(q)?;
    let (b, g) = (model.beta, model.gamma);
    let plus = 1.0 + 0.5 * b * h;
    let minus = 1.0 - 0.5 * b * h;

    let residual = |x: &[f64]| -> Result<Vec<f64>> {
        let (q1, p1) = (x[0], x[1]);
        model.guard(q1)?;
        let sum = q1 + q;
        Ok(vec![
            q1 - q - 0.5 * h * (plus * p1 + minus * p - g * dw),
            p1 - ((q1 - q) / h - 2.0 * h / (sum * sum)) / plus,
        ])
    };
    let jacobian = |x: &[f64]| -> Result<Vec<f64>> {
        let sum = x[0] + q;
        Ok(vec![
            1.0,
            -0.5 * h * plus,
            -(1.0 / h + 4.0 * h / (sum * sum * sum)) / plus,
            1.0,
        ])
    };
    // σ + 2h²/σ² never drops below this on σ > 0
    let floor = 1.5 * (4.0 * h * h).cbrt();
    let rhs = 2.0 * q + h * (minus * p - g * dw);
    if rhs < floor {
        return Err(Error::Domain(format!(
            "kepler step from q = {q}, p = {p} has no solution (infall too fast for h = {h})"
        )));
    }
    let sol = newton::solve_analytic(residual, jacobian, vec![q + h * p, p], opts)?;
    let (q1, p1) = (sol.x[0], sol.x[1]);
    let s1 = (s * minus + (q1 - q).powi(2) / (2.0 * h) + 2.0 * h / (q1 + q).abs() - g * q * dw) / plus;
    Ok(StepResult {
        next: ContactState::scalar(q1, p1, s1, state.t() + h)?,
        lambda: Some(minus / plus),
        newton_iters: sol.iters,
        residual: sol.residual,
    })
}

pub fn kepler_em_step(model: &KeplerDrag, state: &ContactState, h: f64, dw: f64) -> Result<ContactState> {
    check_dims("state dimension", 1, state.dim())?;
    let (q, p, s) = (state.q()[0], state.p()[0], state.s());
    model.guard(q)?;
    let (b, g) = (model.beta, model.gamma);
    let q1 = q + h * p;
    let p1 = p - h * (1.0 / (q * q) + b * p) - g * dw;
    let s1 = s + h * (0.5 * p * p + 1.0 / q.abs() - b * s) - g * q * dw;
    ContactState::scalar(q1, p1, s1, state.t() + h)
}

impl Dimensions for KeplerDrag {
    fn dim(&self) -> usize {
        1
    }
    fn noise_count(&self) -> usize {
        1
    }
}

impl ContactModel for KeplerDrag {
    fn hamiltonian(&self, k: usize, state: &ContactState) -> Result<f64> {
        let (q, p, s) = (state.q()[0], state.p()[0], state.s());
        self.guard(q)?;
        Ok(match k {
            0 => 0.5 * p * p - 1.0 / q.abs() + self.beta * s,
            _ => self.gamma * q,
        })
    }

    fn gradient(&self, k: usize, state: &ContactState) -> Result<Gradient> {
        let (q, p) = (state.q()[0], state.p()[0]);
        self.guard(q)?;
        Ok(match k {
            0 => Gradient {
                dq: vec![q.signum() / (q * q)],
                dp: vec![p],
                ds: self.beta,
            },
            _ => Gradient {
                dq: vec![self.gamma],
                dp: vec![0.0],
                ds: 0.0,
            },
        })
    }

    fn lagrangian(&self, q: &[f64], qdot: &[f64], s: f64, _t: f64) -> Result<f64> {
        self.guard(q[0])?;
        Ok(0.5 * qdot[0] * qdot[0] + 1.0 / q[0].abs() - self.beta * s)
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("beta", self.beta), ("gamma", self.gamma), ("q_min", self.q_min)]
    }
}

impl DiscreteLagrangian for KeplerDrag {
    fn eval(
        &self,
        q_j: &[f64],
        q_next: &[f64],
        s_j: f64,
        s_next: f64,
        h: f64,
        _t: f64,
    ) -> Result<DiscreteLagrangianData> {
        let (a, b) = (q_j[0], q_next[0]);
        self.guard(a)?;
        self.guard(b)?;
        let sum = a + b;
        let v = (b - a) / h;
        let pull = -2.0 * sum.signum() / (sum * sum);
        let mut d = DiscreteLagrangianData::zeros(1, 1);
        d.l = 0.5 * v * v + 2.0 / sum.abs() - 0.5 * self.beta * (s_j + s_next);
        d.h_k[0] = self.gamma * a;
        d.dl_dq_j[0] = -v / h + pull;
        d.dl_dq_next[0] = v / h + pull;
        d.dl_ds_j = -0.5 * self.beta;
        d.dl_ds_next = -0.5 * self.beta;
        d.dh_dq_j[0][0] = self.gamma;
        Ok(d)
    }

    fn continuous_lagrangian(&self, q: &[f64], qdot: &[f64], s: f64, t: f64) -> Result<f64> {
        self.lagrangian(q, qdot, s, t)
    }
}

impl ExampleModel for KeplerDrag {
    fn kind(&self) -> ModelKind {
        ModelKind::KeplerDrag
    }

    fn contact_step(&self, state: &ContactState, h: f64, dw: &[f64], opts: &SolverOptions) -> Result<StepResult> {
        kepler_contact_step(self, state, h, scalar_noise(dw)?, opts)
    }

    fn em_step(&self, state: &ContactState, h: f64, dw: &[f64]) -> Result<ContactState> {
        kepler_em_step(self, state, h, scalar_noise(dw)?)
    }

    fn nominal_rate(&self) -> f64 {
        self.beta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::step_euler_maruyama;

    fn x0() -> ContactState {
        ContactState::scalar(0.75, -0.25, 0.08, 0.0).unwrap()
    }

    #[test]
    fn conformal_factor_is_constant() {
        let m = KeplerDrag::default();
        let opts = SolverOptions::default();
        for &dw in &[0.0, 0.3, -0.2] {
            let r = kepler_contact_step(&m, &x0(), 0.1, dw, &opts).unwrap();
            assert!((r.lambda.unwrap() - 0.99900050).abs() < 1e-8);
            assert_eq!(r.lambda, Some(0.9995 / 1.0005));
        }
    }

    #[test]
    fn driftless_noise_free_has_unit_factor() {
        let m = KeplerDrag::new(0.0, 0.0).unwrap();
        let r = kepler_contact_step(&m, &x0(), 0.1, 0.7, &SolverOptions::default()).unwrap();
        assert_eq!(r.lambda, Some(1.0));
    }

    #[test]
    fn em_hand_evaluation() {
        let y = kepler_em_step(&KeplerDrag::default(), &x0(), 0.1, 0.0).unwrap();
        assert!((y.q()[0] - 0.725).abs() < 1e-12);
        assert!((y.p()[0] + 0.4275278).abs() < 1e-6);
        assert!((y.s() - 0.21637833).abs() < 1e-6);
    }

    #[test]
    fn em_matches_generic_em() {
        let m = KeplerDrag::default();
        for &w in &[0.0, 0.2, -0.3] {
            let a = kepler_em_step(&m, &x0(), 0.1, w).unwrap();
            let b = step_euler_maruyama(&m, &x0(), 0.1, &[w]).unwrap();
            for (u, v) in a.coords().iter().zip(b.coords()) {
                assert!((u - v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn em_without_noise_amplitude_ignores_increment() {
        let m = KeplerDrag::new(0.01, 0.0).unwrap();
        let a = kepler_em_step(&m, &x0(), 0.1, 0.0).unwrap();
        let b = kepler_em_step(&m, &x0(), 0.1, 1.3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn singularity_is_a_domain_error() {
        let m = KeplerDrag::default();
        let x = ContactState::scalar(0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(kepler_em_step(&m, &x, 0.1, 0.0), Err(Error::Domain(_))));
        assert!(matches!(
            kepler_contact_step(&m, &x, 0.1, 0.0, &SolverOptions::default()),
            Err(Error::Domain(_))
        ));
        let x = ContactState::scalar(-0.5, 1.0, 0.0, 0.0).unwrap();
        assert!(m.hamiltonian(0, &x).is_err());
    }

    #[test]
    fn reference_orbit_reaches_the_singularity() {
        // negative energy: the orbit falls into the origin near t = 0.5 and the
        // implicit step loses its root before the guard is reached
        let m = KeplerDrag::default();
        let opts = SolverOptions::default();
        let mut x = x0();
        let mut taken = 0;
        let err = loop {
            match kepler_contact_step(&m, &x, 0.1, 0.0, &opts) {
                Ok(r) => {
                    x = r.next;
                    taken += 1;
                }
                Err(e) => break e,
            }
        };
        assert_eq!(taken, 5);
        assert!(matches!(err, Error::Domain(_)), "{err}");
    }
}
