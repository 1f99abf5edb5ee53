//! Damped oscillator with multiplicative noise.
//!
//! `H₀ = ½p² + V(q) + ½αs²`, `H₁ = sin q`. The discrete Lagrangian splits the
//! quadratic action term over both ends of the step,
//! `L_j = ½((q_{j+1} − q_j)/h)² − ½(V(q_j) + V(q_{j+1})) − ¼αs_j² − ¼αs_{j+1}²`,
//! with `H₁^j = sin q_j`. The contact scheme is implicit only through
//! `s_{j+1}`, which solves a quadratic:
//!
//! ```text
//! q_{j+1} = q_j + h(1 − ½hαs_j)p_j − h cos(q_j) ΔW_j − ½h² V′(q_j)
//! s_{j+1} = s_j + (q_{j+1} − q_j)²/(2h) − ½h(V(q_{j+1}) + V(q_j)) − ¼αh s_j² − ¼αh s_{j+1}² − sin(q_j) ΔW_j
//! p_{j+1} = [(1 − ½hαs_j)p_j − cos(q_j) ΔW_j − ½h(V′(q_{j+1}) + V′(q_j))] / (1 + ½hαs_{j+1})
//! ```
//!
//! The `h` factor on the noise term of the position update is what the
//! momentum matching produces for this discretization; it is kept as is.

use crate::error::{Error, Result};
use crate::herglotz::{check_dims, Dimensions, DiscreteLagrangian, DiscreteLagrangianData, StepResult};
use crate::model::{ContactModel, Gradient, Potential};
use crate::newton::SolverOptions;
use crate::state::ContactState;

use super::{scalar_noise, ExampleModel, ModelKind};

#[derive(Debug, Clone)]
pub struct DampedMultiplicative {
    pub alpha: f64,
    pub potential: Potential,
}

impl DampedMultiplicative {
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_potential(alpha, Potential::harmonic())
    }

    pub fn with_potential(alpha: f64, potential: Potential) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "damping must be finite and >= 0, got {alpha}"
            )));
        }
        Ok(Self { alpha, potential })
    }
}

impl Default for DampedMultiplicative {
    fn default() -> Self {
        Self::new(0.1).expect("default parameters are valid")
    }
}

/// Root of `¼αh·x² + x − c = 0` that tends to `c` as `αh → 0`.
fn implicit_action_root(alpha_h: f64, c: f64) -> Result<f64> {
    let disc = 1.0 + alpha_h * c;
    if disc < 0.0 {
        return Err(Error::ComplexRoot(disc));
    }
    Ok(2.0 * c / (1.0 + disc.sqrt()))
}

pub fn damped_multiplicative_contact_step(
    model: &DampedMultiplicative,
    state: &ContactState,
    h: f64,
    dw: f64,
) -> Result<StepResult> {
    check_dims("state dimension", 1, state.dim())?;
    let (q, p, s) = (state.q()[0], state.p()[0], state.s());
    let a = model.alpha;
    let (v0, dv0) = model.potential.value_and_slope(q);
    let shrink = 1.0 - 0.5 * h * a * s;
    let kick = q.cos() * dw;

    let q1 = q + h * shrink * p - h * kick - 0.5 * h * h * dv0;
    let (v1, dv1) = model.potential.value_and_slope(q1);
    let c = s + (q1 - q).powi(2) / (2.0 * h) - 0.5 * h * (v1 + v0) - 0.25 * a * h * s * s - q.sin() * dw;
    let s1 = implicit_action_root(a * h, c)?;
    let denom = 1.0 + 0.5 * h * a * s1;
    if denom.abs() < crate::herglotz::DEGENERATE_DENOMINATOR {
        return Err(Error::DegenerateDenominator {
            context: "multiplicative momentum update",
            value: denom,
        });
    }
    let p1 = (shrink * p - kick - 0.5 * h * (dv1 + dv0)) / denom;
    let next = ContactState::scalar(q1, p1, s1, state.t() + h)?;
    Ok(StepResult::explicit(next, Some(shrink / denom)))
}

pub fn damped_multiplicative_em_step(
    model: &DampedMultiplicative,
    state: &ContactState,
    h: f64,
    dw: f64,
) -> Result<ContactState> {
    check_dims("state dimension", 1, state.dim())?;
    let (q, p, s) = (state.q()[0], state.p()[0], state.s());
    let a = model.alpha;
    let (v, dv) = model.potential.value_and_slope(q);
    let q1 = q + h * p;
    let velocity = (q1 - q) / h;
    let p1 = p - h * (dv + a * s * velocity) - q.cos() * dw;
    let s1 = s + h * (0.5 * velocity * velocity - v - 0.5 * a * s * s) - q.sin() * dw;
    ContactState::scalar(q1, p1, s1, state.t() + h)
}

impl Dimensions for DampedMultiplicative {
    fn dim(&self) -> usize {
        1
    }
    fn noise_count(&self) -> usize {
        1
    }
}

impl ContactModel for DampedMultiplicative {
    fn hamiltonian(&self, k: usize, state: &ContactState) -> Result<f64> {
        let (q, p, s) = (state.q()[0], state.p()[0], state.s());
        Ok(match k {
            0 => 0.5 * p * p + self.potential.value(q) + 0.5 * self.alpha * s * s,
            _ => q.sin(),
        })
    }

    fn gradient(&self, k: usize, state: &ContactState) -> Result<Gradient> {
        let (q, p, s) = (state.q()[0], state.p()[0], state.s());
        Ok(match k {
            0 => Gradient {
                dq: vec![self.potential.slope(q)],
                dp: vec![p],
                ds: self.alpha * s,
            },
            _ => Gradient {
                dq: vec![q.cos()],
                dp: vec![0.0],
                ds: 0.0,
            },
        })
    }

    fn lagrangian(&self, q: &[f64], qdot: &[f64], s: f64, _t: f64) -> Result<f64> {
        Ok(0.5 * qdot[0] * qdot[0] - self.potential.value(q[0]) - 0.5 * self.alpha * s * s)
    }

    fn params(&self) -> Vec<(&'static str, f64)> {
        vec![("alpha", self.alpha)]
    }
}

impl DiscreteLagrangian for DampedMultiplicative {
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
        let (va, dva) = self.potential.value_and_slope(a);
        let (vb, dvb) = self.potential.value_and_slope(b);
        let v = (b - a) / h;
        let mut d = DiscreteLagrangianData::zeros(1, 1);
        d.l = 0.5 * v * v - 0.5 * (va + vb) - 0.25 * self.alpha * (s_j * s_j + s_next * s_next);
        d.h_k[0] = a.sin();
        d.dl_dq_j[0] = -v / h - 0.5 * dva;
        d.dl_dq_next[0] = v / h - 0.5 * dvb;
        d.dl_ds_j = -0.5 * self.alpha * s_j;
        d.dl_ds_next = -0.5 * self.alpha * s_next;
        d.dh_dq_j[0][0] = a.cos();
        Ok(d)
    }

    fn continuous_lagrangian(&self, q: &[f64], qdot: &[f64], s: f64, t: f64) -> Result<f64> {
        self.lagrangian(q, qdot, s, t)
    }
}

impl ExampleModel for DampedMultiplicative {
    fn kind(&self) -> ModelKind {
        ModelKind::DampedMultiplicative
    }

    fn contact_step(&self, state: &ContactState, h: f64, dw: &[f64], _opts: &SolverOptions) -> Result<StepResult> {
        damped_multiplicative_contact_step(self, state, h, scalar_noise(dw)?)
    }

    fn em_step(&self, state: &ContactState, h: f64, dw: &[f64]) -> Result<ContactState> {
        damped_multiplicative_em_step(self, state, h, scalar_noise(dw)?)
    }

    fn nominal_rate(&self) -> f64 {
        self.alpha
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::step_contact;

    fn x0() -> ContactState {
        ContactState::scalar(0.75, -0.25, 0.08, 0.0).unwrap()
    }

    /// Residuals of the three scheme equations with `(q₁, p₁, s₁)` plugged back in.
    fn scheme_residuals(m: &DampedMultiplicative, x: &ContactState, y: &ContactState, h: f64, dw: f64) -> [f64; 3] {
        let (q0, p0, s0) = (x.q()[0], x.p()[0], x.s());
        let (q1, p1, s1) = (y.q()[0], y.p()[0], y.s());
        let a = m.alpha;
        let dv = |q: f64| q;
        let v = |q: f64| 0.5 * q * q;
        [
            q1 - (q0 + h * (1.0 - 0.5 * h * a * s0) * p0 - h * q0.cos() * dw - 0.5 * dv(q0) * h * h),
            p1 - ((1.0 - 0.5 * h * a * s0) * p0 - q0.cos() * dw - 0.5 * h * (dv(q1) + dv(q0)))
                / (1.0 + 0.5 * h * a * s1),
            s1 - (s0 + (q1 - q0).powi(2) / (2.0 * h)
                - 0.5 * h * (v(q1) + v(q0))
                - 0.25 * a * h * s0 * s0
                - 0.25 * a * h * s1 * s1
                - q0.sin() * dw),
        ]
    }

    #[test]
    fn first_step_satisfies_scheme() {
        let m = DampedMultiplicative::default();
        for &dw in &[0.0, 0.25, -0.4] {
            let r = damped_multiplicative_contact_step(&m, &x0(), 0.1, dw).unwrap();
            for res in scheme_residuals(&m, &x0(), &r.next, 0.1, dw) {
                assert!(res.abs() <= 1e-12, "{res}");
            }
        }
    }

    #[test]
    fn undamped_noise_free_step_has_unit_factor() {
        let m = DampedMultiplicative::new(0.0).unwrap();
        let r = damped_multiplicative_contact_step(&m, &x0(), 0.1, 0.0).unwrap();
        assert_eq!(r.lambda, Some(1.0));
        let (q, p, h) = (0.75, -0.25, 0.1);
        let q1 = q + h * p - 0.5 * h * h * q;
        assert!((r.next.q()[0] - q1).abs() < 1e-15);
        assert!((r.next.p()[0] - (p - 0.5 * h * (q + q1))).abs() < 1e-15);
    }

    #[test]
    fn generic_step_agrees() {
        let m = DampedMultiplicative::default();
        let x = ContactState::scalar(0.3, 0.4, 0.9, 0.0).unwrap();
        let g = step_contact(&m, &x, 0.1, &[0.2], &SolverOptions::default()).unwrap();
        let c = damped_multiplicative_contact_step(&m, &x, 0.1, 0.2).unwrap();
        for (u, v) in g.next.coords().iter().zip(c.next.coords()) {
            assert!((u - v).abs() < 1e-10);
        }
        assert!((g.lambda.unwrap() - c.lambda.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn root_is_continuous_in_alpha_h() {
        assert_eq!(implicit_action_root(0.0, 0.37).unwrap(), 0.37);
        let r = implicit_action_root(1e-8, 0.37).unwrap();
        assert!((r - 0.37).abs() < 1e-8);
        let r = implicit_action_root(0.5, 2.0).unwrap();
        assert!((0.125 * r * r + r - 2.0).abs() < 1e-14);
    }

    #[test]
    fn large_step_has_no_real_root() {
        let m = DampedMultiplicative::new(10.0).unwrap();
        let x = ContactState::scalar(0.0, 0.0, -5.0, 0.0).unwrap();
        assert!(matches!(
            damped_multiplicative_contact_step(&m, &x, 1.0, 0.0),
            Err(Error::ComplexRoot(_))
        ));
    }

    #[test]
    fn em_from_rest_at_origin() {
        let m = DampedMultiplicative::default();
        let x = ContactState::scalar(0.0, 0.0, 0.0, 0.0).unwrap();
        let y = damped_multiplicative_em_step(&m, &x, 0.1, 0.3).unwrap();
        assert_eq!(y.q()[0], 0.0);
        assert!((y.p()[0] + 0.3).abs() < 1e-16);
        assert_eq!(y.s(), 0.0);
    }

    #[test]
    fn em_hand_evaluation() {
        let m = DampedMultiplicative::default();
        let y = damped_multiplicative_em_step(&m, &x0(), 0.1, 0.0).unwrap();
        // q₁ = 0.725, p₁ = −0.25 − 0.1(0.75 + 0.1·0.08·(−0.25)),
        // s₁ = 0.08 + 0.1(0.03125 − 0.28125 − 0.05·0.0064)
        assert!((y.q()[0] - 0.725).abs() < 1e-15);
        assert!((y.p()[0] - (-0.25 - 0.1 * (0.75 - 0.002))).abs() < 1e-14);
        assert!((y.s() - (0.08 + 0.1 * (0.03125 - 0.28125 - 0.00032))).abs() < 1e-14);
    }

    #[test]
    fn em_noise_contribution_is_linear() {
        let m = DampedMultiplicative::default();
        let f = |w| damped_multiplicative_em_step(&m, &x0(), 0.1, w).unwrap().coords();
        let (a, b, c) = (f(0.0), f(0.4), f(0.8));
        for i in 0..3 {
            assert!(((c[i] - a[i]) - 2.0 * (b[i] - a[i])).abs() < 1e-15);
        }
    }
}
