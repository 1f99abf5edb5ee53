use crate::error::{Error, Result};
use crate::herglotz::{conformal_factor, DiscreteLagrangian};
use crate::integrate::Trajectory;
use crate::model::{eval_gradients, ContactModel};

/// Reference value against which each step's conformal factor is compared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConformalReference {
    /// `exp` of the trapezoid rule for `∫∂L/∂s dτ − Σ_k ∫∂H_k/∂s ∘ dW^k`
    /// over the step, with `∂L/∂s = −∂H₀/∂s`.
    Continuous,
    /// `exp(h(∂L_j/∂s_j + ∂L_j/∂s_{j+1}) − Σ_k (∂H_k^j/∂s_j + ∂H_k^j/∂s_{j+1}) ΔW^k)`,
    /// the first-order expansion of the discrete factor.
    Discrete,
    /// `exp(−rate·h)`.
    Nominal(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConformalSeries {
    pub lambda: Vec<f64>,
    pub reference: Vec<f64>,
    pub abs_diff: Vec<f64>,
    pub max_abs_diff: f64,
}

/// Compares the recorded conformal factors of `traj` with a reference.
pub fn conformal_compare<M>(traj: &Trajectory, model: &M, mode: ConformalReference) -> Result<ConformalSeries>
where
    M: ContactModel + DiscreteLagrangian + ?Sized,
{
    let h = traj.h;
    let m = model.noise_count();
    let mut lambda = Vec::with_capacity(traj.steps());
    let mut reference = Vec::with_capacity(traj.steps());
    for j in 0..traj.steps() {
        let l = traj.lambdas[j].ok_or(Error::InvalidArgument("trajectory carries no conformal factors".into()))?;
        let (a, b) = (&traj.states[j], &traj.states[j + 1]);
        let dw = &traj.increments[j];
        let exponent = match mode {
            ConformalReference::Continuous => {
                let mut e = -0.5 * h * (eval_gradients(model, 0, a)?.ds + eval_gradients(model, 0, b)?.ds);
                for (k, w) in dw.iter().enumerate().take(m) {
                    let slope = eval_gradients(model, k + 1, a)?.ds + eval_gradients(model, k + 1, b)?.ds;
                    e -= 0.5 * slope * w;
                }
                e
            }
            ConformalReference::Discrete => {
                let d = model.eval(a.q(), b.q(), a.s(), b.s(), h, a.t())?;
                let mut e = h * (d.dl_ds_j + d.dl_ds_next);
                for (k, w) in dw.iter().enumerate().take(m) {
                    e -= (d.dh_ds_j[k] + d.dh_ds_next[k]) * w;
                }
                e
            }
            ConformalReference::Nominal(rate) => -rate * h,
        };
        lambda.push(l);
        reference.push(exponent.exp());
    }
    let abs_diff: Vec<f64> = lambda.iter().zip(&reference).map(|(a, b)| (a - b).abs()).collect();
    let max_abs_diff = abs_diff.iter().fold(0.0_f64, |a, &b| a.max(b));
    Ok(ConformalSeries {
        lambda,
        reference,
        abs_diff,
        max_abs_diff,
    })
}

/// Conformal factors recomputed from the trajectory's own data through `ld`.
pub fn recompute_lambdas(ld: &(impl DiscreteLagrangian + ?Sized), traj: &Trajectory) -> Result<Vec<f64>> {
    (0..traj.steps())
        .map(|j| {
            let (a, b) = (&traj.states[j], &traj.states[j + 1]);
            let d = ld.eval(a.q(), b.q(), a.s(), b.s(), traj.h, a.t())?;
            conformal_factor(&d, traj.h, &traj.increments[j])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::integrate;
    use crate::models::{ClosedFormContact, DampedAdditive, KeplerDrag};
    use crate::noise::generate_path;
    use crate::state::ContactState;

    fn x0() -> ContactState {
        ContactState::scalar(0.75, -0.25, 0.08, 0.0).unwrap()
    }

    #[test]
    fn additive_model_reference_is_exponential_damping() {
        let model = DampedAdditive::default();
        let path = generate_path(8, 1, 30, 0.1).unwrap();
        let traj = integrate(&ClosedFormContact::new(&model), x0(), &path).unwrap();
        for mode in [ConformalReference::Continuous, ConformalReference::Nominal(0.1)] {
            let c = conformal_compare(&traj, &model, mode).unwrap();
            for (r, d) in c.reference.iter().zip(&c.abs_diff) {
                assert!((r - (-0.01f64).exp()).abs() < 1e-15);
                assert!((d - 4.9834e-5).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn kepler_factor_is_close_to_exponential() {
        let model = KeplerDrag::default();
        let path = generate_path(8, 1, 30, 0.1).unwrap();
        // outgoing orbit with positive energy
        let x = ContactState::scalar(1.0, 1.5, 0.08, 0.0).unwrap();
        let traj = integrate(&ClosedFormContact::new(&model), x, &path).unwrap();
        let c = conformal_compare(&traj, &model, ConformalReference::Continuous).unwrap();
        assert!(c.max_abs_diff <= 2e-7);
        assert_eq!(recompute_lambdas(&model, &traj).unwrap(), c.lambda);
    }

    #[test]
    fn action_free_model_has_unit_factors() {
        let model = DampedAdditive::new(0.0, 0.3).unwrap();
        let path = generate_path(8, 1, 5, 0.1).unwrap();
        let traj = integrate(&ClosedFormContact::new(&model), x0(), &path).unwrap();
        let c = conformal_compare(&traj, &model, ConformalReference::Discrete).unwrap();
        assert!(c.lambda.iter().chain(&c.reference).all(|&v| v == 1.0));
    }
}
