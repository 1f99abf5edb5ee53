use crate::error::{Error, Result};
use crate::integrate::Stepper;
use crate::models::ExampleModel;
use crate::state::ContactState;

/// Relative perturbation scale: coordinate `i` moves by `fd_step·(1 + |xᵢ|)`.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianMethod {
    Analytic,
    FiniteDifference,
}

/// Derivative of a one-step map in flat `(q, p, s)` coordinates at fixed noise.
#[derive(Debug, Clone, PartialEq)]
pub struct StepJacobian {
    /// Row-major `(2n+1) × (2n+1)`; row `r` is the derivative of output `r`.
    pub matrix: Vec<f64>,
    pub size: usize,
    pub method: JacobianMethod,
    pub fd_step: Option<f64>,
}

impl StepJacobian {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.size + col]
    }

    /// `Jᵀ a`, the pullback of a covector `a` at the image point.
    pub fn pullback(&self, a: &[f64]) -> Vec<f64> {
        (0..self.size)
            .map(|c| (0..self.size).map(|r| self.get(r, c) * a[r]).sum())
            .collect()
    }
}

/// Central-difference Jacobian of `stepper` at `state` with the increment `dw` held fixed.
pub fn step_jacobian(
    stepper: &(impl Stepper + ?Sized),
    state: &ContactState,
    h: f64,
    dw: &[f64],
    fd_step: f64,
) -> Result<StepJacobian> {
    if fd_step.is_nan() || fd_step <= 0.0 {
        return Err(Error::InvalidArgument(format!("fd_step must be > 0, got {fd_step}")));
    }
    let x = state.coords();
    let size = x.len();
    let mut matrix = vec![0.0; size * size];
    let eval = |coord: usize, sign: char, delta: f64| -> Result<Vec<f64>> {
        let mut y = x.clone();
        y[coord] += delta;
        let shifted = ContactState::from_coords(&y, state.t())?;
        stepper
            .step(&shifted, h, dw)
            .map(|r| r.next.coords())
            .map_err(|e| Error::Perturbation {
                coord,
                sign,
                source: Box::new(e),
            })
    };
    for c in 0..size {
        let delta = fd_step * (1.0 + x[c].abs());
        let plus = eval(c, '+', delta)?;
        let minus = eval(c, '-', -delta)?;
        for r in 0..size {
            matrix[r * size + c] = (plus[r] - minus[r]) / (2.0 * delta);
        }
    }
    Ok(StepJacobian {
        matrix,
        size,
        method: JacobianMethod::FiniteDifference,
        fd_step: Some(fd_step),
    })
}

/// Exact contact-step Jacobian of an example model, when it has one.
pub fn analytic_step_jacobian(
    model: &(impl ExampleModel + ?Sized),
    state: &ContactState,
    h: f64,
    dw: &[f64],
) -> Option<Result<StepJacobian>> {
    model.analytic_step_jacobian(state, h, dw).map(|m| {
        let matrix = m?;
        Ok(StepJacobian {
            size: state.coords().len(),
            matrix,
            method: JacobianMethod::Analytic,
            fd_step: None,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ClosedFormContact, ClosedFormEm, DampedAdditive};

    fn x0() -> ContactState {
        ContactState::scalar(0.75, -0.25, 0.08, 0.0).unwrap()
    }

    #[test]
    fn fd_matches_analytic_for_affine_scheme() {
        let model = DampedAdditive::default();
        let stepper = ClosedFormContact::new(&model);
        let fd = step_jacobian(&stepper, &x0(), 0.1, &[0.02], DEFAULT_FD_STEP).unwrap();
        let exact = analytic_step_jacobian(&model, &x0(), 0.1, &[0.02]).unwrap().unwrap();
        for (a, b) in fd.matrix.iter().zip(&exact.matrix) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        // hand-differentiated scheme at V = q²/2, h = 0.1, α = 0.1
        assert!((exact.get(0, 0) - 0.995).abs() < 1e-15);
        assert!((exact.get(0, 1) - 0.099).abs() < 1e-15);
        assert!((exact.get(2, 2) - 0.99).abs() < 1e-15);
    }

    #[test]
    fn zero_step_is_identity() {
        let model = DampedAdditive::default();
        let stepper = ClosedFormEm { model: &model };
        let j = step_jacobian(&stepper, &x0(), 0.0, &[0.0], DEFAULT_FD_STEP).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let e = if r == c { 1.0 } else { 0.0 };
                assert!((j.get(r, c) - e).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pullback_is_transpose_product() {
        let j = StepJacobian {
            matrix: vec![1.0, 2.0, 3.0, 4.0],
            size: 2,
            method: JacobianMethod::Analytic,
            fd_step: None,
        };
        assert_eq!(j.pullback(&[1.0, 1.0]), vec![4.0, 6.0]);
    }

    #[test]
    fn failing_perturbation_is_named() {
        use crate::models::KeplerDrag;
        let model = KeplerDrag::default();
        let stepper = ClosedFormContact::new(&model);
        let x = ContactState::scalar(2e-8, 0.0, 0.0, 0.0).unwrap();
        let err = step_jacobian(&stepper, &x, 0.1, &[0.0], 0.9).unwrap_err();
        assert!(
            matches!(
                err,
                Error::Perturbation {
                    coord: 0,
                    sign: '-',
                    ..
                }
            ),
            "{err}"
        );
    }
}
