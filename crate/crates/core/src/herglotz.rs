//! Discrete stochastic Herglotz principle.
//!
//! A discrete Lagrangian `L_j = L(q_j, q_{j+1}, s_j, s_{j+1})` and discrete
//! noise Hamiltonians `H_k^j` drive the action recursion
//!
//! ```text
//! s_{j+1} = s_j + h·L_j − Σ_k H_k^j ΔW_j^k
//! ```
//!
//! Critical discrete curves (`∂s_N/∂q_j = 0`) are exactly those on which the
//! two discrete momenta agree,
//!
//! ```text
//! p_j⁻ = D^{j−1} / (1 − E^{j−1})      (second-slot partials of L_{j−1})
//! p_j⁺ = −D^j / (1 + E^j)             (first-slot partials of L_j)
//! ```
//!
//! with `D = h ∂L/∂q − Σ ∂H_k/∂q ΔW^k` and `E = h ∂L/∂s − Σ ∂H_k/∂s ΔW^k`.
//! The induced one-step map rescales `ds − p·dq` by the conformal factor
//!
//! ```text
//! λ_j = (1 + h ∂L_j/∂s_j − Σ ∂H_k^j/∂s_j ΔW^k) / (1 − h ∂L_j/∂s_{j+1} + Σ ∂H_k^j/∂s_{j+1} ΔW^k).
//! ```
//!
//! Noise products are plain multiplications by the increment; no Itô
//! correction is applied anywhere.

use crate::error::{Error, Result};
use crate::newton::{self, SolverOptions};
use crate::state::ContactState;

/// Smallest admissible `|1 ± E|` before a momentum or conformal-factor
/// denominator is reported as degenerate.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-12;

/// Problem dimensions shared by models, discrete Lagrangians and steppers.
pub trait Dimensions {
    /// Configuration dimension `n`.
    fn dim(&self) -> usize;
    /// Number of Wiener processes `m`.
    fn noise_count(&self) -> usize;
}

/// Values and slot partials of `L_j` and `H_k^j` for one step.
///
/// "j" fields are partials w.r.t. the first slot `(q_j, s_j)`, "next" fields
/// w.r.t. the second slot `(q_{j+1}, s_{j+1})`. Noise partials are `m × n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLagrangianData {
    pub l: f64,
    pub h_k: Vec<f64>,
    pub dl_dq_j: Vec<f64>,
    pub dl_dq_next: Vec<f64>,
    pub dl_ds_j: f64,
    pub dl_ds_next: f64,
    pub dh_dq_j: Vec<Vec<f64>>,
    pub dh_dq_next: Vec<Vec<f64>>,
    pub dh_ds_j: Vec<f64>,
    pub dh_ds_next: Vec<f64>,
}

impl DiscreteLagrangianData {
    /// All-zero data for the given dimensions.
    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            l: 0.0,
            h_k: vec![0.0; m],
            dl_dq_j: vec![0.0; n],
            dl_dq_next: vec![0.0; n],
            dl_ds_j: 0.0,
            dl_ds_next: 0.0,
            dh_dq_j: vec![vec![0.0; n]; m],
            dh_dq_next: vec![vec![0.0; n]; m],
            dh_ds_j: vec![0.0; m],
            dh_ds_next: vec![0.0; m],
        }
    }

    pub fn is_finite(&self) -> bool {
        let scalars = [self.l, self.dl_ds_j, self.dl_ds_next];
        scalars.iter().all(|v| v.is_finite())
            && self
                .h_k
                .iter()
                .chain(&self.dl_dq_j)
                .chain(&self.dl_dq_next)
                .chain(&self.dh_ds_j)
                .chain(&self.dh_ds_next)
                .chain(self.dh_dq_j.iter().flatten())
                .chain(self.dh_dq_next.iter().flatten())
                .all(|v| v.is_finite())
    }
}

/// A discretization of the Lagrangian and of the noise Hamiltonians over one
/// step. Discretizations here never depend on `p_j, p_{j+1}`.
pub trait DiscreteLagrangian: Dimensions + Send + Sync {
    fn eval(
        &self,
        q_j: &[f64],
        q_next: &[f64],
        s_j: f64,
        s_next: f64,
        h: f64,
        t_j: f64,
    ) -> Result<DiscreteLagrangianData>;

    /// Continuous `L(q, q̇, s, t)`, used for the explicit predictor of
    /// [`step_contact`].
    fn continuous_lagrangian(&self, q: &[f64], qdot: &[f64], s: f64, t: f64) -> Result<f64>;

    /// Whether `L_j` is independent of the momenta, a prerequisite of the
    /// criticality diagnostic.
    fn momentum_independent(&self) -> bool {
        true
    }
}

/// The pair `(D, E)` of one slot of a discrete Lagrangian.
#[derive(Debug, Clone, PartialEq)]
pub struct DEQuantities {
    pub d: Vec<f64>,
    pub e: f64,
}

fn noise_dot(coeffs: &[f64], dw: &[f64]) -> f64 {
    coeffs.iter().zip(dw).map(|(c, w)| c * w).sum()
}

impl DEQuantities {
    /// `(D, E)` from first-slot partials `(q_j, s_j)`.
    pub fn first_slot(data: &DiscreteLagrangianData, h: f64, dw: &[f64]) -> Self {
        Self::assemble(&data.dl_dq_j, data.dl_ds_j, &data.dh_dq_j, &data.dh_ds_j, h, dw)
    }

    /// `(D, E)` from second-slot partials `(q_{j+1}, s_{j+1})`.
    pub fn second_slot(data: &DiscreteLagrangianData, h: f64, dw: &[f64]) -> Self {
        Self::assemble(
            &data.dl_dq_next,
            data.dl_ds_next,
            &data.dh_dq_next,
            &data.dh_ds_next,
            h,
            dw,
        )
    }

    fn assemble(dl_dq: &[f64], dl_ds: f64, dh_dq: &[Vec<f64>], dh_ds: &[f64], h: f64, dw: &[f64]) -> Self {
        let d = dl_dq
            .iter()
            .enumerate()
            .map(|(i, dl)| h * dl - dh_dq.iter().zip(dw).map(|(row, w)| row[i] * w).sum::<f64>())
            .collect();
        let e = h * dl_ds - noise_dot(dh_ds, dw);
        Self { d, e }
    }
}

fn check_denominator(value: f64, context: &'static str) -> Result<f64> {
    if value.abs() < DEGENERATE_DENOMINATOR || !value.is_finite() {
        return Err(Error::DegenerateDenominator { context, value });
    }
    Ok(value)
}

/// `s_j + h·L_j − Σ_k H_k^j ΔW^k`.
pub fn action_update(data: &DiscreteLagrangianData, h: f64, dw: &[f64], s_j: f64) -> f64 {
    s_j + h * data.l - noise_dot(&data.h_k, dw)
}

/// `(D^{j−1}, E^{j−1})`: second-slot partials of `L_{j−1}`.
#[allow(clippy::too_many_arguments)]
pub fn compute_de_minus(
    ld: &(impl DiscreteLagrangian + ?Sized),
    q_prev: &[f64],
    q_j: &[f64],
    s_prev: f64,
    s_j: f64,
    h: f64,
    t_prev: f64,
    dw_prev: &[f64],
) -> Result<DEQuantities> {
    let data = ld.eval(q_prev, q_j, s_prev, s_j, h, t_prev)?;
    Ok(DEQuantities::second_slot(&data, h, dw_prev))
}

/// `(D^j, E^j)`: first-slot partials of `L_j`.
#[allow(clippy::too_many_arguments)]
pub fn compute_de_plus(
    ld: &(impl DiscreteLagrangian + ?Sized),
    q_j: &[f64],
    q_next: &[f64],
    s_j: f64,
    s_next: f64,
    h: f64,
    t_j: f64,
    dw_j: &[f64],
) -> Result<DEQuantities> {
    let data = ld.eval(q_j, q_next, s_j, s_next, h, t_j)?;
    Ok(DEQuantities::first_slot(&data, h, dw_j))
}

/// `p⁻ = D / (1 − E)`.
pub fn momentum_minus(de: &DEQuantities) -> Result<Vec<f64>> {
    let denom = check_denominator(1.0 - de.e, "momentum_minus")?;
    Ok(de.d.iter().map(|d| d / denom).collect())
}

/// `p⁺ = −D / (1 + E)`.
pub fn momentum_plus(de: &DEQuantities) -> Result<Vec<f64>> {
    let denom = check_denominator(1.0 + de.e, "momentum_plus")?;
    Ok(de.d.iter().map(|d| -d / denom).collect())
}

/// Conformal factor `λ_j` of one step.
pub fn conformal_factor(data: &DiscreteLagrangianData, h: f64, dw: &[f64]) -> Result<f64> {
    let num = 1.0 + h * data.dl_ds_j - noise_dot(&data.dh_ds_j, dw);
    let den = 1.0 - h * data.dl_ds_next + noise_dot(&data.dh_ds_next, dw);
    Ok(num / check_denominator(den, "conformal_factor")?)
}

/// Outcome of one step of an integrator.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub next: ContactState,
    /// Conformal factor of the step; `None` for non-contact steppers.
    pub lambda: Option<f64>,
    pub newton_iters: usize,
    /// Final residual ∞-norm of the nonlinear solve (0 for explicit steps).
    pub residual: f64,
}

impl StepResult {
    pub fn explicit(next: ContactState, lambda: Option<f64>) -> Self {
        Self {
            next,
            lambda,
            newton_iters: 0,
            residual: 0.0,
        }
    }
}

pub(crate) fn check_dims(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { what, expected, got });
    }
    Ok(())
}

/// One step of the variational integrator generated by `ld`.
///
/// Solves the momentum matching `p_j = p_j⁺(q_{j+1}, s_{j+1})` together with
/// the action recursion for `(q_{j+1}, s_{j+1})` by Newton iteration with a
/// forward-difference Jacobian, starting from the explicit predictor
/// `q_j + h p_j`, `s_j + h L(q_j, p_j, s_j)`. The new momentum is then
/// `p_{j+1} = p_{j+1}⁻`.
pub fn step_contact(
    ld: &(impl DiscreteLagrangian + ?Sized),
    state: &ContactState,
    h: f64,
    dw: &[f64],
    opts: &SolverOptions,
) -> Result<StepResult> {
    let n = ld.dim();
    check_dims("state dimension", n, state.dim())?;
    check_dims("noise increments", ld.noise_count(), dw.len())?;
    let (q, p, s, t) = (state.q(), state.p(), state.s(), state.t());

    let mut x0: Vec<f64> = q.iter().zip(p).map(|(q, p)| q + h * p).collect();
    x0.push(s + h * ld.continuous_lagrangian(q, p, s, t)?);

    let residual = |x: &[f64]| -> Result<Vec<f64>> {
        let (q_next, s_next) = (&x[..n], x[n]);
        let data = ld.eval(q, q_next, s, s_next, h, t)?;
        let p_plus = momentum_plus(&DEQuantities::first_slot(&data, h, dw))?;
        let mut r: Vec<f64> = p.iter().zip(&p_plus).map(|(a, b)| a - b).collect();
        r.push(s_next - action_update(&data, h, dw, s));
        Ok(r)
    };
    let sol = newton::solve_fd(residual, x0, opts)?;

    let (q_next, s_next) = (&sol.x[..n], sol.x[n]);
    let data = ld.eval(q, q_next, s, s_next, h, t)?;
    let p_next = momentum_minus(&DEQuantities::second_slot(&data, h, dw))?;
    let lambda = conformal_factor(&data, h, dw)?;
    Ok(StepResult {
        next: ContactState::new(q_next.to_vec(), p_next, s_next, t + h)?,
        lambda: Some(lambda),
        newton_iters: sol.iters,
        residual: sol.residual,
    })
}

/// Solves the action recursion for `s_{j+1}` given `q_j, q_{j+1}, s_j`.
///
/// Discretizations that depend on `s_{j+1}` are handled by scalar Newton on
/// the recursion using the analytic `∂/∂s_{j+1}` partials.
#[allow(clippy::too_many_arguments)]
pub fn solve_action_step(
    ld: &(impl DiscreteLagrangian + ?Sized),
    q_j: &[f64],
    q_next: &[f64],
    s_j: f64,
    h: f64,
    t_j: f64,
    dw: &[f64],
    opts: &SolverOptions,
) -> Result<f64> {
    let mut s_next = s_j;
    let mut iters = 0;
    loop {
        let data = ld.eval(q_j, q_next, s_j, s_next, h, t_j)?;
        let g = s_next - action_update(&data, h, dw, s_j);
        if !g.is_finite() {
            return Err(Error::Domain("non-finite action residual".into()));
        }
        if g.abs() <= opts.tol && iters > 0 {
            return Ok(s_next);
        }
        if iters >= opts.max_iters {
            return Err(Error::NonConvergence {
                iters,
                residual: g.abs(),
            });
        }
        let slope = 1.0 - h * data.dl_ds_next + noise_dot(&data.dh_ds_next, dw);
        s_next -= g / check_denominator(slope, "action recursion")?;
        iters += 1;
    }
}

/// Runs the action recursion along a discrete curve `q_0..q_N` from `s_0`,
/// returning `s_0..s_N`.
pub fn action_recursion(
    ld: &(impl DiscreteLagrangian + ?Sized),
    qs: &[Vec<f64>],
    s0: f64,
    t0: f64,
    h: f64,
    dws: &[Vec<f64>],
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    if qs.len() != dws.len() + 1 {
        return Err(Error::Dimension {
            what: "curve points vs increments + 1",
            expected: dws.len() + 1,
            got: qs.len(),
        });
    }
    let mut s = Vec::with_capacity(qs.len());
    s.push(s0);
    for j in 0..dws.len() {
        let t = t0 + j as f64 * h;
        let next = solve_action_step(ld, &qs[j], &qs[j + 1], s[j], h, t, &dws[j], opts)?;
        s.push(next);
    }
    Ok(s)
}
