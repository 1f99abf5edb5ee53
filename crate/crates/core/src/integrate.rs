//! One-step maps, the Euler–Maruyama reference stepper, and trajectory folding.

use std::fmt;
use std::io::{self, Write};
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::fmt_num;
use crate::herglotz::{check_dims, step_contact, Dimensions, DiscreteLagrangian, StepResult};
use crate::model::{contact_vector_field, ContactModel};
use crate::newton::SolverOptions;
use crate::noise::WienerPath;
use crate::state::ContactState;

/// A one-step map `(x_j, ΔW_j) ↦ x_{j+1}` at step size `h`.
///
/// Implementations must be deterministic given `(state, h, dw)`.
pub trait Stepper: Dimensions + Send + Sync {
    fn step(&self, state: &ContactState, h: f64, dw: &[f64]) -> Result<StepResult>;

    /// Whether steps report a conformal factor.
    fn is_contact(&self) -> bool;
}

/// Explicit Euler–Maruyama step of the Darboux-form system built from `model`.
pub fn step_euler_maruyama(
    model: &(impl ContactModel + ?Sized),
    state: &ContactState,
    h: f64,
    dw: &[f64],
) -> Result<ContactState> {
    check_dims("state dimension", model.dim(), state.dim())?;
    check_dims("noise increments", model.noise_count(), dw.len())?;
    let mut x = state.coords();
    let drift = contact_vector_field(model, 0, state)?;
    for (xi, f) in x.iter_mut().zip(&drift) {
        *xi += h * f;
    }
    for (k, w) in dw.iter().enumerate() {
        let g = contact_vector_field(model, k + 1, state)?;
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi += gi * w;
        }
    }
    ContactState::from_coords(&x, state.t() + h)
}

/// Variational integrator generated by a discrete Lagrangian.
#[derive(Debug, Clone)]
pub struct GenericContact<P> {
    pub lagrangian: P,
    pub opts: SolverOptions,
}

impl<P> GenericContact<P> {
    pub fn new(lagrangian: P) -> Self {
        Self {
            lagrangian,
            opts: SolverOptions::default(),
        }
    }
}

impl<P> Dimensions for GenericContact<P>
where
    P: Deref,
    P::Target: DiscreteLagrangian,
{
    fn dim(&self) -> usize {
        self.lagrangian.dim()
    }
    fn noise_count(&self) -> usize {
        self.lagrangian.noise_count()
    }
}

impl<P> Stepper for GenericContact<P>
where
    P: Deref + Send + Sync,
    P::Target: DiscreteLagrangian,
{
    fn step(&self, state: &ContactState, h: f64, dw: &[f64]) -> Result<StepResult> {
        step_contact(&*self.lagrangian, state, h, dw, &self.opts)
    }

    fn is_contact(&self) -> bool {
        true
    }
}

/// Euler–Maruyama on the Darboux-form equations of a continuous model.
#[derive(Debug, Clone)]
pub struct GenericEm<P> {
    pub model: P,
}

impl<P> Dimensions for GenericEm<P>
where
    P: Deref,
    P::Target: ContactModel,
{
    fn dim(&self) -> usize {
        self.model.dim()
    }
    fn noise_count(&self) -> usize {
        self.model.noise_count()
    }
}

impl<P> Stepper for GenericEm<P>
where
    P: Deref + Send + Sync,
    P::Target: ContactModel,
{
    fn step(&self, state: &ContactState, h: f64, dw: &[f64]) -> Result<StepResult> {
        Ok(StepResult::explicit(
            step_euler_maruyama(&*self.model, state, h, dw)?,
            None,
        ))
    }

    fn is_contact(&self) -> bool {
        false
    }
}

/// States `x_0..x_N` with per-step records for steps `0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub h: f64,
    pub states: Vec<ContactState>,
    /// `λ_j` of step `j → j+1`; `None` for non-contact steppers.
    pub lambdas: Vec<Option<f64>>,
    pub increments: Vec<Vec<f64>>,
    pub newton_iters: Vec<usize>,
    pub residuals: Vec<f64>,
}

impl Trajectory {
    pub fn new(initial: ContactState, h: f64) -> Self {
        Self {
            h,
            states: vec![initial],
            lambdas: Vec::new(),
            increments: Vec::new(),
            newton_iters: Vec::new(),
            residuals: Vec::new(),
        }
    }

    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn initial(&self) -> &ContactState {
        &self.states[0]
    }

    pub fn last(&self) -> &ContactState {
        self.states.last().expect("trajectory holds at least one state")
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn noise_count(&self) -> usize {
        self.increments.first().map_or(0, Vec::len)
    }

    pub fn total_newton_iters(&self) -> usize {
        self.newton_iters.iter().sum()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a: f64, &r| a.max(r))
    }

    pub fn q_path(&self) -> Vec<Vec<f64>> {
        self.states.iter().map(|x| x.q().to_vec()).collect()
    }

    fn push(&mut self, r: StepResult, dw: Vec<f64>) {
        self.states.push(r.next);
        self.lambdas.push(r.lambda);
        self.increments.push(dw);
        self.newton_iters.push(r.newton_iters);
        self.residuals.push(r.residual);
    }

    /// CSV with header `t,q1..qn,p1..pn,s,lambda,dW1..dWm`.
    ///
    /// Row `j` holds `x_j` together with `λ_j` and `ΔW_j` of the step leaving
    /// it; the final row leaves those columns empty, as does every EM row's
    /// `lambda`. Numbers carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.dim();
        let m = self.noise_count();
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("q{i}")));
        header.extend((1..=n).map(|i| format!("p{i}")));
        header.push("s".into());
        header.push("lambda".into());
        header.extend((1..=m).map(|k| format!("dW{k}")));
        writeln!(w, "{}", header.join(","))?;
        for (j, x) in self.states.iter().enumerate() {
            let mut row: Vec<String> = Vec::with_capacity(2 * n + 3 + m);
            row.push(fmt_num(x.t()));
            row.extend(x.q().iter().chain(x.p()).map(|v| fmt_num(*v)));
            row.push(fmt_num(x.s()));
            row.push(self.lambdas.get(j).copied().flatten().map(fmt_num).unwrap_or_default());
            match self.increments.get(j) {
                Some(dw) => row.extend(dw.iter().map(|v| fmt_num(*v))),
                None => row.extend(std::iter::repeat_n(String::new(), m)),
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Trajectory cut short by a failing step.
#[derive(Debug, Clone)]
pub struct IntegrationFailure {
    pub partial: Trajectory,
    /// Index `j` of the failing step `j → j+1`.
    pub step: usize,
    pub error: Error,
}

impl fmt::Display for IntegrationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "integration failed at step {}: {}", self.step, self.error)
    }
}

impl std::error::Error for IntegrationFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<IntegrationFailure> for Error {
    fn from(f: IntegrationFailure) -> Self {
        Error::Step {
            step: f.step,
            source: Box::new(f.error),
        }
    }
}

/// Folds `stepper` over the increments of `path`.
///
/// A path with no processes (`m = 0`) drives the stepper with zero increments.
pub fn integrate(
    stepper: &(impl Stepper + ?Sized),
    initial: ContactState,
    path: &WienerPath,
) -> std::result::Result<Trajectory, IntegrationFailure> {
    let h = path.step_size();
    let mut traj = Trajectory::new(initial, h);
    let m = stepper.noise_count();
    if path.noise_count() != 0 && path.noise_count() != m {
        return Err(IntegrationFailure {
            partial: traj,
            step: 0,
            error: Error::Dimension {
                what: "path noise count",
                expected: m,
                got: path.noise_count(),
            },
        });
    }
    for j in 0..path.steps() {
        let dw = if path.noise_count() == 0 {
            vec![0.0; m]
        } else {
            path.increment(j)
        };
        match stepper.step(traj.last(), h, &dw) {
            Ok(r) => traj.push(r, dw),
            Err(error) => {
                return Err(IntegrationFailure {
                    partial: traj,
                    step: j,
                    error,
                })
            }
        }
    }
    Ok(traj)
}
