use crate::error::{Error, Result};
use crate::herglotz::{action_recursion, DiscreteLagrangian};
use crate::integrate::Trajectory;
use crate::newton::SolverOptions;

/// `|∂s_N/∂q_j|` along the discrete curve of `traj`, by central differences.
///
/// `s_N` is the end value of the action recursion started from `s_0` with the
/// trajectory's increments and both endpoints fixed. Only the recursion from
/// step `j − 1` onwards is re-run for the perturbed curves.
pub fn criticality_residual(
    ld: &(impl DiscreteLagrangian + ?Sized),
    traj: &Trajectory,
    j: usize,
    fd_step: f64,
) -> Result<f64> {
    let n = traj.steps();
    if j == 0 || j >= n {
        return Err(Error::IndexOutOfRange {
            index: j,
            lo: 1,
            hi: n.saturating_sub(1),
        });
    }
    let (qs, prefix) = prepare(ld, traj, j)?;
    perturbed_derivative(ld, traj, &qs, prefix, j, fd_step)
}

/// Residuals for every interior index `1..N`.
pub fn criticality_profile(
    ld: &(impl DiscreteLagrangian + ?Sized),
    traj: &Trajectory,
    fd_step: f64,
) -> Result<Vec<f64>> {
    let n = traj.steps();
    if n < 2 {
        return Ok(Vec::new());
    }
    let (qs, _) = prepare(ld, traj, 1)?;
    let opts = SolverOptions::default();
    let s = action_recursion(
        ld,
        &qs,
        traj.initial().s(),
        traj.initial().t(),
        traj.h,
        &traj.increments,
        &opts,
    )?;
    (1..n)
        .map(|j| perturbed_derivative(ld, traj, &qs, s[j - 1], j, fd_step))
        .collect()
}

fn prepare(ld: &(impl DiscreteLagrangian + ?Sized), traj: &Trajectory, j: usize) -> Result<(Vec<Vec<f64>>, f64)> {
    if !ld.momentum_independent() {
        return Err(Error::InvalidArgument(
            "criticality needs a discrete Lagrangian that does not depend on momenta".into(),
        ));
    }
    let qs = traj.q_path();
    let opts = SolverOptions::default();
    let s = action_recursion(
        ld,
        &qs[..j],
        traj.initial().s(),
        traj.initial().t(),
        traj.h,
        &traj.increments[..j - 1],
        &opts,
    )?;
    Ok((qs, s[j - 1]))
}

fn perturbed_derivative(
    ld: &(impl DiscreteLagrangian + ?Sized),
    traj: &Trajectory,
    qs: &[Vec<f64>],
    s_prev: f64,
    j: usize,
    fd_step: f64,
) -> Result<f64> {
    let opts = SolverOptions::default();
    let t_prev = traj.initial().t() + (j - 1) as f64 * traj.h;
    let mut worst = 0.0_f64;
    for i in 0..qs[j].len() {
        let end = |delta: f64| -> Result<f64> {
            let mut tail = qs[j - 1..].to_vec();
            tail[1][i] += delta;
            let s = action_recursion(ld, &tail, s_prev, t_prev, traj.h, &traj.increments[j - 1..], &opts)?;
            Ok(*s.last().expect("recursion returns the start value"))
        };
        let d = (end(fd_step)? - end(-fd_step)?) / (2.0 * fd_step);
        worst = worst.max(d.abs());
    }
    Ok(worst)
}
