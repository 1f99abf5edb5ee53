//! Undamped Newton iteration for the small dense systems of implicit steps.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Convergence threshold on the residual ∞-norm.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iters: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSolution {
    pub x: Vec<f64>,
    pub iters: usize,
    /// Residual ∞-norm at `x`.
    pub residual: f64,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
}

fn finite_or_err(r: &[f64]) -> Result<()> {
    if r.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("non-finite residual in newton iteration".into()))
    }
}

fn iterate<F, J>(mut residual: F, mut jacobian: J, x0: Vec<f64>, opts: &SolverOptions) -> Result<NewtonSolution>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
    J: FnMut(&[f64], &[f64], &mut F) -> Result<DMatrix<f64>>,
{
    let dim = x0.len();
    let mut x = x0;
    let mut r = residual(&x)?;
    finite_or_err(&r)?;
    if r.len() != dim {
        return Err(Error::Dimension {
            what: "newton residual",
            expected: dim,
            got: r.len(),
        });
    }
    let mut norm = inf_norm(&r);
    let mut iters = 0;
    while norm > opts.tol {
        if iters >= opts.max_iters {
            return Err(Error::NonConvergence { iters, residual: norm });
        }
        let jac = jacobian(&x, &r, &mut residual)?;
        let rhs = DVector::from_column_slice(&r);
        let delta = jac.lu().solve(&rhs).ok_or(Error::SingularJacobian)?;
        if delta.iter().any(|d| !d.is_finite()) {
            return Err(Error::SingularJacobian);
        }
        for (xi, di) in x.iter_mut().zip(delta.iter()) {
            *xi -= di;
        }
        r = residual(&x)?;
        finite_or_err(&r)?;
        norm = inf_norm(&r);
        iters += 1;
    }
    Ok(NewtonSolution {
        x,
        iters,
        residual: norm,
    })
}

/// Newton with a forward-difference Jacobian, column step `√ε·(1 + |xᵢ|)`.
pub fn solve_fd<F>(residual: F, x0: Vec<f64>, opts: &SolverOptions) -> Result<NewtonSolution>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let sqrt_eps = f64::EPSILON.sqrt();
    iterate(
        residual,
        |x: &[f64], r: &[f64], f: &mut F| {
            let dim = x.len();
            let mut jac = DMatrix::zeros(dim, dim);
            let mut xp = x.to_vec();
            for c in 0..dim {
                let step = sqrt_eps * (1.0 + x[c].abs());
                xp[c] = x[c] + step;
                let rp = f(&xp)?;
                finite_or_err(&rp)?;
                for row in 0..dim {
                    jac[(row, c)] = (rp[row] - r[row]) / step;
                }
                xp[c] = x[c];
            }
            Ok(jac)
        },
        x0,
        opts,
    )
}

/// Newton with a caller-supplied Jacobian (row-major, `dim × dim`).
pub fn solve_analytic<F, J>(residual: F, mut jacobian: J, x0: Vec<f64>, opts: &SolverOptions) -> Result<NewtonSolution>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
    J: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    iterate(
        residual,
        |x: &[f64], _r: &[f64], _f: &mut F| {
            let dim = x.len();
            let rows = jacobian(x)?;
            Ok(DMatrix::from_row_slice(dim, dim, &rows))
        },
        x0,
        opts,
    )
}
