use crate::error::{Error, Result};
use crate::integrate::{integrate, Stepper};
use crate::noise::{generate_path, refine, WienerPath};
use crate::state::ContactState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub level: u32,
    pub h: f64,
    pub steps: usize,
    /// Root-mean-square terminal distance to the finest level.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log error` against `log h`, excluding the finest level.
    pub slope: Option<f64>,
    pub samples: usize,
    /// Seeds dropped because some level failed to integrate.
    pub failures: usize,
}

/// Dyadic strong self-convergence study.
///
/// For each of `n_paths` seeds a base path with `steps0` steps of size `h0`
/// is refined `levels − 1` times by Brownian bridges, and `stepper` is run at
/// every level on the same underlying path. `m = 0` runs the deterministic
/// limit.
#[allow(clippy::too_many_arguments)]
pub fn self_convergence(
    stepper: &(impl Stepper + ?Sized),
    initial: &ContactState,
    base_seed: u64,
    h0: f64,
    steps0: usize,
    levels: u32,
    n_paths: usize,
    m: usize,
) -> Result<ConvergenceTable> {
    if levels == 0 {
        return Err(Error::InvalidArgument("need at least one level".into()));
    }
    if n_paths == 0 {
        return Err(Error::Empty("convergence study needs at least one path"));
    }
    let nl = levels as usize;
    let mut sq = vec![0.0; nl];
    let mut samples = 0;
    let mut failures = 0;
    for i in 0..n_paths as u64 {
        let mut path = if m == 0 {
            WienerPath::zero(0, steps0, h0)
        } else {
            generate_path(base_seed.wrapping_add(i), m, steps0, h0)?
        };
        let mut ends = Vec::with_capacity(nl);
        for l in 0..nl {
            if l > 0 {
                path = if m == 0 {
                    WienerPath::zero(0, path.steps() * 2, path.step_size() / 2.0)
                } else {
                    refine(&path)
                };
            }
            match integrate(stepper, initial.clone(), &path) {
                Ok(traj) => ends.push(traj.last().coords()),
                Err(_) => break,
            }
        }
        if ends.len() < nl {
            failures += 1;
            continue;
        }
        let finest = &ends[nl - 1];
        for (l, x) in ends.iter().enumerate() {
            sq[l] += x.iter().zip(finest).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        }
        samples += 1;
    }
    let rows: Vec<ConvergenceRow> = (0..nl)
        .map(|l| ConvergenceRow {
            level: l as u32,
            h: h0 / f64::from(1u32 << l),
            steps: steps0 << l,
            error: if samples == 0 {
                f64::NAN
            } else {
                (sq[l] / samples as f64).sqrt()
            },
        })
        .collect();
    let slope = loglog_slope(&rows[..nl - 1]);
    Ok(ConvergenceTable {
        rows,
        slope,
        samples,
        failures,
    })
}

fn loglog_slope(rows: &[ConvergenceRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error > 0.0 && r.error.is_finite())
        .map(|r| (r.h.ln(), r.error.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
