use crate::error::{Error, Result};
use crate::state::ContactState;

/// Sample estimates of `‖X‖ = (E|X|²)^½` over an ensemble of states.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub samples: usize,
    /// Norm of the full `(q, p, s)` vector.
    pub total: f64,
    /// Norm of each flat coordinate.
    pub per_coordinate: Vec<f64>,
    pub q: f64,
    pub p: f64,
    pub s: f64,
}

pub fn ensemble_norms(states: &[ContactState]) -> Result<EnsembleStats> {
    let first = states.first().ok_or(Error::Empty("ensemble has no states"))?;
    let n = first.dim();
    let mut sums = vec![0.0; 2 * n + 1];
    for x in states {
        if x.dim() != n {
            return Err(Error::Dimension {
                what: "ensemble member dimension",
                expected: n,
                got: x.dim(),
            });
        }
        for (acc, v) in sums.iter_mut().zip(x.coords()) {
            *acc += v * v;
        }
    }
    let k = states.len() as f64;
    let norm = |range: std::ops::Range<usize>| (sums[range].iter().sum::<f64>() / k).sqrt();
    Ok(EnsembleStats {
        samples: states.len(),
        total: norm(0..2 * n + 1),
        per_coordinate: sums.iter().map(|v| (v / k).sqrt()).collect(),
        q: norm(0..n),
        p: norm(n..2 * n),
        s: norm(2 * n..2 * n + 1),
    })
}
