//! Seeded, replayable Wiener paths on uniform grids.
//!
//! Draws come from a ChaCha8 block cipher used as a counter-based generator:
//! the 64-bit seed keys the cipher (expanded by `SeedableRng::seed_from_u64`),
//! the refinement level selects the ChaCha stream, and the normal draw for
//! interval `j` and process `k` is the 64-bit word at position `j·m + k` of
//! that stream. A word `x` maps to `u = (⌊x / 2¹¹⌋ + ½)·2⁻⁵³ ∈ (0, 1)` and then
//! to a standard normal through the inverse normal CDF. Paths are therefore a
//! pure function of `(seed, m, N, h, level)`, and refinement never consumes
//! words used by coarser levels.

use std::io::{self, Write};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::fmt_num;

/// `m` independent standard Wiener processes sampled at `t_j = j·h`, `j = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerPath {
    m: usize,
    steps: usize,
    h: f64,
    seed: u64,
    level: u32,
    /// Row-major `(N+1) × m`.
    values: Vec<f64>,
}

struct NormalStream {
    rng: ChaCha8Rng,
    normal: Normal,
}

impl NormalStream {
    fn new(seed: u64, level: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(level));
        rng.set_word_pos(0);
        Self {
            rng,
            normal: Normal::standard(),
        }
    }

    fn next(&mut self) -> f64 {
        let bits = self.rng.next_u64() >> 11;
        let u = (bits as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0);
        self.normal.inverse_cdf(u)
    }
}

/// Standard normal draw at stream position `index` of `(seed, level)`.
///
/// Matches what path generation consumes at `index = j·m + k`.
pub fn normal_at(seed: u64, level: u32, index: u64) -> f64 {
    let mut s = NormalStream::new(seed, level);
    s.rng.set_word_pos(u128::from(index) * 2);
    s.next()
}

impl WienerPath {
    /// Builds a path from explicit values (row-major, `(N+1) × m`).
    pub fn from_values(m: usize, h: f64, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("step size must be > 0, got {h}")));
        }
        let rows = values.len().checked_div(m).unwrap_or(0);
        if m > 0 && (!values.len().is_multiple_of(m) || rows < 2) {
            return Err(Error::InvalidArgument("path needs at least two rows".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite path value".into()));
        }
        if values.iter().take(m).any(|&v| v != 0.0) {
            return Err(Error::InvalidArgument("W(0) must be zero".into()));
        }
        if m == 0 {
            return Err(Error::InvalidArgument(
                "use WienerPath::zero for noise-free paths".into(),
            ));
        }
        Ok(Self {
            m,
            steps: rows - 1,
            h,
            seed: 0,
            level: 0,
            values,
        })
    }

    /// All-zero path; with `m = 0` this is the deterministic case.
    pub fn zero(m: usize, steps: usize, h: f64) -> Self {
        Self {
            m,
            steps,
            h,
            seed: 0,
            level: 0,
            values: vec![0.0; (steps + 1) * m],
        }
    }

    pub fn noise_count(&self) -> usize {
        self.m
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    /// `W(t_j)` for all processes.
    pub fn values(&self, j: usize) -> &[f64] {
        &self.values[j * self.m..(j + 1) * self.m]
    }

    /// `ΔW_j = W(t_{j+1}) − W(t_j)`.
    pub fn increment(&self, j: usize) -> Vec<f64> {
        let a = self.values(j);
        let b = self.values(j + 1);
        b.iter().zip(a).map(|(b, a)| b - a).collect()
    }

    /// Keeps every `factor`-th grid point.
    pub fn downsample(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.steps.is_multiple_of(factor) {
            return Err(Error::InvalidArgument(format!(
                "cannot downsample {} steps by {factor}",
                self.steps
            )));
        }
        let steps = self.steps / factor;
        let values = (0..=steps)
            .flat_map(|j| self.values(j * factor).iter().copied())
            .collect();
        Ok(Self {
            m: self.m,
            steps,
            h: self.h * factor as f64,
            seed: self.seed,
            level: self.level.saturating_sub(factor.trailing_zeros()),
            values,
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "t")?;
        for k in 1..=self.m {
            write!(w, ",W{k}")?;
        }
        writeln!(w)?;
        for j in 0..=self.steps {
            write!(w, "{}", fmt_num(self.time(j)))?;
            for v in self.values(j) {
                write!(w, ",{}", fmt_num(*v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Samples a level-0 path: `W(t_{j+1}) = W(t_j) + √h·ξ_{j,k}`.
pub fn generate_path(seed: u64, m: usize, steps: usize, h: f64) -> Result<WienerPath> {
    if steps == 0 {
        return Err(Error::InvalidArgument("path needs at least one step".into()));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step size must be > 0, got {h}")));
    }
    let mut values = vec![0.0; (steps + 1) * m];
    let sd = h.sqrt();
    let mut stream = NormalStream::new(seed, 0);
    for j in 0..steps {
        for k in 0..m {
            values[(j + 1) * m + k] = values[j * m + k] + sd * stream.next();
        }
    }
    Ok(WienerPath {
        m,
        steps,
        h,
        seed,
        level: 0,
        values,
    })
}

/// `N × m` matrix of increments, row `j` being `ΔW_j`.
pub fn increments(path: &WienerPath) -> Vec<Vec<f64>> {
    (0..path.steps).map(|j| path.increment(j)).collect()
}

/// Halves the grid by Brownian-bridge sampling of every interval midpoint.
///
/// Existing grid values are kept exactly; the midpoint of interval `j` is
/// `½(W_j + W_{j+1}) + √(h/4)·ξ` with `ξ` taken from stream `level + 1`.
pub fn refine(path: &WienerPath) -> WienerPath {
    let m = path.m;
    let steps = 2 * path.steps;
    let mut values = vec![0.0; (steps + 1) * m];
    let sd = (path.h / 4.0).sqrt();
    let mut stream = NormalStream::new(path.seed, path.level + 1);
    for j in 0..path.steps {
        let a = path.values(j);
        let b = path.values(j + 1);
        for k in 0..m {
            values[2 * j * m + k] = a[k];
            values[(2 * j + 1) * m + k] = 0.5 * (a[k] + b[k]) + sd * stream.next();
        }
    }
    values[steps * m..].copy_from_slice(path.values(path.steps));
    WienerPath {
        m,
        steps,
        h: path.h / 2.0,
        seed: path.seed,
        level: path.level + 1,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_noise_path_has_no_columns() {
        let p = generate_path(1, 0, 5, 0.1).unwrap();
        assert_eq!(p.noise_count(), 0);
        assert_eq!(p.steps(), 5);
        assert!(increments(&p).iter().all(|r| r.is_empty()));
    }

    #[test]
    fn same_seed_same_path() {
        let a = generate_path(99, 3, 50, 0.01).unwrap();
        let b = generate_path(99, 3, 50, 0.01).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_path(100, 3, 50, 0.01).unwrap());
    }

    #[test]
    fn starts_at_zero() {
        let p = generate_path(5, 2, 10, 0.1).unwrap();
        assert_eq!(p.values(0), &[0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(generate_path(1, 1, 0, 0.1).is_err());
        assert!(generate_path(1, 1, 10, 0.0).is_err());
        assert!(generate_path(1, 1, 10, f64::NAN).is_err());
    }

    #[test]
    fn increment_moments_seed_42() {
        let n = 10_000;
        let h = 0.01;
        let p = generate_path(42, 1, n, h).unwrap();
        let inc: Vec<f64> = increments(&p).into_iter().map(|r| r[0]).collect();
        let mean = inc.iter().sum::<f64>() / n as f64;
        let var = inc.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 4.0 * h.sqrt() / (n as f64).sqrt(), "mean {mean}");
        assert!((var - h).abs() < 0.1 * h, "var {var}");
    }

    #[test]
    fn zero_path_has_zero_increments() {
        let p = WienerPath::zero(2, 4, 0.5);
        assert!(increments(&p).iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn increments_telescope() {
        let p = generate_path(3, 2, 100, 0.05).unwrap();
        let inc = increments(&p);
        for k in 0..2 {
            let total: f64 = inc.iter().map(|r| r[k]).sum();
            assert!((total - p.values(100)[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn cumulative_sum_reconstructs_seed_7() {
        let p = generate_path(7, 1, 1000, 0.01).unwrap();
        let mut acc = 0.0;
        for (j, row) in increments(&p).iter().enumerate() {
            acc += row[0];
            assert!((acc - p.values(j + 1)[0]).abs() <= 1e-12 * (1.0 + acc.abs()));
        }
    }

    #[test]
    fn refine_keeps_parent_values() {
        let p = generate_path(11, 2, 20, 0.1).unwrap();
        let r = refine(&p);
        assert_eq!(r.steps(), 40);
        assert_eq!(r.level(), 1);
        assert_eq!(r.step_size(), 0.05);
        for j in 0..=20 {
            assert_eq!(r.values(2 * j), p.values(j));
        }
        let rr = refine(&r);
        for j in 0..=20 {
            assert_eq!(rr.values(4 * j), p.values(j));
        }
        assert_eq!(rr.downsample(4).unwrap().values, p.values);
    }

    #[test]
    fn refined_increments_sum_to_coarse() {
        for seed in 0..100 {
            let p = generate_path(seed, 1, 8, 0.1).unwrap();
            let r = refine(&p);
            for j in 0..8 {
                let coarse = p.increment(j)[0];
                let fine = r.increment(2 * j)[0] + r.increment(2 * j + 1)[0];
                assert!((coarse - fine).abs() <= 1e-15 * (1.0 + coarse.abs()) * 4.0);
            }
        }
    }

    #[test]
    fn stream_positions_match_generation() {
        let p = generate_path(17, 3, 4, 1.0).unwrap();
        for j in 0..4 {
            for k in 0..3 {
                let xi = normal_at(17, 0, (j * 3 + k) as u64);
                assert!((p.increment(j)[k] - xi).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let p = generate_path(1, 2, 3, 0.5).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,W1,W2");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0.0000000000000000e0,"));
    }
}
