//! Points on the contact manifold and the canonical contact one-form.
//!
//! Every flat vector in this crate uses the layout `(q_1..q_n, p_1..p_n, s)`.

use crate::error::{Error, Result};

/// A point `(q, p, s)` of the `(2n+1)`-dimensional contact manifold at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactState {
    q: Vec<f64>,
    p: Vec<f64>,
    s: f64,
    t: f64,
}

impl ContactState {
    pub fn new(q: Vec<f64>, p: Vec<f64>, s: f64, t: f64) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidState("configuration dimension must be >= 1".into()));
        }
        if q.len() != p.len() {
            return Err(Error::Dimension {
                what: "momentum length",
                expected: q.len(),
                got: p.len(),
            });
        }
        if q.iter().chain(p.iter()).any(|v| !v.is_finite()) || !s.is_finite() {
            return Err(Error::InvalidState("non-finite component".into()));
        }
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidState(format!("time must be finite and >= 0, got {t}")));
        }
        Ok(Self { q, p, s, t })
    }

    /// One-dimensional convenience constructor.
    pub fn scalar(q: f64, p: f64, s: f64, t: f64) -> Result<Self> {
        Self::new(vec![q], vec![p], s, t)
    }

    /// Rebuilds a state from a flat `(q, p, s)` vector of length `2n+1`.
    pub fn from_coords(coords: &[f64], t: f64) -> Result<Self> {
        if coords.len() < 3 || coords.len().is_multiple_of(2) {
            return Err(Error::InvalidState(format!(
                "flat state must have odd length >= 3, got {}",
                coords.len()
            )));
        }
        let n = (coords.len() - 1) / 2;
        Self::new(coords[..n].to_vec(), coords[n..2 * n].to_vec(), coords[2 * n], t)
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Flat `(q, p, s)` coordinates.
    pub fn coords(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.dim() + 1);
        v.extend_from_slice(&self.q);
        v.extend_from_slice(&self.p);
        v.push(self.s);
        v
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }
}

/// The contact one-form `η = ds − p·dq` evaluated at a state, as a covector in
/// `(q, p, s)` layout: `(−p, 0ₙ, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactForm {
    coeffs: Vec<f64>,
}

impl ContactForm {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    pub fn q_block(&self) -> &[f64] {
        &self.coeffs[..self.dim()]
    }

    pub fn p_block(&self) -> &[f64] {
        let n = self.dim();
        &self.coeffs[n..2 * n]
    }

    pub fn s_component(&self) -> f64 {
        self.coeffs[2 * self.dim()]
    }
}

pub fn contact_form_at(state: &ContactState) -> ContactForm {
    let n = state.dim();
    let mut coeffs = Vec::with_capacity(2 * n + 1);
    coeffs.extend(state.p().iter().map(|p| -p));
    coeffs.extend(std::iter::repeat_n(0.0, n));
    coeffs.push(1.0);
    ContactForm { coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn form_flips_momentum() {
        let x = ContactState::scalar(0.75, -0.25, 0.08, 0.0).unwrap();
        assert_eq!(contact_form_at(&x).coeffs(), &[0.25, 0.0, 1.0]);
    }

    #[test]
    fn form_at_zero_momentum() {
        let x = ContactState::new(vec![1.0, 2.0], vec![0.0, 0.0], 3.0, 0.0).unwrap();
        let eta = contact_form_at(&x);
        assert!(eta.q_block().iter().all(|&c| c == 0.0));
        assert!(eta.p_block().iter().all(|&c| c == 0.0));
        assert_eq!(eta.s_component(), 1.0);
    }

    #[test]
    fn form_two_dimensional() {
        let x = ContactState::new(vec![0.0, 0.0], vec![1.0, 2.0], 0.0, 0.0).unwrap();
        assert_eq!(contact_form_at(&x).coeffs(), &[-1.0, -2.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ContactState::scalar(f64::NAN, 0.0, 0.0, 0.0).is_err());
        assert!(ContactState::scalar(0.0, f64::INFINITY, 0.0, 0.0).is_err());
        assert!(ContactState::scalar(0.0, 0.0, 0.0, -1.0).is_err());
        assert!(ContactState::new(vec![], vec![], 0.0, 0.0).is_err());
        assert!(ContactState::new(vec![1.0], vec![1.0, 2.0], 0.0, 0.0).is_err());
        assert!(ContactState::from_coords(&[1.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn coords_round_trip() {
        let x = ContactState::new(vec![1.0, 2.0], vec![3.0, 4.0], 5.0, 0.5).unwrap();
        let y = ContactState::from_coords(&x.coords(), 0.5).unwrap();
        assert_eq!(x, y);
    }

    proptest! {
        #[test]
        fn form_is_linear_in_momentum(
            p1 in prop::collection::vec(-10.0f64..10.0, 3),
            p2 in prop::collection::vec(-10.0f64..10.0, 3),
        ) {
            let q = vec![0.0; 3];
            let sum: Vec<f64> = p1.iter().zip(&p2).map(|(a, b)| a + b).collect();
            let e1 = contact_form_at(&ContactState::new(q.clone(), p1, 0.0, 0.0).unwrap());
            let e2 = contact_form_at(&ContactState::new(q.clone(), p2, 0.0, 0.0).unwrap());
            let e12 = contact_form_at(&ContactState::new(q, sum, 0.0, 0.0).unwrap());
            for i in 0..3 {
                prop_assert!((e12.q_block()[i] - (e1.q_block()[i] + e2.q_block()[i])).abs() < 1e-12);
            }
        }
    }
}
