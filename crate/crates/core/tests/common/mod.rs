#![allow(dead_code)]

use std::sync::Arc;

use stochastic_contact::models::{build_model, ExampleModel, ModelKind, ModelParams};
use stochastic_contact::noise::normal_at;
use stochastic_contact::ContactState;

pub fn reference_state() -> ContactState {
    ContactState::scalar(0.75, -0.25, 0.08, 0.0).unwrap()
}

pub fn model(kind: ModelKind) -> Arc<dyn ExampleModel> {
    build_model(kind, &ModelParams::default()).unwrap()
}

/// `√h·ξ` with `ξ` a standard normal keyed on `key`.
pub fn gaussian_increment(key: u64, h: f64) -> f64 {
    h.sqrt() * normal_at(key, 0, 0)
}

/// A state inside the region where each model's step is well posed.
pub fn sample_state(kind: ModelKind, u: [f64; 3]) -> ContactState {
    let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
    match kind {
        ModelKind::KeplerDrag => {
            ContactState::scalar(lerp(0.75, 2.0, u[0]), lerp(-0.5, 0.5, u[1]), lerp(-2.0, 2.0, u[2]), 0.0).unwrap()
        }
        _ => ContactState::scalar(lerp(-2.0, 2.0, u[0]), lerp(-2.0, 2.0, u[1]), lerp(-2.0, 2.0, u[2]), 0.0).unwrap(),
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}
