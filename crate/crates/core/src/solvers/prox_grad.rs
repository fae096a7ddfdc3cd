#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use alloc::string::String;

use super::OnlineSolver;
use crate::error::{check_dim, invalid};
use crate::{
    inexact_gradient, prox, GradientNoiseModel, ProblemSlice, Result, Rng, TraceRecord, Vector,
};

/// Online (inexact) proximal gradient with constant step-size, `K` steps per
/// slice.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxGradState {
    pub x: Vector,
    alpha: f64,
    steps_per_slice: usize,
    name: String,
}

impl ProxGradState {
    pub fn new(x0: Vector, alpha: f64, steps_per_slice: usize) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(invalid("step-size must be positive"));
        }
        if steps_per_slice == 0 {
            return Err(invalid("at least one step per slice is required"));
        }
        Ok(Self {
            x: x0,
            alpha,
            steps_per_slice,
            name: String::from("prox_grad"),
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// `x <- prox_{alpha g_t, X_t}(x - alpha v_t)`, repeated `K` times on the same
/// slice. The record keeps the gradient error of the first inner step.
pub fn prox_grad_step(
    state: &mut ProxGradState,
    slice: &ProblemSlice,
    noise: &GradientNoiseModel,
    rng: &mut Rng,
) -> Result<TraceRecord> {
    check_dim(slice.dim(), state.x.len())?;
    let mut first = None;
    for _ in 0..state.steps_per_slice {
        let (v, e) = inexact_gradient(slice, &state.x, noise, rng)?;
        let y = &state.x - state.alpha * &v;
        state.x = prox(&slice.reg, &slice.set, state.alpha, &y)?;
        if first.is_none() {
            first = Some((v, e));
        }
    }
    let (v, grad_error) = first.expect("at least one inner step");
    Ok(TraceRecord {
        t: slice.t,
        objective: slice.value(&state.x),
        x: state.x.clone(),
        lambda: None,
        v,
        grad_error,
        wall_time: 0.0,
    })
}

/// `q = max{|1 - alpha mu|, |1 - alpha L|}`.
pub fn contraction_factor(alpha: f64, mu: f64, lip: f64) -> f64 {
    (1.0 - alpha * mu).abs().max((1.0 - alpha * lip).abs())
}

impl OnlineSolver for ProxGradState {
    fn name(&self) -> &str {
        &self.name
    }

    fn x(&self) -> &Vector {
        &self.x
    }

    fn steps_per_slice(&self) -> usize {
        self.steps_per_slice
    }

    fn step(&mut self, slice: &ProblemSlice, noise: &GradientNoiseModel, rng: &mut Rng) -> Result<TraceRecord> {
        prox_grad_step(self, slice, noise, rng)
    }
}
