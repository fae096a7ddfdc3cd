#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use alloc::string::String;

use super::OnlineSolver;
use crate::error::{check_dim, invalid};
use crate::math::spectral_norm;
use crate::noise::perturb;
use crate::{
    prox, Error, GradientNoiseModel, Matrix, NoiseKind, ProblemSlice, Result, Rng, TraceRecord,
    Vector,
};

/// Dual update of the regularized primal-dual method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DualRule {
    /// `proj_+((1 - r) lambda + alpha v_c)`, the form written in the source text.
    AsPrinted,
    /// `proj_+((1 - alpha r) lambda + alpha v_c)`, projected gradient ascent on
    /// the regularized Lagrangian.
    #[default]
    GradientAscent,
}

/// Iterate `z = (x, lambda)` of the online primal-dual method on
/// `L(x, lambda) = f(x) + lambda' c(x) - r/2 ||lambda||^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualState {
    pub x: Vector,
    pub lambda: Vector,
    alpha: f64,
    r: f64,
    dual_rule: DualRule,
    steps_per_slice: usize,
    name: String,
}

impl PrimalDualState {
    pub fn new(x0: Vector, lambda0: Vector, alpha: f64, r: f64, dual_rule: DualRule) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(invalid("step-size must be positive"));
        }
        if !(r >= 0.0) {
            return Err(invalid("regularization r must be nonnegative"));
        }
        if lambda0.iter().any(|&l| l < 0.0) {
            return Err(invalid("initial multipliers must be nonnegative"));
        }
        Ok(Self {
            x: x0,
            lambda: lambda0,
            alpha,
            r,
            dual_rule,
            steps_per_slice: 1,
            name: String::from("primal_dual"),
        })
    }

    pub fn with_steps_per_slice(mut self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("at least one step per slice is required"));
        }
        self.steps_per_slice = k;
        Ok(self)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dual_rule(&self) -> DualRule {
        self.dual_rule
    }
}

/// One (or `K`) simultaneous primal and dual updates against `slice`; both use
/// `(x_{t-1}, lambda_{t-1})`.
pub fn primal_dual_step(
    state: &mut PrimalDualState,
    slice: &ProblemSlice,
    noise: &GradientNoiseModel,
    rng: &mut Rng,
) -> Result<TraceRecord> {
    let constraints = slice
        .constraints
        .as_ref()
        .ok_or_else(|| Error::Config("primal-dual method requires a constrained problem".into()))?;
    let n = slice.dim();
    let m = constraints.dim_out();
    check_dim(n, state.x.len())?;
    check_dim(m, state.lambda.len())?;
    let alpha = state.alpha;
    let mut first = None;
    for _ in 0..state.steps_per_slice {
        let grad_h = slice.gradient(&state.x);
        let jac = constraints.jacobian(&state.x);
        let exact_l = &grad_h + jac.transpose() * &state.lambda;
        let exact_c = constraints.eval(&state.x);
        let (v_l, v_c) = match noise.kind {
            NoiseKind::Measurement => {
                let surrogate = slice.surrogate.as_ref().ok_or_else(|| {
                    Error::Config("measurement noise requires a gradient surrogate".into())
                })?;
                let v_h = surrogate.sample(&state.x, rng);
                check_dim(n, v_h.len())?;
                (v_h + jac.transpose() * &state.lambda, exact_c.clone())
            }
            _ => {
                let stacked = Vector::from_iterator(n + m, exact_l.iter().chain(exact_c.iter()).copied());
                let noisy = perturb(&stacked, &noise.kind, rng)?;
                (noisy.rows(0, n).into_owned(), noisy.rows(n, m).into_owned())
            }
        };
        let e = ((&exact_l - &v_l).norm_squared() + (&exact_c - &v_c).norm_squared()).sqrt();

        let y = &state.x - alpha * &v_l;
        let x_next = prox(&slice.reg, &slice.set, alpha, &y)?;
        let decay = match state.dual_rule {
            DualRule::AsPrinted => 1.0 - state.r,
            DualRule::GradientAscent => 1.0 - alpha * state.r,
        };
        let lambda_next = (decay * &state.lambda + alpha * &v_c).map(|l| l.max(0.0));
        state.x = x_next;
        state.lambda = lambda_next;
        if first.is_none() {
            first = Some((v_l, e));
        }
    }
    let (v, grad_error) = first.expect("at least one inner step");
    Ok(TraceRecord {
        t: slice.t,
        objective: slice.value(&state.x),
        x: state.x.clone(),
        lambda: Some(state.lambda.clone()),
        v,
        grad_error,
        wall_time: 0.0,
    })
}

/// Lipschitz constant of the saddle operator
/// `(x, lambda) -> (grad h(x) + J' lambda, -c(x) + r lambda)`.
///
/// Exact (spectral norm of the block matrix) for quadratic `h` with affine
/// constraints; otherwise the bound `max(L, r) + ||J||` valid for affine
/// constraints.
pub fn pd_lipschitz(slice: &ProblemSlice, r: f64) -> Result<f64> {
    let c = slice
        .constraints
        .as_ref()
        .ok_or_else(|| Error::Config("no constraints on slice".into()))?;
    if c.jac_lip() > 0.0 {
        return Err(invalid("saddle Lipschitz constant needs affine constraints"));
    }
    if let Some(q) = slice.smooth.func().as_quadratic() {
        let n = slice.dim();
        let m = c.dim_out();
        let g = c.jacobian(&Vector::zeros(n));
        let mut block = Matrix::zeros(n + m, n + m);
        block.view_mut((0, 0), (n, n)).copy_from(&q.hessian);
        block.view_mut((0, n), (n, m)).copy_from(&g.transpose());
        block.view_mut((n, 0), (m, n)).copy_from(&(-&g));
        block.view_mut((n, n), (m, m)).fill_diagonal(r);
        return Ok(spectral_norm(&block));
    }
    Ok(slice.smooth.lip().max(r) + c.lip())
}

impl OnlineSolver for PrimalDualState {
    fn name(&self) -> &str {
        &self.name
    }

    fn x(&self) -> &Vector {
        &self.x
    }

    fn lambda(&self) -> Option<&Vector> {
        Some(&self.lambda)
    }

    fn steps_per_slice(&self) -> usize {
        self.steps_per_slice
    }

    fn step(&mut self, slice: &ProblemSlice, noise: &GradientNoiseModel, rng: &mut Rng) -> Result<TraceRecord> {
        primal_dual_step(self, slice, noise, rng)
    }
}
