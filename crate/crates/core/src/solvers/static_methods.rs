#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use alloc::string::String;

use super::OnlineSolver;
use crate::error::{check_dim, invalid};
use crate::{
    inexact_gradient, prox, Error, FeasibleSet, GradientNoiseModel, ProblemSlice, RegularizerSpec,
    Result, Rng, TraceRecord, Vector,
};

/// Classical methods designed for a fixed problem, run online one step per
/// slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaticMethod {
    GradientDescent,
    /// Momentum `(k - 1) / (k + 2)`; no knowledge of strong convexity.
    NesterovV1,
    /// Constant momentum `(sqrt(L) - sqrt(mu)) / (sqrt(L) + sqrt(mu))`.
    NesterovV2,
    HeavyBall { beta: f64 },
    /// Nonlinear conjugate gradient (Dai-Yuan `beta`) with exact line search;
    /// only for quadratic `h` without regularizer or constraints.
    NonlinearCg,
}

impl StaticMethod {
    pub fn name(&self) -> &'static str {
        match self {
            Self::GradientDescent => "gd",
            Self::NesterovV1 => "nesterov_v1",
            Self::NesterovV2 => "nesterov_v2",
            Self::HeavyBall { .. } => "heavy_ball",
            Self::NonlinearCg => "nlcg",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticMethodConfig {
    pub method: StaticMethod,
    pub alpha: f64,
    /// Reset momentum whenever the slice changes.
    pub restart_on_slice: bool,
    /// `(mu, L)` used by Nesterov v2; defaults to the slice's constants.
    pub strong_convexity: Option<(f64, f64)>,
}

impl StaticMethodConfig {
    pub fn new(method: StaticMethod, alpha: f64) -> Result<Self> {
        let cfg = Self {
            method,
            alpha,
            restart_on_slice: false,
            strong_convexity: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(invalid("step-size must be positive"));
        }
        if let StaticMethod::HeavyBall { beta } = self.method {
            if !(0.0..1.0).contains(&beta) {
                return Err(invalid("heavy-ball momentum must lie in [0, 1)"));
            }
        }
        if let Some((mu, l)) = self.strong_convexity {
            if !(mu > 0.0 && mu <= l) {
                return Err(invalid("strong convexity pair needs 0 < mu <= L"));
            }
        }
        Ok(())
    }
}

/// Iterate plus momentum memory, carried across slices.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticMethodState {
    pub x: Vector,
    x_prev: Vector,
    k: usize,
    prev_grad: Option<Vector>,
    direction: Option<Vector>,
    last_t: Option<usize>,
}

impl StaticMethodState {
    pub fn new(x0: Vector) -> Self {
        Self {
            x_prev: x0.clone(),
            x: x0,
            k: 1,
            prev_grad: None,
            direction: None,
            last_t: None,
        }
    }

    fn reset_momentum(&mut self) {
        self.x_prev = self.x.clone();
        self.k = 1;
        self.prev_grad = None;
        self.direction = None;
    }
}

/// `(sqrt(L) - sqrt(mu)) / (sqrt(L) + sqrt(mu))`.
pub fn nesterov_v2_momentum(mu: f64, lip: f64) -> f64 {
    let (a, b) = (lip.sqrt(), mu.sqrt());
    (a - b) / (a + b)
}

/// Polyak's tuning `(alpha, beta)` of heavy ball for curvature in `[mu, L]`.
pub fn heavy_ball_polyak(mu: f64, lip: f64) -> (f64, f64) {
    let (a, b) = (lip.sqrt(), mu.sqrt());
    (4.0 / ((a + b) * (a + b)), nesterov_v2_momentum(mu, lip).powi(2))
}

/// One update of `cfg.method` against `slice` with exact gradients.
pub fn static_method_step(
    cfg: &StaticMethodConfig,
    slice: &ProblemSlice,
    state: &mut StaticMethodState,
) -> Result<()> {
    advance_state(cfg, slice, state, &mut |x| Ok((slice.gradient(x), 0.0))).map(|_| ())
}

type GradOracle<'a> = dyn FnMut(&Vector) -> Result<(Vector, f64)> + 'a;

fn advance_state(
    cfg: &StaticMethodConfig,
    slice: &ProblemSlice,
    state: &mut StaticMethodState,
    grad: &mut GradOracle<'_>,
) -> Result<(Vector, f64)> {
    check_dim(slice.dim(), state.x.len())?;
    if cfg.restart_on_slice && state.last_t.is_some_and(|t| t != slice.t) {
        state.reset_momentum();
    }
    state.last_t = Some(slice.t);
    let alpha = cfg.alpha;
    let (next, used) = match cfg.method {
        StaticMethod::GradientDescent => {
            let (v, e) = grad(&state.x)?;
            let next = prox(&slice.reg, &slice.set, alpha, &(&state.x - alpha * &v))?;
            (next, (v, e))
        }
        StaticMethod::HeavyBall { beta } => {
            let (v, e) = grad(&state.x)?;
            let y = &state.x - alpha * &v + beta * (&state.x - &state.x_prev);
            (prox(&slice.reg, &slice.set, alpha, &y)?, (v, e))
        }
        StaticMethod::NesterovV1 | StaticMethod::NesterovV2 => {
            let momentum = if let StaticMethod::NesterovV1 = cfg.method {
                (state.k as f64 - 1.0) / (state.k as f64 + 2.0)
            } else {
                let (mu, lip) = cfg
                    .strong_convexity
                    .unwrap_or((slice.smooth.mu(), slice.smooth.lip()));
                if !(mu > 0.0) {
                    return Err(Error::Config("Nesterov v2 needs a strongly convex problem".into()));
                }
                nesterov_v2_momentum(mu, lip)
            };
            let y = &state.x + momentum * (&state.x - &state.x_prev);
            let (v, e) = grad(&y)?;
            (prox(&slice.reg, &slice.set, alpha, &(&y - alpha * &v))?, (v, e))
        }
        StaticMethod::NonlinearCg => {
            if !matches!(slice.reg, RegularizerSpec::Zero) || !matches!(slice.set, FeasibleSet::AllSpace) {
                return Err(Error::Config(
                    "nonlinear CG supports unconstrained, unregularized problems only".into(),
                ));
            }
            let (g, e) = grad(&state.x)?;
            let mut p = match (&state.direction, &state.prev_grad) {
                (Some(p_prev), Some(g_prev)) => {
                    let denom = (&g - g_prev).dot(p_prev);
                    let beta = if denom.abs() > 0.0 { g.norm_squared() / denom } else { 0.0 };
                    -&g + beta * p_prev
                }
                _ => -&g,
            };
            if g.dot(&p) >= 0.0 {
                p = -&g;
            }
            let curv = slice.smooth.func().curvature_along(&p).ok_or_else(|| {
                Error::Config("exact line search requires a quadratic smooth part".into())
            })?;
            let step = if curv > 0.0 { -g.dot(&p) / curv } else { 0.0 };
            let next = &state.x + step * &p;
            state.direction = Some(p);
            state.prev_grad = Some(g.clone());
            (next, (g, e))
        }
    };
    state.x_prev = core::mem::replace(&mut state.x, next);
    state.k += 1;
    Ok(used)
}

/// A static method wrapped as an [`OnlineSolver`], one update per slice.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticSolver {
    pub cfg: StaticMethodConfig,
    pub state: StaticMethodState,
    name: String,
}

impl StaticSolver {
    pub fn new(cfg: StaticMethodConfig, x0: Vector) -> Result<Self> {
        cfg.validate()?;
        let name = String::from(cfg.method.name());
        Ok(Self {
            cfg,
            state: StaticMethodState::new(x0),
            name,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl OnlineSolver for StaticSolver {
    fn name(&self) -> &str {
        &self.name
    }

    fn x(&self) -> &Vector {
        &self.state.x
    }

    fn step(&mut self, slice: &ProblemSlice, noise: &GradientNoiseModel, rng: &mut Rng) -> Result<TraceRecord> {
        let (v, grad_error) = advance_state(&self.cfg, slice, &mut self.state, &mut |x| {
            inexact_gradient(slice, x, noise, rng)
        })?;
        Ok(TraceRecord {
            t: slice.t,
            objective: slice.value(&self.state.x),
            x: self.state.x.clone(),
            lambda: None,
            v,
            grad_error,
            wall_time: 0.0,
        })
    }
}
