#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use alloc::sync::Arc;

use crate::error::invalid;
use crate::{
    prox, ConstraintMap, Error, FeasibleSet, ProblemSlice, RegularizerSpec, Result, SmoothFn,
    SmoothPart, Vector,
};

/// High-accuracy solution of one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchOracleResult {
    pub x_star: Vector,
    /// Multiplier of the regularized saddle point, for constrained slices.
    pub lambda_star: Option<Vector>,
    pub f_star: f64,
    /// Prox-gradient fixed-point residual at `x_star`.
    pub certificate: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub warm_start: Option<Vector>,
}

impl Default for BatchOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 1_000_000,
            warm_start: None,
        }
    }
}

impl BatchOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

pub fn batch_solve(slice: &ProblemSlice, tol: f64) -> Result<BatchOracleResult> {
    batch_solve_with(slice, &BatchOptions::with_tol(tol))
}

/// Solves `min_{x in X} h(x) + g(x)`.
///
/// Unconstrained, unregularized quadratics go through a direct linear solve;
/// everything else runs accelerated proximal gradient with step `1/L` and
/// adaptive restart until the fixed-point residual
/// `||x - prox(x - grad h(x) / L)|| * L` drops to `tol`.
pub fn batch_solve_with(slice: &ProblemSlice, opts: &BatchOptions) -> Result<BatchOracleResult> {
    if !(opts.tol > 0.0) {
        return Err(invalid("oracle tolerance must be positive"));
    }
    let n = slice.dim();
    let plain = matches!(slice.reg, RegularizerSpec::Zero) && matches!(slice.set, FeasibleSet::AllSpace);
    let mut start = opts.warm_start.clone().unwrap_or_else(|| Vector::zeros(n));
    crate::error::check_dim(n, start.len())?;
    if plain {
        if let Some(q) = slice.smooth.func().as_quadratic() {
            let rhs = -&q.linear;
            let direct = match q.hessian.clone().cholesky() {
                Some(ch) => Some(ch.solve(&rhs)),
                None => q.hessian.clone().svd(true, true).solve(&rhs, 1e-14).ok(),
            };
            if let Some(mut x) = direct {
                // One round of iterative refinement.
                let r = &q.hessian * &x + &q.linear;
                if let Some(ch) = q.hessian.clone().cholesky() {
                    x -= ch.solve(&r);
                }
                let certificate = (&q.hessian * &x + &q.linear).norm();
                if certificate <= opts.tol {
                    return Ok(BatchOracleResult {
                        f_star: slice.value(&x),
                        x_star: x,
                        lambda_star: None,
                        certificate,
                        iterations: 1,
                    });
                }
                start = x;
            }
        }
    }
    accelerated(slice, start, opts)
}

fn residual(slice: &ProblemSlice, x: &Vector, step: f64) -> Result<f64> {
    let g = slice.gradient(x);
    let p = prox(&slice.reg, &slice.set, step, &(x - step * g))?;
    Ok((x - p).norm() / step)
}

fn accelerated(slice: &ProblemSlice, start: Vector, opts: &BatchOptions) -> Result<BatchOracleResult> {
    let step = 1.0 / slice.smooth.lip();
    let mut x = prox(&slice.reg, &slice.set, step, &start)?;
    let mut y = x.clone();
    let mut theta = 1.0;
    let mut best = (residual(slice, &x, step)?, x.clone());
    for it in 1..=opts.max_iter {
        if best.0 <= opts.tol {
            return Ok(BatchOracleResult {
                f_star: slice.value(&best.1),
                x_star: best.1,
                lambda_star: None,
                certificate: best.0,
                iterations: it - 1,
            });
        }
        let x_next = prox(&slice.reg, &slice.set, step, &(&y - step * slice.gradient(&y)))?;
        let theta_next = (1.0 + (1.0 + 4.0 * theta * theta).sqrt()) / 2.0;
        // Gradient-based adaptive restart.
        if (&y - &x_next).dot(&(&x_next - &x)) > 0.0 {
            theta = 1.0;
            y = x_next.clone();
        } else {
            y = &x_next + ((theta - 1.0) / theta_next) * (&x_next - &x);
            theta = theta_next;
        }
        x = x_next;
        let r = residual(slice, &x, step)?;
        if r < best.0 {
            best = (r, x.clone());
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: best.0,
        best: best.1,
    })
}

/// `h(x) + ||max(c(x), 0)||^2 / (2 r)`: maximizing the regularized Lagrangian
/// over `lambda >= 0` in closed form.
#[derive(Debug)]
struct DualPenalized {
    h: SmoothPart,
    c: ConstraintMap,
    r: f64,
}

impl SmoothFn for DualPenalized {
    fn dim(&self) -> usize {
        self.h.dim()
    }

    fn value(&self, x: &Vector) -> f64 {
        let c = self.c.eval(x).map(|v| v.max(0.0));
        self.h.value(x) + c.norm_squared() / (2.0 * self.r)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let c = self.c.eval(x).map(|v| v.max(0.0));
        self.h.gradient(x) + self.c.jacobian(x).transpose() * c / self.r
    }
}

/// Saddle point of `f(x) + lambda' c(x) - r/2 ||lambda||^2` over
/// `x in Y, lambda >= 0` for `r > 0` and affine `c`.
///
/// The multiplier is eliminated (`lambda = max(c(x), 0) / r`) and the
/// resulting smooth penalized problem goes to the batch oracle.
pub fn saddle_solve(slice: &ProblemSlice, r: f64, opts: &BatchOptions) -> Result<BatchOracleResult> {
    if !(r > 0.0) {
        return Err(invalid("saddle oracle needs r > 0"));
    }
    let c = slice
        .constraints
        .clone()
        .ok_or_else(|| Error::Config("saddle oracle needs a constrained slice".into()))?;
    if c.jac_lip() > 0.0 {
        return Err(invalid("saddle oracle supports affine constraints only"));
    }
    let lip = slice.smooth.lip() + c.lip() * c.lip() / r;
    let penalized = DualPenalized {
        h: slice.smooth.clone(),
        c: c.clone(),
        r,
    };
    let smooth = SmoothPart::new(Arc::new(penalized), slice.smooth.mu(), lip)?;
    let mut inner = ProblemSlice::new(slice.t, smooth)
        .with_reg(slice.reg.clone())?
        .with_set(slice.set.clone())?;
    inner.window = slice.window.clone();
    let mut res = batch_solve_with(&inner, opts)?;
    res.lambda_star = Some(c.eval(&res.x_star).map(|v| v.max(0.0) / r));
    res.f_star = slice.value(&res.x_star);
    Ok(res)
}
