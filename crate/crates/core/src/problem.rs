//! The time-`t` problem `min_{x in X_t} h_t(x) + g_t(x)` and its building blocks.

use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use crate::error::{check_dim, invalid};
use crate::{DataWindow, Error, Matrix, Result, Rng, TimeGrid, Vector};

/// A convex, differentiable function with Lipschitz gradient.
pub trait SmoothFn: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;

    /// `d' H d` when the Hessian is constant (quadratic functions).
    fn curvature_along(&self, _d: &Vector) -> Option<f64> {
        None
    }

    fn as_quadratic(&self) -> Option<&Quadratic> {
        None
    }
}

/// `h(x) = 1/2 x'Px + q'x + c` with `P` symmetric positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    pub hessian: Matrix,
    pub linear: Vector,
    pub constant: f64,
}

impl Quadratic {
    pub fn new(hessian: Matrix, linear: Vector, constant: f64) -> Result<Self> {
        let n = linear.len();
        check_dim(n, hessian.nrows())?;
        check_dim(n, hessian.ncols())?;
        let asym = (&hessian - hessian.transpose()).amax();
        if asym > 1e-9 * (1.0 + hessian.amax()) {
            return Err(invalid("quadratic Hessian must be symmetric"));
        }
        Ok(Self {
            hessian,
            linear,
            constant,
        })
    }

    /// `1/2 (x - center)' P (x - center) + offset`.
    pub fn centered(hessian: Matrix, center: &Vector, offset: f64) -> Result<Self> {
        let linear = -(&hessian * center);
        let constant = 0.5 * center.dot(&(&hessian * center)) + offset;
        Self::new(hessian, linear, constant)
    }
}

impl SmoothFn for Quadratic {
    fn dim(&self) -> usize {
        self.linear.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.hessian * x)) + self.linear.dot(x) + self.constant
    }

    fn gradient(&self, x: &Vector) -> Vector {
        &self.hessian * x + &self.linear
    }

    fn curvature_along(&self, d: &Vector) -> Option<f64> {
        Some(d.dot(&(&self.hessian * d)))
    }

    fn as_quadratic(&self) -> Option<&Quadratic> {
        Some(self)
    }
}

/// The smooth part `h_t` together with its strong-convexity modulus and
/// gradient Lipschitz constant, both supplied analytically by the generator.
#[derive(Clone)]
pub struct SmoothPart {
    func: Arc<dyn SmoothFn>,
    mu: f64,
    lip: f64,
}

impl SmoothPart {
    pub fn new(func: Arc<dyn SmoothFn>, mu: f64, lip: f64) -> Result<Self> {
        if !(lip > 0.0) || !(mu >= 0.0) || mu > lip {
            return Err(invalid("smooth part needs 0 <= mu <= L and L > 0"));
        }
        Ok(Self { func, mu, lip })
    }

    pub fn from_fn(func: impl SmoothFn + 'static, mu: f64, lip: f64) -> Result<Self> {
        Self::new(Arc::new(func), mu, lip)
    }

    pub fn dim(&self) -> usize {
        self.func.dim()
    }

    pub fn value(&self, x: &Vector) -> f64 {
        self.func.value(x)
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        self.func.gradient(x)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub fn func(&self) -> &dyn SmoothFn {
        self.func.as_ref()
    }
}

impl fmt::Debug for SmoothPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothPart")
            .field("func", &self.func)
            .field("mu", &self.mu)
            .field("lip", &self.lip)
            .finish()
    }
}

/// Regularizer with a user-supplied prox. The prox receives the feasible set
/// and must return the exact constrained prox or an error.
pub trait CustomProx: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn value(&self, x: &Vector) -> f64;
    fn prox(&self, set: &FeasibleSet, alpha: f64, y: &Vector) -> Result<Vector>;
}

/// The nonsmooth part `g_t`.
#[derive(Debug, Clone)]
pub enum RegularizerSpec {
    Zero,
    L1 { weight: f64 },
    /// `weight * ||mat(x)||_*` with `x` the column-major vectorization of a
    /// `rows x cols` matrix.
    Nuclear { weight: f64, rows: usize, cols: usize },
    Custom(Arc<dyn CustomProx>),
}

impl RegularizerSpec {
    pub fn l1(weight: f64) -> Result<Self> {
        if !(weight >= 0.0) {
            return Err(invalid("l1 weight must be nonnegative"));
        }
        Ok(Self::L1 { weight })
    }

    pub fn nuclear(weight: f64, rows: usize, cols: usize) -> Result<Self> {
        if !(weight >= 0.0) {
            return Err(invalid("nuclear weight must be nonnegative"));
        }
        Ok(Self::Nuclear { weight, rows, cols })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::L1 { .. } => "l1",
            Self::Nuclear { .. } => "nuclear",
            Self::Custom(c) => c.name(),
        }
    }

    pub fn value(&self, x: &Vector) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::L1 { weight } => weight * x.lp_norm(1),
            Self::Nuclear { weight, rows, cols } => {
                let m = Matrix::from_column_slice(*rows, *cols, x.as_slice());
                weight * crate::math::nuclear_norm(&m)
            }
            Self::Custom(c) => c.value(x),
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Self::Nuclear { rows, cols, .. } => Some(rows * cols),
            _ => None,
        }
    }
}

/// Euclidean projection supplied by the caller.
pub trait Projection: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn dim(&self) -> usize;
    fn project(&self, y: &Vector) -> Result<Vector>;
}

/// `{x : E x = d}`, stored with the pseudo-inverse of `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSet {
    matrix: Matrix,
    rhs: Vector,
    pinv: Matrix,
}

impl AffineSet {
    pub fn new(matrix: Matrix, rhs: Vector) -> Result<Self> {
        check_dim(matrix.nrows(), rhs.len())?;
        let pinv = matrix
            .clone()
            .pseudo_inverse(1e-12)
            .map_err(|e| invalid(alloc::format!("pseudo-inverse failed: {e}")))?;
        let residual = (&matrix * (&pinv * &rhs) - &rhs).norm();
        if residual > 1e-9 * (1.0 + rhs.norm()) {
            return Err(invalid("affine set is empty (inconsistent equations)"));
        }
        Ok(Self { matrix, rhs, pinv })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &Vector {
        &self.rhs
    }

    pub fn project(&self, y: &Vector) -> Vector {
        let r = &self.matrix * y - &self.rhs;
        y - &self.pinv * r
    }
}

/// The closed convex set `X_t` (or `Y_t` for primal-dual problems).
#[derive(Debug, Clone)]
pub enum FeasibleSet {
    AllSpace,
    Box { lower: Vector, upper: Vector },
    Affine(AffineSet),
    NonnegOrthant,
    Custom(Arc<dyn Projection>),
}

impl FeasibleSet {
    pub fn boxed(lower: Vector, upper: Vector) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.iter().zip(upper.iter()).any(|(l, u)| !(l <= u)) {
            return Err(invalid("box needs lower <= upper in every coordinate"));
        }
        Ok(Self::Box { lower, upper })
    }

    pub fn affine(matrix: Matrix, rhs: Vector) -> Result<Self> {
        Ok(Self::Affine(AffineSet::new(matrix, rhs)?))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::AllSpace => "all-space",
            Self::Box { .. } => "box",
            Self::Affine(_) => "affine",
            Self::NonnegOrthant => "nonneg-orthant",
            Self::Custom(p) => p.name(),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Box { lower, .. } => Some(lower.len()),
            Self::Affine(a) => Some(a.matrix.ncols()),
            Self::Custom(p) => Some(p.dim()),
            Self::AllSpace | Self::NonnegOrthant => None,
        }
    }

    pub fn project(&self, y: &Vector) -> Result<Vector> {
        if let Some(n) = self.dim() {
            check_dim(n, y.len())?;
        }
        Ok(match self {
            Self::AllSpace => y.clone(),
            Self::Box { lower, upper } => {
                Vector::from_iterator(y.len(), (0..y.len()).map(|i| y[i].clamp(lower[i], upper[i])))
            }
            Self::Affine(a) => a.project(y),
            Self::NonnegOrthant => y.map(|v| v.max(0.0)),
            Self::Custom(p) => p.project(y)?,
        })
    }

    /// Distance between `x` and its projection.
    pub fn residual(&self, x: &Vector) -> Result<f64> {
        Ok((self.project(x)? - x).norm())
    }
}

/// Vector-valued convex constraint `c(x) <= 0`.
pub trait ConstraintFn: Send + Sync + fmt::Debug {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn eval(&self, x: &Vector) -> Vector;
    fn jacobian(&self, x: &Vector) -> Matrix;
}

/// `c(x) = G x - h`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineConstraint {
    pub g: Matrix,
    pub h: Vector,
}

impl AffineConstraint {
    pub fn new(g: Matrix, h: Vector) -> Result<Self> {
        check_dim(g.nrows(), h.len())?;
        Ok(Self { g, h })
    }
}

impl ConstraintFn for AffineConstraint {
    fn dim_in(&self) -> usize {
        self.g.ncols()
    }

    fn dim_out(&self) -> usize {
        self.g.nrows()
    }

    fn eval(&self, x: &Vector) -> Vector {
        &self.g * x - &self.h
    }

    fn jacobian(&self, _x: &Vector) -> Matrix {
        self.g.clone()
    }
}

/// Constraint map plus the Lipschitz data used for the primal-dual constants:
/// `lip` bounds `||J_c(x)||_2` and `jac_lip` is the Lipschitz constant of `J_c`.
#[derive(Clone)]
pub struct ConstraintMap {
    func: Arc<dyn ConstraintFn>,
    lip: f64,
    jac_lip: f64,
}

impl ConstraintMap {
    pub fn new(func: Arc<dyn ConstraintFn>, lip: f64, jac_lip: f64) -> Result<Self> {
        if !(lip >= 0.0) || !(jac_lip >= 0.0) {
            return Err(invalid("constraint Lipschitz data must be nonnegative"));
        }
        Ok(Self { func, lip, jac_lip })
    }

    pub fn affine(c: AffineConstraint) -> Self {
        let lip = crate::math::spectral_norm(&c.g);
        Self {
            func: Arc::new(c),
            lip,
            jac_lip: 0.0,
        }
    }

    pub fn dim_in(&self) -> usize {
        self.func.dim_in()
    }

    pub fn dim_out(&self) -> usize {
        self.func.dim_out()
    }

    pub fn eval(&self, x: &Vector) -> Vector {
        self.func.eval(x)
    }

    pub fn jacobian(&self, x: &Vector) -> Matrix {
        self.func.jacobian(x)
    }

    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub fn jac_lip(&self) -> f64 {
        self.jac_lip
    }
}

impl fmt::Debug for ConstraintMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstraintMap")
            .field("func", &self.func)
            .field("lip", &self.lip)
            .field("jac_lip", &self.jac_lip)
            .finish()
    }
}

/// Problem-specific gradient estimate, e.g. one built from sensor readings.
pub trait GradientSurrogate: Send + Sync + fmt::Debug {
    fn sample(&self, x: &Vector, rng: &mut Rng) -> Vector;
}

/// Everything a solver sees at step `t`.
#[derive(Debug, Clone)]
pub struct ProblemSlice {
    pub t: usize,
    pub smooth: SmoothPart,
    pub reg: RegularizerSpec,
    pub set: FeasibleSet,
    pub constraints: Option<ConstraintMap>,
    pub window: DataWindow,
    pub surrogate: Option<Arc<dyn GradientSurrogate>>,
}

impl ProblemSlice {
    /// Unconstrained, unregularized slice.
    pub fn new(t: usize, smooth: SmoothPart) -> Self {
        Self {
            t,
            smooth,
            reg: RegularizerSpec::Zero,
            set: FeasibleSet::AllSpace,
            constraints: None,
            window: DataWindow::empty(),
            surrogate: None,
        }
    }

    pub fn with_reg(mut self, reg: RegularizerSpec) -> Result<Self> {
        if let Some(n) = reg.dim() {
            check_dim(self.dim(), n)?;
        }
        self.reg = reg;
        Ok(self)
    }

    pub fn with_set(mut self, set: FeasibleSet) -> Result<Self> {
        if let Some(n) = set.dim() {
            check_dim(self.dim(), n)?;
        }
        self.set = set;
        Ok(self)
    }

    pub fn with_constraints(mut self, constraints: ConstraintMap) -> Result<Self> {
        check_dim(self.dim(), constraints.dim_in())?;
        self.constraints = Some(constraints);
        Ok(self)
    }

    pub fn with_window(mut self, window: DataWindow) -> Self {
        self.window = window;
        self
    }

    pub fn with_surrogate(mut self, surrogate: Arc<dyn GradientSurrogate>) -> Self {
        self.surrogate = Some(surrogate);
        self
    }

    pub fn dim(&self) -> usize {
        self.smooth.dim()
    }

    /// `f_t(x) = h_t(x) + g_t(x)`.
    pub fn value(&self, x: &Vector) -> f64 {
        self.smooth.value(x) + self.reg.value(x)
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        self.smooth.gradient(x)
    }
}

/// A stream of problem slices `f_1, ..., f_T`.
pub trait TimeVaryingProblem: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn horizon(&self) -> usize;
    /// Slice for step `t` in `1..=horizon`.
    fn slice(&self, t: usize) -> Result<ProblemSlice>;
}

/// Materializes the slice for the next step of `grid`, or `None` once the
/// horizon is reached.
pub fn advance(
    problem: &dyn TimeVaryingProblem,
    grid: &mut TimeGrid,
) -> Result<Option<ProblemSlice>> {
    if grid.horizon() > problem.horizon() {
        return Err(invalid("time grid exceeds the problem horizon"));
    }
    match grid.tick() {
        Some(t) => problem.slice(t).map(Some),
        None => Ok(None),
    }
}

/// The same slice at every step.
#[derive(Debug, Clone)]
pub struct StaticProblem {
    name: String,
    base: ProblemSlice,
    horizon: usize,
}

impl StaticProblem {
    pub fn new(name: impl Into<String>, base: ProblemSlice, horizon: usize) -> Self {
        Self {
            name: name.into(),
            base,
            horizon,
        }
    }
}

impl TimeVaryingProblem for StaticProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn slice(&self, t: usize) -> Result<ProblemSlice> {
        if t == 0 || t > self.horizon {
            return Err(Error::InvalidParameter(alloc::format!(
                "step {t} outside 1..={}",
                self.horizon
            )));
        }
        let mut s = self.base.clone();
        s.t = t;
        Ok(s)
    }
}
