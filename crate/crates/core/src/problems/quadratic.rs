use alloc::string::String;

use super::{check_step, Drift, DriftPath};
use crate::error::invalid;
use crate::math::{gaussian_vector, random_orthonormal, rng_from_seed};
use crate::{
    AffineConstraint, ConstraintMap, FeasibleSet, Matrix, ProblemSlice, Quadratic, RegularizerSpec,
    Result, SmoothPart, TimeVaryingProblem, Vector,
};

/// Settings of a [`QuadraticStream`].
#[derive(Debug, Clone)]
pub struct QuadraticStreamConfig {
    pub dim: usize,
    /// Smallest nonzero Hessian eigenvalue.
    pub eig_min: f64,
    /// Largest Hessian eigenvalue.
    pub eig_max: f64,
    /// Hessian rank; below `dim` the problem is convex but not strongly convex.
    pub rank: Option<usize>,
    pub horizon: usize,
    /// Motion of the center `c_t`.
    pub drift: Drift,
    /// `f_t` gains `cost_shift * t`.
    pub cost_shift: f64,
    pub reg: RegularizerSpec,
    pub set: FeasibleSet,
    pub constraint: Option<AffineConstraint>,
    pub seed: u64,
}

impl QuadraticStreamConfig {
    pub fn new(dim: usize, eig_min: f64, eig_max: f64, horizon: usize, seed: u64) -> Self {
        Self {
            dim,
            eig_min,
            eig_max,
            rank: None,
            horizon,
            drift: Drift::default(),
            cost_shift: 0.0,
            reg: RegularizerSpec::Zero,
            set: FeasibleSet::AllSpace,
            constraint: None,
            seed,
        }
    }
}

/// `h_t(x) = 1/2 (x - c_t)' P (x - c_t) + cost_shift * t` with a fixed random
/// Hessian whose spectrum spans `[eig_min, eig_max]` and a drifting center.
#[derive(Debug, Clone)]
pub struct QuadraticStream {
    name: String,
    cfg: QuadraticStreamConfig,
    hessian: Matrix,
    center: Vector,
    path: DriftPath,
    mu: f64,
    lip: f64,
}

impl QuadraticStream {
    pub fn new(cfg: QuadraticStreamConfig) -> Result<Self> {
        let n = cfg.dim;
        let rank = cfg.rank.unwrap_or(n);
        if n == 0 || rank == 0 || rank > n {
            return Err(invalid("quadratic stream needs 1 <= rank <= dim"));
        }
        if !(cfg.eig_min > 0.0) || cfg.eig_min > cfg.eig_max {
            return Err(invalid("quadratic stream needs 0 < eig_min <= eig_max"));
        }
        let mut rng = rng_from_seed(cfg.seed);
        let basis = random_orthonormal(n, rank, &mut rng);
        let eigs = Vector::from_iterator(
            rank,
            (0..rank).map(|i| {
                if rank == 1 {
                    cfg.eig_max
                } else {
                    cfg.eig_min + (cfg.eig_max - cfg.eig_min) * i as f64 / (rank - 1) as f64
                }
            }),
        );
        let hessian = &basis * Matrix::from_diagonal(&eigs) * basis.transpose();
        let hessian = (&hessian + hessian.transpose()) * 0.5;
        let center = gaussian_vector(n, &mut rng);
        let path = cfg.drift.realize(n, &mut rng);
        let mu = if rank < n { 0.0 } else { eigs.min() };
        let lip = eigs.max();
        Ok(Self {
            name: "quadratic".into(),
            cfg,
            hessian,
            center,
            path,
            mu,
            lip,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn hessian(&self) -> &Matrix {
        &self.hessian
    }

    /// `c_t`, the minimizer of `h_t` over all of space.
    pub fn center(&self, t: usize) -> Vector {
        &self.center + self.path.offset(t as i64)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lip(&self) -> f64 {
        self.lip
    }
}

impl TimeVaryingProblem for QuadraticStream {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.cfg.dim
    }

    fn horizon(&self) -> usize {
        self.cfg.horizon
    }

    fn slice(&self, t: usize) -> Result<ProblemSlice> {
        check_step(t, self.cfg.horizon)?;
        let q = Quadratic::centered(self.hessian.clone(), &self.center(t), self.cfg.cost_shift * t as f64)?;
        let mut slice = ProblemSlice::new(t, SmoothPart::from_fn(q, self.mu, self.lip)?)
            .with_reg(self.cfg.reg.clone())?
            .with_set(self.cfg.set.clone())?;
        if let Some(c) = &self.cfg.constraint {
            slice = slice.with_constraints(ConstraintMap::affine(c.clone()))?;
        }
        Ok(slice)
    }
}
