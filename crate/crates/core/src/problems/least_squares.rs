#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_step, Drift, DriftPath, Jump};
use crate::error::invalid;
use crate::math::{gaussian_vector, rng_from_seed, sym_eig_extremes};
use crate::{
    DataRecord, DataWindow, Matrix, ProblemSlice, Quadratic, RegularizerSpec, Result, SmoothPart,
    TimeVaryingProblem, Vector,
};
use rand_distr::{Distribution, Normal};

/// Sliding-window least squares
/// `h_t(x) = scale * sum_{tau in (t - W, t]} ||A_tau x - b_tau||^2`
/// with standard-normal `A_tau` (`m` rows per record) and
/// `b_tau = A_tau x_lat(tau) + noise`. The latent point `x_lat` follows a
/// [`Drift`] around a random base.
///
/// Each record's payload stacks the rows as `[a_1; b_1; ...; a_m; b_m]`.
#[derive(Debug, Clone)]
pub struct TVLeastSquaresGen {
    name: String,
    dim: usize,
    rows: usize,
    window: usize,
    horizon: usize,
    scale: f64,
    first_tau: i64,
    records: Vec<DataRecord>,
    base: Vector,
    path: DriftPath,
}

impl TVLeastSquaresGen {
    /// One row per record, `scale = 1/2`, `b` noise with standard deviation
    /// `noise_std`.
    pub fn new(dim: usize, window: usize, horizon: usize, drift: Drift, noise_std: f64, seed: u64) -> Result<Self> {
        Self::with_rows(dim, 1, window, horizon, drift, noise_std, seed)
    }

    /// `rows` rows of `A_tau` per record.
    pub fn with_rows(
        dim: usize,
        rows: usize,
        window: usize,
        horizon: usize,
        drift: Drift,
        noise_std: f64,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 || rows == 0 || window == 0 || horizon == 0 {
            return Err(invalid("least squares needs positive dim, window and horizon"));
        }
        if !(noise_std >= 0.0) {
            return Err(invalid("noise standard deviation must be nonnegative"));
        }
        let mut rng = rng_from_seed(seed);
        let base = gaussian_vector(dim, &mut rng);
        let path = drift.realize(dim, &mut rng);
        let noise = Normal::new(0.0, noise_std).map_err(|_| invalid("bad noise level"))?;
        let first_tau = 2 - window as i64;
        let mut records = Vec::with_capacity(horizon + window - 1);
        for tau in first_tau..=horizon as i64 {
            let latent = &base + path.offset(tau);
            let mut values = Vector::zeros(rows * (dim + 1));
            for k in 0..rows {
                let a = gaussian_vector(dim, &mut rng);
                let b = a.dot(&latent) + noise.sample(&mut rng);
                values.rows_mut(k * (dim + 1), dim).copy_from(&a);
                values[k * (dim + 1) + dim] = b;
            }
            records.push(DataRecord::new(tau, values));
        }
        Ok(Self {
            name: "least_squares".into(),
            dim,
            rows,
            window,
            horizon,
            scale: 0.5,
            first_tau,
            records,
            base,
            path,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(invalid("least-squares scale must be positive"));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn rows_per_record(&self) -> usize {
        self.rows
    }

    pub fn window_length(&self) -> usize {
        self.window
    }

    /// Every record `tau = 2 - W, ..., T` in arrival order.
    pub fn records(&self) -> &[DataRecord] {
        &self.records
    }

    /// `x_lat(tau)`.
    pub fn latent(&self, tau: i64) -> Vector {
        &self.base + self.path.offset(tau)
    }

    /// The `W` records of step `t`.
    pub fn window_at(&self, t: usize) -> Result<DataWindow> {
        check_step(t, self.horizon)?;
        let end = (t as i64 - self.first_tau) as usize + 1;
        DataWindow::from_records(self.window, self.records[end - self.window..end].iter().cloned())
    }

    /// `(hessian, linear, constant)` of the window's quadratic.
    fn assemble(&self, window: &DataWindow) -> (Matrix, Vector, f64) {
        let n = self.dim;
        let mut gram = Matrix::zeros(n, n);
        let mut atb = Vector::zeros(n);
        let mut btb = 0.0;
        for r in window.records() {
            for k in 0..self.rows {
                let a = r.values.rows(k * (n + 1), n);
                let b = r.values[k * (n + 1) + n];
                gram.ger(1.0, &a, &a, 1.0);
                atb.axpy(b, &a, 1.0);
                btb += b * b;
            }
        }
        let s = self.scale;
        (gram * (2.0 * s), atb * (-2.0 * s), s * btb)
    }

    fn smooth_slice(&self, t: usize) -> Result<ProblemSlice> {
        let window = self.window_at(t)?;
        let (p, q, c) = self.assemble(&window);
        let (lo, hi) = sym_eig_extremes(&p);
        let quad = Quadratic::new(p, q, c)?;
        let smooth = SmoothPart::from_fn(quad, lo.max(0.0).min(hi), hi)?;
        Ok(ProblemSlice::new(t, smooth).with_window(window))
    }
}

impl TimeVaryingProblem for TVLeastSquaresGen {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn slice(&self, t: usize) -> Result<ProblemSlice> {
        self.smooth_slice(t)
    }
}

/// Seed under which the fig1 instance shows heavy-ball divergence.
pub const FIG1_SEED: u64 = 2;

/// The time-varying least-squares instance with two designed jumps: `n = 50`,
/// `W = 50`, `T = 950`, latent jumps of norm 10 at `t = 250` and `t = 550`
/// on top of a slow oscillation. Each record carries two rows so that every
/// window is well conditioned.
pub fn gen_fig1_instance(seed: u64) -> TVLeastSquaresGen {
    let drift = Drift::sinusoid(0.1, 0.01).with_jumps(vec![
        Jump { t: 250, magnitude: 10.0 },
        Jump { t: 550, magnitude: 10.0 },
    ]);
    TVLeastSquaresGen::with_rows(50, 2, 50, 950, drift, 0.0, seed)
        .expect("fixed parameters are valid")
        .named("fig1")
}

/// `lambda_t = base * (1 + amplitude * sin(omega t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSchedule {
    pub base: f64,
    pub amplitude: f64,
    pub omega: f64,
}

impl LambdaSchedule {
    pub fn constant(base: f64) -> Self {
        Self {
            base,
            amplitude: 0.0,
            omega: 0.0,
        }
    }

    pub fn at(&self, t: usize) -> f64 {
        self.base * (1.0 + self.amplitude * (self.omega * t as f64).sin())
    }
}

/// Sliding-window lasso `sum (a_tau' x - b_tau)^2 + lambda_t ||x||_1`.
#[derive(Debug, Clone)]
pub struct TVLassoGen {
    ls: TVLeastSquaresGen,
    lambda: LambdaSchedule,
}

impl TVLassoGen {
    pub fn new(ls: TVLeastSquaresGen, lambda: LambdaSchedule) -> Result<Self> {
        if !(lambda.base > 0.0) || !(lambda.amplitude.abs() < 1.0) {
            return Err(invalid("lasso weight must stay positive"));
        }
        let ls = ls.with_scale(1.0)?;
        Ok(Self { ls, lambda })
    }

    pub fn lambda_at(&self, t: usize) -> f64 {
        self.lambda.at(t)
    }

    pub fn least_squares(&self) -> &TVLeastSquaresGen {
        &self.ls
    }
}

impl TimeVaryingProblem for TVLassoGen {
    fn name(&self) -> &str {
        "lasso"
    }

    fn dim(&self) -> usize {
        self.ls.dim
    }

    fn horizon(&self) -> usize {
        self.ls.horizon
    }

    fn slice(&self, t: usize) -> Result<ProblemSlice> {
        self.ls.smooth_slice(t)?.with_reg(RegularizerSpec::l1(self.lambda_at(t))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> TVLeastSquaresGen {
        TVLeastSquaresGen::new(3, 5, 20, Drift::sinusoid(0.5, 0.3), 0.0, 11).unwrap()
    }

    #[test]
    fn window_holds_the_latest_records() {
        let g = small();
        let w = g.window_at(1).unwrap();
        assert_eq!(w.taus().collect::<Vec<_>>(), vec![-3, -2, -1, 0, 1]);
        let w = g.window_at(20).unwrap();
        assert_eq!(w.taus().collect::<Vec<_>>(), vec![16, 17, 18, 19, 20]);
    }

    #[test]
    fn slice_matches_direct_residual_sum() {
        let g = small();
        let s = g.slice(7).unwrap();
        let x = Vector::from_vec(vec![0.3, -1.0, 2.0]);
        let direct: f64 = s
            .window
            .records()
            .map(|r| {
                let a = r.values.rows(0, 3);
                0.5 * (a.dot(&x) - r.values[3]).powi(2)
            })
            .sum();
        assert!((s.value(&x) - direct).abs() < 1e-10 * (1.0 + direct));
    }

    #[test]
    fn noiseless_static_window_recovers_latent() {
        let g = TVLeastSquaresGen::new(3, 6, 10, Drift::default(), 0.0, 2).unwrap();
        let s = g.slice(4).unwrap();
        let x = g.latent(4);
        assert!(s.gradient(&x).norm() < 1e-10);
    }

    #[test]
    fn lasso_objective_is_unscaled_sum_plus_l1() {
        let ls = small();
        let lasso = TVLassoGen::new(ls.clone(), LambdaSchedule::constant(0.7)).unwrap();
        let x = Vector::from_vec(vec![1.0, -2.0, 0.5]);
        let s_ls = ls.slice(3).unwrap();
        let s = lasso.slice(3).unwrap();
        assert!((s.value(&x) - (2.0 * s_ls.value(&x) + 0.7 * 3.5)).abs() < 1e-9);
        assert!((s.smooth.lip() - 2.0 * s_ls.smooth.lip()).abs() < 1e-9);
    }

    #[test]
    fn same_seed_same_stream() {
        assert_eq!(small().records(), small().records());
    }

    #[test]
    fn multi_row_records_recover_latent() {
        let g = TVLeastSquaresGen::with_rows(4, 3, 2, 5, Drift::default(), 0.0, 9).unwrap();
        assert_eq!(g.rows_per_record(), 3);
        let s = g.slice(3).unwrap();
        assert!(s.smooth.mu() > 1e-6);
        assert!(s.gradient(&g.latent(3)).norm() < 1e-10);
    }

    #[test]
    fn fig1_window_sees_the_jump() {
        let g = gen_fig1_instance(FIG1_SEED);
        let before = g.window_at(249).unwrap();
        let after = g.window_at(250).unwrap();
        assert_eq!(before.taus().last(), Some(249));
        assert_eq!(after.taus().last(), Some(250));
        assert!((g.latent(250) - g.latent(249)).norm() > 9.0);
    }
}
