use alloc::sync::Arc;
use alloc::vec::Vec;
use rand::Rng as _;

use super::check_step;
use crate::error::{check_dim, invalid};
use crate::math::{gaussian_vector, random_orthonormal, rng_from_seed, soft_threshold, sym_eig_extremes};
use crate::{
    CustomProx, DataRecord, DataWindow, Error, FeasibleSet, Matrix, ProblemSlice, Projection, Quadratic,
    RegularizerSpec, Result, SmoothPart, TimeVaryingProblem, Vector,
};

fn side_of(len: usize) -> Result<usize> {
    let n = (0..=len).find(|k| k * k >= len).unwrap_or(0);
    if n * n != len || n < 2 {
        return Err(invalid("expected the vectorization of an N x N matrix with N >= 2"));
    }
    Ok(n)
}

/// Euclidean projection onto `{X : diag(X) = 0, X' 1 = 1}`: per column, zero
/// the diagonal entry and shift the others equally so they sum to one.
pub fn ssc_project(x: &Matrix) -> Result<Matrix> {
    let n = x.nrows();
    if n != x.ncols() || n < 2 {
        return Err(invalid("ssc projection needs a square matrix with N >= 2"));
    }
    let mut out = x.clone();
    for j in 0..n {
        let sum: f64 = (0..n).filter(|&i| i != j).map(|i| x[(i, j)]).sum();
        let shift = (1.0 - sum) / (n - 1) as f64;
        for i in 0..n {
            out[(i, j)] = if i == j { 0.0 } else { x[(i, j)] + shift };
        }
    }
    Ok(out)
}

/// `argmin_u tau ||u||_1 + 1/2 ||u - y||^2` subject to `sum u = 1`, solved
/// exactly: `u_i = soft(y_i - theta, tau)` with `theta` located among the
/// breakpoints `y_i +- tau` of the piecewise-linear constraint residual.
pub fn ssc_prox_column(y: &[f64], tau: f64) -> Vec<f64> {
    let phi = |theta: f64| -> f64 { y.iter().map(|&v| soft_threshold(v - theta, tau)).sum() };
    let m = y.len() as f64;
    let mut knots: Vec<f64> = y.iter().flat_map(|&v| [v - tau, v + tau]).collect();
    knots.sort_by(f64::total_cmp);
    // phi is nonincreasing; find the last knot with phi >= 1.
    let values: Vec<f64> = knots.iter().map(|&k| phi(k)).collect();
    let theta = match values.iter().rposition(|&v| v >= 1.0) {
        None => knots[0] - (1.0 - values[0]) / m,
        Some(k) if k + 1 == knots.len() => knots[k] + (values[k] - 1.0) / m,
        Some(k) => {
            let (a, b) = (knots[k], knots[k + 1]);
            let (fa, fb) = (values[k], values[k + 1]);
            if fa == fb {
                a
            } else {
                a + (fa - 1.0) * (b - a) / (fa - fb)
            }
        }
    };
    y.iter().map(|&v| soft_threshold(v - theta, tau)).collect()
}

/// The SSC feasible set on column-major vectorized `N x N` matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SscSet {
    pub points: usize,
}

impl Projection for SscSet {
    fn name(&self) -> &'static str {
        "ssc-affine"
    }

    fn dim(&self) -> usize {
        self.points * self.points
    }

    fn project(&self, y: &Vector) -> Result<Vector> {
        check_dim(self.dim(), y.len())?;
        let m = Matrix::from_column_slice(self.points, self.points, y.as_slice());
        Ok(Vector::from_column_slice(ssc_project(&m)?.as_slice()))
    }
}

/// `lambda ||X||_1` with its exact prox over [`SscSet`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SscProx {
    pub lambda: f64,
}

impl CustomProx for SscProx {
    fn name(&self) -> &'static str {
        "ssc-l1"
    }

    fn value(&self, x: &Vector) -> f64 {
        self.lambda * x.lp_norm(1)
    }

    fn prox(&self, set: &FeasibleSet, alpha: f64, y: &Vector) -> Result<Vector> {
        if set.name() != "ssc-affine" {
            return Err(Error::UnsupportedProx {
                reg: "ssc-l1",
                set: set.name(),
            });
        }
        let n = side_of(y.len())?;
        let tau = alpha * self.lambda;
        let mut out = Vector::zeros(y.len());
        for j in 0..n {
            let col: Vec<f64> = (0..n).filter(|&i| i != j).map(|i| y[j * n + i]).collect();
            let u = ssc_prox_column(&col, tau);
            let mut it = u.into_iter();
            for i in (0..n).filter(|&i| i != j) {
                out[j * n + i] = it.next().expect("one value per off-diagonal entry");
            }
        }
        Ok(out)
    }
}

/// Affinity `|X| + |X'|` used by spectral clustering.
pub fn ssc_similarity(x: &Matrix) -> Matrix {
    x.abs() + x.transpose().abs()
}

/// Points from a union of linear subspaces arriving into a window of `N`
/// slots. Every `arrival_period` steps a new point overwrites the oldest slot,
/// so column `j` of `X_t` always refers to slot `j`.
///
/// `h_t(X) = 1/2 ||Z_t X - Z_t||_F^2`, `g_t = lambda ||X||_1`, and
/// `X_t = {diag(X) = 0, X' 1 = 1}`.
#[derive(Debug, Clone)]
pub struct SSCStreamGen {
    points: usize,
    ambient: usize,
    horizon: usize,
    arrival_period: usize,
    lambda: f64,
    /// Every point in arrival order; the first `N` fill the initial window.
    stream: Vec<(usize, Vector)>,
}

/// Settings of an [`SSCStreamGen`].
#[derive(Debug, Clone, PartialEq)]
pub struct SscStreamConfig {
    pub ambient: usize,
    pub subspace_dim: usize,
    pub subspaces: usize,
    pub points: usize,
    pub horizon: usize,
    pub arrival_period: usize,
    pub lambda: f64,
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for SscStreamConfig {
    fn default() -> Self {
        Self {
            ambient: 8,
            subspace_dim: 2,
            subspaces: 2,
            points: 12,
            horizon: 400,
            arrival_period: 40,
            lambda: 0.05,
            noise_std: 0.01,
            seed: 0,
        }
    }
}

impl SSCStreamGen {
    pub fn new(cfg: &SscStreamConfig) -> Result<Self> {
        if cfg.points < 2 {
            return Err(invalid("SSC needs at least two points per window"));
        }
        if cfg.subspaces == 0 || cfg.subspace_dim == 0 || cfg.subspace_dim > cfg.ambient {
            return Err(invalid("subspace dimension must be in 1..=ambient"));
        }
        if cfg.arrival_period == 0 || cfg.horizon == 0 || !(cfg.lambda >= 0.0) || !(cfg.noise_std >= 0.0) {
            return Err(invalid("SSC stream parameters out of range"));
        }
        let mut rng = rng_from_seed(cfg.seed);
        let bases: Vec<Matrix> = (0..cfg.subspaces)
            .map(|_| random_orthonormal(cfg.ambient, cfg.subspace_dim, &mut rng))
            .collect();
        let total = cfg.points + cfg.horizon / cfg.arrival_period;
        let mut stream = Vec::with_capacity(total);
        for k in 0..total {
            // Round-robin labels in the initial window, random afterwards.
            let label = if k < cfg.points {
                k % cfg.subspaces
            } else {
                rng.random_range(0..cfg.subspaces)
            };
            let coeff = gaussian_vector(cfg.subspace_dim, &mut rng);
            let mut p = &bases[label] * coeff + gaussian_vector(cfg.ambient, &mut rng) * cfg.noise_std;
            let norm = p.norm();
            if norm > 0.0 {
                p /= norm;
            }
            stream.push((label, p));
        }
        Ok(Self {
            points: cfg.points,
            ambient: cfg.ambient,
            horizon: cfg.horizon,
            arrival_period: cfg.arrival_period,
            lambda: cfg.lambda,
            stream,
        })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Stream indices held by each slot at step `t`.
    fn slot_contents(&self, t: usize) -> Vec<usize> {
        let arrivals = t / self.arrival_period;
        let mut slots: Vec<usize> = (0..self.points).collect();
        for a in 0..arrivals {
            slots[a % self.points] = self.points + a;
        }
        slots
    }

    /// Data matrix `Z_t` (one point per column, in slot order).
    pub fn data(&self, t: usize) -> Result<Matrix> {
        check_step(t, self.horizon)?;
        let slots = self.slot_contents(t);
        Ok(Matrix::from_fn(self.ambient, self.points, |r, c| self.stream[slots[c]].1[r]))
    }

    /// Planted subspace label of each slot at step `t`.
    pub fn labels(&self, t: usize) -> Result<Vec<usize>> {
        check_step(t, self.horizon)?;
        Ok(self.slot_contents(t).into_iter().map(|k| self.stream[k].0).collect())
    }

    pub fn as_matrix(&self, x: &Vector) -> Result<Matrix> {
        check_dim(self.points * self.points, x.len())?;
        Ok(Matrix::from_column_slice(self.points, self.points, x.as_slice()))
    }

    /// A feasible starting point: uniform weights on the other points.
    pub fn uniform_start(&self) -> Vector {
        let n = self.points;
        let w = 1.0 / (n - 1) as f64;
        Vector::from_fn(n * n, |k, _| if k % n == k / n { 0.0 } else { w })
    }
}

impl TimeVaryingProblem for SSCStreamGen {
    fn name(&self) -> &str {
        "ssc"
    }

    fn dim(&self) -> usize {
        self.points * self.points
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn slice(&self, t: usize) -> Result<ProblemSlice> {
        let z = self.data(t)?;
        let n = self.points;
        let gram = z.transpose() * &z;
        let (lo, hi) = sym_eig_extremes(&gram);
        // vec(Z X - Z) = (I kron Z) vec(X) - vec(Z): block-diagonal Hessian.
        let mut hessian = Matrix::zeros(n * n, n * n);
        let mut linear = Vector::zeros(n * n);
        for j in 0..n {
            hessian.view_mut((j * n, j * n), (n, n)).copy_from(&gram);
            linear.rows_mut(j * n, n).copy_from(&(-gram.column(j)));
        }
        let constant = 0.5 * z.norm_squared();
        let quad = Quadratic::new(hessian, linear, constant)?;
        let smooth = SmoothPart::from_fn(quad, lo.max(0.0).min(hi), hi.max(f64::MIN_POSITIVE))?;
        let slots = self.slot_contents(t);
        let window = DataWindow::from_records(
            n,
            {
                let mut order: Vec<usize> = slots.clone();
                order.sort_unstable();
                order
            }
            .into_iter()
            .map(|k| DataRecord::new(k as i64, self.stream[k].1.clone())),
        )?;
        ProblemSlice::new(t, smooth)
            .with_window(window)
            .with_set(FeasibleSet::Custom(Arc::new(SscSet { points: n })))?
            .with_reg(RegularizerSpec::Custom(Arc::new(SscProx { lambda: self.lambda })))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn two_points_force_unit_off_diagonal() {
        let x = Matrix::from_row_slice(2, 2, &[3.0, -7.0, 0.2, 9.0]);
        let p = ssc_project(&x).unwrap();
        assert_eq!(p, Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn three_point_column_example() {
        let mut x = Matrix::zeros(3, 3);
        x[(0, 0)] = 5.0;
        let p = ssc_project(&x).unwrap();
        assert_eq!(p.column(0).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.5, 0.5]);
    }

    #[test]
    fn projection_is_idempotent() {
        let x = Matrix::from_fn(4, 4, |i, j| (i as f64 - 2.0 * j as f64).sin());
        let p = ssc_project(&x).unwrap();
        assert!((ssc_project(&p).unwrap() - &p).amax() < 1e-15);
        for j in 0..4 {
            assert_eq!(p[(j, j)], 0.0);
            assert!((p.column(j).sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_sizes_are_rejected() {
        assert!(ssc_project(&Matrix::zeros(1, 1)).is_err());
        assert!(ssc_project(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn prox_column_sums_to_one() {
        for tau in [0.0, 0.1, 1.0, 10.0] {
            let u = ssc_prox_column(&[0.3, -2.0, 4.0, 0.0], tau);
            assert!((u.iter().sum::<f64>() - 1.0).abs() < 1e-12, "tau {tau}");
        }
    }

    #[test]
    fn zero_weight_prox_is_projection() {
        let set = FeasibleSet::Custom(Arc::new(SscSet { points: 3 }));
        let y = Vector::from_fn(9, |k, _| (k as f64 * 0.7).cos());
        let a = SscProx { lambda: 0.0 }.prox(&set, 1.0, &y).unwrap();
        let b = set.project(&y).unwrap();
        assert!((a - b).amax() < 1e-12);
    }

    #[test]
    fn stream_slots_are_overwritten_in_order() {
        let cfg = SscStreamConfig {
            points: 3,
            arrival_period: 2,
            horizon: 10,
            ..SscStreamConfig::default()
        };
        let g = SSCStreamGen::new(&cfg).unwrap();
        assert_eq!(g.slot_contents(1), vec![0, 1, 2]);
        assert_eq!(g.slot_contents(2), vec![3, 1, 2]);
        assert_eq!(g.slot_contents(7), vec![3, 4, 5]);
        assert_eq!(g.slot_contents(9), vec![6, 4, 5]);
        assert!(g.slice(10).is_ok());
    }

    #[test]
    fn slice_objective_matches_matrix_form() {
        let g = SSCStreamGen::new(&SscStreamConfig::default()).unwrap();
        let s = g.slice(5).unwrap();
        let x = g.uniform_start();
        let z = g.data(5).unwrap();
        let xm = g.as_matrix(&x).unwrap();
        let direct = 0.5 * (&z * &xm - &z).norm_squared() + g.lambda() * xm.abs().sum();
        assert!((s.value(&x) - direct).abs() < 1e-10);
        assert!(s.set.residual(&x).unwrap() < 1e-12);
    }
}
