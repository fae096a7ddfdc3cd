//! Small numerical helpers shared across modules.

#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Matrix, Rng, Vector};

/// Scalar soft-thresholding `sign(v) * max(|v| - tau, 0)`.
pub fn soft_threshold(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

pub fn soft_threshold_vec(v: &Vector, tau: f64) -> Vector {
    v.map(|x| soft_threshold(x, tau))
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn sym_eig_extremes(m: &Matrix) -> (f64, f64) {
    if m.nrows() == 0 {
        return (0.0, 0.0);
    }
    let eig = m.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

/// Largest singular value.
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Singular-value soft-thresholding: the prox of `tau * ||.||_*`.
pub fn singular_value_threshold(m: &Matrix, tau: f64) -> Matrix {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return m.clone();
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let mut out = Matrix::zeros(r, c);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        let shrunk = s - tau;
        if shrunk > 0.0 {
            out += shrunk * u.column(k) * vt.row(k);
        }
    }
    out
}

pub fn nuclear_norm(m: &Matrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// splitmix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a base seed and a path of ids
/// (run id, node id, time step, ...).
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(base), |acc, &p| mix64(acc ^ mix64(p)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(n: usize, rng: &mut Rng) -> Vector {
    Vector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(rng)))
}

pub fn gaussian_matrix(r: usize, c: usize, rng: &mut Rng) -> Matrix {
    Matrix::from_iterator(r, c, (0..r * c).map(|_| StandardNormal.sample(rng)))
}

/// Uniformly distributed point on the unit sphere.
pub fn random_unit(n: usize, rng: &mut Rng) -> Vector {
    loop {
        let v = gaussian_vector(n, rng);
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Orthonormal basis (columns) of a random `k`-dimensional subspace of `R^n`.
pub fn random_orthonormal(n: usize, k: usize, rng: &mut Rng) -> Matrix {
    let g = gaussian_matrix(n, k, rng);
    g.qr().q().columns(0, k).into_owned()
}

/// `log(1 + exp(z))` without overflow.
pub fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Logistic sigmoid `1 / (1 + exp(-z))` without overflow.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Dense Hessian-free check: `true` when every entry is finite.
pub fn all_finite(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}
