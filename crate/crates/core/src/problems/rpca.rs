#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use alloc::vec::Vec;
use rand::Rng as _;

use super::check_step;
use crate::error::{check_dim, invalid};
use crate::math::{gaussian_matrix, nuclear_norm, random_orthonormal, rng_from_seed, singular_value_threshold};
use crate::{Matrix, ProblemSlice, RegularizerSpec, Result, SmoothFn, SmoothPart, TimeVaryingProblem, Vector};

/// `grad h(S) = rho (L + S - Z)` with `L = svt(Z - S, 1/rho)` the minimizer of
/// `||L||_* + rho/2 ||L + S - Z||_F^2`. Returns `(grad, L)`.
pub fn rpca_smooth_gradient(s: &Matrix, z: &Matrix, rho: f64) -> Result<(Matrix, Matrix)> {
    if s.shape() != z.shape() {
        return Err(crate::Error::DimensionMismatch {
            expected: z.nrows() * z.ncols(),
            found: s.nrows() * s.ncols(),
        });
    }
    if !(rho > 0.0) {
        return Err(invalid("rho must be positive"));
    }
    let low_rank = singular_value_threshold(&(z - s), 1.0 / rho);
    let grad = (&low_rank + s - z) * rho;
    Ok((grad, low_rank))
}

/// `lambda ||S||_1 + h(S)`.
pub fn rpca_objective(s: &Matrix, z: &Matrix, lambda: f64, rho: f64) -> Result<f64> {
    let h = RpcaSmooth::new(z.clone(), rho)?;
    Ok(lambda * s.iter().map(|v| v.abs()).sum::<f64>() + h.value_of(s))
}

/// `h(S) = min_L ||L||_* + rho/2 ||L + S - Z||_F^2` on the column-major
/// vectorization of `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct RpcaSmooth {
    z: Matrix,
    rho: f64,
}

impl RpcaSmooth {
    pub fn new(z: Matrix, rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(invalid("rho must be positive"));
        }
        Ok(Self { z, rho })
    }

    fn as_matrix(&self, x: &Vector) -> Matrix {
        Matrix::from_column_slice(self.z.nrows(), self.z.ncols(), x.as_slice())
    }

    fn value_of(&self, s: &Matrix) -> f64 {
        let low_rank = singular_value_threshold(&(&self.z - s), 1.0 / self.rho);
        nuclear_norm(&low_rank) + 0.5 * self.rho * (low_rank + s - &self.z).norm_squared()
    }
}

impl SmoothFn for RpcaSmooth {
    fn dim(&self) -> usize {
        self.z.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        self.value_of(&self.as_matrix(x))
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let (g, _) = rpca_smooth_gradient(&self.as_matrix(x), &self.z, self.rho).expect("shape fixed by dim");
        Vector::from_column_slice(g.as_slice())
    }
}

/// Synthetic video stream: clip `k` is `Z_k = B_k + F_k + noise` with a rank-`r`
/// background `B_k` whose column space rotates slowly from clip to clip and a
/// sparse foreground `F_k`.
#[derive(Debug, Clone)]
pub struct RobustPCAStreamGen {
    side: usize,
    frames: usize,
    clips: Vec<Matrix>,
    backgrounds: Vec<Matrix>,
    foregrounds: Vec<Matrix>,
    lambda: f64,
    rho: f64,
}

/// Settings of a [`RobustPCAStreamGen`].
#[derive(Debug, Clone, PartialEq)]
pub struct RpcaStreamConfig {
    /// Image side `p`; frames have `p^2` pixels.
    pub side: usize,
    pub frames: usize,
    pub clips: usize,
    pub rank: usize,
    pub sparse_fraction: f64,
    pub noise_std: f64,
    /// Rotation (radians) of the background subspace per clip.
    pub rotation: f64,
    pub lambda: Option<f64>,
    pub rho: f64,
    pub seed: u64,
}

impl Default for RpcaStreamConfig {
    fn default() -> Self {
        Self {
            side: 12,
            frames: 15,
            clips: 20,
            rank: 2,
            sparse_fraction: 0.05,
            noise_std: 0.01,
            rotation: 0.05,
            lambda: None,
            rho: 10.0,
            seed: 0,
        }
    }
}

impl RobustPCAStreamGen {
    pub fn new(cfg: &RpcaStreamConfig) -> Result<Self> {
        let pixels = cfg.side * cfg.side;
        if cfg.side == 0 || cfg.frames == 0 || cfg.clips == 0 {
            return Err(invalid("rpca stream needs positive side, frames and clips"));
        }
        if cfg.rank == 0 || 2 * cfg.rank > pixels || cfg.rank > cfg.frames {
            return Err(invalid("background rank too large for the clip size"));
        }
        if !(0.0..=1.0).contains(&cfg.sparse_fraction) || !(cfg.noise_std >= 0.0) || !(cfg.rho > 0.0) {
            return Err(invalid("rpca stream parameters out of range"));
        }
        let lambda = cfg.lambda.unwrap_or(1.0 / cfg.side as f64);
        if !(lambda > 0.0) {
            return Err(invalid("lambda must be positive"));
        }
        let mut rng = rng_from_seed(cfg.seed);
        let both = random_orthonormal(pixels, 2 * cfg.rank, &mut rng);
        let u0 = both.columns(0, cfg.rank).into_owned();
        let u1 = both.columns(cfg.rank, cfg.rank).into_owned();
        let strengths = Vector::from_iterator(cfg.rank, (0..cfg.rank).map(|i| 60.0 / (1 << i) as f64));
        let mut clips = Vec::with_capacity(cfg.clips);
        let mut backgrounds = Vec::with_capacity(cfg.clips);
        let mut foregrounds = Vec::with_capacity(cfg.clips);
        for k in 0..cfg.clips {
            let theta = cfg.rotation * k as f64;
            let u = &u0 * theta.cos() + &u1 * theta.sin();
            let v = random_orthonormal(cfg.frames, cfg.rank, &mut rng);
            let background = &u * Matrix::from_diagonal(&strengths) * v.transpose();
            let mut foreground = Matrix::zeros(pixels, cfg.frames);
            for entry in foreground.iter_mut() {
                if rng.random::<f64>() < cfg.sparse_fraction {
                    let mag = rng.random_range(2.0..5.0);
                    *entry = if rng.random::<bool>() { mag } else { -mag };
                }
            }
            let noise = gaussian_matrix(pixels, cfg.frames, &mut rng) * cfg.noise_std;
            clips.push(&background + &foreground + noise);
            backgrounds.push(background);
            foregrounds.push(foreground);
        }
        Ok(Self {
            side: cfg.side,
            frames: cfg.frames,
            clips,
            backgrounds,
            foregrounds,
            lambda,
            rho: cfg.rho,
        })
    }

    pub fn clip(&self, t: usize) -> Result<&Matrix> {
        check_step(t, self.clips.len())?;
        Ok(&self.clips[t - 1])
    }

    pub fn planted_background(&self, t: usize) -> Result<&Matrix> {
        check_step(t, self.clips.len())?;
        Ok(&self.backgrounds[t - 1])
    }

    pub fn planted_foreground(&self, t: usize) -> Result<&Matrix> {
        check_step(t, self.clips.len())?;
        Ok(&self.foregrounds[t - 1])
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.side * self.side, self.frames)
    }

    /// Reshapes an iterate into the `p^2 x frames` foreground matrix.
    pub fn as_matrix(&self, x: &Vector) -> Result<Matrix> {
        let (r, c) = self.shape();
        check_dim(r * c, x.len())?;
        Ok(Matrix::from_column_slice(r, c, x.as_slice()))
    }
}

impl TimeVaryingProblem for RobustPCAStreamGen {
    fn name(&self) -> &str {
        "rpca"
    }

    fn dim(&self) -> usize {
        let (r, c) = self.shape();
        r * c
    }

    fn horizon(&self) -> usize {
        self.clips.len()
    }

    fn slice(&self, t: usize) -> Result<ProblemSlice> {
        let z = self.clip(t)?.clone();
        let smooth = SmoothPart::from_fn(RpcaSmooth::new(z, self.rho)?, 0.0, self.rho)?;
        ProblemSlice::new(t, smooth).with_reg(RegularizerSpec::l1(self.lambda)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn equal_inputs_give_zero_gradient() {
        let z = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let (g, l) = rpca_smooth_gradient(&z, &z, 3.0).unwrap();
        assert_eq!(g.norm(), 0.0);
        assert_eq!(l.norm(), 0.0);
    }

    #[test]
    fn rank_one_threshold() {
        let u = Vector::from_vec(vec![0.6, 0.8]);
        let v = Vector::from_vec(vec![1.0, 0.0, 0.0]);
        let uv = &u * v.transpose();
        let s = Matrix::zeros(2, 3);
        let (g, l) = rpca_smooth_gradient(&s, &(&uv * 2.0), 1.0).unwrap();
        assert!((l - &uv).norm() < 1e-12);
        assert!((g + &uv).norm() < 1e-12);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        assert!(rpca_smooth_gradient(&Matrix::zeros(2, 2), &Matrix::zeros(2, 3), 1.0).is_err());
    }

    #[test]
    fn default_stream_shape() {
        let g = RobustPCAStreamGen::new(&RpcaStreamConfig::default()).unwrap();
        assert_eq!(g.shape(), (144, 15));
        assert_eq!(g.dim(), 2160);
        assert!((g.lambda() - 1.0 / 12.0).abs() < 1e-15);
        let s = g.slice(1).unwrap();
        assert_eq!((s.smooth.mu(), s.smooth.lip()), (0.0, 10.0));
    }
}
