#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use alloc::sync::Arc;
use rand::Rng as _;

use super::check_step;
use crate::error::{check_dim, invalid};
use crate::math::{gaussian_matrix, gaussian_vector, random_unit, rng_from_seed, sym_eig_extremes};
use crate::{
    FeasibleSet, GradientSurrogate, Matrix, ProblemSlice, Quadratic, Result, Rng, SmoothPart,
    TimeVaryingProblem, Vector,
};

/// `v = A_model' (s_hat - s_target)`.
pub fn feedback_gradient_from_measurement(a_model: &Matrix, s_hat: &Vector, target: &Vector) -> Result<Vector> {
    check_dim(a_model.nrows(), s_hat.len())?;
    check_dim(a_model.nrows(), target.len())?;
    Ok(a_model.transpose() * (s_hat - target))
}

/// Linear plant `s_t = A x + B w_t` driven toward `s_t^target`:
/// `h_t(x) = 1/2 ||A x + B w_t - s_t^target||^2`.
///
/// The gradient surrogate uses a sensor reading `s_hat = s_t + n` with
/// `||n|| <= sensor_radius` and the model matrix `A + dA`.
#[derive(Debug, Clone)]
pub struct NetworkFeedbackGen {
    a: Matrix,
    b: Matrix,
    model_error: Matrix,
    horizon: usize,
    sensor_radius: f64,
    w_phase: Vector,
    w_omega: f64,
    target_phase: Vector,
    target_amplitude: f64,
    target_omega: f64,
    set: FeasibleSet,
    mu: f64,
    lip: f64,
}

/// Settings of a [`NetworkFeedbackGen`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackConfig {
    pub outputs: usize,
    pub inputs: usize,
    pub exogenous: usize,
    pub horizon: usize,
    pub sensor_radius: f64,
    /// Spectral norm of the model mismatch `dA` (0 disables it).
    pub model_error: f64,
    pub w_omega: f64,
    pub target_amplitude: f64,
    pub target_omega: f64,
    /// Symmetric box `|x_i| <= input_limit`; infinite disables it.
    pub input_limit: f64,
    pub seed: u64,
}

impl Default for FeedbackConfig {
    fn default() -> Self {
        Self {
            outputs: 6,
            inputs: 4,
            exogenous: 3,
            horizon: 300,
            sensor_radius: 0.1,
            model_error: 0.0,
            w_omega: 0.05,
            target_amplitude: 1.0,
            target_omega: 0.02,
            input_limit: f64::INFINITY,
            seed: 0,
        }
    }
}

impl NetworkFeedbackGen {
    pub fn new(cfg: &FeedbackConfig) -> Result<Self> {
        if cfg.outputs == 0 || cfg.inputs == 0 || cfg.horizon == 0 {
            return Err(invalid("feedback plant needs positive dimensions and horizon"));
        }
        if !(cfg.sensor_radius >= 0.0) || !(cfg.model_error >= 0.0) || !(cfg.input_limit > 0.0) {
            return Err(invalid("feedback noise levels must be nonnegative"));
        }
        let mut rng = rng_from_seed(cfg.seed);
        let a = gaussian_matrix(cfg.outputs, cfg.inputs, &mut rng);
        let b = gaussian_matrix(cfg.outputs, cfg.exogenous, &mut rng);
        let mut model_error = gaussian_matrix(cfg.outputs, cfg.inputs, &mut rng);
        let norm = crate::math::spectral_norm(&model_error);
        model_error *= if norm > 0.0 { cfg.model_error / norm } else { 0.0 };
        let w_phase = gaussian_vector(cfg.exogenous, &mut rng);
        let target_phase = gaussian_vector(cfg.outputs, &mut rng);
        let (lo, hi) = sym_eig_extremes(&(a.transpose() * &a));
        let set = if cfg.input_limit.is_finite() {
            FeasibleSet::boxed(
                Vector::from_element(cfg.inputs, -cfg.input_limit),
                Vector::from_element(cfg.inputs, cfg.input_limit),
            )?
        } else {
            FeasibleSet::AllSpace
        };
        Ok(Self {
            a,
            b,
            model_error,
            horizon: cfg.horizon,
            sensor_radius: cfg.sensor_radius,
            w_phase,
            w_omega: cfg.w_omega,
            target_phase,
            target_amplitude: cfg.target_amplitude,
            target_omega: cfg.target_omega,
            set,
            mu: lo.max(0.0).min(hi),
            lip: hi,
        })
    }

    pub fn plant(&self) -> &Matrix {
        &self.a
    }

    pub fn sensor_radius(&self) -> f64 {
        self.sensor_radius
    }

    /// `w_t`.
    pub fn exogenous(&self, t: usize) -> Vector {
        self.w_phase.map(|p| 1.0 + (self.w_omega * t as f64 + p).sin())
    }

    /// `s_t^target`.
    pub fn target(&self, t: usize) -> Vector {
        self.target_phase
            .map(|p| self.target_amplitude * (self.target_omega * t as f64 + p).sin())
    }

    /// `s_t = A x + B w_t`.
    pub fn output(&self, t: usize, x: &Vector) -> Result<Vector> {
        check_dim(self.a.ncols(), x.len())?;
        Ok(&self.a * x + &self.b * self.exogenous(t))
    }

    fn surrogate(&self, t: usize) -> FeedbackSurrogate {
        FeedbackSurrogate {
            a: self.a.clone(),
            a_model: &self.a + &self.model_error,
            offset: &self.b * self.exogenous(t),
            target: self.target(t),
            radius: self.sensor_radius,
        }
    }
}

/// Sensor-based gradient of one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackSurrogate {
    a: Matrix,
    a_model: Matrix,
    /// `B w_t`.
    offset: Vector,
    target: Vector,
    radius: f64,
}

impl FeedbackSurrogate {
    /// `s_hat = A x + B w_t + n`, `n` uniform in the ball of radius `radius`.
    pub fn measure(&self, x: &Vector, rng: &mut Rng) -> Vector {
        let s = &self.a * x + &self.offset;
        let m = s.len();
        if self.radius == 0.0 {
            return s;
        }
        let r = self.radius * rng.random::<f64>().powf(1.0 / m as f64);
        s + random_unit(m, rng) * r
    }
}

impl GradientSurrogate for FeedbackSurrogate {
    fn sample(&self, x: &Vector, rng: &mut Rng) -> Vector {
        let s_hat = self.measure(x, rng);
        self.a_model.transpose() * (s_hat - &self.target)
    }
}

/// One sensor-based gradient at step `t`: returns `(v, ||A'(s_hat - s_t)||)`.
pub fn network_feedback_gradient(gen: &NetworkFeedbackGen, t: usize, x: &Vector, rng: &mut Rng) -> Result<(Vector, f64)> {
    check_step(t, gen.horizon)?;
    let s = gen.output(t, x)?;
    let sur = gen.surrogate(t);
    let s_hat = sur.measure(x, rng);
    let v = feedback_gradient_from_measurement(&sur.a_model, &s_hat, &sur.target)?;
    let e_true = (gen.a.transpose() * (s_hat - s)).norm();
    Ok((v, e_true))
}

impl TimeVaryingProblem for NetworkFeedbackGen {
    fn name(&self) -> &str {
        "feedback"
    }

    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn slice(&self, t: usize) -> Result<ProblemSlice> {
        check_step(t, self.horizon)?;
        // 1/2 ||A x - d||^2 with d = s_target - B w_t.
        let d = self.target(t) - &self.b * self.exogenous(t);
        let quad = Quadratic::new(self.a.transpose() * &self.a, -(self.a.transpose() * &d), 0.5 * d.norm_squared())?;
        ProblemSlice::new(t, SmoothPart::from_fn(quad, self.mu, self.lip)?)
            .with_set(self.set.clone())
            .map(|s| s.with_surrogate(Arc::new(self.surrogate(t))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn measurement_substitution_example() {
        let v = feedback_gradient_from_measurement(
            &Matrix::identity(2, 2),
            &Vector::from_vec(vec![1.1, 0.0]),
            &Vector::zeros(2),
        )
        .unwrap();
        assert!((v - Vector::from_vec(vec![1.1, 0.0])).norm() < 1e-15);
    }

    #[test]
    fn noiseless_sensor_gives_exact_gradient() {
        let cfg = FeedbackConfig {
            sensor_radius: 0.0,
            ..FeedbackConfig::default()
        };
        let g = NetworkFeedbackGen::new(&cfg).unwrap();
        let x = Vector::from_vec(vec![0.5, -1.0, 2.0, 0.0]);
        let mut rng = rng_from_seed(1);
        let (v, e) = network_feedback_gradient(&g, 3, &x, &mut rng).unwrap();
        assert_eq!(e, 0.0);
        let exact = g.slice(3).unwrap().gradient(&x);
        assert!((v - exact).norm() < 1e-10);
    }
}
