//! Inexact first-order oracles: `v = grad h_t(x) - e` with a known error `e`.

use rand_distr::{Distribution, Normal};

use crate::error::invalid;
use crate::math::{random_unit, rng_from_seed};
use crate::{Error, ProblemSlice, Result, Rng, Vector};

/// How a bounded deterministic error picks its direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionRule {
    /// Always along the first coordinate axis.
    Fixed,
    /// Parallel to the true gradient (shortens it).
    AlongGradient,
    /// Uniform on the sphere, drawn from the run's random state.
    RandomUnit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    None,
    /// Error of norm exactly `radius` (up to rounding, never above it).
    Bounded { radius: f64, rule: DirectionRule },
    /// Isotropic Gaussian error, rescaled onto the ball of radius `clip`.
    Gaussian { std: f64, clip: f64 },
    /// Use the slice's own gradient surrogate (e.g. sensor-based).
    Measurement,
}

/// Noise specification together with the seed of the run's random state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientNoiseModel {
    pub kind: NoiseKind,
    pub seed: u64,
}

impl GradientNoiseModel {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            seed: 0,
        }
    }

    pub fn bounded(radius: f64, rule: DirectionRule, seed: u64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(invalid("noise radius must be finite and nonnegative"));
        }
        Ok(Self {
            kind: NoiseKind::Bounded { radius, rule },
            seed,
        })
    }

    pub fn gaussian(std: f64, clip: f64, seed: u64) -> Result<Self> {
        if !(std >= 0.0) || !(clip > 0.0) {
            return Err(invalid("gaussian noise needs std >= 0 and clip > 0"));
        }
        Ok(Self {
            kind: NoiseKind::Gaussian { std, clip },
            seed,
        })
    }

    pub fn measurement(seed: u64) -> Self {
        Self {
            kind: NoiseKind::Measurement,
            seed,
        }
    }

    pub fn rng(&self) -> Rng {
        rng_from_seed(self.seed)
    }

    /// Uniform bound on the emitted error, when the kind has one.
    pub fn bound(&self) -> Option<f64> {
        match self.kind {
            NoiseKind::None => Some(0.0),
            NoiseKind::Bounded { radius, .. } => Some(radius),
            NoiseKind::Gaussian { clip, .. } if clip.is_finite() => Some(clip),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.kind, NoiseKind::None)
    }
}

/// Returns `(v, ||grad h_t(x) - v||)`.
pub fn inexact_gradient(
    slice: &ProblemSlice,
    x: &Vector,
    noise: &GradientNoiseModel,
    rng: &mut Rng,
) -> Result<(Vector, f64)> {
    crate::error::check_dim(slice.dim(), x.len())?;
    let exact = slice.gradient(x);
    if let NoiseKind::Measurement = noise.kind {
        let surrogate = slice.surrogate.as_ref().ok_or_else(|| {
            Error::Config("measurement noise requires a problem with a gradient surrogate".into())
        })?;
        let v = surrogate.sample(x, rng);
        crate::error::check_dim(exact.len(), v.len())?;
        let e = (&exact - &v).norm();
        return Ok((v, e));
    }
    let v = perturb(&exact, &noise.kind, rng)?;
    let e = (&exact - &v).norm();
    Ok((v, e))
}

/// Applies a non-measurement noise kind to an exact gradient.
pub(crate) fn perturb(exact: &Vector, kind: &NoiseKind, rng: &mut Rng) -> Result<Vector> {
    let n = exact.len();
    let (direction, radius) = match *kind {
        NoiseKind::None => return Ok(exact.clone()),
        NoiseKind::Measurement => {
            return Err(Error::Config(
                "measurement noise cannot be applied to a generic gradient".into(),
            ))
        }
        NoiseKind::Bounded { radius, rule } => {
            let dir = match rule {
                DirectionRule::Fixed => unit_axis(n),
                DirectionRule::AlongGradient => {
                    let norm = exact.norm();
                    if norm > 0.0 {
                        exact / norm
                    } else {
                        unit_axis(n)
                    }
                }
                DirectionRule::RandomUnit => random_unit(n, rng),
            };
            (dir * radius, radius)
        }
        NoiseKind::Gaussian { std, clip } => {
            let normal = Normal::new(0.0, std).map_err(|_| invalid("invalid gaussian std"))?;
            let mut d = Vector::from_iterator(n, (0..n).map(|_| normal.sample(rng)));
            let norm = d.norm();
            if norm > clip {
                d *= clip / norm;
            }
            (d, clip)
        }
    };
    Ok(within_radius(exact, direction, radius))
}

/// `exact - d`, shrinking `d` until the error recomputed in floating point
/// does not exceed `radius`.
fn within_radius(exact: &Vector, mut d: Vector, radius: f64) -> Vector {
    loop {
        let v = exact - &d;
        let e = (exact - &v).norm();
        if e <= radius {
            return v;
        }
        d *= (radius / e) * (1.0 - 1e-12);
    }
}

fn unit_axis(n: usize) -> Vector {
    let mut e = Vector::zeros(n);
    if n > 0 {
        e[0] = 1.0;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{problem::Quadratic, Matrix, SmoothPart};
    use alloc::vec::Vec;

    fn slice() -> ProblemSlice {
        let q = Quadratic::centered(Matrix::identity(3, 3) * 1e4, &Vector::from_element(3, 2.0), 0.0).unwrap();
        ProblemSlice::new(1, SmoothPart::from_fn(q, 1e4, 1e4).unwrap())
    }

    #[test]
    fn none_is_exact() {
        let s = slice();
        let x = Vector::from_element(3, -1.0);
        let mut rng = rng_from_seed(0);
        let (v, e) = inexact_gradient(&s, &x, &GradientNoiseModel::none(), &mut rng).unwrap();
        assert_eq!(e, 0.0);
        assert_eq!(v, s.gradient(&x));
    }

    #[test]
    fn bounded_never_exceeds_radius() {
        let s = slice();
        for rule in [DirectionRule::Fixed, DirectionRule::AlongGradient, DirectionRule::RandomUnit] {
            let noise = GradientNoiseModel::bounded(0.1, rule, 3).unwrap();
            let mut rng = noise.rng();
            let mut xrng = rng_from_seed(11);
            let worst = (0..10_000)
                .map(|_| {
                    let x = crate::math::gaussian_vector(3, &mut xrng) * 37.0;
                    inexact_gradient(&s, &x, &noise, &mut rng).unwrap().1
                })
                .fold(0.0, f64::max);
            assert!(worst <= 0.1, "{rule:?}: {worst}");
            assert!(worst > 0.0999);
        }
    }

    #[test]
    fn gaussian_is_seeded() {
        let s = slice();
        let noise = GradientNoiseModel::gaussian(0.5, 1.0, 42).unwrap();
        let x = Vector::from_element(3, 0.5);
        let run = || {
            let mut rng = noise.rng();
            (0..50)
                .map(|_| inexact_gradient(&s, &x, &noise, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        let a = run();
        assert_eq!(a, run());
        assert!(a.iter().all(|(_, e)| *e <= 1.0));
    }

    #[test]
    fn measurement_needs_surrogate() {
        let s = slice();
        let mut rng = rng_from_seed(0);
        let err = inexact_gradient(&s, &Vector::zeros(3), &GradientNoiseModel::measurement(0), &mut rng);
        assert!(matches!(err, Err(Error::Config(_))));
    }
}
