//! Seeded generators of time-varying test problems.
//!
//! Every generator is immutable once built: all random data is drawn in the
//! constructor, so `slice(t)` is a pure function of `t`.

mod consensus;
mod feedback;
mod least_squares;
mod quadratic;
mod rpca;
mod ssc;

pub use consensus::{consensus_local_gradient, ConsensusCostGen, ConsensusSum, CONSENSUS_L, CONSENSUS_MU};
pub use feedback::{
    feedback_gradient_from_measurement, network_feedback_gradient, FeedbackConfig, FeedbackSurrogate,
    NetworkFeedbackGen,
};
pub use least_squares::{gen_fig1_instance, FIG1_SEED, LambdaSchedule, TVLassoGen, TVLeastSquaresGen};
pub use quadratic::{QuadraticStream, QuadraticStreamConfig};
pub use rpca::{rpca_objective, rpca_smooth_gradient, RobustPCAStreamGen, RpcaSmooth, RpcaStreamConfig};
pub use ssc::{ssc_project, ssc_prox_column, ssc_similarity, SSCStreamGen, SscProx, SscSet, SscStreamConfig};

#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use alloc::vec::Vec;

use crate::math::{gaussian_vector, random_unit};
use crate::{Rng, Vector};

/// A displacement of `magnitude` along a random direction, applied from step
/// `t` on.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub t: i64,
    pub magnitude: f64,
}

/// Motion of a reference point over time; all components default to zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Drift {
    /// Per-coordinate oscillation `amplitude * sin(omega t + phase_i)`.
    pub amplitude: f64,
    pub omega: f64,
    /// Speed of a straight-line motion along a fixed random direction.
    pub velocity: f64,
    pub jumps: Vec<Jump>,
}

impl Drift {
    pub fn sinusoid(amplitude: f64, omega: f64) -> Self {
        Self {
            amplitude,
            omega,
            ..Self::default()
        }
    }

    pub fn linear(velocity: f64) -> Self {
        Self {
            velocity,
            ..Self::default()
        }
    }

    pub fn with_jumps(mut self, jumps: Vec<Jump>) -> Self {
        self.jumps = jumps;
        self
    }

    /// Draws phases and directions.
    pub(crate) fn realize(&self, n: usize, rng: &mut Rng) -> DriftPath {
        let phases = gaussian_vector(n, rng).map(|g| g * core::f64::consts::PI);
        let direction = random_unit(n, rng);
        let jumps = self
            .jumps
            .iter()
            .map(|j| (j.t, random_unit(n, rng) * j.magnitude))
            .collect();
        DriftPath {
            drift: self.clone(),
            phases,
            direction,
            jumps,
        }
    }
}

/// A [`Drift`] with its random parts fixed.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DriftPath {
    drift: Drift,
    phases: Vector,
    direction: Vector,
    jumps: Vec<(i64, Vector)>,
}

impl DriftPath {
    pub(crate) fn offset(&self, t: i64) -> Vector {
        let tf = t as f64;
        let d = &self.drift;
        let mut out = self.phases.map(|p| d.amplitude * (d.omega * tf + p).sin());
        out += &self.direction * (d.velocity * tf);
        for (at, shift) in &self.jumps {
            if t >= *at {
                out += shift;
            }
        }
        out
    }
}

pub(crate) fn check_step(t: usize, horizon: usize) -> crate::Result<()> {
    if t == 0 || t > horizon {
        return Err(crate::Error::InvalidParameter(alloc::format!(
            "step {t} outside 1..={horizon}"
        )));
    }
    Ok(())
}
