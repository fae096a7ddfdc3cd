#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;
use rand::Rng as _;

use super::check_step;
use crate::error::invalid;
use crate::math::{rng_from_seed, sigmoid, softplus};
use crate::{ProblemSlice, Result, SmoothFn, SmoothPart, TimeVaryingProblem, Vector};

/// Scalar local costs
/// `h_{i,t}(x) = 1/2 (x - A cos(omega t + phi_i - b t))^2 + log(1 + exp(x - a_i))`
/// with `a_i ~ U[-10, 10]` and `phi_i ~ U[0, 2 pi)`. Nodes are indexed from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusCostGen {
    pub amplitude: f64,
    pub omega: f64,
    pub b: f64,
    offsets: Vec<f64>,
    phases: Vec<f64>,
    horizon: usize,
}

/// Per-node curvature lower bound.
pub const CONSENSUS_MU: f64 = 1.0;
/// Per-node curvature upper bound.
pub const CONSENSUS_L: f64 = 1.25;

impl ConsensusCostGen {
    /// `A = 2.5`, `omega = pi/80`, `b = pi/200`.
    pub fn new(nodes: usize, horizon: usize, seed: u64) -> Result<Self> {
        Self::with_params(nodes, horizon, 2.5, PI / 80.0, PI / 200.0, seed)
    }

    pub fn with_params(nodes: usize, horizon: usize, amplitude: f64, omega: f64, b: f64, seed: u64) -> Result<Self> {
        if nodes == 0 || horizon == 0 {
            return Err(invalid("consensus problem needs nodes and a horizon"));
        }
        let mut rng = rng_from_seed(seed);
        let offsets = (0..nodes).map(|_| rng.random_range(-10.0..=10.0)).collect();
        let phases = (0..nodes).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        Ok(Self {
            amplitude,
            omega,
            b,
            offsets,
            phases,
            horizon,
        })
    }

    /// Same node parameters with `omega = b = 0`.
    pub fn to_static(&self) -> Self {
        Self {
            omega: 0.0,
            b: 0.0,
            ..self.clone()
        }
    }

    pub fn nodes(&self) -> usize {
        self.offsets.len()
    }

    pub fn offset(&self, i: usize) -> f64 {
        self.offsets[i]
    }

    pub fn phase(&self, i: usize) -> f64 {
        self.phases[i]
    }

    /// `A cos(omega t + phi_i - b t)`.
    pub fn reference(&self, i: usize, t: usize) -> f64 {
        let tf = t as f64;
        self.amplitude * (self.omega * tf + self.phases[i] - self.b * tf).cos()
    }

    pub fn local_value(&self, i: usize, t: usize, x: f64) -> f64 {
        let d = x - self.reference(i, t);
        0.5 * d * d + softplus(x - self.offsets[i])
    }

    pub fn local_gradient(&self, i: usize, t: usize, x: f64) -> f64 {
        (x - self.reference(i, t)) + sigmoid(x - self.offsets[i])
    }

    pub fn local_curvature(&self, i: usize, x: f64) -> f64 {
        let s = sigmoid(x - self.offsets[i]);
        1.0 + s * (1.0 - s)
    }

    /// The network cost `sum_i h_{i,t}` as a smooth function of the common `x`.
    pub fn sum_at(&self, t: usize) -> ConsensusSum {
        ConsensusSum { gen: self.clone(), t }
    }
}

/// `consensus_local_gradient(gen, i, t, x)`, node `i` counted from 0.
pub fn consensus_local_gradient(gen: &ConsensusCostGen, i: usize, t: usize, x: f64) -> f64 {
    gen.local_gradient(i, t, x)
}

/// `sum_i h_{i,t}(x)` for a scalar `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusSum {
    gen: ConsensusCostGen,
    t: usize,
}

impl SmoothFn for ConsensusSum {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &Vector) -> f64 {
        (0..self.gen.nodes()).map(|i| self.gen.local_value(i, self.t, x[0])).sum()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        Vector::from_element(
            1,
            (0..self.gen.nodes()).map(|i| self.gen.local_gradient(i, self.t, x[0])).sum(),
        )
    }
}

impl TimeVaryingProblem for ConsensusCostGen {
    fn name(&self) -> &str {
        "consensus"
    }

    fn dim(&self) -> usize {
        1
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn slice(&self, t: usize) -> Result<ProblemSlice> {
        check_step(t, self.horizon)?;
        let n = self.nodes() as f64;
        Ok(ProblemSlice::new(t, SmoothPart::from_fn(self.sum_at(t), CONSENSUS_MU * n, CONSENSUS_L * n)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn plain() -> ConsensusCostGen {
        ConsensusCostGen {
            amplitude: 0.0,
            omega: 0.0,
            b: 0.0,
            offsets: vec![0.0],
            phases: vec![0.0],
            horizon: 1,
        }
    }

    #[test]
    fn arithmetic_example() {
        let g = plain();
        assert_eq!(g.local_gradient(0, 1, 0.0), 0.5);
        assert!((g.local_value(0, 1, 0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn curvature_is_bracketed() {
        let g = ConsensusCostGen::new(5, 10, 3).unwrap();
        for k in -400..=400 {
            let x = k as f64 * 0.1;
            for i in 0..5 {
                let c = g.local_curvature(i, x);
                assert!((CONSENSUS_MU..=CONSENSUS_L).contains(&c));
            }
        }
    }

    #[test]
    fn far_offsets_stay_finite() {
        let mut g = plain();
        g.offsets[0] = -1000.0;
        assert!(g.local_value(0, 1, 0.0).is_finite());
        assert!((g.local_gradient(0, 1, 0.0) - 1.0).abs() < 1e-12);
        g.offsets[0] = 1000.0;
        assert!(g.local_gradient(0, 1, 0.0).abs() < 1e-12);
    }

    #[test]
    fn parameters_are_in_range() {
        let g = ConsensusCostGen::new(20, 10, 9).unwrap();
        for i in 0..20 {
            assert!((-10.0..=10.0).contains(&g.offset(i)));
            assert!((0.0..2.0 * PI).contains(&g.phase(i)));
        }
        let s = g.to_static();
        assert_eq!(s.reference(3, 1), s.reference(3, 500));
    }
}
