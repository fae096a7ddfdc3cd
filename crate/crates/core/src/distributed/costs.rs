#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use alloc::vec::Vec;

use crate::error::invalid;
use crate::problems::{ConsensusCostGen, CONSENSUS_L, CONSENSUS_MU};
use crate::{Error, Result};

/// Scalar local costs `h_{i,t}` of a network, strongly convex with curvature
/// in `[mu, lip]` at every node.
pub trait LocalCosts: Send + Sync {
    fn nodes(&self) -> usize;
    fn value(&self, i: usize, t: usize, y: f64) -> f64;
    fn gradient(&self, i: usize, t: usize, y: f64) -> f64;
    fn mu(&self) -> f64;
    fn lip(&self) -> f64;

    /// `argmin_y h_{i,t}(y) + c/2 y^2 - l y` for `c >= 0`.
    ///
    /// The default bisects the strictly increasing derivative inside the
    /// bracket given by strong monotonicity.
    fn local_argmin(&self, i: usize, t: usize, c: f64, l: f64) -> Result<f64> {
        let m = self.mu() + c;
        if !(m > 0.0) {
            return Err(invalid("local minimization needs positive curvature"));
        }
        let d = |y: f64| self.gradient(i, t, y) + c * y - l;
        let d0 = d(0.0);
        if d0 == 0.0 {
            return Ok(0.0);
        }
        let r = d0.abs() / m;
        let (mut lo, mut hi) = if d0 > 0.0 { (-r, 0.0) } else { (0.0, r) };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            let dm = d(mid);
            if dm.abs() <= 1e-13 * (1.0 + l.abs()) {
                return Ok(mid);
            }
            if dm > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mid = 0.5 * (lo + hi);
        let residual = d(mid).abs();
        if residual <= 1e-10 {
            Ok(mid)
        } else {
            Err(Error::NoConvergence {
                iterations: 200,
                residual,
                best: crate::Vector::from_element(1, mid),
            })
        }
    }
}

/// Static quadratics `h_i(y) = c_i/2 (y - a_i)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCosts {
    curvature: Vec<f64>,
    centers: Vec<f64>,
}

impl QuadraticCosts {
    pub fn new(curvature: Vec<f64>, centers: Vec<f64>) -> Result<Self> {
        if curvature.len() != centers.len() || curvature.is_empty() {
            return Err(invalid("one curvature and one center per node"));
        }
        if curvature.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(invalid("curvatures must be positive"));
        }
        Ok(Self { curvature, centers })
    }

    /// Unit curvature at every node.
    pub fn centered(centers: Vec<f64>) -> Result<Self> {
        Self::new(alloc::vec![1.0; centers.len()], centers)
    }

    /// Minimizer of the sum: the curvature-weighted mean of the centers.
    pub fn consensus_optimum(&self) -> f64 {
        let num: f64 = self.curvature.iter().zip(&self.centers).map(|(c, a)| c * a).sum();
        num / self.curvature.iter().sum::<f64>()
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }
}

impl LocalCosts for QuadraticCosts {
    fn nodes(&self) -> usize {
        self.centers.len()
    }

    fn value(&self, i: usize, _t: usize, y: f64) -> f64 {
        let d = y - self.centers[i];
        0.5 * self.curvature[i] * d * d
    }

    fn gradient(&self, i: usize, _t: usize, y: f64) -> f64 {
        self.curvature[i] * (y - self.centers[i])
    }

    fn mu(&self) -> f64 {
        self.curvature.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn lip(&self) -> f64 {
        self.curvature.iter().copied().fold(0.0, f64::max)
    }

    fn local_argmin(&self, i: usize, _t: usize, c: f64, l: f64) -> Result<f64> {
        let k = self.curvature[i];
        Ok((k * self.centers[i] + l) / (k + c))
    }
}

impl LocalCosts for ConsensusCostGen {
    fn nodes(&self) -> usize {
        ConsensusCostGen::nodes(self)
    }

    fn value(&self, i: usize, t: usize, y: f64) -> f64 {
        self.local_value(i, t, y)
    }

    fn gradient(&self, i: usize, t: usize, y: f64) -> f64 {
        self.local_gradient(i, t, y)
    }

    fn mu(&self) -> f64 {
        CONSENSUS_MU
    }

    fn lip(&self) -> f64 {
        CONSENSUS_L
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn default_argmin_matches_closed_form() {
        struct Plain(QuadraticCosts);
        impl LocalCosts for Plain {
            fn nodes(&self) -> usize {
                self.0.nodes()
            }
            fn value(&self, i: usize, t: usize, y: f64) -> f64 {
                self.0.value(i, t, y)
            }
            fn gradient(&self, i: usize, t: usize, y: f64) -> f64 {
                self.0.gradient(i, t, y)
            }
            fn mu(&self) -> f64 {
                self.0.mu()
            }
            fn lip(&self) -> f64 {
                self.0.lip()
            }
        }
        let q = QuadraticCosts::new(vec![2.0, 0.5], vec![3.0, -7.0]).unwrap();
        let p = Plain(q.clone());
        for (c, l) in [(0.0, 0.0), (1.5, 2.0), (10.0, -40.0)] {
            for i in 0..2 {
                let a = q.local_argmin(i, 1, c, l).unwrap();
                let b = p.local_argmin(i, 1, c, l).unwrap();
                assert!((a - b).abs() < 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn consensus_argmin_zeroes_derivative() {
        let g = ConsensusCostGen::new(4, 10, 2).unwrap();
        for i in 0..4 {
            let y = g.local_argmin(i, 3, 2.0, 1.0).unwrap();
            assert!((g.local_gradient(i, 3, y) + 2.0 * y - 1.0).abs() < 1e-10);
        }
    }
}
