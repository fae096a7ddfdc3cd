//! Proximal operators `argmin_{x in X} g(x) + ||x - y||^2 / (2 alpha)`.
//!
//! Only pairs with an exact closed form are supported; anything else is an
//! [`Error::UnsupportedProx`] rather than an approximation.

#[allow(unused_imports)] // float math comes from libm when std is absent
use num_traits::Float;
use crate::error::{check_dim, invalid};
use crate::math::{singular_value_threshold, soft_threshold, soft_threshold_vec};
use crate::{Error, FeasibleSet, Matrix, RegularizerSpec, Result, Vector};

pub fn prox(reg: &RegularizerSpec, set: &FeasibleSet, alpha: f64, y: &Vector) -> Result<Vector> {
    if !(alpha > 0.0) {
        return Err(invalid("prox step must be positive"));
    }
    if let Some(n) = set.dim() {
        check_dim(n, y.len())?;
    }
    match (reg, set) {
        (RegularizerSpec::Zero, _) => set.project(y),
        (RegularizerSpec::L1 { weight }, FeasibleSet::AllSpace) => {
            Ok(soft_threshold_vec(y, alpha * weight))
        }
        // Separable 1-D problems: clamp the unconstrained minimizer.
        (RegularizerSpec::L1 { weight }, FeasibleSet::Box { lower, upper }) => {
            let tau = alpha * weight;
            Ok(Vector::from_iterator(
                y.len(),
                (0..y.len()).map(|i| soft_threshold(y[i], tau).clamp(lower[i], upper[i])),
            ))
        }
        (RegularizerSpec::L1 { weight }, FeasibleSet::NonnegOrthant) => {
            let tau = alpha * weight;
            Ok(y.map(|v| (v - tau).max(0.0)))
        }
        (RegularizerSpec::Nuclear { weight, rows, cols }, FeasibleSet::AllSpace) => {
            check_dim(rows * cols, y.len())?;
            let m = Matrix::from_column_slice(*rows, *cols, y.as_slice());
            let out = singular_value_threshold(&m, alpha * weight);
            Ok(Vector::from_column_slice(out.as_slice()))
        }
        (RegularizerSpec::Custom(c), _) => c.prox(set, alpha, y),
        (reg, set) => Err(Error::UnsupportedProx {
            reg: reg.name(),
            set: set.name(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    #[test]
    fn identity_when_zero_and_unconstrained() {
        let out = prox(&RegularizerSpec::Zero, &FeasibleSet::AllSpace, 0.5, &v(&[1.0, -2.0])).unwrap();
        assert_eq!(out, v(&[1.0, -2.0]));
    }

    #[test]
    fn scalar_soft_threshold() {
        let out = prox(&RegularizerSpec::l1(1.0).unwrap(), &FeasibleSet::AllSpace, 1.0, &v(&[2.0])).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clamp_to_box() {
        let set = FeasibleSet::boxed(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let out = prox(&RegularizerSpec::Zero, &set, 1.0, &v(&[-0.5, 2.0])).unwrap();
        assert_eq!(out, v(&[0.0, 1.0]));
    }

    #[test]
    fn unsupported_pair_is_explicit() {
        let set = FeasibleSet::affine(Matrix::from_row_slice(1, 2, &[1.0, 1.0]), v(&[1.0])).unwrap();
        let err = prox(&RegularizerSpec::l1(1.0).unwrap(), &set, 1.0, &v(&[0.0, 0.0])).unwrap_err();
        assert_eq!(err, Error::UnsupportedProx { reg: "l1", set: "affine" });
        let err = prox(&RegularizerSpec::nuclear(1.0, 1, 2).unwrap(), &FeasibleSet::NonnegOrthant, 1.0, &v(&[0.0, 0.0]))
            .unwrap_err();
        assert!(matches!(err, Error::UnsupportedProx { .. }));
    }

    #[test]
    fn bad_inputs() {
        assert!(prox(&RegularizerSpec::Zero, &FeasibleSet::AllSpace, 0.0, &v(&[1.0])).is_err());
        let set = FeasibleSet::boxed(v(&[0.0]), v(&[1.0])).unwrap();
        assert!(matches!(
            prox(&RegularizerSpec::Zero, &set, 1.0, &v(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn affine_projection_lands_on_set() {
        let e = Matrix::from_row_slice(1, 3, &[1.0, 2.0, -1.0]);
        let set = FeasibleSet::affine(e.clone(), v(&[3.0])).unwrap();
        let p = prox(&RegularizerSpec::Zero, &set, 1.0, &Vector::from_vec(vec![0.1, -4.0, 2.0])).unwrap();
        assert!(((&e * &p)[0] - 3.0).abs() < 1e-12);
    }
}
