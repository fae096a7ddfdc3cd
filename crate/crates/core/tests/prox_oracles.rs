mod oracle;

use std::sync::Arc;

use oracle::prox_checks;
use proptest::prelude::*;
use tvopt_core::problems::SscSet;
use tvopt_core::{prox, FeasibleSet, Matrix, RegularizerSpec, Vector};

const CASES: usize = 100;
const TOL: f64 = 1e-5;

fn v(x: &[f64]) -> Vector {
    Vector::from_column_slice(x)
}

#[test]
fn zero_reg_all_space_is_identity() {
    assert!(prox_checks::zero_all_space(CASES) < TOL);
}

#[test]
fn l1_all_space_matches_grid_1d_and_2d() {
    assert!(prox_checks::l1_all_space(CASES) < TOL);
}

#[test]
fn box_prox_matches_grid() {
    assert!(prox_checks::boxed(CASES) < TOL);
}

#[test]
fn nonneg_prox_matches_grid() {
    assert!(prox_checks::nonneg(CASES) < TOL);
}

#[test]
fn affine_projection_matches_line_search() {
    assert!(prox_checks::affine(CASES) < TOL);
}

#[test]
fn nuclear_prox_matches_grid() {
    assert!(prox_checks::nuclear(CASES) < TOL);
}

#[test]
fn ssc_column_prox_matches_grid() {
    assert!(prox_checks::ssc_column(CASES) < TOL);
}

#[test]
fn unsupported_pairs_are_errors() {
    let set = FeasibleSet::affine(Matrix::from_row_slice(1, 2, &[1.0, 1.0]), v(&[1.0])).unwrap();
    assert!(prox(&RegularizerSpec::l1(1.0).unwrap(), &set, 1.0, &v(&[0.0, 0.0])).is_err());
    let nuc = RegularizerSpec::nuclear(1.0, 1, 2).unwrap();
    assert!(prox(&nuc, &FeasibleSet::NonnegOrthant, 1.0, &v(&[0.0, 0.0])).is_err());
    assert!(prox(&RegularizerSpec::Zero, &FeasibleSet::AllSpace, 0.0, &v(&[0.0])).is_err());
}

fn sets() -> Vec<FeasibleSet> {
    vec![
        FeasibleSet::AllSpace,
        FeasibleSet::boxed(v(&[-1.0, 0.0, 0.5]), v(&[1.0, 2.0, 0.75])).unwrap(),
        FeasibleSet::NonnegOrthant,
        FeasibleSet::affine(Matrix::from_row_slice(2, 3, &[1.0, 2.0, -1.0, 0.5, 0.0, 1.0]), v(&[1.0, -2.0])).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn projections_are_idempotent(y in proptest::collection::vec(-20.0f64..20.0, 3), alpha in 0.01f64..10.0) {
        for set in sets() {
            let once = prox(&RegularizerSpec::Zero, &set, alpha, &v(&y)).unwrap();
            let twice = prox(&RegularizerSpec::Zero, &set, alpha, &once).unwrap();
            prop_assert!((&once - &twice).amax() <= 1e-12);
            prop_assert!(set.residual(&once).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn ssc_projection_is_idempotent(y in proptest::collection::vec(-5.0f64..5.0, 9)) {
        let set = FeasibleSet::Custom(Arc::new(SscSet { points: 3 }));
        let once = set.project(&v(&y)).unwrap();
        let twice = set.project(&once).unwrap();
        prop_assert!((&once - &twice).amax() <= 1e-12);
        prop_assert!(set.residual(&once).unwrap() <= 1e-12);
    }

    #[test]
    fn l1_prox_is_nonexpansive(
        a in proptest::collection::vec(-10.0f64..10.0, 4),
        b in proptest::collection::vec(-10.0f64..10.0, 4),
        lam in 0.0f64..3.0,
    ) {
        let reg = RegularizerSpec::l1(lam).unwrap();
        let pa = prox(&reg, &FeasibleSet::AllSpace, 0.7, &v(&a)).unwrap();
        let pb = prox(&reg, &FeasibleSet::AllSpace, 0.7, &v(&b)).unwrap();
        prop_assert!((pa - pb).norm() <= (v(&a) - v(&b)).norm() + 1e-12);
    }
}
