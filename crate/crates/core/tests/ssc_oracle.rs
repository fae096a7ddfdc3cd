mod oracle;

use tvopt_core::problems::ssc_similarity;
use tvopt_core::Matrix;

#[test]
fn projection_matches_brute_force_qp() {
    assert!(oracle::prox_checks::ssc_projection(100) <= 1e-5);
}

#[test]
fn similarity_is_symmetric() {
    let x = Matrix::from_row_slice(3, 3, &[0.0, -0.5, 0.2, 1.0, 0.0, 0.8, 0.0, 1.5, 0.0]);
    let w = ssc_similarity(&x);
    assert_eq!(w, w.transpose());
    assert_eq!(w[(0, 1)], 1.5);
}
