//! Each check draws random instances of one prox operator, solves them by
//! grid search and returns the largest deviation seen.

use rand::Rng as _;
use tvopt_core::math::rng_from_seed;
use tvopt_core::problems::{ssc_project, ssc_prox_column};
use tvopt_core::{prox, FeasibleSet, Matrix, RegularizerSpec, Vector};

use super::{grid_min, grid_min_1d, line_projection_2d, max_abs_diff};

fn v(x: &[f64]) -> Vector {
    Vector::from_column_slice(x)
}

fn quad(x: &[f64], y: &[f64], alpha: f64) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (2.0 * alpha)
}

fn l1(x: &[f64]) -> f64 {
    x.iter().map(|a| a.abs()).sum()
}

fn random_box(rng: &mut tvopt_core::Rng) -> ([f64; 2], [f64; 2]) {
    let a: [f64; 2] = [rng.random_range(-3.0..1.0), rng.random_range(-3.0..1.0)];
    let b = [a[0] + rng.random_range(0.1..4.0), a[1] + rng.random_range(0.1..4.0)];
    (a, b)
}

pub fn zero_all_space(cases: usize) -> f64 {
    let mut rng = rng_from_seed(1);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let y = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let alpha = rng.random_range(0.1..2.0);
        let out = prox(&RegularizerSpec::Zero, &FeasibleSet::AllSpace, alpha, &v(&y)).unwrap();
        let grid = grid_min(|x| quad(x, &y, alpha), &[-12.0; 2], &[12.0; 2], 41, 1e-7);
        worst = worst.max(max_abs_diff(out.as_slice(), &grid));
    }
    worst
}

/// Soft thresholding in one and two dimensions.
pub fn l1_all_space(cases: usize) -> f64 {
    let mut rng = rng_from_seed(2);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let alpha = rng.random_range(0.1..2.0);
        let lam = rng.random_range(0.0..2.0);
        let reg = RegularizerSpec::l1(lam).unwrap();
        let y1 = rng.random_range(-5.0..5.0);
        let out = prox(&reg, &FeasibleSet::AllSpace, alpha, &v(&[y1])).unwrap();
        let g = grid_min_1d(|x| lam * x.abs() + (x - y1).powi(2) / (2.0 * alpha), -12.0, 12.0, 1e-7);
        worst = worst.max((out[0] - g).abs());

        let y = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let out = prox(&reg, &FeasibleSet::AllSpace, alpha, &v(&y)).unwrap();
        let grid = grid_min(|x| lam * l1(x) + quad(x, &y, alpha), &[-12.0; 2], &[12.0; 2], 41, 1e-7);
        worst = worst.max(max_abs_diff(out.as_slice(), &grid));
    }
    worst
}

/// Box constraint, alternately with and without an l1 term.
pub fn boxed(cases: usize) -> f64 {
    let mut rng = rng_from_seed(3);
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let (lo, hi) = random_box(&mut rng);
        let set = FeasibleSet::boxed(v(&lo), v(&hi)).unwrap();
        let alpha = rng.random_range(0.1..2.0);
        let lam = if case % 2 == 0 { 0.0 } else { rng.random_range(0.0..2.0) };
        let reg = if lam == 0.0 { RegularizerSpec::Zero } else { RegularizerSpec::l1(lam).unwrap() };
        let y = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let out = prox(&reg, &set, alpha, &v(&y)).unwrap();
        let grid = grid_min(|x| lam * l1(x) + quad(x, &y, alpha), &lo, &hi, 41, 1e-7);
        worst = worst.max(max_abs_diff(out.as_slice(), &grid));
    }
    worst
}

/// Nonnegative orthant, alternately with and without an l1 term.
pub fn nonneg(cases: usize) -> f64 {
    let mut rng = rng_from_seed(4);
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let alpha = rng.random_range(0.1..2.0);
        let lam = if case % 2 == 0 { 0.0 } else { rng.random_range(0.0..2.0) };
        let reg = if lam == 0.0 { RegularizerSpec::Zero } else { RegularizerSpec::l1(lam).unwrap() };
        let y = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let out = prox(&reg, &FeasibleSet::NonnegOrthant, alpha, &v(&y)).unwrap();
        let grid = grid_min(|x| lam * l1(x) + quad(x, &y, alpha), &[0.0; 2], &[12.0; 2], 41, 1e-7);
        worst = worst.max(max_abs_diff(out.as_slice(), &grid));
    }
    worst
}

pub fn affine(cases: usize) -> f64 {
    let mut rng = rng_from_seed(5);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let a = [rng.random_range(-2.0..2.0), rng.random_range(0.2..2.0)];
        let b = rng.random_range(-3.0..3.0);
        let set = FeasibleSet::affine(Matrix::from_row_slice(1, 2, &a), v(&[b])).unwrap();
        let y = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let out = prox(&RegularizerSpec::Zero, &set, rng.random_range(0.1..2.0), &v(&y)).unwrap();
        let grid = line_projection_2d(a, b, y, 1e-7);
        worst = worst.max(max_abs_diff(out.as_slice(), &grid));
    }
    worst
}

/// A 1x2 or 2x1 matrix has nuclear norm equal to its Euclidean norm.
pub fn nuclear(cases: usize) -> f64 {
    let mut rng = rng_from_seed(6);
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let (rows, cols) = if case % 2 == 0 { (1, 2) } else { (2, 1) };
        let alpha = rng.random_range(0.1..2.0);
        let lam = rng.random_range(0.0..3.0);
        let reg = RegularizerSpec::nuclear(lam, rows, cols).unwrap();
        let y = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let out = prox(&reg, &FeasibleSet::AllSpace, alpha, &v(&y)).unwrap();
        let grid = grid_min(
            |x| lam * (x[0] * x[0] + x[1] * x[1]).sqrt() + quad(x, &y, alpha),
            &[-12.0; 2],
            &[12.0; 2],
            41,
            1e-7,
        );
        worst = worst.max(max_abs_diff(out.as_slice(), &grid));
    }
    worst
}

/// Column prox of the self-expressive set with two and three free entries.
pub fn ssc_column(cases: usize) -> f64 {
    let mut rng = rng_from_seed(7);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let tau = rng.random_range(0.0..2.0);
        // Two free entries: u = (s, 1 - s).
        let y2 = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let out = ssc_prox_column(&y2, tau);
        let s = grid_min_1d(
            |s| {
                let u = [s, 1.0 - s];
                tau * l1(&u) + 0.5 * ((u[0] - y2[0]).powi(2) + (u[1] - y2[1]).powi(2))
            },
            -12.0,
            12.0,
            1e-7,
        );
        worst = worst.max(max_abs_diff(&out, &[s, 1.0 - s]));

        // Three free entries: u = (a, b, 1 - a - b).
        let y3 = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let out = ssc_prox_column(&y3, tau);
        let g = grid_min(
            |x| {
                let u = [x[0], x[1], 1.0 - x[0] - x[1]];
                tau * l1(&u) + 0.5 * u.iter().zip(&y3).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            },
            &[-12.0; 2],
            &[12.0; 2],
            41,
            1e-7,
        );
        worst = worst.max(max_abs_diff(&out, &[g[0], g[1], 1.0 - g[0] - g[1]]));
    }
    worst
}

/// Column `j` of the projection onto `{diag = 0, 1' X = 1}` for `N = 3`: the two
/// off-diagonal entries are `(s, 1 - s)`, found by a grid search on `s`.
fn ssc_brute_force_column(y: &Matrix, j: usize) -> [f64; 3] {
    let others: Vec<usize> = (0..3).filter(|&i| i != j).collect();
    let (a, b) = (y[(others[0], j)], y[(others[1], j)]);
    let s = grid_min_1d(|s| (s - a).powi(2) + (1.0 - s - b).powi(2), -50.0, 50.0, 1e-8);
    let mut col = [0.0; 3];
    col[others[0]] = s;
    col[others[1]] = 1.0 - s;
    col
}

/// Full `3 x 3` self-expressive projection against the per-column QP.
pub fn ssc_projection(cases: usize) -> f64 {
    let mut rng = rng_from_seed(11);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let y = Matrix::from_fn(3, 3, |_, _| rng.random_range(-10.0..10.0));
        let p = ssc_project(&y).unwrap();
        for j in 0..3 {
            let col = ssc_brute_force_column(&y, j);
            for (i, c) in col.iter().enumerate() {
                worst = worst.max((p[(i, j)] - c).abs());
            }
        }
    }
    worst
}

pub type Check = (&'static str, fn(usize) -> f64);

/// Every check by name.
pub const ALL: [Check; 8] = [
    ("zero/all-space", zero_all_space),
    ("l1/all-space", l1_all_space),
    ("box", boxed),
    ("nonneg", nonneg),
    ("affine", affine),
    ("nuclear", nuclear),
    ("ssc-column", ssc_column),
    ("ssc-projection", ssc_projection),
];
