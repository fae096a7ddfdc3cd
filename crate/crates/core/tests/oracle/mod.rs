//! Brute-force reference solvers shared by the integration tests.
#![allow(dead_code)]

pub mod prox_checks;

/// Minimizes a convex `f` over the box `[lo, hi]` (any dimension) by repeated
/// grid search: each round evaluates a `points^d` grid and shrinks the box to
/// a few cells around the best node, until the cell width drops below `tol`.
pub fn grid_min(f: impl Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], points: usize, tol: f64) -> Vec<f64> {
    let d = lo.len();
    let mut lo = lo.to_vec();
    let mut hi = hi.to_vec();
    let mut best = lo.clone();
    loop {
        let width: Vec<f64> = (0..d).map(|k| (hi[k] - lo[k]) / (points - 1) as f64).collect();
        let mut idx = vec![0usize; d];
        let mut best_val = f64::INFINITY;
        let mut best_idx = idx.clone();
        let mut x = vec![0.0; d];
        loop {
            for k in 0..d {
                x[k] = lo[k] + width[k] * idx[k] as f64;
            }
            let v = f(&x);
            if v < best_val {
                best_val = v;
                best_idx.clone_from(&idx);
                best.clone_from(&x);
            }
            let mut k = 0;
            while k < d {
                idx[k] += 1;
                if idx[k] < points {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == d {
                break;
            }
        }
        if width.iter().all(|w| *w <= tol) {
            return best;
        }
        for k in 0..d {
            let c = best_idx[k] as f64;
            let (a, b) = (lo[k] + width[k] * (c - 3.0).max(0.0), lo[k] + width[k] * (c + 3.0).min((points - 1) as f64));
            lo[k] = a;
            hi[k] = b;
        }
    }
}

/// 1-D convenience wrapper.
pub fn grid_min_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    grid_min(|x| f(x[0]), &[lo], &[hi], 2001, tol)[0]
}

/// Euclidean projection of `y` onto `{x : a'x = b}` in 2-D, by grid search
/// along the line.
pub fn line_projection_2d(a: [f64; 2], b: f64, y: [f64; 2], tol: f64) -> [f64; 2] {
    let n2 = a[0] * a[0] + a[1] * a[1];
    let p0 = [a[0] * b / n2, a[1] * b / n2];
    let dir = [-a[1] / n2.sqrt(), a[0] / n2.sqrt()];
    let at = |s: f64| [p0[0] + s * dir[0], p0[1] + s * dir[1]];
    let s = grid_min_1d(
        |s| {
            let p = at(s);
            (p[0] - y[0]).powi(2) + (p[1] - y[1]).powi(2)
        },
        -100.0,
        100.0,
        tol,
    );
    at(s)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Central finite-difference gradient with step `h`.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|k| {
            p[k] = x[k] + h;
            let up = f(&p);
            p[k] = x[k] - h;
            let down = f(&p);
            p[k] = x[k];
            (up - down) / (2.0 * h)
        })
        .collect()
}
