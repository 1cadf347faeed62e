//! Small dense linear-algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector};

/// Largest absolute entry, floored at 1 so it can multiply absolute tolerances.
pub fn scale_of(values: &[f64]) -> f64 {
    values.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()))
}

/// Induced 1-norm (max column sum).
pub fn norm_one(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring around a truncated Taylor series.
///
/// The argument is scaled by `2^-s` until its 1-norm drops below 1/2, where
/// 24 Taylor terms leave a truncation error far below one ulp.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    let norm = norm_one(a);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a / 2f64.powi(squarings as i32);

    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=24 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if norm_one(&term) <= f64::EPSILON * 1e-3 * norm_one(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Least-squares solution of `a x = b` through an SVD; returns `(x, residual norm)`.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = smax * 1e-13 * (a.nrows().max(a.ncols()) as f64);
    let x = svd
        .solve(b, eps)
        .expect("svd was computed with both singular-vector sets");
    let resid = (a * &x - b).norm();
    (x, resid)
}

/// Smallest singular value of a (possibly rectangular) matrix.
pub fn min_singular_value(a: &DMatrix<f64>) -> f64 {
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_zero_is_identity() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(expm(&z), DMatrix::identity(4, 4));
    }

    #[test]
    fn expm_diagonal_matches_scalar_exp() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![-3.0, 0.25, 9.5]));
        let e = expm(&a);
        for (i, v) in [-3.0f64, 0.25, 9.5].iter().enumerate() {
            let rel = (e[(i, i)] - v.exp()).abs() / v.exp();
            assert!(rel < 1e-13, "entry {i}: rel err {rel}");
        }
    }

    #[test]
    fn expm_rotation_generator() {
        // exp of the so(2) generator is a rotation by the angle
        let t = 7.3;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&a);
        let want = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!((e - want).amax() < 1e-12);
    }

    #[test]
    fn expm_agrees_with_nalgebra_pade() {
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[0.3, -1.2, 2.0, 0.7, 0.1, -0.4, -2.2, 1.5, -0.6],
        );
        let mine = expm(&a);
        let theirs = a.clone().exp();
        assert!((mine - theirs).amax() < 1e-12);
    }

    #[test]
    fn least_squares_recovers_consistent_system() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 1.0, 1.0]);
        let x = DVector::from_vec(vec![0.5, -1.5]);
        let b = &a * &x;
        let (got, resid) = least_squares(&a, &b);
        assert!((got - x).norm() < 1e-14);
        assert!(resid < 1e-14);
    }
}
