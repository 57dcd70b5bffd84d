//! Float conversions and singular-value helpers shared by the numerical
//! parts of the crate.

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;

use crate::exact::{rational_to_f64, Field, Matrix, Rational};
use crate::group::GroupAlgebraMatrix;

pub fn to_dmatrix(m: &Matrix<Rational>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| rational_to_f64(m.get(i, j)))
}

pub fn to_complex_dmatrix<F: Field>(m: &Matrix<F>) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m.get(i, j).to_complex())
}

/// Singular values in decreasing order. Empty matrices have none.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn complex_singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Spectral norm of the regular representation of `h`.
pub fn operator_norm(h: &GroupAlgebraMatrix) -> f64 {
    spectral_norm(&to_dmatrix(&h.regular_representation()))
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(sigma: &[f64], rel_tol: f64) -> usize {
    let Some(&max) = sigma.first() else { return 0 };
    let cutoff = rel_tol * max;
    sigma.iter().filter(|&&s| s > cutoff).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_zero_and_projection() {
        assert_eq!(numerical_rank(&singular_values(&DMatrix::zeros(3, 3)), 1e-9), 0);
        let p = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let s = singular_values(&p);
        assert!((s[0] - 1.0).abs() < 1e-14);
        assert_eq!(numerical_rank(&s, 1e-9), 1);
    }
}
