use nalgebra::DMatrix;

use crate::scalar::Real;

fn norm1<T: Real>(a: &DMatrix<T>) -> T {
    a.column_iter()
        .map(|c| c.iter().fold(T::zero(), |acc, v| acc + v.abs()))
        .fold(T::zero(), |a, b| a.max(b))
}

/// 1-norm condition number `‖K‖₁ ‖K⁻¹‖₁` of a symmetric positive definite
/// matrix, or `None` if the Cholesky factorization fails.
pub fn spd_condition<T: Real>(k: &DMatrix<T>) -> Option<T> {
    let chol = k.clone().cholesky()?;
    let inv = chol.inverse();
    let c = norm1(k) * norm1(&inv);
    c.is_finite().then_some(c)
}

