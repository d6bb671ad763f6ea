use nalgebra::{DMatrix, DVector};

use super::ZonalProfile;
use crate::error::{Error, Result};
use crate::geometry::SpherePoint;
use crate::scalar::Real;

/// `[ψ(x_iᵀ x_j)]`, symmetric by construction, with the diagonal evaluated at
/// exactly `t = 1`.
pub fn gram<T: Real>(nodes: &[SpherePoint<T>], psi: &ZonalProfile<T>) -> DMatrix<T> {
    let n = nodes.len();
    let mut k = DMatrix::zeros(n, n);
    let diag = psi.eval(T::one());
    for i in 0..n {
        k[(i, i)] = diag;
        for j in 0..i {
            let v = psi.eval(nodes[i].dot(&nodes[j]).min(T::one()).max(-T::one()));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// `[ψ(a_iᵀ b_j)]`
pub fn cross_gram<T: Real>(a: &[SpherePoint<T>], b: &[SpherePoint<T>], psi: &ZonalProfile<T>) -> DMatrix<T> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| psi.eval(a[i].dot(&b[j]).min(T::one()).max(-T::one())))
}

/// `Σ_j c_j ψ(xᵀ x_j)`
pub fn kernel_interpolant_eval<T: Real>(
    centers: &[SpherePoint<T>],
    coeffs: &[T],
    psi: &ZonalProfile<T>,
    x: &SpherePoint<T>,
) -> Result<T> {
    if centers.len() != coeffs.len() {
        return Err(Error::invalid(format!(
            "{} centers but {} coefficients",
            centers.len(),
            coeffs.len()
        )));
    }
    Ok(centers
        .iter()
        .zip(coeffs)
        .fold(T::zero(), |acc, (c, a)| acc + *a * psi.eval(x.dot(c).min(T::one()).max(-T::one()))))
}

/// Coefficients `c` of the kernel interpolant with `K|_X c = values`.
pub fn interpolate<T: Real>(centers: &[SpherePoint<T>], values: &[T], psi: &ZonalProfile<T>) -> Result<DVector<T>> {
    if centers.len() != values.len() {
        return Err(Error::invalid("one value per center required"));
    }
    let k = gram(centers, psi);
    let chol = k
        .cholesky()
        .ok_or_else(|| Error::Domain("Gram matrix is not numerically positive definite".into()))?;
    Ok(chol.solve(&DVector::from_column_slice(values)))
}
