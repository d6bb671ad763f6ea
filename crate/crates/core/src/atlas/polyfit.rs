//! Polynomial determining sets and Lebesgue bounds in chart coordinates.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative singular-value cutoff for the numerical rank.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Exponents of the monomials of total degree `< order` in `d` variables.
pub fn monomial_exponents(d: usize, order: usize) -> Vec<[usize; 2]> {
    match d {
        1 => (0..order).map(|a| [a, 0]).collect(),
        _ => (0..order).flat_map(|deg| (0..=deg).rev().map(move |a| [a, deg - a])).collect(),
    }
}

/// Dimension of the space of polynomials of total degree `< order` in `d` variables.
pub fn polynomial_space_dim(d: usize, order: usize) -> usize {
    monomial_exponents(d, order).len()
}

fn basis_row<T: Real>(p: &[T], exps: &[[usize; 2]], scale: T) -> Vec<T> {
    let x = p[0] / scale;
    let y = if p.len() > 1 { p[1] / scale } else { T::zero() };
    exps.iter().map(|e| x.powi(e[0] as i32) * y.powi(e[1] as i32)).collect()
}

/// Matrix with one row per point and one column per monomial, evaluated at
/// `point / scale`.
pub fn vandermonde<T: Real, P: AsRef<[T]>>(points: &[P], d: usize, order: usize, scale: T) -> DMatrix<T> {
    let exps = monomial_exponents(d, order);
    let mut v = DMatrix::zeros(points.len(), exps.len());
    for (i, p) in points.iter().enumerate() {
        for (j, val) in basis_row(p.as_ref(), &exps, scale).into_iter().enumerate() {
            v[(i, j)] = val;
        }
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeterminingSet {
    pub pass: bool,
    pub rank: usize,
    /// Ratio of largest to smallest singular value (infinite when rank deficient).
    pub condition: f64,
}

fn default_scale<T: Real, P: AsRef<[T]>>(points: &[P]) -> T {
    let m = points
        .iter()
        .flat_map(|p| p.as_ref().iter().map(|c| c.abs()))
        .fold(T::zero(), |a, b| a.max(b));
    if m > T::zero() { m } else { T::one() }
}

/// Checks whether `points` (each with `d` coordinates) determine polynomials
/// of total degree `< order`, after scaling coordinates by the largest
/// absolute coordinate.
pub fn determining_set_check<T: Real, P: AsRef<[T]>>(points: &[P], d: usize, order: usize) -> DeterminingSet {
    determining_set_check_scaled(points, d, order, default_scale(points))
}

/// As [`determining_set_check`], dividing coordinates by `scale` (the patch
/// radius maps a cap's chart disk into the unit box).
pub fn determining_set_check_scaled<T: Real, P: AsRef<[T]>>(
    points: &[P],
    d: usize,
    order: usize,
    scale: T,
) -> DeterminingSet {
    let dim = polynomial_space_dim(d, order);
    if points.is_empty() || order == 0 {
        return DeterminingSet { pass: false, rank: 0, condition: f64::INFINITY };
    }
    let v = vandermonde(points, d, order, scale);
    let sv = v.singular_values();
    let smax = sv.iter().fold(T::zero(), |a, &b| a.max(b));
    let cut = smax * T::lit(RANK_TOLERANCE);
    let rank = sv.iter().filter(|&&s| s > cut).count();
    let pass = rank == dim;
    let condition = if pass {
        let smin = sv.iter().fold(smax, |a, &b| a.min(b));
        (smax / smin).as_f64()
    } else {
        f64::INFINITY
    };
    DeterminingSet { pass, rank, condition }
}

/// Maximum over `samples` of the ℓ¹ norm of the minimum-norm polynomial
/// reproduction weights `w(y)` solving `Vᵀ w = v(y)`.
///
/// Since the Lebesgue function is the smallest ℓ¹ norm over all reproducing
/// weights, each `‖w(y)‖₁` bounds it from above at `y`; the maximum over a
/// finite sample only estimates the supremum from below.
pub fn lebesgue_bound_at<T: Real, P: AsRef<[T]>, Q: AsRef<[T]>>(
    points: &[P],
    d: usize,
    order: usize,
    samples: &[Q],
) -> Result<T> {
    let scale = default_scale(points);
    let check = determining_set_check_scaled(points, d, order, scale);
    if !check.pass {
        return Err(Error::Domain(format!(
            "points are not a determining set for order {order} (rank {})",
            check.rank
        )));
    }
    let exps = monomial_exponents(d, order);
    let vt = vandermonde(points, d, order, scale).transpose();
    let svd = vt.svd(true, true);
    let smax = svd.singular_values.iter().fold(T::zero(), |a, &b| a.max(b));
    let pinv = svd
        .pseudo_inverse(smax * T::lit(RANK_TOLERANCE))
        .map_err(|e| Error::Domain(e.to_string()))?;
    let mut best = T::zero();
    for y in samples {
        let v = DVector::from_vec(basis_row(y.as_ref(), &exps, scale));
        let w = &pinv * v;
        best = best.max(w.lp_norm(1));
    }
    Ok(best)
}

/// Quasi-uniform sample of `count` points in the ball of radius `radius`
/// around the origin in R^d: a Vogel spiral on the disk, midpoints on the segment.
pub fn ball_samples<T: Real>(d: usize, radius: T, count: usize) -> Vec<Vec<T>> {
    let golden = T::pi() * (T::lit(3.0) - T::lit(5.0).sqrt());
    (0..count)
        .map(|k| {
            let kk = T::from_count(k);
            let nn = T::from_count(count);
            if d == 1 {
                vec![radius * (T::lit(2.0) * (kk + T::lit(0.5)) / nn - T::one())]
            } else {
                let r = radius * ((kk + T::lit(0.5)) / nn).sqrt();
                let a = golden * kk;
                vec![r * a.cos(), r * a.sin()]
            }
        })
        .collect()
}
