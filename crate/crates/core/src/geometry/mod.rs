//! Points, distances, charts, node generation and eigenfunctions on S¹ and S².

mod chart;
mod harmonics;
mod nodes;

pub use chart::{chart_map, ChartPoint, TangentFrame};
pub use harmonics::{eigenfunction, Eigenfunction, HarmonicIndex, Trig};
pub use nodes::{fibonacci_nodes, random_nodes, separation_distance, NodeSet, Separation};
pub(crate) use nodes::fibonacci_points;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Intrinsic dimension of the sphere S^d embedded in R^(d+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum ManifoldDim {
    Circle,
    Sphere,
}

impl ManifoldDim {
    pub fn new(d: usize) -> Result<Self> {
        match d {
            1 => Ok(ManifoldDim::Circle),
            2 => Ok(ManifoldDim::Sphere),
            _ => Err(Error::invalid(format!("manifold dimension must be 1 or 2, got {d}"))),
        }
    }

    /// Intrinsic dimension `d`.
    pub fn d(self) -> usize {
        match self {
            ManifoldDim::Circle => 1,
            ManifoldDim::Sphere => 2,
        }
    }

    /// Dimension of the ambient Euclidean space.
    pub fn ambient(self) -> usize {
        self.d() + 1
    }
}

impl TryFrom<u8> for ManifoldDim {
    type Error = String;
    fn try_from(d: u8) -> std::result::Result<Self, String> {
        ManifoldDim::new(d as usize).map_err(|e| e.to_string())
    }
}

impl From<ManifoldDim> for u8 {
    fn from(d: ManifoldDim) -> u8 {
        d.d() as u8
    }
}

/// Unit vector on S^d. Points on S¹ live in the `z = 0` plane of R³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint<T: Real> {
    xyz: Vector3<T>,
    dim: ManifoldDim,
}

impl<T: Real> SpherePoint<T> {
    /// Builds a point from `d + 1` ambient coordinates, renormalizing to unit length.
    /// Input within a few ulps of unit length is taken as is.
    pub fn new(dim: ManifoldDim, coords: &[T]) -> Result<Self> {
        if coords.len() != dim.ambient() {
            return Err(Error::invalid(format!(
                "S^{} point needs {} coordinates, got {}",
                dim.d(),
                dim.ambient(),
                coords.len()
            )));
        }
        let z = if dim == ManifoldDim::Sphere { coords[2] } else { T::zero() };
        let v = Vector3::new(coords[0], coords[1], z);
        let norm = v.norm();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::invalid("cannot normalize a zero or non-finite vector"));
        }
        // already-unit input (e.g. read back from a file) is kept bit-exact
        let xyz = if (norm - T::one()).abs() <= T::lit(4.0) * T::default_epsilon() { v } else { v / norm };
        Ok(SpherePoint { xyz, dim })
    }

    /// Point on S¹ at angle `theta`.
    pub fn from_angle(theta: T) -> Self {
        SpherePoint {
            xyz: Vector3::new(theta.cos(), theta.sin(), T::zero()),
            dim: ManifoldDim::Circle,
        }
    }

    pub(crate) fn from_unit_unchecked(xyz: Vector3<T>, dim: ManifoldDim) -> Self {
        SpherePoint { xyz, dim }
    }

    pub fn dim(&self) -> ManifoldDim {
        self.dim
    }

    /// Ambient coordinates (length `d + 1`).
    pub fn coords(&self) -> &[T] {
        &self.xyz.as_slice()[..self.dim.ambient()]
    }

    /// Ambient coordinates padded to R³.
    pub fn xyz(&self) -> &Vector3<T> {
        &self.xyz
    }

    pub fn dot(&self, other: &Self) -> T {
        self.xyz.dot(&other.xyz)
    }

    pub fn antipode(&self) -> Self {
        SpherePoint { xyz: -self.xyz, dim: self.dim }
    }
}

/// Great-circle distance in radians, in `[0, π]`.
///
/// Equals `arccos(clamp(xᵀy, -1, 1))`; evaluated as `atan2(|x × y|, xᵀy)`
/// so that nearby points keep full relative accuracy.
pub fn geodesic_distance<T: Real>(x: &SpherePoint<T>, y: &SpherePoint<T>) -> T {
    let cross = x.xyz.cross(&y.xyz).norm();
    cross.atan2(x.xyz.dot(&y.xyz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn sphere(x: f64, y: f64, z: f64) -> SpherePoint<f64> {
        SpherePoint::new(ManifoldDim::Sphere, &[x, y, z]).unwrap()
    }

    #[test]
    fn distance_examples() {
        let x = sphere(0.3, -0.2, 0.9);
        assert_eq!(geodesic_distance(&x, &x), 0.0);
        assert!((geodesic_distance(&x, &x.antipode()) - PI).abs() < 1e-15);
        let e1 = sphere(1.0, 0.0, 0.0);
        let e2 = sphere(0.0, 1.0, 0.0);
        assert!((geodesic_distance(&e1, &e2) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn construction_normalizes_and_validates() {
        let p = sphere(3.0, 0.0, 4.0);
        assert!((p.xyz().norm() - 1.0).abs() < 1e-15);
        assert!(SpherePoint::new(ManifoldDim::Sphere, &[0.0, 0.0, 0.0]).is_err());
        assert!(SpherePoint::new(ManifoldDim::Circle, &[1.0, 0.0, 0.0]).is_err());
        let c = SpherePoint::new(ManifoldDim::Circle, &[0.0, 2.0]).unwrap();
        assert_eq!(c.coords(), &[0.0, 1.0]);
        assert!(ManifoldDim::new(3).is_err());
    }

    fn arb_point() -> impl Strategy<Value = SpherePoint<f64>> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("nonzero", |(a, b, c)| a * a + b * b + c * c > 1e-3)
            .prop_map(|(a, b, c)| sphere(a, b, c))
    }

    proptest! {
        #[test]
        fn metric_axioms(x in arb_point(), y in arb_point(), z in arb_point()) {
            let dxy = geodesic_distance(&x, &y);
            prop_assert_eq!(dxy, geodesic_distance(&y, &x));
            prop_assert!((0.0..=PI).contains(&dxy));
            prop_assert!(dxy <= geodesic_distance(&x, &z) + geodesic_distance(&z, &y) + 1e-12);
            let acos = x.dot(&y).clamp(-1.0, 1.0).acos();
            prop_assert!((dxy - acos).abs() < 1e-7);
        }
    }
}
