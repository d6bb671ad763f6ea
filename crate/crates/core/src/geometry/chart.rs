use nalgebra::{Vector2, Vector3};

use super::{ManifoldDim, SpherePoint};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Point in a local chart, `d` meaningful components (the second is zero on S¹).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint<T: Real> {
    v: Vector2<T>,
    dim: ManifoldDim,
}

impl<T: Real> ChartPoint<T> {
    pub fn new(dim: ManifoldDim, coords: &[T]) -> Self {
        assert_eq!(coords.len(), dim.d(), "chart point needs d coordinates");
        let y = if dim == ManifoldDim::Sphere { coords[1] } else { T::zero() };
        ChartPoint { v: Vector2::new(coords[0], y), dim }
    }

    pub fn dim(&self) -> ManifoldDim {
        self.dim
    }

    pub fn as_slice(&self) -> &[T] {
        &self.v.as_slice()[..self.dim.d()]
    }

    pub fn vector(&self) -> &Vector2<T> {
        &self.v
    }

    pub fn norm(&self) -> T {
        self.v.norm()
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.v - other.v).norm()
    }
}

impl<T: Real> AsRef<[T]> for ChartPoint<T> {
    fn as_ref(&self) -> &[T] {
        self.as_slice()
    }
}

/// Orthonormal tangent frame at a chart center.
///
/// On S² the first axis is the coordinate axis least aligned with the center,
/// orthogonalized against it (ties broken toward the lower axis index); the
/// second is `center × first`. On S¹ the single axis is the counterclockwise
/// tangent `(-c_y, c_x)`.
#[derive(Debug, Clone, Copy)]
pub struct TangentFrame<T: Real> {
    center: SpherePoint<T>,
    axes: [Vector3<T>; 2],
}

impl<T: Real> TangentFrame<T> {
    pub fn at(center: &SpherePoint<T>) -> Self {
        let c = *center.xyz();
        let axes = match center.dim() {
            ManifoldDim::Circle => [Vector3::new(-c.y, c.x, T::zero()), Vector3::zeros()],
            ManifoldDim::Sphere => {
                let mut k = 0;
                for i in 1..3 {
                    if c[i].abs() < c[k].abs() {
                        k = i;
                    }
                }
                let mut e = Vector3::zeros();
                e[k] = T::one();
                let t1 = (e - c * c.dot(&e)).normalize();
                let t2 = c.cross(&t1);
                [t1, t2]
            }
        };
        TangentFrame { center: *center, axes }
    }

    pub fn center(&self) -> &SpherePoint<T> {
        &self.center
    }

    /// Inverse exponential map (azimuthal equidistant projection) at the center.
    pub fn log(&self, x: &SpherePoint<T>) -> Result<ChartPoint<T>> {
        let c = self.center.xyz();
        let p = x.xyz();
        let cos = c.dot(p);
        let tangent = p - c * cos;
        let sin = tangent.norm();
        let theta = sin.atan2(cos);
        let dim = self.center.dim();
        if theta > T::pi() - T::lit(1e-12) {
            return Err(Error::Domain("chart undefined at the antipode of its center".into()));
        }
        if sin == T::zero() {
            return Ok(ChartPoint { v: Vector2::zeros(), dim });
        }
        let scale = theta / sin;
        let u = tangent.dot(&self.axes[0]) * scale;
        let w = if dim == ManifoldDim::Sphere { tangent.dot(&self.axes[1]) * scale } else { T::zero() };
        Ok(ChartPoint { v: Vector2::new(u, w), dim })
    }
}

/// Chart coordinates of `x` in the azimuthal equidistant chart centered at `center`.
pub fn chart_map<T: Real>(center: &SpherePoint<T>, x: &SpherePoint<T>) -> Result<ChartPoint<T>> {
    TangentFrame::at(center).log(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::geodesic_distance;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn sphere(x: f64, y: f64, z: f64) -> SpherePoint<f64> {
        SpherePoint::new(ManifoldDim::Sphere, &[x, y, z]).unwrap()
    }

    #[test]
    fn center_maps_to_origin() {
        let c = sphere(0.2, 0.5, -0.7);
        let y = chart_map(&c, &c).unwrap();
        assert!(y.norm() < 1e-15);
    }

    #[test]
    fn isometry_at_center() {
        let c = sphere(0.0, 0.0, 1.0);
        let x = sphere((PI / 3.0).sin(), 0.0, (PI / 3.0).cos());
        let y = chart_map(&c, &x).unwrap();
        assert!((y.norm() - PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn circle_chart_is_the_angle() {
        let c = SpherePoint::from_angle(0.0);
        for &t in &[-3.0f64, -1.2, -0.1, 0.0, 0.4, 2.5, 3.1] {
            let y = chart_map(&c, &SpherePoint::from_angle(t)).unwrap();
            assert_eq!(y.as_slice().len(), 1);
            assert!((y.as_slice()[0] - t).abs() < 1e-14, "t = {t}");
        }
    }

    #[test]
    fn antipode_is_rejected() {
        let c = sphere(0.1, 0.9, 0.3);
        assert!(matches!(chart_map(&c, &c.antipode()), Err(Error::Domain(_))));
        let c1 = SpherePoint::from_angle(0.7);
        assert!(chart_map(&c1, &c1.antipode()).is_err());
    }

    #[test]
    fn frame_is_orthonormal() {
        for c in [sphere(1.0, 0.0, 0.0), sphere(0.3, -0.4, 0.5), sphere(0.0, 0.0, -1.0)] {
            let f = TangentFrame::at(&c);
            let [a, b] = f.axes;
            assert!((a.norm() - 1.0).abs() < 1e-15 && (b.norm() - 1.0).abs() < 1e-15);
            assert!(a.dot(&b).abs() < 1e-15 && a.dot(c.xyz()).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn chart_norm_equals_geodesic(
            a in -1.0..1.0f64, b in -1.0..1.0f64, c in -1.0..1.0f64,
            u in -1.0..1.0f64, v in -1.0..1.0f64, w in -1.0..1.0f64,
        ) {
            prop_assume!(a * a + b * b + c * c > 1e-3 && u * u + v * v + w * w > 1e-3);
            let center = sphere(a, b, c);
            let x = sphere(u, v, w);
            let dist = geodesic_distance(&center, &x);
            prop_assume!(dist < PI - 0.1);
            let y = chart_map(&center, &x).unwrap();
            prop_assert!((y.norm() - dist).abs() < 1e-12);
        }
    }
}
