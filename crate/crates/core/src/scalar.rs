//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use num_rational::Ratio;

/// Floating-point scalar usable throughout the library (`f32` or `f64`).
///
/// Method calls go through [`RealField`]; `num-traits` supplies the
/// conversions to and from primitive numbers.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts an index or count.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {}

/// Exact rational scalar used for symbolic kernel construction.
pub type Rational = Ratio<i128>;

pub(crate) fn rational_to<T: Real>(q: &Rational) -> T {
    // Numerators and denominators stay far below 2^53 for the supported kernels.
    T::lit(*q.numer() as f64) / T::lit(*q.denom() as f64)
}
