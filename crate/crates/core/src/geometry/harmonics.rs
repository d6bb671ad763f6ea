//! L²-orthonormal real eigenfunctions of the Laplace–Beltrami operator.
//!
//! S¹: `1/√(2π)`, `cos(lθ)/√π`, `sin(lθ)/√π`, eigenvalue `l²`.
//! S²: real spherical harmonics without the Condon–Shortley phase,
//! eigenvalue `l(l+1)`; `m > 0` pairs with `cos(mφ)` and `m < 0` with
//! `sin(|m|φ)`. Both are evaluated from Cartesian coordinates, so the poles
//! need no special handling.

use serde::{Deserialize, Serialize};

use super::{ManifoldDim, SpherePoint};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HarmonicIndex {
    Circle { l: u32, trig: Trig },
    Sphere { l: u32, m: i32 },
}

impl HarmonicIndex {
    pub fn dim(&self) -> ManifoldDim {
        match self {
            HarmonicIndex::Circle { .. } => ManifoldDim::Circle,
            HarmonicIndex::Sphere { .. } => ManifoldDim::Sphere,
        }
    }

    pub fn degree(&self) -> u32 {
        match *self {
            HarmonicIndex::Circle { l, .. } | HarmonicIndex::Sphere { l, .. } => l,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            HarmonicIndex::Circle { l: 0, trig: Trig::Sin } => {
                Err(Error::invalid("sin(0θ) vanishes identically; use l = 0 with cos"))
            }
            HarmonicIndex::Sphere { l, m } if m.unsigned_abs() > l => {
                Err(Error::invalid(format!("spherical harmonic needs |m| <= l, got l={l}, m={m}")))
            }
            _ => Ok(()),
        }
    }
}

/// A real eigenfunction `e` with `-Δ e = λ e`.
#[derive(Debug, Clone, Copy)]
pub struct Eigenfunction<T: Real> {
    index: HarmonicIndex,
    eigenvalue: T,
    norm: T,
}

pub fn eigenfunction<T: Real>(dim: ManifoldDim, index: HarmonicIndex) -> Result<Eigenfunction<T>> {
    if index.dim() != dim {
        return Err(Error::invalid(format!("harmonic index {index:?} does not belong to S^{}", dim.d())));
    }
    index.validate()?;
    let l = T::from_u32(index.degree()).unwrap();
    let (eigenvalue, norm) = match index {
        HarmonicIndex::Circle { l: 0, .. } => (T::zero(), T::one() / T::two_pi().sqrt()),
        HarmonicIndex::Circle { .. } => (l * l, T::one() / T::pi().sqrt()),
        HarmonicIndex::Sphere { l: deg, m } => {
            let am = m.unsigned_abs();
            // (l-m)!/(l+m)!
            let ratio = ((deg - am + 1)..=(deg + am))
                .fold(T::one(), |acc, k| acc / T::from_u32(k).unwrap());
            let mut norm = ((T::lit(2.0) * l + T::one()) / (T::lit(4.0) * T::pi()) * ratio).sqrt();
            if m != 0 {
                norm *= T::lit(2.0).sqrt();
            }
            (l * (l + T::one()), norm)
        }
    };
    Ok(Eigenfunction { index, eigenvalue, norm })
}

impl<T: Real> Eigenfunction<T> {
    pub fn index(&self) -> HarmonicIndex {
        self.index
    }

    /// `λ` with `-Δ e = λ e`.
    pub fn eigenvalue(&self) -> T {
        self.eigenvalue
    }

    pub fn eval(&self, p: &SpherePoint<T>) -> T {
        let v = p.xyz();
        match self.index {
            HarmonicIndex::Circle { l, trig } => {
                let (re, im) = complex_power(v.x, v.y, l);
                self.norm * if trig == Trig::Cos { re } else { im }
            }
            HarmonicIndex::Sphere { l, m } => {
                let am = m.unsigned_abs();
                let (re, im) = complex_power(v.x, v.y, am);
                let q = reduced_legendre(l, am, v.z);
                self.norm * q * if m >= 0 { re } else { im }
            }
        }
    }
}

/// `(x + iy)^k` as `(re, im)`.
fn complex_power<T: Real>(x: T, y: T, k: u32) -> (T, T) {
    (0..k).fold((T::one(), T::zero()), |(a, b), _| (a * x - b * y, a * y + b * x))
}

/// `P_l^m(z) / (1 - z²)^{m/2}`, a polynomial in `z`.
fn reduced_legendre<T: Real>(l: u32, m: u32, z: T) -> T {
    // Q_m^m = (2m-1)!!
    let mut q_mm = T::one();
    for k in 1..=m {
        q_mm *= T::from_u32(2 * k - 1).unwrap();
    }
    if l == m {
        return q_mm;
    }
    let mut prev = q_mm;
    let mut cur = z * T::from_u32(2 * m + 1).unwrap() * q_mm;
    for deg in (m + 2)..=l {
        let next = (T::from_u32(2 * deg - 1).unwrap() * z * cur - T::from_u32(deg + m - 1).unwrap() * prev)
            / T::from_u32(deg - m).unwrap();
        prev = cur;
        cur = next;
    }
    cur
}
