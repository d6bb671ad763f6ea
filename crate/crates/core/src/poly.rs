//! Dense univariate polynomials and Laurent polynomials over a generic
//! coefficient ring.
//!
//! The same code runs over exact rationals (kernel construction, symbolic
//! checks) and over floating-point scalars (evaluation).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{FromPrimitive, Num};

use crate::scalar::{rational_to, Rational, Real};

/// Trait alias for polynomial coefficients.
pub trait Coeff: Clone + Num + FromPrimitive + fmt::Debug {}
impl<C: Clone + Num + FromPrimitive + fmt::Debug> Coeff for C {}

fn int<C: Coeff>(i: i64) -> C {
    C::from_i64(i).expect("small integer representable as coefficient")
}

/// Polynomial `sum_i coeffs[i] * x^i` with no trailing zero coefficients.
#[derive(Clone, PartialEq)]
pub struct Poly<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> Poly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Poly::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: C, k: usize) -> Self {
        let mut coeffs = vec![C::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Poly::monomial(C::one(), 1)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn eval(&self, x: C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, s: C) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Poly::constant(C::one()), |acc, _| &acc * self)
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * int(i as i64))
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = vec![C::zero()];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.clone() / int(i as i64 + 1)),
        );
        Poly::new(coeffs)
    }

    /// Coefficient-wise conversion into another ring.
    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl Poly<Rational> {
    pub fn to_real<T: Real>(&self) -> Poly<T> {
        self.map(rational_to)
    }
}

impl<C: Coeff> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl<C: Coeff> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<C: Coeff> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<C: Coeff> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<C: Coeff + Neg<Output = C>> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

/// Laurent polynomial `sum_k coeffs[k] * x^(low + k)`.
#[derive(Clone, PartialEq)]
pub struct Laurent<C> {
    low: i32,
    coeffs: Vec<C>,
}

impl<C: Coeff> Laurent<C> {
    pub fn new(low: i32, coeffs: Vec<C>) -> Self {
        let mut l = Laurent { low, coeffs };
        l.normalize();
        l
    }

    pub fn from_poly(p: &Poly<C>) -> Self {
        Laurent::new(0, p.coeffs().to_vec())
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.low = 0;
        } else if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i32;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest exponent carrying a nonzero coefficient.
    pub fn min_exponent(&self) -> Option<i32> {
        (!self.is_zero()).then_some(self.low)
    }

    pub fn coeff(&self, exp: i32) -> C {
        let k = exp - self.low;
        if k < 0 {
            return C::zero();
        }
        self.coeffs.get(k as usize).cloned().unwrap_or_else(C::zero)
    }

    /// Terms as `(exponent, coefficient)` pairs, zero coefficients skipped.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &C)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.low + k as i32, c))
    }

    /// Converts to an ordinary polynomial; `None` if a negative power survives.
    pub fn to_poly(&self) -> Option<Poly<C>> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if self.low < 0 {
            return None;
        }
        let mut coeffs = vec![C::zero(); self.low as usize];
        coeffs.extend(self.coeffs.iter().cloned());
        Some(Poly::new(coeffs))
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Laurent<D> {
        Laurent::new(self.low, self.coeffs.iter().map(f).collect())
    }
}

impl Laurent<Rational> {
    pub fn to_real<T: Real>(&self) -> Laurent<T> {
        self.map(rational_to)
    }
}

impl<C: Coeff> fmt::Debug for Laurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent(x^{}){:?}", self.low, self.coeffs)
    }
}

/// Accumulates `(exponent, coefficient)` pairs into a Laurent polynomial.
pub(crate) fn laurent_from_terms<C: Coeff>(terms: impl IntoIterator<Item = (i32, C)>) -> Laurent<C> {
    let terms: Vec<(i32, C)> = terms.into_iter().collect();
    let Some(low) = terms.iter().map(|(e, _)| *e).min() else {
        return Laurent::new(0, Vec::new());
    };
    let high = terms.iter().map(|(e, _)| *e).max().unwrap();
    let mut coeffs = vec![C::zero(); (high - low + 1) as usize];
    for (e, c) in terms {
        let k = (e - low) as usize;
        coeffs[k] = coeffs[k].clone() + c;
    }
    Laurent::new(low, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn arithmetic_over_rationals() {
        let p = Poly::new(vec![q(1, 1), q(-1, 1)]); // 1 - x
        let sq = &p * &p;
        assert_eq!(sq.coeffs(), &[q(1, 1), q(-2, 1), q(1, 1)]);
        assert_eq!(p.pow(3).eval(q(1, 2)), q(1, 8));
        let anti = sq.antiderivative();
        assert_eq!(anti.coeffs(), &[q(0, 1), q(1, 1), q(-1, 1), q(1, 3)]);
        assert_eq!(anti.derivative(), sq);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn laurent_normalizes_and_converts() {
        let l = laurent_from_terms(vec![(-1, q(1, 1)), (-1, q(-1, 1)), (2, q(3, 1))]);
        assert_eq!(l.min_exponent(), Some(2));
        assert_eq!(l.to_poly().unwrap().coeffs(), &[q(0, 1), q(0, 1), q(3, 1)]);
        let neg = Laurent::new(-1, vec![q(1, 1)]);
        assert!(neg.to_poly().is_none());
    }
}
