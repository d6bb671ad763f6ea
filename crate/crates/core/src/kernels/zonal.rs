//! Zonal profiles `ψ(t)`, `K(x, y) = ψ(xᵀy)`, and the operator algebra on them.
//!
//! A profile is stored as `ψ(t) = Σ_k a_k(t) b^{(k)}(t)` where `b` is a base
//! profile (a restricted radial kernel or a polynomial) and the `a_k` are
//! polynomials in `t`. Applying the zonal Laplace–Beltrami identity
//! `Δ f = (1 - t²) ψ''(t) - d t ψ'(t)` for `f(x) = ψ(xᵀy)` only reshuffles
//! the `a_k`, so operator-applied kernels stay exact.

use std::sync::Arc;

use super::radial::{RadialProfile, Weight, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::geometry::ManifoldDim;
use crate::poly::{Coeff, Poly};
use crate::scalar::Real;

#[derive(Debug)]
enum Base<T: Real> {
    Radial {
        profile: RadialProfile<T>,
        /// `L_k` of `D^k φ = ε^{2k} w(x) L_k(x)`, all free of negative powers.
        table: Vec<Poly<T>>,
    },
    Polynomial(Poly<T>),
}

/// Effectively unlimited depth for polynomial bases.
const POLY_DEPTH: usize = usize::MAX / 4;

impl<T: Real> Base<T> {
    fn depth(&self) -> usize {
        match self {
            Base::Radial { table, .. } => table.len() - 1,
            Base::Polynomial(_) => POLY_DEPTH,
        }
    }

    /// `b^{(k)}(t)` for `k = 0..=order`.
    fn derivatives(&self, t: T, order: usize, out: &mut Vec<T>) {
        out.clear();
        match self {
            Base::Radial { profile, table } => {
                let eps = profile.eps();
                let s = (T::lit(2.0) - T::lit(2.0) * t).max(T::zero());
                let x = eps * s.sqrt();
                let w = match profile.weight() {
                    Weight::Compact if x >= T::one() => {
                        out.resize(order + 1, T::zero());
                        return;
                    }
                    Weight::Compact => T::one(),
                    Weight::Exp => (-x).exp(),
                    Weight::Gauss => (-x * x).exp(),
                };
                // ψ^{(k)}(t) = (-1)^k D^k φ(r) = (-ε²)^k w(x) L_k(x)
                let step = -(eps * eps);
                let mut factor = w;
                for l in table.iter().take(order + 1) {
                    out.push(factor * l.eval(x));
                    factor *= step;
                }
            }
            Base::Polynomial(p) => {
                let mut q = p.clone();
                for _ in 0..=order {
                    out.push(q.eval(t));
                    q = q.derivative();
                }
            }
        }
    }
}

/// Zonal kernel profile with exact derivative bookkeeping.
#[derive(Debug, Clone)]
pub struct ZonalProfile<T: Real> {
    base: Arc<Base<T>>,
    terms: Vec<Poly<T>>,
}

impl<T: Real> ZonalProfile<T> {
    /// Profile of a polynomial in `t`.
    pub fn polynomial(p: Poly<T>) -> Self {
        ZonalProfile { base: Arc::new(Base::Polynomial(p)), terms: vec![Poly::constant(T::one())] }
    }

    /// Radial profile restricted to the sphere at its maximal depth.
    pub fn from_radial(phi: &RadialProfile<T>) -> Self {
        zonal_from_radial(phi, phi.max_depth()).expect("maximal depth is admissible")
    }

    /// Remaining number of derivatives that are finite at `t = 1`.
    pub fn depth(&self) -> usize {
        self.base.depth() - self.order()
    }

    /// The radial profile this zonal profile was derived from, if any.
    pub fn source(&self) -> Option<&RadialProfile<T>> {
        match &*self.base {
            Base::Radial { profile, .. } => Some(profile),
            Base::Polynomial(_) => None,
        }
    }

    /// Nominal native-space Sobolev exponent on S^d, for radial sources.
    pub fn nominal_smoothness(&self, dim: ManifoldDim) -> Option<f64> {
        self.source().map(|p| p.native_smoothness(dim))
    }

    /// Collapses to a polynomial when the base is polynomial.
    pub fn as_polynomial(&self) -> Option<Poly<T>> {
        let Base::Polynomial(p) = &*self.base else { return None };
        let mut q = p.clone();
        let mut out = Poly::zero();
        for a in &self.terms {
            out = &out + &(a * &q);
            q = q.derivative();
        }
        Some(out)
    }

    fn order(&self) -> usize {
        self.terms.len() - 1
    }

    /// Multiplies the profile by a positive constant.
    pub fn scaled(&self, c: T) -> Self {
        ZonalProfile { base: self.base.clone(), terms: self.terms.iter().map(|a| a.scale(c)).collect() }
    }

    /// `ψ(t)`
    pub fn eval(&self, t: T) -> T {
        let mut b = Vec::with_capacity(self.terms.len());
        self.base.derivatives(t, self.order(), &mut b);
        self.terms.iter().zip(&b).fold(T::zero(), |acc, (a, bk)| acc + a.eval(t) * *bk)
    }

    /// `(ψ(t), ψ'(t), …, ψ^{(p)}(t))`
    pub fn eval_derivs(&self, t: T, p: usize) -> Result<Vec<T>> {
        self.check_depth(p)?;
        let mut b = Vec::new();
        self.base.derivatives(t, self.order() + p, &mut b);
        let mut terms = self.terms.clone();
        let mut out = Vec::with_capacity(p + 1);
        for _ in 0..=p {
            out.push(terms.iter().zip(&b).fold(T::zero(), |acc, (a, bk)| acc + a.eval(t) * *bk));
            terms = differentiate_terms(&terms);
        }
        Ok(out)
    }

    fn check_depth(&self, required: usize) -> Result<()> {
        let available = self.depth();
        if required > available {
            return Err(Error::Smoothness { required, available, max_kappa: available / 2 });
        }
        Ok(())
    }

    /// Evaluates `ψ` from the Taylor series of `φ` in `r` split into its even
    /// and odd parts, `E(r²) + r O(r²)`, with `r² = 2 - 2t` taken directly.
    /// Only defined for undifferentiated radial profiles; used as an
    /// independent evaluation path near `t = 1`.
    pub fn eval_via_series(&self, t: T) -> Option<T> {
        let profile = self.source()?;
        if self.order() != 0 || self.terms[0] != Poly::constant(T::one()) {
            return None;
        }
        let eps = profile.eps();
        let series = profile.series(26);
        let s = (T::lit(2.0) - T::lit(2.0) * t).max(T::zero()) * eps * eps;
        let (mut even, mut odd) = (T::zero(), T::zero());
        for (i, c) in series.iter().enumerate().rev() {
            let c = crate::scalar::rational_to::<T>(c);
            if i % 2 == 0 {
                even = even * s + c;
            } else {
                odd = odd * s + c;
            }
        }
        Some(even + s.sqrt() * odd)
    }
}

/// `d/dt Σ a_k b^{(k)} = Σ (a_k' b^{(k)} + a_k b^{(k+1)})`
fn differentiate_terms<C: Coeff>(terms: &[Poly<C>]) -> Vec<Poly<C>> {
    let mut out: Vec<Poly<C>> = terms.iter().map(Poly::derivative).collect();
    out.push(Poly::zero());
    for (k, a) in terms.iter().enumerate() {
        out[k + 1] = &out[k + 1] + a;
    }
    trim(out)
}

fn trim<C: Coeff>(mut terms: Vec<Poly<C>>) -> Vec<Poly<C>> {
    while terms.len() > 1 && terms.last().is_some_and(Poly::is_zero) {
        terms.pop();
    }
    terms
}

/// `(1 - t²) ψ'' - d t ψ'` on the term representation.
fn laplace_beltrami_terms<C: Coeff>(terms: &[Poly<C>], d: usize) -> Vec<Poly<C>> {
    let one = C::one();
    let first = differentiate_terms(terms);
    let second = differentiate_terms(&first);
    let one_minus_t2 = Poly::new(vec![one.clone(), C::zero(), C::zero() - one]);
    let dt = Poly::monomial(C::from_usize(d).unwrap(), 1);
    let n = second.len().max(first.len());
    let zero = Poly::zero();
    trim(
        (0..n)
            .map(|k| {
                let a = &one_minus_t2 * second.get(k).unwrap_or(&zero);
                let b = &dt * first.get(k).unwrap_or(&zero);
                &a - &b
            })
            .collect(),
    )
}

/// Zonal Laplace–Beltrami identity on polynomial profiles, over any
/// coefficient ring (exact over rationals).
pub fn polynomial_laplace_beltrami<C: Coeff>(p: &Poly<C>, d: usize) -> Poly<C> {
    let one = C::one();
    let one_minus_t2 = Poly::new(vec![one.clone(), C::zero(), C::zero() - one]);
    let dt = Poly::monomial(C::from_usize(d).unwrap(), 1);
    &(&one_minus_t2 * &p.derivative().derivative()) - &(&dt * &p.derivative())
}

/// Restricts a radial profile to the sphere, `ψ(t) = φ(√(2 - 2t))`, keeping
/// `depth` derivatives available at `t = 1`.
pub fn zonal_from_radial<T: Real>(phi: &RadialProfile<T>, depth: usize) -> Result<ZonalProfile<T>> {
    let available = phi.max_depth();
    if depth > available {
        return Err(Error::Smoothness { required: depth, available, max_kappa: available / 2 });
    }
    let table = phi
        .derivative_table(depth.min(MAX_DEPTH))
        .iter()
        .map(|l| l.to_poly().expect("no negative powers up to the series depth").to_real())
        .collect();
    Ok(ZonalProfile {
        base: Arc::new(Base::Radial { profile: *phi, table }),
        terms: vec![Poly::constant(T::one())],
    })
}

/// `t ↦ (1 - t²) ψ''(t) - d t ψ'(t)`, the Laplace–Beltrami operator applied
/// to `x ↦ ψ(xᵀy)`.
pub fn zonal_laplace_beltrami<T: Real>(psi: &ZonalProfile<T>, dim: ManifoldDim) -> Result<ZonalProfile<T>> {
    psi.check_depth(2)?;
    Ok(ZonalProfile { base: psi.base.clone(), terms: laplace_beltrami_terms(&psi.terms, dim.d()) })
}

/// Elliptic operator `L = (-Δ + α I)^κ` on S^d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticOperator<T: Real> {
    kappa: u32,
    alpha: T,
    dim: ManifoldDim,
}

impl<T: Real> EllipticOperator<T> {
    pub fn new(kappa: u32, alpha: T, dim: ManifoldDim) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::invalid("operator power kappa must be at least 1"));
        }
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(Error::invalid(format!("alpha must be positive, got {}", alpha.as_f64())));
        }
        Ok(EllipticOperator { kappa, alpha, dim })
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn dim(&self) -> ManifoldDim {
        self.dim
    }

    /// Differential order `2κ`.
    pub fn order(&self) -> usize {
        2 * self.kappa as usize
    }

    /// Symbol on an eigenspace: `(λ + α)^κ`.
    pub fn symbol(&self, eigenvalue: T) -> T {
        (eigenvalue + self.alpha).powi(self.kappa as i32)
    }
}

/// `ψ_L` with `K_L(x, y) = ψ_L(xᵀy)`: applies `ψ ↦ -[(1-t²)ψ'' - d t ψ'] + αψ` κ times.
pub fn apply_operator<T: Real>(psi: &ZonalProfile<T>, op: &EllipticOperator<T>) -> Result<ZonalProfile<T>> {
    psi.check_depth(op.order())?;
    let mut terms = psi.terms.clone();
    for _ in 0..op.kappa {
        let lb = laplace_beltrami_terms(&terms, op.dim.d());
        let n = lb.len().max(terms.len());
        let zero = Poly::zero();
        terms = trim(
            (0..n)
                .map(|k| &terms.get(k).unwrap_or(&zero).scale(op.alpha) - lb.get(k).unwrap_or(&zero))
                .collect(),
        );
    }
    Ok(ZonalProfile { base: psi.base.clone(), terms })
}
