//! Radial kernel profiles `φ(r)` and their exact symbolic form.
//!
//! Every supported profile is `φ(r) = w(x) p(x)` with `x = εr`, a rational
//! polynomial `p` and a weight `w` that is `1` (compactly supported on
//! `x < 1`), `e^{-x}` or `e^{-x²}`. Derivatives are taken with the operator
//! `D = (1/r) d/dr`, which maps this family into itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ManifoldDim;
use crate::poly::{Laurent, Poly};
use crate::scalar::{Rational, Real};

/// Highest derivative depth tracked for any profile.
pub const MAX_DEPTH: usize = 10;

/// Supported half-integer Matérn orders `ν = order + 1/2`.
pub const MATERN_ORDERS: [f64; 5] = [0.5, 1.5, 2.5, 3.5, 4.5];

/// Supported Wendland smoothness indices.
pub const WENDLAND_MAX_ELL: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weight {
    /// Compactly supported polynomial, zero for `x >= 1`.
    Compact,
    /// `e^{-x}`
    Exp,
    /// `e^{-x²}`
    Gauss,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile<T: Real> {
    /// Matérn kernel of order `ν = half_order + 1/2`.
    Matern { half_order: u32, eps: T },
    /// Wendland `φ_{3,ℓ}`, positive definite on R³.
    Wendland { ell: u32, eps: T },
    /// `e^{-(εr)²}`
    Gaussian { eps: T },
}

fn check_eps<T: Real>(eps: T) -> Result<()> {
    if eps > T::zero() && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("kernel scale must be positive and finite, got {}", eps.as_f64())))
    }
}

/// Matérn profile with closed form `e^{-εr} P_ν(εr)`, normalized to `φ(0) = 1`.
pub fn matern_profile<T: Real>(nu: f64, eps: T) -> Result<RadialProfile<T>> {
    let Some(k) = MATERN_ORDERS.iter().position(|&v| v == nu) else {
        return Err(Error::invalid(format!(
            "unsupported Matérn order nu = {nu}; supported: 1/2, 3/2, 5/2, 7/2, 9/2"
        )));
    };
    check_eps(eps)?;
    Ok(RadialProfile::Matern { half_order: k as u32, eps })
}

/// Wendland profile `φ_{3,ℓ}(εr)`, normalized to `φ(0) = 1`.
pub fn wendland_profile<T: Real>(ell: u32, eps: T) -> Result<RadialProfile<T>> {
    if ell > WENDLAND_MAX_ELL {
        return Err(Error::invalid(format!(
            "unsupported Wendland smoothness ell = {ell}; supported: 0..={WENDLAND_MAX_ELL}"
        )));
    }
    check_eps(eps)?;
    Ok(RadialProfile::Wendland { ell, eps })
}

pub fn gaussian_profile<T: Real>(eps: T) -> Result<RadialProfile<T>> {
    check_eps(eps)?;
    Ok(RadialProfile::Gaussian { eps })
}

fn q(n: i128) -> Rational {
    Rational::from_integer(n)
}

fn factorial(n: u32) -> i128 {
    (1..=n as i128).product()
}

/// Coefficients (in `x`) of the normalized Matérn polynomial for `ν = n + 1/2`:
/// `P(x) ∝ Σ_k (n+k)! / (k!(n-k)!) 2^{-k} x^{n-k}`.
pub fn matern_polynomial(n: u32) -> Poly<Rational> {
    let mut coeffs = vec![q(0); n as usize + 1];
    for k in 0..=n {
        let c = Rational::new(factorial(n + k), factorial(k) * factorial(n - k) * (1i128 << k));
        coeffs[(n - k) as usize] = c;
    }
    let p = Poly::new(coeffs);
    let c0 = p.coeff(0);
    p.scale(Rational::from_integer(1) / c0)
}

/// Wendland `φ_{3,ℓ}` by the integral recursion `φ_{ℓ+2}` → `I^ℓ φ_{ℓ+2}`,
/// `(Iφ)(x) = ∫_x^1 s φ(s) ds`, normalized so `φ(0) = 1`.
pub fn wendland_polynomial(ell: u32) -> Poly<Rational> {
    let one_minus_x = Poly::new(vec![q(1), q(-1)]);
    let mut p = one_minus_x.pow(ell + 2);
    for _ in 0..ell {
        let anti = (&Poly::x() * &p).antiderivative();
        let top = anti.eval(q(1));
        p = &Poly::constant(top) - &anti;
    }
    let c0 = p.coeff(0);
    p.scale(q(1) / c0)
}

impl<T: Real> RadialProfile<T> {
    pub fn eps(&self) -> T {
        match *self {
            RadialProfile::Matern { eps, .. } | RadialProfile::Wendland { eps, .. } | RadialProfile::Gaussian { eps } => eps,
        }
    }

    pub fn weight(&self) -> Weight {
        match self {
            RadialProfile::Matern { .. } => Weight::Exp,
            RadialProfile::Wendland { .. } => Weight::Compact,
            RadialProfile::Gaussian { .. } => Weight::Gauss,
        }
    }

    /// The polynomial factor `p(x)` of `φ = w(x) p(x)`.
    pub fn polynomial(&self) -> Poly<Rational> {
        match *self {
            RadialProfile::Matern { half_order, .. } => matern_polynomial(half_order),
            RadialProfile::Wendland { ell, .. } => wendland_polynomial(ell),
            RadialProfile::Gaussian { .. } => Poly::constant(q(1)),
        }
    }

    /// Matérn order `ν`, if this is a Matérn profile.
    pub fn nu(&self) -> Option<f64> {
        match *self {
            RadialProfile::Matern { half_order, .. } => Some(half_order as f64 + 0.5),
            _ => None,
        }
    }

    /// Sobolev exponent `s` of the native space of the restriction to S^d.
    ///
    /// Matérn of order `ν` gives `ν + d/2`; Wendland `φ_{3,ℓ}` gives
    /// `ℓ + (d+1)/2`. The Gaussian has no finite exponent.
    pub fn native_smoothness(&self, dim: ManifoldDim) -> f64 {
        let d = dim.d() as f64;
        match *self {
            RadialProfile::Matern { half_order, .. } => half_order as f64 + 0.5 + d / 2.0,
            RadialProfile::Wendland { ell, .. } => ell as f64 + (d + 1.0) / 2.0,
            RadialProfile::Gaussian { .. } => f64::INFINITY,
        }
    }

    /// `φ(r)`
    pub fn eval(&self, r: T) -> T {
        let x = self.eps() * r;
        let p = self.polynomial().to_real::<T>();
        match self.weight() {
            Weight::Compact if x >= T::one() => T::zero(),
            Weight::Compact => p.eval(x),
            Weight::Exp => (-x).exp() * p.eval(x),
            Weight::Gauss => (-x * x).exp() * p.eval(x),
        }
    }

    /// Leading Taylor coefficients of `φ` in `x`, exactly.
    pub fn series(&self, terms: usize) -> Vec<Rational> {
        let p = self.polynomial();
        // Taylor coefficients of the weight
        let w: Vec<Rational> = match self.weight() {
            Weight::Compact => (0..terms).map(|i| if i == 0 { q(1) } else { q(0) }).collect(),
            Weight::Exp => (0..terms)
                .map(|i| Rational::new(if i % 2 == 0 { 1 } else { -1 }, factorial(i as u32)))
                .collect(),
            Weight::Gauss => (0..terms)
                .map(|i| {
                    if i % 2 == 1 {
                        q(0)
                    } else {
                        let h = (i / 2) as u32;
                        Rational::new(if h.is_multiple_of(2) { 1 } else { -1 }, factorial(h))
                    }
                })
                .collect(),
        };
        (0..terms)
            .map(|i| (0..=i).fold(q(0), |acc, j| acc + p.coeff(j) * w[i - j]))
            .collect()
    }

    /// Largest `k` such that `ψ(t) = φ(√(2 - 2t))` has `k` finite derivatives
    /// at `t = 1`: half of (first odd power in the series of `φ`) minus one.
    pub fn max_depth(&self) -> usize {
        let series = self.series(2 * MAX_DEPTH + 2);
        series
            .iter()
            .enumerate()
            .find(|(i, c)| i % 2 == 1 && **c != q(0))
            .map_or(MAX_DEPTH, |(i, _)| ((i - 1) / 2).min(MAX_DEPTH))
    }

    /// `L_0, …, L_depth` with `D^k φ = ε^{2k} w(x) L_k(x)`, computed exactly.
    pub fn derivative_table(&self, depth: usize) -> Vec<Laurent<Rational>> {
        let weight = self.weight();
        let mut table = vec![Laurent::from_poly(&self.polynomial())];
        for _ in 0..depth {
            let prev = table.last().unwrap();
            let mut terms = Vec::new();
            for (e, c) in prev.terms() {
                // (1/x) d/dx [w(x) x^e] = w(x) * (e x^{e-2} + correction)
                terms.push((e - 2, *c * q(e as i128)));
                match weight {
                    Weight::Compact => {}
                    Weight::Exp => terms.push((e - 1, -*c)),
                    Weight::Gauss => terms.push((e, *c * q(-2))),
                }
            }
            table.push(crate::poly::laurent_from_terms(terms));
        }
        table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn wendland_matches_closed_forms() {
        // (1-x)^(ℓ+2) * Q_ℓ(x) / Q_ℓ(0), closed forms for φ_{3,ℓ}
        let one_minus = Poly::new(vec![q(1), q(-1)]);
        let factors: [Vec<i128>; 5] = [
            vec![1],
            vec![1, 4],
            vec![3, 18, 35],
            vec![1, 8, 25, 32],
            vec![5, 50, 210, 450, 429],
        ];
        for (ell, f) in factors.iter().enumerate() {
            let qpoly = Poly::new(f.iter().map(|&c| q(c)).collect());
            let expected = (&one_minus.pow(2 * ell as u32 + 2) * &qpoly).scale(r(1, f[0]));
            assert_eq!(wendland_polynomial(ell as u32), expected, "ell = {ell}");
        }
        // expanded coefficients of φ_{3,3}
        let w3: Vec<Rational> = [1, 0, -11, 0, 66, 0, -462, 1056, -1155, 704, -231, 32].iter().map(|&c| q(c)).collect();
        assert_eq!(wendland_polynomial(3).coeffs(), w3.as_slice());
    }

    #[test]
    fn wendland_low_orders_and_support() {
        let w0 = wendland_profile(0, 1.0f64).unwrap();
        let w1 = wendland_profile(1, 2.0f64).unwrap();
        for &x in &[0.0f64, 0.1, 0.5, 0.9] {
            assert!((w0.eval(x) - (1.0 - x).powi(2)).abs() < 1e-15);
            let y = 2.0 * x;
            let expect = if y < 1.0 { (1.0 - y).powi(4) * (4.0 * y + 1.0) } else { 0.0 };
            assert!((w1.eval(x) - expect).abs() < 1e-15);
        }
        assert_eq!(w0.eval(1.0), 0.0);
        assert_eq!(w1.eval(0.5), 0.0);
        assert_eq!(w1.eval(3.0), 0.0);
    }

    #[test]
    fn matern_low_orders() {
        assert_eq!(matern_polynomial(0).coeffs(), &[q(1)]);
        assert_eq!(matern_polynomial(1).coeffs(), &[q(1), q(1)]);
        assert_eq!(matern_polynomial(2).coeffs(), &[q(1), q(1), r(1, 3)]);
        for half in 0..5 {
            let m = matern_profile(half as f64 + 0.5, 1.7f64).unwrap();
            assert_eq!(m.eval(0.0), 1.0);
        }
    }

    /// `K_ν(r) = ∫_0^∞ e^{-r cosh s} cosh(νs) ds` by composite Simpson.
    fn bessel_k(nu: f64, r: f64) -> f64 {
        let upper = 12.0;
        let n = 20_000;
        let h = upper / n as f64;
        let f = |s: f64| (-r * s.cosh()).exp() * (nu * s).cosh();
        let mut sum = f(0.0) + f(upper);
        for i in 1..n {
            sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        sum * h / 3.0
    }

    fn gamma_half_integer(nu: f64) -> f64 {
        // Γ(n + 1/2) = (2n)! √π / (4^n n!)
        let n = (nu - 0.5) as u32;
        factorial(2 * n) as f64 * std::f64::consts::PI.sqrt() / (4f64.powi(n as i32) * factorial(n) as f64)
    }

    #[test]
    fn matern_matches_bessel_quadrature() {
        for &nu in &MATERN_ORDERS {
            let m = matern_profile(nu, 1.0f64).unwrap();
            let norm = gamma_half_integer(nu) * 2f64.powf(nu - 1.0);
            for &x in &[0.5f64, 1.0, 2.0] {
                let oracle = x.powf(nu) * bessel_k(nu, x) / norm;
                assert!((m.eval(x) - oracle).abs() < 1e-10, "nu={nu} r={x}: {} vs {oracle}", m.eval(x));
            }
        }
    }

    #[test]
    fn unsupported_parameters() {
        let e = matern_profile(2.0, 1.0f64).unwrap_err().to_string();
        assert!(e.contains("1/2, 3/2, 5/2, 7/2, 9/2"), "{e}");
        assert!(wendland_profile(5, 1.0f64).is_err());
        assert!(wendland_profile(1, 0.0f64).is_err());
        assert!(gaussian_profile(-1.0f64).is_err());
    }

    #[test]
    fn depth_from_series() {
        for ell in 0..=4 {
            assert_eq!(wendland_profile(ell, 1.0f64).unwrap().max_depth(), ell as usize);
        }
        for half in 0..5u32 {
            let m = matern_profile(half as f64 + 0.5, 1.0f64).unwrap();
            assert_eq!(m.max_depth(), half as usize);
        }
        assert_eq!(gaussian_profile(1.0f64).unwrap().max_depth(), MAX_DEPTH);
    }

    #[test]
    fn derivative_table_is_polynomial_exactly_up_to_depth() {
        let profiles = [
            wendland_profile(3, 1.0f64).unwrap(),
            matern_profile(2.5, 1.0f64).unwrap(),
            matern_profile(1.5, 1.0f64).unwrap(),
        ];
        for p in profiles {
            let depth = p.max_depth();
            let table = p.derivative_table(depth + 1);
            for (k, l) in table.iter().enumerate() {
                assert_eq!(l.to_poly().is_some(), k <= depth, "{p:?} k={k}: {l:?}");
            }
        }
        // D[(1+x)e^{-x}] = -e^{-x}
        let t = matern_profile(1.5, 1.0f64).unwrap().derivative_table(1);
        assert_eq!(t[1].to_poly().unwrap().coeffs(), &[q(-1)]);
    }

    #[test]
    fn native_smoothness_values() {
        let w = wendland_profile(3, 1.0f64).unwrap();
        assert_eq!(w.native_smoothness(ManifoldDim::Sphere), 4.5);
        assert_eq!(w.native_smoothness(ManifoldDim::Circle), 4.0);
        let m = matern_profile(2.5, 1.0f64).unwrap();
        assert_eq!(m.native_smoothness(ManifoldDim::Sphere), 3.5);
    }
}
