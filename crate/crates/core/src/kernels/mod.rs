//! Zonal kernels on S^d, the operator `L = (-Δ + αI)^κ` applied to them,
//! and Gram matrices.

mod gram;
mod radial;
mod zonal;

pub use gram::{cross_gram, gram, interpolate, kernel_interpolant_eval};
pub use radial::{
    gaussian_profile, matern_polynomial, matern_profile, wendland_polynomial, wendland_profile, RadialProfile,
    Weight, MATERN_ORDERS, MAX_DEPTH, WENDLAND_MAX_ELL,
};
pub use zonal::{
    apply_operator, polynomial_laplace_beltrami, zonal_from_radial, zonal_laplace_beltrami, EllipticOperator,
    ZonalProfile,
};
