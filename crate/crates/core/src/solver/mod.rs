//! Least-squares solution of the global system.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::assembly::GlobalLeastSquares;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sparse::CsrMatrix;

/// Largest column count accepted by the dense QR path.
pub const DENSE_QR_MAX_COLUMNS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    /// Householder QR of the dense matrix.
    DenseQr,
    /// Jacobi-preconditioned conjugate gradients on the normal equations.
    NormalCg,
}

impl std::fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveMethod::DenseQr => "dense-qr",
            SolveMethod::NormalCg => "normal-cg",
        })
    }
}

impl std::str::FromStr for SolveMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense-qr" => Ok(SolveMethod::DenseQr),
            "normal-cg" => Ok(SolveMethod::NormalCg),
            _ => Err(Error::invalid(format!("unknown solver `{s}` (expected dense-qr or normal-cg)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub method: SolveMethod,
    /// Stopping tolerance on `‖Aᵀ(Au − F)‖ / ‖AᵀF‖` for `normal-cg`.
    pub rel_tol: f64,
    /// Iteration cap for `normal-cg`; `None` means `10 n`.
    pub max_iter: Option<usize>,
    /// Parallel sparse products. Each entry is reduced in a fixed order, so
    /// results do not depend on scheduling.
    pub parallel: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { method: SolveMethod::NormalCg, rel_tol: 1e-10, max_iter: None, parallel: false }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport<T: Real> {
    pub solution: DVector<T>,
    /// `‖A û − F‖₂`
    pub residual_norm: T,
    pub per_block_residuals: Vec<T>,
    pub iterations: usize,
    pub method: SolveMethod,
    pub converged: bool,
}

/// Minimizes `‖A v − F‖₂` over `v`.
pub fn solve_least_squares<T: Real>(sys: &GlobalLeastSquares<T>, options: &SolverOptions) -> Result<SolveReport<T>> {
    let a = sys.matrix();
    let f = DVector::from_column_slice(sys.rhs());
    let (solution, iterations, converged) = match options.method {
        SolveMethod::DenseQr => (lsq_dense_qr(a, &f)?, 0, true),
        SolveMethod::NormalCg => {
            let max_iter = options.max_iter.unwrap_or(10 * a.ncols());
            let out = lsq_normal_cg(a, &f, T::lit(options.rel_tol), max_iter, options.parallel)?;
            (out.solution, out.iterations, out.converged)
        }
    };
    let per_block_residuals = block_residuals(sys, &solution)?;
    let residual_norm = (a.mul_vec(&solution) - &f).norm();
    Ok(SolveReport { solution, residual_norm, per_block_residuals, iterations, method: options.method, converged })
}

/// `‖W_ℓ u|_{J_ℓ} − F_ℓ‖₂` for every block.
pub fn block_residuals<T: Real>(sys: &GlobalLeastSquares<T>, u: &DVector<T>) -> Result<Vec<T>> {
    if u.len() != sys.ncols() {
        return Err(Error::invalid(format!("vector of length {} for {} unknowns", u.len(), sys.ncols())));
    }
    let r = sys.matrix().mul_vec(u) - DVector::from_column_slice(sys.rhs());
    Ok(sys.blocks().iter().map(|b| r.rows_range(b.clone()).norm()).collect())
}

fn check_columns<T: Real>(a: &CsrMatrix<T>) -> Result<()> {
    match a.column_counts().iter().position(|&c| c == 0) {
        Some(j) => Err(Error::Solver(format!("column {j} is empty; the system is rank deficient"))),
        None => Ok(()),
    }
}

/// Least-squares solution through a Householder QR of the dense matrix.
pub fn lsq_dense_qr<T: Real>(a: &CsrMatrix<T>, f: &DVector<T>) -> Result<DVector<T>> {
    check_columns(a)?;
    let (m, n) = (a.nrows(), a.ncols());
    if n > DENSE_QR_MAX_COLUMNS {
        return Err(Error::Solver(format!("dense-qr is limited to {DENSE_QR_MAX_COLUMNS} unknowns, got {n}")));
    }
    if m < n {
        return Err(Error::Solver(format!("{m} equations for {n} unknowns")));
    }
    let qr = a.to_dense().qr();
    let mut qtf = f.clone();
    qr.q_tr_mul(&mut qtf);
    let r: DMatrix<T> = qr.r();
    let rhs = qtf.rows(0, n).into_owned();
    r.solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::Solver("triangular factor is singular; the system is rank deficient".into()))
}

#[derive(Debug, Clone)]
pub struct CgOutcome<T: Real> {
    pub solution: DVector<T>,
    pub iterations: usize,
    pub converged: bool,
    /// Final `‖Aᵀ(Au − F)‖ / ‖AᵀF‖`.
    pub relative_gradient: T,
}

/// Conjugate gradients on `AᵀA u = AᵀF` with the diagonal of `AᵀA` as
/// preconditioner, stopping once `‖Aᵀ(Au − F)‖ ≤ rel_tol ‖AᵀF‖`.
pub fn lsq_normal_cg<T: Real>(
    a: &CsrMatrix<T>,
    f: &DVector<T>,
    rel_tol: T,
    max_iter: usize,
    parallel: bool,
) -> Result<CgOutcome<T>> {
    check_columns(a)?;
    if !(rel_tol > T::zero() && rel_tol < T::one()) {
        return Err(Error::invalid("relative tolerance must lie in (0, 1)"));
    }
    if f.len() != a.nrows() {
        return Err(Error::invalid("right-hand side length does not match the row count"));
    }
    let at = a.transpose();
    let (m, n) = (a.nrows(), a.ncols());
    let mut diag = vec![T::zero(); n];
    for (_, j, v) in a.triplets() {
        diag[j] += v * v;
    }
    let inv_diag: Vec<T> = diag.iter().map(|d| d.recip()).collect();

    let mut tmp_m = vec![T::zero(); m];
    let mut tmp_n = vec![T::zero(); n];
    // Aᵀ(F − A u) recomputed from scratch.
    let gradient = |u: &[T], tmp_m: &mut [T], out: &mut [T]| {
        a.mul_vec_into(u, tmp_m, parallel);
        for (t, fi) in tmp_m.iter_mut().zip(f.iter()) {
            *t = *fi - *t;
        }
        at.mul_vec_into(tmp_m, out, parallel);
    };
    let dot = |x: &[T], y: &[T]| x.iter().zip(y).fold(T::zero(), |s, (a, b)| s + *a * *b);

    let mut atf = vec![T::zero(); n];
    at.mul_vec_into(f.as_slice(), &mut atf, parallel);
    let atf_norm = dot(&atf, &atf).sqrt();
    let mut u = vec![T::zero(); n];
    if atf_norm == T::zero() {
        return Ok(CgOutcome { solution: DVector::from_vec(u), iterations: 0, converged: true, relative_gradient: T::zero() });
    }
    let target = rel_tol * atf_norm;

    let mut r = atf.clone();
    let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(a, b)| *a * *b).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![T::zero(); n];
    let mut iterations = 0;
    let mut converged = false;
    let mut rel = T::one();
    while iterations < max_iter {
        if parallel {
            a.mul_vec_into(&p, &mut tmp_m, true);
            at.mul_vec_into(&tmp_m, &mut q, true);
        } else {
            a.normal_mul_into(&p, &mut q);
        }
        let pq = dot(&p, &q);
        if pq <= T::zero() {
            break;
        }
        let alpha = rz / pq;
        for i in 0..n {
            u[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        iterations += 1;
        if dot(&r, &r).sqrt() <= target {
            // Confirm with the true gradient; restart from it if the
            // recursively updated residual has drifted.
            gradient(&u, &mut tmp_m, &mut tmp_n);
            let g = dot(&tmp_n, &tmp_n).sqrt();
            rel = g / atf_norm;
            if g <= target {
                converged = true;
                break;
            }
            r.copy_from_slice(&tmp_n);
            z = r.iter().zip(&inv_diag).map(|(a, b)| *a * *b).collect();
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if !converged {
        gradient(&u, &mut tmp_m, &mut tmp_n);
        rel = dot(&tmp_n, &tmp_n).sqrt() / atf_norm;
        converged = rel <= rel_tol;
    }
    Ok(CgOutcome { solution: DVector::from_vec(u), iterations, converged, relative_gradient: rel })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(a: DMatrix<f64>, f: Vec<f64>, blocks: Vec<std::ops::Range<usize>>) -> GlobalLeastSquares<f64> {
        GlobalLeastSquares::from_parts(CsrMatrix::from_dense(&a), f, blocks).unwrap()
    }

    #[test]
    fn identity_returns_rhs() {
        let f = vec![1.0, -2.0, 0.5];
        let sys = system(DMatrix::identity(3, 3), f.clone(), vec![0..1, 1..2, 2..3]);
        for method in [SolveMethod::DenseQr, SolveMethod::NormalCg] {
            let rep = solve_least_squares(&sys, &SolverOptions { method, ..Default::default() }).unwrap();
            assert!(rep.converged);
            assert!((rep.solution.clone() - DVector::from_vec(f.clone())).amax() < 1e-14);
            assert!(rep.residual_norm < 1e-14);
        }
    }

    #[test]
    fn overdetermined_fit() {
        // Line through (0,1), (1,2), (2,2): least squares gives 7/6 + x/2.
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        let sys = system(a, vec![1.0, 2.0, 2.0], vec![0..3]);
        for method in [SolveMethod::DenseQr, SolveMethod::NormalCg] {
            let rep = solve_least_squares(&sys, &SolverOptions { method, ..Default::default() }).unwrap();
            assert!((rep.solution[0] - 7.0 / 6.0).abs() < 1e-10);
            assert!((rep.solution[1] - 0.5).abs() < 1e-10);
            assert!((rep.residual_norm.powi(2) - rep.per_block_residuals[0].powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_vector_block_residuals_are_rhs_norms() {
        let sys = system(DMatrix::identity(4, 4), vec![3.0, 4.0, 1.0, 0.0], vec![0..2, 2..4]);
        let r = block_residuals(&sys, &DVector::zeros(4)).unwrap();
        assert_eq!(r, vec![5.0, 1.0]);
        assert!(block_residuals(&sys, &DVector::zeros(3)).is_err());
    }

    #[test]
    fn empty_column_is_rank_deficient() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 2.0, 0.0]);
        let sys = system(a, vec![1.0, 1.0], vec![0..2]);
        for method in [SolveMethod::DenseQr, SolveMethod::NormalCg] {
            let err = solve_least_squares(&sys, &SolverOptions { method, ..Default::default() }).unwrap_err();
            assert!(matches!(err, Error::Solver(_)));
        }
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let a = DMatrix::from_fn(6, 4, |i, j| 1.0 / (1.0 + i as f64 + 2.0 * j as f64));
        let sys = system(a, vec![1.0; 6], vec![0..6]);
        let opts = SolverOptions { max_iter: Some(1), ..Default::default() };
        let rep = solve_least_squares(&sys, &opts).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn method_names() {
        assert_eq!("dense-qr".parse::<SolveMethod>().unwrap(), SolveMethod::DenseQr);
        assert_eq!(SolveMethod::NormalCg.to_string(), "normal-cg");
        assert!("lsqr".parse::<SolveMethod>().is_err());
    }
}
