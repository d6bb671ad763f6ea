//! Local differentiation matrices and the global overdetermined system.

use std::io::Write;
use std::ops::Range;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::atlas::{Atlas, Patch};
use crate::error::{Error, Result};
use crate::geometry::{NodeSet, SpherePoint};
use crate::kernels::{apply_operator, gram, EllipticOperator, ZonalProfile};
use crate::linalg::spd_condition;
use crate::scalar::Real;
use crate::sparse::{CsrBuilder, CsrMatrix};

/// Patches whose Gram condition estimate exceeds this are rejected.
pub const DEFAULT_COND_LIMIT: f64 = 1e12;

/// Kernel matrices of one patch and the differentiation matrix `W = K_L K⁻¹`.
#[derive(Debug, Clone)]
pub struct LocalSystem<T: Real> {
    pub patch_index: usize,
    /// `K|_{X_ℓ}`
    pub k: DMatrix<T>,
    /// `K_L|_{X_ℓ}`
    pub kl: DMatrix<T>,
    pub w: DMatrix<T>,
    /// 1-norm condition number of `k`.
    pub cond: T,
}

fn patch_points<T: Real>(patch: &Patch<T>, nodes: &NodeSet<T>) -> Vec<SpherePoint<T>> {
    patch.indices().iter().map(|&j| *nodes.point(j)).collect()
}

/// Differentiation matrix of a patch for the kernel `psi` and its image
/// `psi_l` under the operator.
pub fn local_diff_matrix_with<T: Real>(
    patch: &Patch<T>,
    nodes: &NodeSet<T>,
    psi: &ZonalProfile<T>,
    psi_l: &ZonalProfile<T>,
    cond_limit: T,
) -> Result<LocalSystem<T>> {
    if patch.is_empty() {
        return Err(Error::invalid(format!("patch {} has no nodes", patch.index())));
    }
    let pts = patch_points(patch, nodes);
    let k = gram(&pts, psi);
    let kl = gram(&pts, psi_l);
    let ill = |cond: f64| Error::IllConditionedPatch { patch: patch.index(), cond };
    let cond = spd_condition(&k).ok_or_else(|| ill(f64::INFINITY))?;
    if cond > cond_limit {
        return Err(ill(cond.as_f64()));
    }
    let chol = k.clone().cholesky().ok_or_else(|| ill(f64::INFINITY))?;
    // K and K_L are symmetric, so W = K_L K⁻¹ is the transpose of K⁻¹ K_L.
    let w = chol.solve(&kl).transpose();
    Ok(LocalSystem { patch_index: patch.index(), k, kl, w, cond })
}

/// [`local_diff_matrix_with`] computing `ψ_L` from `psi` and `op`, with the
/// default condition limit.
pub fn local_diff_matrix<T: Real>(
    patch: &Patch<T>,
    nodes: &NodeSet<T>,
    psi: &ZonalProfile<T>,
    op: &EllipticOperator<T>,
) -> Result<LocalSystem<T>> {
    let psi_l = apply_operator(psi, op)?;
    local_diff_matrix_with(patch, nodes, psi, &psi_l, T::lit(DEFAULT_COND_LIMIT))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    pub cond_limit: f64,
    /// Scale the rows of each block by `1/√n_ℓ`.
    pub row_scaling: bool,
    /// Build the local systems on the rayon pool.
    pub parallel: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions { cond_limit: DEFAULT_COND_LIMIT, row_scaling: false, parallel: true }
    }
}

/// The stacked system `A v = F` with one block of rows per patch.
#[derive(Debug, Clone)]
pub struct GlobalLeastSquares<T: Real> {
    matrix: CsrMatrix<T>,
    rhs: Vec<T>,
    blocks: Vec<Range<usize>>,
    row_block: Vec<usize>,
    conds: Vec<T>,
}

impl<T: Real> GlobalLeastSquares<T> {
    /// Builds a system directly from a matrix, right-hand side and row blocks
    /// covering `0..nrows` in order.
    pub fn from_parts(matrix: CsrMatrix<T>, rhs: Vec<T>, blocks: Vec<Range<usize>>) -> Result<Self> {
        if rhs.len() != matrix.nrows() {
            return Err(Error::invalid(format!("{} rows but {} right-hand side entries", matrix.nrows(), rhs.len())));
        }
        let mut row_block = Vec::with_capacity(matrix.nrows());
        for (b, r) in blocks.iter().enumerate() {
            if r.start != row_block.len() {
                return Err(Error::invalid("row blocks must be contiguous and ordered"));
            }
            row_block.extend(std::iter::repeat_n(b, r.len()));
        }
        if row_block.len() != matrix.nrows() {
            return Err(Error::invalid("row blocks must cover every row"));
        }
        let conds = vec![T::one(); blocks.len()];
        Ok(GlobalLeastSquares { matrix, rhs, blocks, row_block, conds })
    }

    pub fn matrix(&self) -> &CsrMatrix<T> {
        &self.matrix
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Row range of each patch block.
    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    /// Patch index of each row.
    pub fn row_block_of(&self) -> &[usize] {
        &self.row_block
    }

    /// Gram condition estimate of each patch (ones for systems built by hand).
    pub fn conditions(&self) -> &[T] {
        &self.conds
    }

    /// Writes `A` in Matrix Market coordinate format.
    pub fn write_matrix_market<W: Write>(&self, out: W) -> Result<()> {
        self.matrix.write_matrix_market(out)
    }

    /// Writes `F` as CSV with a header line and one value per row.
    pub fn write_rhs_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "row,block,f")?;
        for (i, v) in self.rhs.iter().enumerate() {
            writeln!(out, "{i},{},{:e}", self.row_block[i], v.as_f64())?;
        }
        Ok(())
    }
}

/// Assembles `W M v = F`: block ℓ holds the rows of `W_ℓ` placed in the
/// columns `J_ℓ`, with right-hand side `f_values` restricted to `J_ℓ`.
pub fn assemble_global<T: Real>(
    atlas: &Atlas<T>,
    nodes: &NodeSet<T>,
    psi: &ZonalProfile<T>,
    op: &EllipticOperator<T>,
    f_values: &[T],
    options: &AssemblyOptions,
) -> Result<GlobalLeastSquares<T>> {
    let n = nodes.len();
    if f_values.len() != n {
        return Err(Error::invalid(format!("{} right-hand side values for {n} nodes", f_values.len())));
    }
    if atlas.node_count() != n {
        return Err(Error::invalid("atlas was built on a different node set"));
    }
    let psi_l = apply_operator(psi, op)?;
    let limit = T::lit(options.cond_limit);
    let build = |p: &Patch<T>| local_diff_matrix_with(p, nodes, psi, &psi_l, limit);
    let locals: Vec<LocalSystem<T>> = if options.parallel {
        atlas.patches().par_iter().map(build).collect::<Result<_>>()?
    } else {
        atlas.patches().iter().map(build).collect::<Result<_>>()?
    };

    let mut builder = CsrBuilder::new(n);
    let mut rhs = Vec::new();
    let mut blocks = Vec::with_capacity(locals.len());
    let mut row_block = Vec::new();
    for (l, (patch, local)) in atlas.patches().iter().zip(&locals).enumerate() {
        let cols = patch.indices();
        let scale = if options.row_scaling { T::from_count(cols.len()).sqrt().recip() } else { T::one() };
        let start = rhs.len();
        for (i, &j) in cols.iter().enumerate() {
            builder.push_row(cols.iter().enumerate().map(|(k, &c)| (c, local.w[(i, k)] * scale)));
            rhs.push(f_values[j] * scale);
            row_block.push(l);
        }
        blocks.push(start..rhs.len());
    }
    let matrix = builder.finish();
    let counts = matrix.column_counts();
    if let Some(j) = counts.iter().position(|&c| c == 0) {
        return Err(Error::invalid(format!("node {j} is in no patch")));
    }
    Ok(GlobalLeastSquares { matrix, rhs, blocks, row_block, conds: locals.iter().map(|s| s.cond).collect() })
}

/// Samples `f` once per node, rejecting non-finite values.
pub fn rhs_from_function<T: Real, F>(f: F, nodes: &NodeSet<T>) -> Result<Vec<T>>
where
    F: Fn(&SpherePoint<T>) -> T,
{
    nodes
        .points()
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let v = f(x);
            if v.is_finite() { Ok(v) } else { Err(Error::Data { node: j, value: v.as_f64() }) }
        })
        .collect()
}
