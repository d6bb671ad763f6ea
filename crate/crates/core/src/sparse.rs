//! Compressed sparse row matrices.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T: Real> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// columns sorted within each row.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); nrows];
        for &(i, j, v) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::invalid(format!("entry ({i}, {j}) outside {nrows}x{ncols}")));
            }
            rows[i].push((j, v));
        }
        let mut b = CsrBuilder::new(ncols);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let mut merged: Vec<(usize, T)> = Vec::with_capacity(row.len());
            for (j, v) in row {
                match merged.last_mut() {
                    Some((k, acc)) if *k == j => *acc += v,
                    _ => merged.push((j, v)),
                }
            }
            b.push_row(merged.into_iter());
        }
        Ok(b.finish())
    }

    pub fn from_dense(a: &DMatrix<T>) -> Self {
        let mut b = CsrBuilder::new(a.ncols());
        for i in 0..a.nrows() {
            b.push_row((0..a.ncols()).filter(|&j| a[(i, j)] != T::zero()).map(|j| (j, a[(i, j)])));
        }
        b.finish()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut a = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            a[(i, j)] += v;
        }
        a
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![T::zero(); self.nnz()];
        for (i, j, v) in self.triplets() {
            let k = next[j];
            col_idx[k] = i;
            values[k] = v;
            next[j] += 1;
        }
        CsrMatrix { nrows: self.ncols, ncols: self.nrows, row_ptr, col_idx, values }
    }

    /// Number of stored entries per column.
    pub fn column_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.ncols];
        for &j in &self.col_idx {
            c[j] += 1;
        }
        c
    }

    fn row_dot(&self, i: usize, x: &[T]) -> T {
        let (cols, vals) = self.row(i);
        cols.iter().zip(vals).fold(T::zero(), |acc, (&j, &v)| acc + v * x[j])
    }

    /// `y = A x`. Each row is reduced sequentially, so the parallel path gives
    /// bitwise the same result as the serial one.
    pub fn mul_vec_into(&self, x: &[T], y: &mut [T], parallel: bool) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        if parallel {
            y.par_iter_mut().enumerate().for_each(|(i, yi)| *yi = self.row_dot(i, x));
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = self.row_dot(i, x);
            }
        }
    }

    /// `y = Aᵀ A x` in one pass over the rows, accumulating in row order.
    pub fn normal_mul_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.ncols);
        y.iter_mut().for_each(|v| *v = T::zero());
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let s = cols.iter().zip(vals).fold(T::zero(), |acc, (&j, &v)| acc + v * x[j]);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += s * v;
            }
        }
    }

    pub fn mul_vec(&self, x: &DVector<T>) -> DVector<T> {
        let mut y = DVector::zeros(self.nrows);
        self.mul_vec_into(x.as_slice(), y.as_mut_slice(), false);
        y
    }

    /// Writes the matrix in Matrix Market coordinate format (1-based indices).
    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (i, j, v) in self.triplets() {
            writeln!(out, "{} {} {:e}", i + 1, j + 1, v.as_f64())?;
        }
        Ok(())
    }
}

/// Row-by-row CSR construction.
pub(crate) struct CsrBuilder<T: Real> {
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> CsrBuilder<T> {
    pub(crate) fn new(ncols: usize) -> Self {
        CsrBuilder { ncols, row_ptr: vec![0], col_idx: Vec::new(), values: Vec::new() }
    }

    /// Appends a row given by `(column, value)` pairs in increasing column order.
    pub(crate) fn push_row(&mut self, entries: impl Iterator<Item = (usize, T)>) {
        for (j, v) in entries {
            debug_assert!(j < self.ncols);
            self.col_idx.push(j);
            self.values.push(v);
        }
        self.row_ptr.push(self.col_idx.len());
    }

    pub(crate) fn finish(self) -> CsrMatrix<T> {
        CsrMatrix {
            nrows: self.row_ptr.len() - 1,
            ncols: self.ncols,
            row_ptr: self.row_ptr,
            col_idx: self.col_idx,
            values: self.values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_transpose_and_products() {
        let a = CsrMatrix::from_triplets(3, 2, &[(0, 1, 2.0), (2, 0, -1.0), (0, 1, 1.0), (1, 0, 4.0)]).unwrap();
        assert_eq!(a.nnz(), 3);
        let dense = a.to_dense();
        assert_eq!(dense, DMatrix::from_row_slice(3, 2, &[0.0, 3.0, 4.0, 0.0, -1.0, 0.0]));
        assert_eq!(a.transpose().to_dense(), dense.transpose());
        let x = DVector::from_vec(vec![1.0, 2.0]);
        assert_eq!(a.mul_vec(&x), &dense * &x);
        let mut y = vec![0.0; 3];
        a.mul_vec_into(x.as_slice(), &mut y, true);
        assert_eq!(y, a.mul_vec(&x).as_slice());
        assert_eq!(a.column_counts(), vec![2, 1]);
        let mut z = vec![0.0; 2];
        a.normal_mul_into(x.as_slice(), &mut z);
        assert_eq!(z, (dense.transpose() * &dense * &x).as_slice());
        assert!(CsrMatrix::from_triplets(1, 1, &[(0, 1, 1.0)]).is_err());
    }

    #[test]
    fn matrix_market_output() {
        let a = CsrMatrix::from_dense(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, 2.0]));
        let mut buf = Vec::new();
        a.write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "%%MatrixMarket matrix coordinate real general");
        assert_eq!(lines[1], "2 2 3");
        assert_eq!(lines[2], "1 1 1e0");
        assert_eq!(lines[3], "2 1 5e-1");
    }
}
