use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Compressed sparse row matrix.
///
/// Elementary operators on the product space have a handful of entries per
/// row, so applying them to a dense `d x d` state costs `O(nnz * d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

#[inline(always)]
fn axpy(out: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    for (o, &v) in out.iter_mut().zip(x) {
        o.re += a.re * v.re - a.im * v.im;
        o.im += a.re * v.im + a.im * v.re;
    }
}

impl SparseMatrix {
    /// Keeps every entry whose modulus exceeds zero.
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        Self::from_dense_with_pattern(m, |_, _, v| v != Complex64::new(0.0, 0.0))
    }

    fn from_dense_with_pattern(
        m: &ComplexMatrix,
        keep: impl Fn(usize, usize, Complex64) -> bool,
    ) -> Self {
        let mut row_ptr = Vec::with_capacity(m.rows() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)];
                if keep(i, j, v) {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            rows: m.rows(),
            cols: m.cols(),
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_dense(&ComplexMatrix::identity(n))
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, v) in self.row_entries(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// CSR row offsets, `rows + 1` entries.
    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    #[inline]
    pub fn row_entries(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_dense(&self.to_dense().adjoint())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        Self::from_dense(&(&self.to_dense() * &rhs.to_dense()))
    }

    pub fn same_pattern(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.row_ptr == other.row_ptr
            && self.col_idx == other.col_idx
    }

    /// Union of the sparsity patterns of `ops`, with all values zero.
    pub fn union_pattern(ops: &[&Self]) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidDimension("empty operator list".into()))?;
        let (rows, cols) = (first.rows, first.cols);
        let mut mask = vec![false; rows * cols];
        for op in ops {
            if op.rows != rows || op.cols != cols {
                return Err(Error::DimensionMismatch {
                    expected: format!("{rows}x{cols}"),
                    found: format!("{}x{}", op.rows, op.cols),
                });
            }
            for i in 0..rows {
                for (j, _) in op.row_entries(i) {
                    mask[i * cols + j] = true;
                }
            }
        }
        let zeros = ComplexMatrix::zeros(rows, cols);
        let mut out = Self::from_dense_with_pattern(&zeros, |i, j, _| mask[i * cols + j]);
        out.values.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        Ok(out)
    }

    /// Values of `self` laid out on `pattern`, which must contain the
    /// pattern of `self`.
    pub fn values_on_pattern(&self, pattern: &Self) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); pattern.nnz()];
        for i in 0..self.rows {
            let span = pattern.row_ptr[i]..pattern.row_ptr[i + 1];
            for (j, v) in self.row_entries(i) {
                let pos = pattern.col_idx[span.clone()]
                    .binary_search(&j)
                    .map_err(|_| Error::InvalidDimension(format!("entry ({i}, {j}) outside pattern")))?;
                out[span.start + pos] = v;
            }
        }
        Ok(out)
    }

    /// `out = self * b`.
    pub fn mul_dense_into(&self, b: &ComplexMatrix, out: &mut ComplexMatrix) {
        debug_assert_eq!(self.cols, b.rows());
        debug_assert!(out.rows() == self.rows && out.cols() == b.cols());
        for i in 0..self.rows {
            let dst = out.row_mut(i);
            dst.fill(Complex64::new(0.0, 0.0));
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                axpy(dst, self.values[p], b.row(self.col_idx[p]));
            }
        }
    }

    /// `out = self * b` using `values` in place of the stored values. The
    /// slice must match this matrix's pattern.
    pub fn mul_dense_with_values_into(
        &self,
        values: &[Complex64],
        b: &ComplexMatrix,
        out: &mut ComplexMatrix,
    ) {
        debug_assert_eq!(values.len(), self.nnz());
        for i in 0..self.rows {
            let dst = out.row_mut(i);
            dst.fill(Complex64::new(0.0, 0.0));
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                axpy(dst, values[p], b.row(self.col_idx[p]));
            }
        }
    }

    /// `out[i, j] += scale * (A b)[i, j]` for `j >= i` only, where `A` has
    /// this pattern and either `values` or the stored values. Used for
    /// products known to be Hermitian.
    pub fn accumulate_upper_product(
        &self,
        values: Option<&[Complex64]>,
        scale: Complex64,
        b: &ComplexMatrix,
        out: &mut ComplexMatrix,
    ) {
        let vals = values.unwrap_or(&self.values);
        debug_assert_eq!(vals.len(), self.nnz());
        for i in 0..self.rows {
            let dst = &mut out.row_mut(i)[i..];
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                axpy(dst, scale * vals[p], &b.row(self.col_idx[p])[i..]);
            }
        }
    }

    /// `out = b * self`.
    pub fn dense_mul_into(&self, b: &ComplexMatrix, out: &mut ComplexMatrix) {
        debug_assert_eq!(b.cols(), self.rows);
        debug_assert!(out.rows() == b.rows() && out.cols() == self.cols);
        for i in 0..b.rows() {
            let src = b.row(i);
            let dst = out.row_mut(i);
            dst.fill(Complex64::new(0.0, 0.0));
            for (k, &bik) in src.iter().enumerate() {
                if bik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for p in self.row_ptr[k]..self.row_ptr[k + 1] {
                    dst[self.col_idx[p]] += bik * self.values[p];
                }
            }
        }
    }

    pub fn mul_dense(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.rows, b.cols());
        self.mul_dense_into(b, &mut out);
        out
    }

    pub fn dense_mul(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(b.rows(), self.cols);
        self.dense_mul_into(b, &mut out);
        out
    }

    /// `Tr(self * rho)` in `O(nnz)`.
    #[inline]
    pub fn trace_product(&self, rho: &ComplexMatrix) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[p] * rho[(self.col_idx[p], i)];
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn banded(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |i, j| {
            if i.abs_diff(j) <= 1 {
                Complex64::new((i + 2 * j) as f64, i as f64 - j as f64)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    fn dense_from(vals: &[(f64, f64)], n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |i, j| {
            let (re, im) = vals[i * n + j];
            Complex64::new(re, im)
        })
    }

    #[test]
    fn pattern_keeps_nonzeros_only() {
        let s = SparseMatrix::from_dense(&banded(5));
        // (0,0) is zero in `banded`.
        assert_eq!(s.nnz(), 12);
        assert_eq!(s.to_dense(), banded(5));
    }

    #[test]
    fn union_pattern_and_relayout() {
        let a = SparseMatrix::identity(4);
        let b = SparseMatrix::from_dense(&banded(4));
        let u = SparseMatrix::union_pattern(&[&a, &b]).unwrap();
        assert_eq!(u.nnz(), 10);
        let va = a.values_on_pattern(&u).unwrap();
        let mut relaid = u.clone();
        relaid.values_mut().copy_from_slice(&va);
        assert_eq!(relaid.to_dense(), a.to_dense());
        assert!(b.values_on_pattern(&a).is_err());
    }

    proptest! {
        #[test]
        fn kernels_match_dense_products(
            a in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 16),
            b in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 16),
        ) {
            let mut ad = dense_from(&a, 4);
            // Sparsify deterministically.
            for i in 0..4 { for j in 0..4 { if (i + j) % 3 == 0 { ad[(i, j)] = Complex64::new(0.0, 0.0); } } }
            let bd = dense_from(&b, 4);
            let s = SparseMatrix::from_dense(&ad);
            prop_assert!(s.mul_dense(&bd).max_abs_diff(&(&ad * &bd)) < 1e-12);
            prop_assert!(s.dense_mul(&bd).max_abs_diff(&(&bd * &ad)) < 1e-12);
            let tr = (&ad * &bd).trace();
            prop_assert!((s.trace_product(&bd) - tr).norm() < 1e-12);

            let scale = Complex64::new(0.5, -1.5);
            let mut upper = ComplexMatrix::zeros(4, 4);
            s.accumulate_upper_product(None, scale, &bd, &mut upper);
            let full = (&ad * &bd).scale(scale);
            for i in 0..4 {
                for j in 0..4 {
                    let want = if j >= i { full[(i, j)] } else { Complex64::new(0.0, 0.0) };
                    prop_assert!((upper[(i, j)] - want).norm() < 1e-12);
                }
            }
        }
    }
}
