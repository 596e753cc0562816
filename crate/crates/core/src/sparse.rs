//! Symmetric sparse matrices in CSR form.
//!
//! Both triangles are stored so that a matrix-vector product is a plain row
//! sweep. Every constructor enforces exact numerical symmetry: an entry
//! `(i, j)` exists iff `(j, i)` exists with a bit-identical value.

use std::collections::BTreeMap;

use crate::error::LinalgError;

/// Anything that can be applied to a vector as a symmetric linear map.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y <- Op x`. Both slices must have length `dim()`.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

/// Symmetric sparse matrix, full storage, CSR layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds a matrix from upper or lower triplets.
    ///
    /// An off-diagonal triplet `(i, j, v)` contributes `v` to both `(i, j)`
    /// and `(j, i)`; a diagonal triplet contributes once. Duplicates are
    /// summed in input order.
    pub fn from_triplets<I>(n: usize, triplets: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(LinalgError::IndexOutOfBounds { row: i, col: j, n });
            }
            if !v.is_finite() {
                return Err(LinalgError::NonFinite { row: i, col: j });
            }
            *rows[i].entry(j).or_insert(0.0) += v;
            if i != j {
                *rows[j].entry(i).or_insert(0.0) += v;
            }
        }
        Ok(Self::from_row_maps(n, rows))
    }

    fn from_row_maps(n: usize, rows: Vec<BTreeMap<usize, f64>>) -> Self {
        let nnz = rows.iter().map(BTreeMap::len).sum();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for row in rows {
            for (j, v) in row {
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Builds a matrix from raw CSR arrays, checking every structural
    /// invariant including exact symmetry.
    pub fn from_csr(
        n: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, LinalgError> {
        if row_ptr.len() != n + 1
            || row_ptr[0] != 0
            || row_ptr[n] != col_idx.len()
            || col_idx.len() != values.len()
        {
            return Err(LinalgError::MalformedCsr("inconsistent array lengths"));
        }
        for i in 0..n {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(LinalgError::MalformedCsr("row_ptr decreasing"));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(LinalgError::MalformedCsr(
                    "column indices not strictly increasing",
                ));
            }
            if cols.last().is_some_and(|&c| c >= n) {
                return Err(LinalgError::IndexOutOfBounds {
                    row: i,
                    col: *cols.last().unwrap(),
                    n,
                });
            }
        }
        let m = Self {
            n,
            row_ptr,
            col_idx,
            values,
        };
        for i in 0..n {
            for (j, v) in m.row(i) {
                if m.get(j, i) != Some(v) {
                    return Err(LinalgError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            row_ptr: vec![0; n + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Converts a dense row-major square array, rejecting any asymmetry.
    /// Exact zeros are not stored.
    pub fn from_dense(n: usize, entries: &[f64]) -> Result<Self, LinalgError> {
        if entries.len() != n * n {
            return Err(LinalgError::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        let mut rows = vec![BTreeMap::new(); n];
        for i in 0..n {
            for j in 0..n {
                let v = entries[i * n + j];
                if v != entries[j * n + i] {
                    return Err(LinalgError::NotSymmetric { row: i, col: j });
                }
                if v != 0.0 {
                    rows[i].insert(j, v);
                }
            }
        }
        Ok(Self::from_row_maps(n, rows))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterates `(column, value)` pairs of row `i` in column order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .binary_search(&j)
            .ok()
            .map(|k| self.values[range.start + k])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i).unwrap_or(0.0)).collect()
    }

    /// Row sums in column order.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v).sum())
            .collect()
    }

    /// `Mx`, checked.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(self.apply(x))
    }

    /// Entrywise map over stored values; keeps the pattern.
    pub fn map_values(&self, f: impl Fn(usize, usize, f64) -> f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.values[k] = f(i, self.col_idx[k], self.values[k]);
            }
        }
        out
    }

    /// `S M S` with `S = diag(s)`.
    pub fn scale_symmetric(&self, s: &[f64]) -> Self {
        assert_eq!(s.len(), self.n, "scale vector length");
        self.map_values(|i, j, v| s[i] * v * s[j])
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map_values(|_, _, v| alpha * v)
    }

    /// `self + alpha * other`, merging patterns row by row.
    pub fn add_scaled(&self, alpha: f64, other: &Self) -> Result<Self, LinalgError> {
        self.merge(other, |a, b| a + alpha * b)
    }

    /// Merges two patterns; missing entries enter `f` as `0.0`.
    fn merge(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self, LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut col_idx = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(col_idx.capacity());
        row_ptr.push(0);
        for i in 0..self.n {
            let mut a = self.row(i).peekable();
            let mut b = other.row(i).peekable();
            loop {
                let (j, v) = match (a.peek(), b.peek()) {
                    (None, None) => break,
                    (Some(&(ja, va)), Some(&(jb, vb))) => {
                        if ja == jb {
                            a.next();
                            b.next();
                            (ja, f(va, vb))
                        } else if ja < jb {
                            a.next();
                            (ja, f(va, 0.0))
                        } else {
                            b.next();
                            (jb, f(0.0, vb))
                        }
                    }
                    (Some(&(ja, va)), None) => {
                        a.next();
                        (ja, f(va, 0.0))
                    }
                    (None, Some(&(jb, vb))) => {
                        b.next();
                        (jb, f(0.0, vb))
                    }
                };
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            n: self.n,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// `self + diag(d)`.
    pub fn add_diagonal(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.n, "diagonal length");
        self.merge(&Self::from_diagonal(d), |a, b| a + b)
            .expect("same order")
    }

    /// `self + eps * I`.
    pub fn shift(&self, eps: f64) -> Self {
        self.add_diagonal(&vec![eps; self.n])
    }

    /// Largest absolute entrywise difference, treating missing entries as 0.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, LinalgError> {
        let d = self.merge(other, |a, b| a - b)?;
        Ok(d.values.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                out[i * self.n + j] = v;
            }
        }
        out
    }

    pub fn all_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl LinearOperator for SparseSymMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y <- y + alpha x`
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn scale_in_place(alpha: f64, x: &mut [f64]) {
    for xi in x {
        *xi *= alpha;
    }
}
