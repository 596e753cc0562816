//! Zero-fill incomplete Cholesky preconditioner.

use crate::sparse::SparseSymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreconditionerKind {
    IncompleteCholesky,
    /// Jacobi fallback after an IC(0) pivot breakdown.
    Diagonal,
}

/// Lower-triangular factor `L` with `M ≈ L Lᵀ`, stored row-wise with the
/// diagonal as the last entry of every row.
#[derive(Debug, Clone)]
pub struct IcPreconditioner {
    kind: PreconditionerKind,
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl IcPreconditioner {
    pub fn kind(&self) -> PreconditionerKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Identity preconditioner of order `n`.
    pub fn identity(n: usize) -> Self {
        Self::diagonal_from(&vec![1.0; n])
    }

    fn diagonal_from(diag: &[f64]) -> Self {
        let n = diag.len();
        let values = diag
            .iter()
            .map(|&d| {
                if d > 0.0 && d.is_finite() {
                    d.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        Self {
            kind: PreconditionerKind::Diagonal,
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values,
        }
    }

    /// Dense row-major copy of the factor `L`.
    pub fn lower_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out[i * self.n + self.col_idx[k]] = self.values[k];
            }
        }
        out
    }

    /// `z <- (L Lᵀ)^{-1} r`.
    pub fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        debug_assert_eq!(r.len(), self.n);
        z.copy_from_slice(r);
        // forward: L w = r
        for i in 0..self.n {
            let end = self.row_ptr[i + 1] - 1;
            let mut acc = z[i];
            for k in self.row_ptr[i]..end {
                acc -= self.values[k] * z[self.col_idx[k]];
            }
            z[i] = acc / self.values[end];
        }
        // backward: Lᵀ z = w, walking rows of L as columns of Lᵀ
        for i in (0..self.n).rev() {
            let end = self.row_ptr[i + 1] - 1;
            z[i] /= self.values[end];
            let zi = z[i];
            for k in self.row_ptr[i]..end {
                z[self.col_idx[k]] -= self.values[k] * zi;
            }
        }
    }
}

/// IC(0) factorisation on the lower pattern of `m`.
///
/// A non-positive diagonal entry or pivot switches to the diagonal
/// preconditioner; the result's [`PreconditionerKind`] records which one was
/// built.
pub fn incomplete_cholesky(m: &SparseSymMatrix) -> IcPreconditioner {
    let n = m.n();
    let diag = m.diagonal();
    if diag.iter().any(|&d| !(d > 0.0)) {
        log::debug!("IC(0): non-positive diagonal, using Jacobi");
        return IcPreconditioner::diagonal_from(&diag);
    }

    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        for (j, v) in m.row(i) {
            if j <= i {
                col_idx.push(j);
                values.push(v);
            }
        }
        // the diagonal is present and sorts last
        row_ptr.push(col_idx.len());
    }

    for i in 0..n {
        let start = row_ptr[i];
        let end = row_ptr[i + 1] - 1;
        for kk in start..end {
            let j = col_idx[kk];
            // s = a_ij - sum_{c < j} L_ic L_jc over the shared pattern
            let mut s = values[kk];
            let (mut p, mut q) = (start, row_ptr[j]);
            let qend = row_ptr[j + 1] - 1;
            while p < kk && q < qend {
                let (cp, cq) = (col_idx[p], col_idx[q]);
                if cp == cq {
                    s -= values[p] * values[q];
                    p += 1;
                    q += 1;
                } else if cp < cq {
                    p += 1;
                } else {
                    q += 1;
                }
            }
            values[kk] = s / values[qend];
        }
        let mut pivot = values[end];
        for kk in start..end {
            pivot -= values[kk] * values[kk];
        }
        if !(pivot > 0.0) || !pivot.is_finite() {
            log::debug!("IC(0): pivot breakdown at row {i}, using Jacobi");
            return IcPreconditioner::diagonal_from(&diag);
        }
        values[end] = pivot.sqrt();
    }

    IcPreconditioner {
        kind: PreconditionerKind::IncompleteCholesky,
        n,
        row_ptr,
        col_idx,
        values,
    }
}
