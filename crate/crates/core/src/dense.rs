//! Small dense symmetric matrices: eigendecomposition, matrix functions and
//! the dense geometric-mean oracle.
//!
//! Everything here is `O(n³)` and meant for projected matrices and for
//! checking the sparse solvers on instances of moderate order.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::LinalgError;
use crate::sparse::{LinearOperator, SparseSymMatrix};

/// Default largest order accepted by the dense oracles.
pub const DENSE_ORACLE_CAP: usize = 500;

const SYMMETRY_TOL: f64 = 1e-12;

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DenseSymMatrix {
    /// Accepts entries symmetric to `1e-12` relative to the largest entry and
    /// stores the exactly symmetrised average.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self, LinalgError> {
        if entries.len() != n * n {
            return Err(LinalgError::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        let scale = entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut entries = entries;
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (entries[i * n + j], entries[j * n + i]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(LinalgError::NonFinite { row: i, col: j });
                }
                if (a - b).abs() > SYMMETRY_TOL * scale {
                    return Err(LinalgError::NotSymmetric { row: i, col: j });
                }
                let avg = 0.5 * (a + b);
                entries[i * n + j] = avg;
                entries[j * n + i] = avg;
            }
        }
        Ok(Self { n, entries })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self, LinalgError> {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self::new(n, entries)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut entries = vec![0.0; n * n];
        for (i, &v) in d.iter().enumerate() {
            entries[i * n + i] = v;
        }
        Self { n, entries }
    }

    pub fn from_sparse(m: &SparseSymMatrix) -> Self {
        Self {
            n: m.n(),
            entries: m.to_dense(),
        }
    }

    /// Symmetrises a general square matrix as `(M + Mᵀ)/2` after checking it
    /// is symmetric to the usual tolerance.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self, LinalgError> {
        if m.nrows() != m.ncols() {
            return Err(LinalgError::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let n = m.nrows();
        Self::from_fn(n, |i, j| m[(i, j)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn shift(&self, eps: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.entries[i * self.n + i] += eps;
        }
        out
    }

    /// `S M S` with `S = diag(s)`.
    pub fn scale_symmetric(&self, s: &[f64]) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.entries[i * n + j] *= s[i] * s[j];
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl LinearOperator for DenseSymMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.entries[i * self.n..(i + 1) * self.n]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum();
        }
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector
/// columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    /// Eigenvector `i` as an owned vector.
    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i).iter().copied().collect()
    }

    /// `V f(Λ) Vᵀ`.
    pub fn compose(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |i, j| {
            self.vectors[(i, j)] * f(self.values[j])
        });
        let m = &scaled * self.vectors.transpose();
        (&m + m.transpose()) * 0.5
    }
}

pub fn dense_sym_eig(h: &DenseSymMatrix) -> SymEigen {
    let eig = SymmetricEigen::new(h.to_matrix());
    let mut order: Vec<usize> = (0..h.n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(h.n, h.n, |i, j| eig.eigenvectors[(i, order[j])]);
    SymEigen { values, vectors }
}

/// `f(H)` for SPD `H`; rejects a non-positive spectrum.
fn spd_function(h: &DenseSymMatrix, f: impl Fn(f64) -> f64) -> Result<DenseSymMatrix, LinalgError> {
    let eig = dense_sym_eig(h);
    let min = eig.values.first().copied().unwrap_or(1.0);
    if !(min > 0.0) {
        return Err(LinalgError::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    let m = eig.compose(f);
    Ok(DenseSymMatrix {
        n: h.n,
        entries: row_major(&m),
    })
}

pub fn dense_inv_sqrt(h: &DenseSymMatrix) -> Result<DenseSymMatrix, LinalgError> {
    spd_function(h, |l| 1.0 / l.sqrt())
}

pub fn dense_sqrt(h: &DenseSymMatrix) -> Result<DenseSymMatrix, LinalgError> {
    spd_function(h, f64::sqrt)
}

pub fn dense_inverse(h: &DenseSymMatrix) -> Result<DenseSymMatrix, LinalgError> {
    spd_function(h, |l| 1.0 / l)
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * m.ncols());
    for i in 0..n {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

fn check_pair(a: &DenseSymMatrix, b: &DenseSymMatrix, cap: usize) -> Result<(), LinalgError> {
    if a.n != b.n {
        return Err(LinalgError::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    if a.n > cap {
        return Err(LinalgError::OracleCapExceeded { n: a.n, cap });
    }
    Ok(())
}

/// `A # B = A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}`.
pub fn dense_geometric_mean(
    a: &DenseSymMatrix,
    b: &DenseSymMatrix,
) -> Result<DenseSymMatrix, LinalgError> {
    dense_geometric_mean_capped(a, b, DENSE_ORACLE_CAP)
}

pub fn dense_geometric_mean_capped(
    a: &DenseSymMatrix,
    b: &DenseSymMatrix,
    cap: usize,
) -> Result<DenseSymMatrix, LinalgError> {
    check_pair(a, b, cap)?;
    let eig_a = dense_sym_eig(a);
    let min_a = eig_a.values.first().copied().unwrap_or(1.0);
    if !(min_a > 0.0) {
        return Err(LinalgError::NotPositiveDefinite {
            min_eigenvalue: min_a,
        });
    }
    let a_half = eig_a.compose(f64::sqrt);
    let a_inv_half = eig_a.compose(|l| 1.0 / l.sqrt());
    let inner = &a_inv_half * b.to_matrix() * &a_inv_half;
    let inner = DenseSymMatrix::new(a.n, row_major(&((&inner + inner.transpose()) * 0.5)))?;
    let inner_half = dense_sqrt(&inner)?.to_matrix();
    let gm = &a_half * inner_half * &a_half;
    DenseSymMatrix::new(a.n, row_major(&((&gm + gm.transpose()) * 0.5)))
}

/// Principal square root of a general matrix with positive real spectrum by
/// the scaled Denman–Beavers iteration. Independent of any eigensolver.
pub fn principal_sqrt_general(m: &DMatrix<f64>) -> Result<DMatrix<f64>, LinalgError> {
    let n = m.nrows();
    let mut y = m.clone();
    let mut z = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let y_inv = y
            .clone()
            .try_inverse()
            .ok_or(LinalgError::NotPositiveDefinite {
                min_eigenvalue: 0.0,
            })?;
        let z_inv = z
            .clone()
            .try_inverse()
            .ok_or(LinalgError::NotPositiveDefinite {
                min_eigenvalue: 0.0,
            })?;
        // determinant scaling keeps the early iterates balanced
        let det = (y.clone().determinant() * z.clone().determinant()).abs();
        let mu = if det.is_finite() && det > 0.0 {
            det.powf(-1.0 / (2.0 * n as f64))
        } else {
            1.0
        };
        let y_next = (&y * mu + &z_inv / mu) * 0.5;
        let z_next = (&z * mu + &y_inv / mu) * 0.5;
        let change = (&y_next - &y).norm() / y_next.norm();
        y = y_next;
        z = z_next;
        if change < 1e-15 {
            break;
        }
    }
    Ok(y)
}

/// The four product representations
/// `A(A⁻¹B)^{1/2}`, `(BA⁻¹)^{1/2}A`, `B(B⁻¹A)^{1/2}`, `(AB⁻¹)^{1/2}B`,
/// each evaluated with [`principal_sqrt_general`].
pub fn geometric_mean_representations(
    a: &DenseSymMatrix,
    b: &DenseSymMatrix,
) -> Result<[DMatrix<f64>; 4], LinalgError> {
    check_pair(a, b, DENSE_ORACLE_CAP)?;
    let am = a.to_matrix();
    let bm = b.to_matrix();
    let not_pd = || LinalgError::NotPositiveDefinite {
        min_eigenvalue: 0.0,
    };
    let a_inv = am.clone().try_inverse().ok_or_else(not_pd)?;
    let b_inv = bm.clone().try_inverse().ok_or_else(not_pd)?;
    Ok([
        &am * principal_sqrt_general(&(&a_inv * &bm))?,
        principal_sqrt_general(&(&bm * &a_inv))? * &am,
        &bm * principal_sqrt_general(&(&b_inv * &am))?,
        principal_sqrt_general(&(&am * &b_inv))? * &bm,
    ])
}

/// Sines of the principal angles between the column spans of `u` and `v`
/// (both `n × k`, not necessarily orthonormal), largest first.
pub fn principal_angle_sines(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Vec<f64> {
    let qu = u.clone().qr().q();
    let qv = v.clone().qr().q();
    // sines are the singular values of (I − Qu Quᵀ) Qv; accurate for small angles
    let residual = &qv - &qu * (qu.transpose() * &qv);
    let mut sines: Vec<f64> = residual
        .singular_values()
        .iter()
        .map(|s| s.min(1.0))
        .collect();
    sines.sort_by(|a, b| b.total_cmp(a));
    sines
}
