//! Dense reference computations shared by the integration tests. Everything
//! here goes through nalgebra directly rather than the crate's own routines.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signed_geomean::sbm::{sample, SbmParams};
use signed_geomean::{ShiftConfig, SignedGraph, SparseSymMatrix};

pub fn to_dmatrix(m: &SparseSymMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.n(), m.n(), &m.to_dense())
}

pub fn sym_fn(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let e = SymmetricEigen::new(m.clone());
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(f));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

/// `(A⁻¹B)^{-1/2} y = A^{-1/2} (A^{-1/2} B A^{-1/2})^{-1/2} A^{1/2} y`
pub fn pencil_inv_sqrt(a: &DMatrix<f64>, b: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    let a_is = sym_fn(a, |v| 1.0 / v.sqrt());
    let a_s = sym_fn(a, f64::sqrt);
    let c = &a_is * b * &a_is;
    let c = (&c + c.transpose()) * 0.5;
    let c_is = sym_fn(&c, |v| 1.0 / v.sqrt());
    let x = &a_is * c_is * a_s * DVector::from_column_slice(y);
    x.as_slice().to_vec()
}

/// `A # B = A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}`, symmetrised.
pub fn geomean(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let a_is = sym_fn(a, |v| 1.0 / v.sqrt());
    let a_s = sym_fn(a, f64::sqrt);
    let c = &a_is * b * &a_is;
    let c = (&c + c.transpose()) * 0.5;
    let g = &a_s * sym_fn(&c, f64::sqrt) * &a_s;
    (&g + g.transpose()) * 0.5
}

/// Ascending eigenvalues and matching eigenvector columns.
pub fn sorted_eig(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = SymmetricEigen::new(m.clone());
    let mut idx: Vec<usize> = (0..m.nrows()).collect();
    idx.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(m.nrows(), m.nrows(), |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Largest sine of the principal angles between two column spaces.
pub fn max_angle_sine(u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    let qu = u.clone().qr().q();
    let qv = v.clone().qr().q();
    let r = &qv - &qu * (qu.transpose() * &qv);
    r.singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn rel_err(x: &[f64], want: &[f64]) -> f64 {
    let num: f64 = x
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let den: f64 = want.iter().map(|b| b * b).sum::<f64>().sqrt();
    num / den
}

pub fn random_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// A random SBM sample with `k` clusters of size `c`, moderately dense.
pub fn random_sbm_graph(k: usize, c: usize, seed: u64) -> SignedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
    let params = SbmParams::new(
        k,
        c,
        rng.gen_range(0.1..0.5),
        rng.gen_range(0.02..0.2),
        rng.gen_range(0.02..0.2),
        rng.gen_range(0.1..0.5),
    )
    .unwrap();
    sample(&params, seed).unwrap()
}

pub fn shifted_dense_pair(g: &SignedGraph, s: &ShiftConfig) -> (DMatrix<f64>, DMatrix<f64>) {
    let (a, b) = signed_geomean::graph::shifted_pair(g, s).unwrap();
    (to_dmatrix(&a), to_dmatrix(&b))
}
