//! Signed graphs and their Laplacians.
//!
//! A signed graph is a pair of nonnegative symmetric weight matrices
//! `(W⁺, W⁻)` on one vertex set. Vertices with zero degree get a zero
//! `D^{-1/2}` entry, so their rows of every normalized operator vanish.

use std::path::Path;

use crate::error::GraphError;
use crate::sparse::SparseSymMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph {
    w_plus: SparseSymMatrix,
    w_minus: SparseSymMatrix,
}

impl SignedGraph {
    pub fn new(w_plus: SparseSymMatrix, w_minus: SparseSymMatrix) -> Result<Self, GraphError> {
        if w_plus.n() != w_minus.n() {
            return Err(GraphError::OrderMismatch {
                plus: w_plus.n(),
                minus: w_minus.n(),
            });
        }
        for w in [&w_plus, &w_minus] {
            for i in 0..w.n() {
                for (j, v) in w.row(i) {
                    if v < 0.0 {
                        return Err(GraphError::NegativeWeight {
                            row: i,
                            col: j,
                            value: v,
                        });
                    }
                    if i == j && v != 0.0 {
                        return Err(GraphError::SelfLoop { vertex: i });
                    }
                }
            }
        }
        Ok(Self { w_plus, w_minus })
    }

    /// Graph with no edges on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Self {
            w_plus: SparseSymMatrix::zeros(n),
            w_minus: SparseSymMatrix::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.w_plus.n()
    }

    pub fn w_plus(&self) -> &SparseSymMatrix {
        &self.w_plus
    }

    pub fn w_minus(&self) -> &SparseSymMatrix {
        &self.w_minus
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVectors {
    pub d_plus: Vec<f64>,
    pub d_minus: Vec<f64>,
    pub d_bar: Vec<f64>,
}

pub fn degrees(g: &SignedGraph) -> DegreeVectors {
    let d_plus = g.w_plus.row_sums();
    let d_minus = g.w_minus.row_sums();
    let d_bar = d_plus.iter().zip(&d_minus).map(|(a, b)| a + b).collect();
    DegreeVectors {
        d_plus,
        d_minus,
        d_bar,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Unnormalized,
    /// `D^{-1/2} · D^{-1/2}`
    Symmetric,
}

/// `d^{-1/2}` with the zero-degree convention.
pub fn inv_sqrt_degrees(d: &[f64]) -> Vec<f64> {
    d.iter()
        .map(|&v| if v > 0.0 { 1.0 / v.sqrt() } else { 0.0 })
        .collect()
}

/// `D ± W`, with `sign = -1` for the Laplacian and `+1` for the signless one.
fn degree_plus_signed(w: &SparseSymMatrix, sign: f64) -> SparseSymMatrix {
    let d = w.row_sums();
    w.scale(sign).add_diagonal(&d)
}

/// `L = D − W`, or `L_sym = D^{-1/2} L D^{-1/2}`.
pub fn laplacian(w: &SparseSymMatrix, variant: Normalization) -> SparseSymMatrix {
    normalize(degree_plus_signed(w, -1.0), w, variant)
}

/// `Q = D + W`, or `Q_sym = D^{-1/2} Q D^{-1/2}`.
pub fn signless_laplacian(w: &SparseSymMatrix, variant: Normalization) -> SparseSymMatrix {
    normalize(degree_plus_signed(w, 1.0), w, variant)
}

fn normalize(m: SparseSymMatrix, w: &SparseSymMatrix, variant: Normalization) -> SparseSymMatrix {
    match variant {
        Normalization::Unnormalized => m,
        Normalization::Symmetric => m.scale_symmetric(&inv_sqrt_degrees(&w.row_sums())),
    }
}

/// The signed operators compared against the geometric mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignedLaplacianKind {
    /// `D⁺ − W⁺ + W⁻`
    BalanceRatio,
    /// `D̄^{-1/2} L_BR D̄^{-1/2}`, similar to `D̄⁻¹ L_BR`
    BalanceNormalized,
    /// `D̄ − W⁺ + W⁻`
    SignedRatio,
    /// `D̄^{-1/2} L_SR D̄^{-1/2}`
    SignedNormalized,
    /// `L⁺_sym + Q⁻_sym`
    ArithmeticMean,
}

pub fn signed_laplacian(g: &SignedGraph, kind: SignedLaplacianKind) -> SparseSymMatrix {
    let deg = degrees(g);
    let off = g
        .w_plus
        .scale(-1.0)
        .add_scaled(1.0, &g.w_minus)
        .expect("orders checked at construction");
    match kind {
        SignedLaplacianKind::BalanceRatio => off.add_diagonal(&deg.d_plus),
        SignedLaplacianKind::BalanceNormalized => off
            .add_diagonal(&deg.d_plus)
            .scale_symmetric(&inv_sqrt_degrees(&deg.d_bar)),
        SignedLaplacianKind::SignedRatio => off.add_diagonal(&deg.d_bar),
        SignedLaplacianKind::SignedNormalized => off
            .add_diagonal(&deg.d_bar)
            .scale_symmetric(&inv_sqrt_degrees(&deg.d_bar)),
        SignedLaplacianKind::ArithmeticMean => laplacian(&g.w_plus, Normalization::Symmetric)
            .add_scaled(
                1.0,
                &signless_laplacian(&g.w_minus, Normalization::Symmetric),
            )
            .expect("same order"),
    }
}

/// Diagonal shifts making `L⁺_sym` and `Q⁻_sym` positive definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftConfig {
    pub eps1: f64,
    pub eps2: f64,
}

impl Default for ShiftConfig {
    fn default() -> Self {
        Self {
            eps1: 1e-6,
            eps2: 1e-6,
        }
    }
}

impl ShiftConfig {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self, GraphError> {
        let s = Self { eps1, eps2 };
        s.validate()?;
        Ok(s)
    }

    pub fn zero() -> Self {
        Self {
            eps1: 0.0,
            eps2: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if !(self.eps1 > 0.0 && self.eps2 > 0.0) {
            return Err(GraphError::InvalidShift(format!(
                "eps1 = {}, eps2 = {} must both be positive",
                self.eps1, self.eps2
            )));
        }
        if !(self.eps1 + self.eps2 < 1.0) {
            return Err(GraphError::InvalidShift(format!(
                "eps1 + eps2 = {} must be below 1",
                self.eps1 + self.eps2
            )));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.eps1 + self.eps2
    }
}

/// `(L⁺_sym + ε₁I, Q⁻_sym + ε₂I)`.
pub fn shifted_pair(
    g: &SignedGraph,
    s: &ShiftConfig,
) -> Result<(SparseSymMatrix, SparseSymMatrix), GraphError> {
    s.validate()?;
    let a = laplacian(&g.w_plus, Normalization::Symmetric).shift(s.eps1);
    let b = signless_laplacian(&g.w_minus, Normalization::Symmetric).shift(s.eps2);
    Ok((a, b))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeListReport {
    pub edges_read: usize,
    pub self_loops_dropped: usize,
}

/// Parses `i j w` lines. Positive weights go to `W⁺`, negative ones to `W⁻`
/// as `|w|`, duplicates are summed and self-loops dropped. `#` starts a
/// comment. Zero weights are read and ignored.
pub fn parse_edge_list(text: &str) -> Result<(SignedGraph, EdgeListReport), GraphError> {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut n = 0usize;
    let mut report = EdgeListReport::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| GraphError::Parse {
            line: lineno + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(format!(
                "expected `i j w`, found {} fields",
                fields.len()
            )));
        }
        let index = |s: &str| -> Result<usize, GraphError> {
            let v: i64 = s
                .parse()
                .map_err(|_| parse_err(format!("invalid vertex index `{s}`")))?;
            usize::try_from(v).map_err(|_| parse_err(format!("negative vertex index {v}")))
        };
        let i = index(fields[0])?;
        let j = index(fields[1])?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(format!("invalid weight `{}`", fields[2])))?;
        if !w.is_finite() {
            return Err(parse_err(format!("non-finite weight `{}`", fields[2])));
        }
        report.edges_read += 1;
        n = n.max(i + 1).max(j + 1);
        if i == j {
            report.self_loops_dropped += 1;
            continue;
        }
        if w > 0.0 {
            plus.push((i, j, w));
        } else if w < 0.0 {
            minus.push((i, j, -w));
        }
    }
    if report.self_loops_dropped > 0 {
        log::warn!("dropped {} self-loops", report.self_loops_dropped);
    }
    let g = SignedGraph::new(
        SparseSymMatrix::from_triplets(n, plus)?,
        SparseSymMatrix::from_triplets(n, minus)?,
    )?;
    Ok((g, report))
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<(SignedGraph, EdgeListReport), GraphError> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text)
}

/// A unit vector supported on one connected component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentVector {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

/// Orthonormal basis of the kernel of `L_sym` (`signless = false`) or of
/// `Q_sym` (`signless = true`).
///
/// `L_sym` vanishes on `D^{1/2}𝟙_C` for every connected component `C`;
/// `Q_sym` vanishes on `D^{1/2}s` for every bipartite component with
/// `±1` side labels `s`. Isolated vertices contribute `e_v`. The vectors
/// have disjoint supports.
pub fn normalized_kernel(w: &SparseSymMatrix, signless: bool) -> Vec<ComponentVector> {
    let n = w.n();
    let d = w.row_sums();
    let mut side = vec![0i8; n];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if side[start] != 0 {
            continue;
        }
        side[start] = 1;
        stack.push(start);
        let mut members = Vec::new();
        let mut bipartite = true;
        while let Some(v) = stack.pop() {
            members.push(v);
            for (u, _) in w.row(v) {
                let want = if signless { -side[v] } else { side[v] };
                if side[u] == 0 {
                    side[u] = want;
                    stack.push(u);
                } else if side[u] != want {
                    bipartite = false;
                }
            }
        }
        if signless && !bipartite {
            continue;
        }
        members.sort_unstable();
        let values: Vec<f64> = if members.len() == 1 {
            vec![1.0]
        } else {
            let vol: f64 = members.iter().map(|&v| d[v]).sum();
            members
                .iter()
                .map(|&v| side[v] as f64 * (d[v] / vol).sqrt())
                .collect()
        };
        out.push(ComponentVector {
            indices: members,
            values,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{dense_sym_eig, DenseSymMatrix};
    use crate::sparse::LinearOperator;
    use approx::assert_relative_eq;

    fn edge(n: usize, edges: &[(usize, usize)]) -> SparseSymMatrix {
        SparseSymMatrix::from_triplets(n, edges.iter().map(|&(i, j)| (i, j, 1.0))).unwrap()
    }

    fn densify(c: &ComponentVector, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        for (&i, &x) in c.indices.iter().zip(&c.values) {
            v[i] = x;
        }
        v
    }

    #[test]
    fn kernel_of_normalized_laplacians() {
        // path 0-1-2 (bipartite), triangle 3-4-5 (not), isolated 6
        let w = edge(
            7,
            &[
                (0, 1),
                (1, 0),
                (1, 2),
                (2, 1),
                (3, 4),
                (4, 3),
                (4, 5),
                (5, 4),
                (3, 5),
                (5, 3),
            ],
        );
        let l = laplacian(&w, Normalization::Symmetric);
        let q = signless_laplacian(&w, Normalization::Symmetric);
        let kl = normalized_kernel(&w, false);
        let kq = normalized_kernel(&w, true);
        assert_eq!(kl.len(), 3);
        assert_eq!(kq.len(), 2);
        for (m, basis) in [(&l, &kl), (&q, &kq)] {
            for c in basis {
                let v = densify(c, 7);
                assert_relative_eq!(v.iter().map(|x| x * x).sum::<f64>(), 1.0, epsilon = 1e-14);
                assert!(m.apply(&v).iter().all(|x| x.abs() < 1e-14));
            }
        }
        assert_eq!(kq[0].indices, vec![0, 1, 2]);
        assert!(kq[0].values[0] > 0.0 && kq[0].values[1] < 0.0 && kq[0].values[2] > 0.0);
        assert_eq!(kq[1].indices, vec![6]);
    }

    fn spectrum(m: &SparseSymMatrix) -> Vec<f64> {
        dense_sym_eig(&DenseSymMatrix::from_sparse(m)).values
    }

    #[test]
    fn degrees_single_edge() {
        let g = SignedGraph::new(edge(2, &[(0, 1)]), SparseSymMatrix::zeros(2)).unwrap();
        let d = degrees(&g);
        assert_eq!(d.d_plus, vec![1.0, 1.0]);
        assert_eq!(d.d_minus, vec![0.0, 0.0]);
        assert_eq!(d.d_bar, vec![1.0, 1.0]);
    }

    #[test]
    fn degrees_empty_and_triangle() {
        let d = degrees(&SignedGraph::empty(3));
        assert_eq!(d.d_bar, vec![0.0; 3]);
        let g = SignedGraph::new(
            edge(3, &[(0, 1), (1, 2), (0, 2)]),
            SparseSymMatrix::zeros(3),
        )
        .unwrap();
        assert_eq!(degrees(&g).d_plus, vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn rejects_negative_weights_and_loops() {
        let neg = SparseSymMatrix::from_triplets(2, [(0, 1, -1.0)]).unwrap();
        assert!(matches!(
            SignedGraph::new(neg, SparseSymMatrix::zeros(2)),
            Err(GraphError::NegativeWeight { .. })
        ));
        let lp = SparseSymMatrix::from_triplets(2, [(1, 1, 1.0)]).unwrap();
        assert!(matches!(
            SignedGraph::new(SparseSymMatrix::zeros(2), lp),
            Err(GraphError::SelfLoop { vertex: 1 })
        ));
    }

    #[test]
    fn laplacian_single_edge() {
        let l = laplacian(&edge(2, &[(0, 1)]), Normalization::Unnormalized);
        assert_eq!(l.to_dense(), vec![1.0, -1.0, -1.0, 1.0]);
        let ev = spectrum(&l);
        assert_relative_eq!(ev[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(ev[1], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn kernel_dimension_counts_components() {
        for (n, edges, comps) in [
            (3, vec![(0, 1), (1, 2)], 1),
            (4, vec![(0, 1), (2, 3)], 2),
            (6, vec![(0, 1), (2, 3), (4, 5)], 3),
        ] {
            let ev = spectrum(&laplacian(&edge(n, &edges), Normalization::Unnormalized));
            let zeros = ev.iter().filter(|v| v.abs() < 1e-12).count();
            assert_eq!(zeros, comps);
        }
    }

    #[test]
    fn path_normalized_spectrum() {
        let ev = spectrum(&laplacian(
            &edge(3, &[(0, 1), (1, 2)]),
            Normalization::Symmetric,
        ));
        for (got, want) in ev.iter().zip([0.0, 1.0, 2.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn signless_single_edge_and_triangle() {
        let q = signless_laplacian(&edge(2, &[(0, 1)]), Normalization::Unnormalized);
        assert_eq!(q.to_dense(), vec![1.0, 1.0, 1.0, 1.0]);
        let ev = spectrum(&q);
        assert_relative_eq!(ev[0], 0.0, epsilon = 1e-14);
        let tri = signless_laplacian(
            &edge(3, &[(0, 1), (1, 2), (0, 2)]),
            Normalization::Symmetric,
        );
        assert_relative_eq!(spectrum(&tri)[0], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn signless_bipartite_vs_odd_cycle() {
        let square = edge(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let pent = edge(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let q4 = spectrum(&signless_laplacian(&square, Normalization::Symmetric));
        let q5 = spectrum(&signless_laplacian(&pent, Normalization::Symmetric));
        assert!(q4[0].abs() < 1e-12);
        assert!(q5[0] > 1e-3);
    }

    #[test]
    fn isolated_vertex_rows_vanish() {
        let w = edge(3, &[(0, 1)]);
        for m in [
            laplacian(&w, Normalization::Symmetric),
            signless_laplacian(&w, Normalization::Symmetric),
        ] {
            assert!(m.row(2).all(|(_, v)| v == 0.0));
            assert_eq!(m.get(0, 0), Some(1.0));
        }
    }

    #[test]
    fn signed_ratio_reduces_to_unsigned_parts() {
        let wp = edge(3, &[(0, 1), (1, 2)]);
        let g = SignedGraph::new(wp.clone(), SparseSymMatrix::zeros(3)).unwrap();
        let l_sr = signed_laplacian(&g, SignedLaplacianKind::SignedRatio);
        assert_eq!(
            l_sr.max_abs_diff(&laplacian(&wp, Normalization::Unnormalized))
                .unwrap(),
            0.0
        );
        let g = SignedGraph::new(SparseSymMatrix::zeros(3), wp.clone()).unwrap();
        let l_sr = signed_laplacian(&g, SignedLaplacianKind::SignedRatio);
        assert_eq!(
            l_sr.max_abs_diff(&signless_laplacian(&wp, Normalization::Unnormalized))
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn balance_normalized_shares_spectrum_with_nonsymmetric_form() {
        let g = SignedGraph::new(
            edge(4, &[(0, 1), (2, 3), (1, 2)]),
            edge(4, &[(0, 2), (1, 3)]),
        )
        .unwrap();
        let sym = signed_laplacian(&g, SignedLaplacianKind::BalanceNormalized);
        let br = signed_laplacian(&g, SignedLaplacianKind::BalanceRatio);
        let dbar = degrees(&g).d_bar;
        // D̄⁻¹ L_BR, eigenvalues via nalgebra's general solver
        let mut m = nalgebra::DMatrix::from_row_slice(4, 4, &br.to_dense());
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] /= dbar[i];
            }
        }
        let mut general: Vec<f64> = m.complex_eigenvalues().iter().map(|c| c.re).collect();
        general.sort_by(f64::total_cmp);
        for (a, b) in spectrum(&sym).iter().zip(&general) {
            assert_relative_eq!(*a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn shifted_pair_spectra() {
        let g = SignedGraph::new(edge(2, &[(0, 1)]), SparseSymMatrix::zeros(2)).unwrap();
        let (a, b) = shifted_pair(&g, &ShiftConfig::new(0.01, 1e-6).unwrap()).unwrap();
        let ev = spectrum(&a);
        assert_relative_eq!(ev[0], 0.01, epsilon = 1e-14);
        assert_relative_eq!(ev[1], 2.01, epsilon = 1e-14);
        assert_eq!(b.to_dense(), vec![1e-6, 0.0, 0.0, 1e-6]);
    }

    #[test]
    fn shift_validation() {
        assert!(ShiftConfig::new(0.0, 0.1).is_err());
        assert!(ShiftConfig::new(0.6, 0.5).is_err());
        assert!(ShiftConfig::new(1e-6, 1e-6).is_ok());
    }

    #[test]
    fn edge_list_sign_routing_and_merge() {
        let (g, _) = parse_edge_list("0 1 1.0\n").unwrap();
        assert_eq!(g.w_plus().get(0, 1), Some(1.0));
        let (g, _) = parse_edge_list("0 1 -2.0\n").unwrap();
        assert_eq!(g.w_minus().get(1, 0), Some(2.0));
        assert_eq!(g.w_plus().nnz(), 0);
        let (g, _) = parse_edge_list("# header\n0 1 1\n1 0 1\n").unwrap();
        assert_eq!(g.w_plus().get(0, 1), Some(2.0));
    }

    #[test]
    fn edge_list_self_loops_and_errors() {
        let (g, rep) = parse_edge_list("0 0 1\n0 2 1 # trailing\n").unwrap();
        assert_eq!(rep.self_loops_dropped, 1);
        assert_eq!(g.n(), 3);
        match parse_edge_list("0 1 1\n0 x 1\n") {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_edge_list("-1 2 1\n"),
            Err(GraphError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("0 1\n"),
            Err(GraphError::Parse { line: 1, .. })
        ));
    }
}
