//! Spectral embedding, k-means, majority-vote error and neighbour graphs.

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::derive_seed;
use crate::error::ClusterError;
use crate::geomean::{smallest_k_eigenpairs, EksmConfig, IpmConfig, PencilOperator, SparseInverse};
use crate::graph::{
    degrees, inv_sqrt_degrees, signed_laplacian, ShiftConfig, SignedGraph, SignedLaplacianKind,
};
use crate::sparse::{dot, norm2, LinearOperator, SparseSymMatrix};

/// Operator whose bottom eigenvectors form the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    SignedNormalized,
    BalanceNormalized,
    ArithmeticMean,
    GeometricMean,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::SignedNormalized,
        Method::BalanceNormalized,
        Method::ArithmeticMean,
        Method::GeometricMean,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Method::SignedNormalized => "SN",
            Method::BalanceNormalized => "BN",
            Method::ArithmeticMean => "AM",
            Method::GeometricMean => "GM",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "SN" => Ok(Method::SignedNormalized),
            "BN" => Ok(Method::BalanceNormalized),
            "AM" => Ok(Method::ArithmeticMean),
            "GM" => Ok(Method::GeometricMean),
            _ => Err(format!("unknown method '{s}' (expected SN, BN, AM or GM)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmeansConfig {
    pub restarts: usize,
    pub max_iter: usize,
    /// Lloyd stops once the objective improves by less than `tol` relative.
    pub tol: f64,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iter: 300,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConfig {
    pub shift: ShiftConfig,
    pub ipm: IpmConfig,
    pub eksm: EksmConfig,
    /// Diagonal shift making the positive semidefinite SN/BN/AM matrices
    /// invertible for the inverse power method.
    pub single_shift: f64,
    pub kmeans: KmeansConfig,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            shift: ShiftConfig::default(),
            ipm: IpmConfig {
                accept_unconverged: true,
                ..IpmConfig::default()
            },
            eksm: EksmConfig {
                fallback_tol: Some(1e-4),
                ..EksmConfig::default()
            },
            single_shift: 1e-6,
            kmeans: KmeansConfig::default(),
        }
    }
}

/// `n × k` matrix of bottom eigenvectors, stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    columns: Vec<Vec<f64>>,
    /// Eigenvalues of the unshifted operator.
    pub eigenvalues: Vec<f64>,
    /// `‖Op u − λu‖` per column, measured on the operator the solver used.
    pub residuals: Vec<f64>,
    pub iterations: Vec<usize>,
    pub deflation_warning: bool,
}

impl Embedding {
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Self {
        let k = columns.len();
        Self {
            columns,
            eigenvalues: vec![f64::NAN; k],
            residuals: vec![f64::NAN; k],
            iterations: vec![0; k],
            deflation_warning: false,
        }
    }

    pub fn n(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| self.columns.iter().map(|c| c[i]).collect())
            .collect()
    }
}

/// Cluster ids in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabels {
    pub labels: Vec<usize>,
    pub k: usize,
    /// Ids that received no vertex.
    pub empty_clusters: Vec<usize>,
}

impl ClusterLabels {
    pub fn new(labels: Vec<usize>, k: usize) -> Self {
        let sizes = sizes_of(&labels, k);
        let empty_clusters = (0..k).filter(|&c| sizes[c] == 0).collect();
        Self {
            labels,
            k,
            empty_clusters,
        }
    }

    /// Infers `k` as one more than the largest id.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        Self::new(labels, k)
    }

    pub fn sizes(&self) -> Vec<usize> {
        sizes_of(&self.labels, self.k)
    }

    pub fn has_empty(&self) -> bool {
        !self.empty_clusters.is_empty()
    }
}

fn sizes_of(labels: &[usize], k: usize) -> Vec<usize> {
    let mut s = vec![0; k.max(labels.iter().max().map_or(0, |m| m + 1))];
    for &l in labels {
        s[l] += 1;
    }
    s
}

/// Matrix, back-transform and lower spectral bound for a single-matrix
/// method. `L_BR ⪰ −D⁻ ⪰ −D̄`, so the symmetric balance-normalized operator
/// is bounded below by `−1` and needs that much extra shift to be SPD.
fn single_matrix(g: &SignedGraph, method: Method) -> (SparseSymMatrix, Option<Vec<f64>>, f64) {
    match method {
        Method::SignedNormalized => (
            signed_laplacian(g, SignedLaplacianKind::SignedNormalized),
            None,
            0.0,
        ),
        Method::BalanceNormalized => (
            signed_laplacian(g, SignedLaplacianKind::BalanceNormalized),
            Some(inv_sqrt_degrees(&degrees(g).d_bar)),
            1.0,
        ),
        Method::ArithmeticMean => (
            signed_laplacian(g, SignedLaplacianKind::ArithmeticMean),
            None,
            0.0,
        ),
        Method::GeometricMean => unreachable!("handled by the pencil route"),
    }
}

/// Bottom `k` eigenvectors of the operator selected by `method`.
///
/// The balance-normalized eigenvectors are computed for the symmetric form
/// and mapped back by `D̄^{-1/2}`, then renormalised.
pub fn spectral_embedding(
    g: &SignedGraph,
    k: usize,
    method: Method,
    cfg: &SpectralConfig,
) -> Result<Embedding, ClusterError> {
    let n = g.n();
    if k < 1 || k > n {
        return Err(ClusterError::InvalidK { k, n });
    }
    let (result, offset, back) = match method {
        Method::GeometricMean => {
            let p = PencilOperator::from_graph(g, &cfg.shift)?.with_eksm(cfg.eksm);
            (smallest_k_eigenpairs(&p, k, &cfg.ipm)?, 0.0, None)
        }
        _ => {
            let (m, back, lower) = single_matrix(g, method);
            let offset = lower + cfg.single_shift;
            let op = SparseInverse::new(m.shift(offset));
            (smallest_k_eigenpairs(&op, k, &cfg.ipm)?, offset, back)
        }
    };
    let mut columns = Vec::with_capacity(k);
    for pair in &result.pairs {
        let mut v = pair.vector.clone();
        if let Some(s) = &back {
            for (vi, si) in v.iter_mut().zip(s) {
                *vi *= si;
            }
            let nv = norm2(&v);
            if nv > 0.0 {
                v.iter_mut().for_each(|x| *x /= nv);
            }
        }
        columns.push(v);
    }
    Ok(Embedding {
        columns,
        eigenvalues: result.pairs.iter().map(|p| p.value - offset).collect(),
        residuals: result.pairs.iter().map(|p| p.residual).collect(),
        iterations: result.pairs.iter().map(|p| p.iterations).collect(),
        deflation_warning: result.deflation_warning,
    })
}

/// Residuals `‖M u − λ u‖` of an embedding against an explicit matrix.
pub fn embedding_residuals(m: &SparseSymMatrix, e: &Embedding) -> Vec<f64> {
    e.columns
        .iter()
        .map(|u| {
            let mu = m.apply(u);
            let lambda = dot(u, &mu) / dot(u, u);
            mu.iter()
                .zip(u)
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SpectralClustering {
    pub labels: ClusterLabels,
    pub embedding: Embedding,
}

/// Embeds with `method` and runs k-means on the rows.
pub fn spectral_cluster(
    g: &SignedGraph,
    k: usize,
    method: Method,
    cfg: &SpectralConfig,
    seed: u64,
) -> Result<SpectralClustering, ClusterError> {
    if k < 2 {
        return Err(ClusterError::InvalidK { k, n: g.n() });
    }
    let cfg = SpectralConfig {
        ipm: IpmConfig {
            seed: derive_seed(seed, 0),
            ..cfg.ipm
        },
        ..*cfg
    };
    let embedding = spectral_embedding(g, k, method, &cfg)?;
    let km = kmeans(&embedding.rows(), k, &cfg.kmeans, derive_seed(seed, 1))?;
    Ok(SpectralClustering {
        labels: km.labels,
        embedding,
    })
}

#[derive(Debug, Clone)]
pub struct KmeansResult {
    pub labels: ClusterLabels,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid, lowest index on ties.
fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn plus_plus_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centroids = vec![points[rng.gen_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let next = match WeightedIndex::new(&d2) {
            Ok(w) => w.sample(rng),
            // every point coincides with a centroid already
            Err(_) => rng.gen_range(0..n),
        };
        let c = points[next].clone();
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn lloyd(points: &[Vec<f64>], k: usize, cfg: &KmeansConfig, seed: u64) -> KmeansResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = points[0].len();
    let mut centroids = plus_plus_init(points, k, &mut rng);
    let mut labels = vec![0usize; points.len()];
    let mut inertia = f64::INFINITY;
    let mut iterations = 0;
    for it in 1..=cfg.max_iter {
        iterations = it;
        let mut next = 0.0;
        for (l, p) in labels.iter_mut().zip(points) {
            let (j, d) = nearest(p, &centroids);
            *l = j;
            next += d;
        }
        debug_assert!(
            next <= inertia * (1.0 + 1e-12),
            "k-means objective increased: {inertia} -> {next}"
        );
        let improved = inertia - next;
        inertia = next;
        // empty clusters keep their previous centroid
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (l, p) in labels.iter().zip(points) {
            counts[*l] += 1;
            for (s, x) in sums[*l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                centroids[j] = sums[j].iter().map(|s| s / counts[j] as f64).collect();
            }
        }
        if improved.is_finite() && improved <= cfg.tol * inertia.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    // objective of the final centroids
    inertia = 0.0;
    for (l, p) in labels.iter_mut().zip(points) {
        let (j, d) = nearest(p, &centroids);
        *l = j;
        inertia += d;
    }
    KmeansResult {
        labels: ClusterLabels::new(labels, k),
        centroids,
        inertia,
        iterations,
    }
}

/// Best of `cfg.restarts` k-means++/Lloyd runs by inertia.
pub fn kmeans(
    points: &[Vec<f64>],
    k: usize,
    cfg: &KmeansConfig,
    seed: u64,
) -> Result<KmeansResult, ClusterError> {
    let n = points.len();
    if k == 0 || n < k {
        return Err(ClusterError::InvalidK { k, n });
    }
    let dim = points[0].len();
    if let Some(bad) = points.iter().position(|p| p.len() != dim) {
        return Err(ClusterError::Parse {
            line: bad + 1,
            message: format!(
                "point has {} coordinates, expected {dim}",
                points[bad].len()
            ),
        });
    }
    let restarts = cfg.restarts.max(1);
    let runs: Vec<KmeansResult> = (0..restarts)
        .into_par_iter()
        .map(|r| lloyd(points, k, cfg, derive_seed(seed, r as u64)))
        .collect();
    // strict comparison keeps the earliest restart on ties
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.inertia < a.inertia { b } else { a })
        .expect("at least one restart");
    Ok(best)
}

/// Fraction of vertices whose predicted cluster's majority class differs
/// from their own class. Ties go to the smallest class id.
pub fn clustering_error(pred: &ClusterLabels, truth: &ClusterLabels) -> Result<f64, ClusterError> {
    let n = truth.labels.len();
    if pred.labels.len() != n {
        return Err(ClusterError::SizeMismatch {
            pred: pred.labels.len(),
            truth: n,
        });
    }
    let classes = truth.sizes();
    if let Some(c) = classes.iter().position(|&s| s == 0) {
        return Err(ClusterError::EmptyTruthClass(c));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let kp = pred.labels.iter().max().map_or(0, |m| m + 1).max(pred.k);
    let mut table = vec![vec![0usize; classes.len()]; kp];
    for (p, t) in pred.labels.iter().zip(&truth.labels) {
        table[*p][*t] += 1;
    }
    let mut correct = 0;
    for row in &table {
        // max_by_key returns the last maximum; scan manually for the first
        let mut best = 0;
        for (c, &cnt) in row.iter().enumerate() {
            if cnt > row[best] {
                best = c;
            }
        }
        correct += row[best];
    }
    Ok((n - correct) as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Symmetrization {
    /// Edge when either endpoint lists the other.
    #[default]
    Union,
    /// Edge when both endpoints list each other.
    Intersection,
}

fn neighbour_graph(
    data: &[Vec<f64>],
    m: usize,
    farthest: bool,
    sym: Symmetrization,
) -> Result<SparseSymMatrix, ClusterError> {
    let n = data.len();
    if m == 0 || m >= n {
        return Err(ClusterError::TooManyNeighbours { k: m, n });
    }
    let lists: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (sq_dist(&data[i], &data[j]), j))
                .collect();
            let cmp = |a: &(f64, usize), b: &(f64, usize)| -> Ordering {
                let by_dist = if farthest {
                    b.0.total_cmp(&a.0)
                } else {
                    a.0.total_cmp(&b.0)
                };
                by_dist.then(a.1.cmp(&b.1))
            };
            cand.select_nth_unstable_by(m - 1, cmp);
            let mut chosen: Vec<usize> = cand[..m].iter().map(|c| c.1).collect();
            chosen.sort_unstable();
            chosen
        })
        .collect();
    let mut triplets = Vec::new();
    for (i, list) in lists.iter().enumerate() {
        for &j in list {
            let mutual = lists[j].binary_search(&i).is_ok();
            let keep = match sym {
                Symmetrization::Union => !mutual || i < j,
                Symmetrization::Intersection => mutual && i < j,
            };
            if keep {
                triplets.push((i.min(j), i.max(j), 1.0));
            }
        }
    }
    Ok(SparseSymMatrix::from_triplets(n, triplets)?)
}

/// Symmetric `k⁺`-nearest-neighbour graph with unit weights.
pub fn knn_pos_graph(
    data: &[Vec<f64>],
    k_plus: usize,
    sym: Symmetrization,
) -> Result<SparseSymMatrix, ClusterError> {
    neighbour_graph(data, k_plus, false, sym)
}

/// Symmetric `k⁻`-farthest-neighbour graph with unit weights.
pub fn kfn_neg_graph(
    data: &[Vec<f64>],
    k_minus: usize,
    sym: Symmetrization,
) -> Result<SparseSymMatrix, ClusterError> {
    neighbour_graph(data, k_minus, true, sym)
}

/// One point per line, comma- or whitespace-separated; `#` comments and
/// blank lines are skipped.
pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>, ClusterError> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ClusterError::Parse {
                        line: idx + 1,
                        message: format!("'{t}' is not a finite number"),
                    })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if let Some(first) = out.first() {
            if first.len() != row.len() {
                return Err(ClusterError::Parse {
                    line: idx + 1,
                    message: format!("{} columns, expected {}", row.len(), first.len()),
                });
            }
        }
        out.push(row);
    }
    Ok(out)
}

/// One non-negative integer label per line.
pub fn parse_labels(text: &str) -> Result<ClusterLabels, ClusterError> {
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let l = line.parse::<usize>().map_err(|_| ClusterError::Parse {
            line: idx + 1,
            message: format!("'{line}' is not a non-negative integer label"),
        })?;
        labels.push(l);
    }
    Ok(ClusterLabels::from_labels(labels))
}

pub fn load_points(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>, ClusterError> {
    parse_points(&std::fs::read_to_string(path)?)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<ClusterLabels, ClusterError> {
    parse_labels(&std::fs::read_to_string(path)?)
}

/// The explicit SN/BN/AM matrix; `None` for the geometric mean, which is
/// never formed.
pub fn single_matrix_operator(g: &SignedGraph, method: Method) -> Option<SparseSymMatrix> {
    (method != Method::GeometricMean).then(|| single_matrix(g, method).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    fn edges(m: &SparseSymMatrix) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..m.n() {
            for (j, _) in m.row(i) {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    #[test]
    fn method_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.short_name().parse::<Method>().unwrap(), m);
        }
        assert!("xx".parse::<Method>().is_err());
    }

    #[test]
    fn kmeans_separated_1d() {
        let r = kmeans(
            &pts(&[0.0, 0.1, 10.0, 10.1]),
            2,
            &KmeansConfig::default(),
            4,
        )
        .unwrap();
        let l = &r.labels.labels;
        assert_eq!(l[0], l[1]);
        assert_eq!(l[2], l[3]);
        assert_ne!(l[0], l[2]);
        assert!((r.inertia - 0.01).abs() < 1e-12);
    }

    #[test]
    fn kmeans_identical_points_flag_empty() {
        let r = kmeans(&pts(&[3.0; 5]), 2, &KmeansConfig::default(), 1).unwrap();
        assert!(r.labels.has_empty());
        assert_eq!(r.labels.empty_clusters, vec![1]);
        assert!(r.labels.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn kmeans_rejects_too_few_points() {
        assert!(kmeans(&pts(&[1.0]), 2, &KmeansConfig::default(), 0).is_err());
    }

    #[test]
    fn kmeans_is_deterministic() {
        let p: Vec<Vec<f64>> = (0..60)
            .map(|i| vec![(i * 37 % 11) as f64, (i * 13 % 7) as f64])
            .collect();
        let a = kmeans(&p, 4, &KmeansConfig::default(), 99).unwrap();
        let b = kmeans(&p, 4, &KmeansConfig::default(), 99).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.inertia, b.inertia);
    }

    #[test]
    fn error_examples() {
        let truth = ClusterLabels::from_labels(vec![0, 0, 1, 1]);
        assert_eq!(clustering_error(&truth, &truth).unwrap(), 0.0);
        let perm = ClusterLabels::from_labels(vec![1, 1, 0, 0]);
        assert_eq!(clustering_error(&perm, &truth).unwrap(), 0.0);
        let tie = ClusterLabels::from_labels(vec![0, 1, 0, 1]);
        assert_eq!(clustering_error(&tie, &truth).unwrap(), 0.5);
    }

    #[test]
    fn error_rejects_bad_input() {
        let truth = ClusterLabels::from_labels(vec![0, 0, 2]);
        let pred = ClusterLabels::from_labels(vec![0, 0, 1]);
        assert!(matches!(
            clustering_error(&pred, &truth),
            Err(ClusterError::EmptyTruthClass(1))
        ));
        let short = ClusterLabels::from_labels(vec![0]);
        assert!(matches!(
            clustering_error(&short, &pred),
            Err(ClusterError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn knn_collinear() {
        let g = knn_pos_graph(&pts(&[0.0, 1.0, 10.0]), 1, Symmetrization::Union).unwrap();
        assert_eq!(edges(&g), vec![(0, 1), (1, 2)]);
        let g = knn_pos_graph(&pts(&[0.0, 1.0, 10.0]), 1, Symmetrization::Intersection).unwrap();
        assert_eq!(edges(&g), vec![(0, 1)]);
    }

    #[test]
    fn kfn_collinear() {
        let g = kfn_neg_graph(&pts(&[0.0, 1.0, 10.0]), 1, Symmetrization::Union).unwrap();
        assert_eq!(edges(&g), vec![(0, 2), (1, 2)]);
    }

    #[test]
    fn two_points_single_edge() {
        let p = pts(&[0.0, 5.0]);
        assert_eq!(
            edges(&knn_pos_graph(&p, 1, Symmetrization::Union).unwrap()),
            vec![(0, 1)]
        );
        assert_eq!(
            edges(&kfn_neg_graph(&p, 1, Symmetrization::Union).unwrap()),
            vec![(0, 1)]
        );
    }

    #[test]
    fn neighbour_ties_prefer_smaller_index() {
        // 1 is equidistant from 0 and 2
        let g = knn_pos_graph(&pts(&[0.0, 1.0, 2.0]), 1, Symmetrization::Intersection).unwrap();
        assert_eq!(edges(&g), vec![(0, 1)]);
    }

    #[test]
    fn neighbour_count_checked() {
        assert!(knn_pos_graph(&pts(&[0.0, 1.0]), 2, Symmetrization::Union).is_err());
    }

    #[test]
    fn parse_points_formats() {
        let p = parse_points("1,2\n# c\n3 4\n\n5\t6\n").unwrap();
        assert_eq!(p, vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        match parse_points("1,2\n3\n") {
            Err(ClusterError::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_points("1,x\n").is_err());
    }

    #[test]
    fn parse_labels_basic() {
        let l = parse_labels("0\n2\n1\n").unwrap();
        assert_eq!(l.labels, vec![0, 2, 1]);
        assert_eq!(l.k, 3);
        assert!(parse_labels("-1\n").is_err());
    }
}
