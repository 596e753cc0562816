//! Signed stochastic block model.
//!
//! `k` clusters of `|C|` vertices each; vertex `v` belongs to cluster
//! `v / |C|`. Positive and negative edges are drawn independently, so a pair
//! can carry both.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;

use crate::dense::{DenseSymMatrix, DENSE_ORACLE_CAP};
use crate::error::{LinalgError, SbmError};
use crate::graph::{inv_sqrt_degrees, ShiftConfig, SignedGraph, SignedLaplacianKind};
use crate::sparse::SparseSymMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbmParams {
    pub k: usize,
    pub cluster_size: usize,
    pub p_in_plus: f64,
    pub p_out_plus: f64,
    pub p_in_minus: f64,
    pub p_out_minus: f64,
}

impl SbmParams {
    pub fn new(
        k: usize,
        cluster_size: usize,
        p_in_plus: f64,
        p_out_plus: f64,
        p_in_minus: f64,
        p_out_minus: f64,
    ) -> Result<Self, SbmError> {
        let p = Self {
            k,
            cluster_size,
            p_in_plus,
            p_out_plus,
            p_in_minus,
            p_out_minus,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SbmError> {
        if self.k < 1 {
            return Err(SbmError::InvalidParams("k must be at least 1".into()));
        }
        if self.cluster_size < 1 {
            return Err(SbmError::InvalidParams(
                "cluster size must be at least 1".into(),
            ));
        }
        for (name, p) in [
            ("p_in_plus", self.p_in_plus),
            ("p_out_plus", self.p_out_plus),
            ("p_in_minus", self.p_in_minus),
            ("p_out_minus", self.p_out_minus),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SbmError::InvalidParams(format!(
                    "{name} = {p} not in [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.k * self.cluster_size
    }

    /// Planted cluster of every vertex.
    pub fn planted_labels(&self) -> Vec<usize> {
        (0..self.n()).map(|v| v / self.cluster_size).collect()
    }
}

/// Appends the edges of one block to `out`, choosing each candidate pair
/// with probability `p` by skipping geometrically many pairs at a time.
fn sample_pairs(
    rng: &mut ChaCha8Rng,
    p: f64,
    count: u64,
    pair: impl Fn(u64) -> (usize, usize),
    out: &mut Vec<(usize, usize, f64)>,
) {
    if p <= 0.0 || count == 0 {
        return;
    }
    if p >= 1.0 {
        out.extend((0..count).map(|t| {
            let (i, j) = pair(t);
            (i, j, 1.0)
        }));
        return;
    }
    let geo = Geometric::new(p).expect("0 < p < 1");
    let mut t = geo.sample(rng);
    while t < count {
        let (i, j) = pair(t);
        out.push((i, j, 1.0));
        t = match t.checked_add(geo.sample(rng) + 1) {
            Some(next) => next,
            None => break,
        };
    }
}

/// Index `t` in `0..m(m−1)/2` to the pair `(a, b)`, `a < b`, in row order.
fn triangle_pair(m: usize, t: u64) -> (usize, usize) {
    // row a starts at a·m − a(a+1)/2
    let m = m as u64;
    let mut a = {
        let disc = ((2 * m - 1) * (2 * m - 1)) as f64 - 8.0 * t as f64;
        (((2 * m - 1) as f64 - disc.max(0.0).sqrt()) / 2.0).floor() as u64
    };
    let start = |a: u64| a * m - a * (a + 1) / 2;
    while a > 0 && start(a) > t {
        a -= 1;
    }
    while start(a + 1) <= t {
        a += 1;
    }
    let b = a + 1 + (t - start(a));
    (a as usize, b as usize)
}

/// Draws one signed graph; deterministic in `seed`.
pub fn sample(params: &SbmParams, seed: u64) -> Result<SignedGraph, SbmError> {
    params.validate()?;
    let c = params.cluster_size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (p_in, p_out, out) in [
        (params.p_in_plus, params.p_out_plus, &mut plus),
        (params.p_in_minus, params.p_out_minus, &mut minus),
    ] {
        for a in 0..params.k {
            let base_a = a * c;
            let within = (c as u64) * (c as u64 - 1) / 2;
            sample_pairs(
                &mut rng,
                p_in,
                within,
                |t| {
                    let (i, j) = triangle_pair(c, t);
                    (base_a + i, base_a + j)
                },
                out,
            );
            for b in a + 1..params.k {
                let base_b = b * c;
                sample_pairs(
                    &mut rng,
                    p_out,
                    (c * c) as u64,
                    |t| {
                        let t = t as usize;
                        (base_a + t / c, base_b + t % c)
                    },
                    out,
                );
            }
        }
    }
    let n = params.n();
    let w_plus = SparseSymMatrix::from_triplets(n, plus)?;
    let w_minus = SparseSymMatrix::from_triplets(n, minus)?;
    SignedGraph::new(w_plus, w_minus).map_err(|e| SbmError::InvalidParams(e.to_string()))
}

fn check_cap(n: usize) -> Result<(), SbmError> {
    if n > DENSE_ORACLE_CAP {
        return Err(LinalgError::OracleCapExceeded {
            n,
            cap: DENSE_ORACLE_CAP,
        }
        .into());
    }
    Ok(())
}

fn block_constant(params: &SbmParams, p_in: f64, p_out: f64) -> DenseSymMatrix {
    let c = params.cluster_size;
    DenseSymMatrix::from_fn(params.n(), |i, j| if i / c == j / c { p_in } else { p_out })
        .expect("block-constant matrix is symmetric")
}

/// Expected `(W⁺, W⁻)`, including the diagonal of each block.
pub fn expected_graph(params: &SbmParams) -> Result<(DenseSymMatrix, DenseSymMatrix), SbmError> {
    params.validate()?;
    check_cap(params.n())?;
    Ok((
        block_constant(params, params.p_in_plus, params.p_out_plus),
        block_constant(params, params.p_in_minus, params.p_out_minus),
    ))
}

/// Operators on the expected graph that the dense checks compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedOperator {
    Signed(SignedLaplacianKind),
    /// `L⁺_sym + ε₁I`
    ShiftedPositive,
    /// `Q⁻_sym + ε₂I`
    ShiftedNegative,
}

/// Dense expected operator built from [`expected_graph`].
///
/// The balance-normalized operator is returned in symmetric form
/// `D̄^{-1/2} L_BR D̄^{-1/2}`.
pub fn expected_operator(
    params: &SbmParams,
    op: ExpectedOperator,
    shift: &ShiftConfig,
) -> Result<DenseSymMatrix, SbmError> {
    let (wp, wm) = expected_graph(params)?;
    let n = params.n();
    let row_sums = |w: &DenseSymMatrix| -> Vec<f64> {
        (0..n).map(|i| (0..n).map(|j| w.get(i, j)).sum()).collect()
    };
    let dp = row_sums(&wp);
    let dm = row_sums(&wm);
    let db: Vec<f64> = dp.iter().zip(&dm).map(|(a, b)| a + b).collect();
    let isp = inv_sqrt_degrees(&dp);
    let ism = inv_sqrt_degrees(&dm);
    let isb = inv_sqrt_degrees(&db);
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let m = |f: &dyn Fn(usize, usize) -> f64| DenseSymMatrix::from_fn(n, f).map_err(SbmError::from);
    use SignedLaplacianKind::*;
    match op {
        ExpectedOperator::Signed(BalanceRatio) => {
            m(&|i, j| dp[i] * delta(i, j) - wp.get(i, j) + wm.get(i, j))
        }
        ExpectedOperator::Signed(BalanceNormalized) => {
            m(&|i, j| isb[i] * (dp[i] * delta(i, j) - wp.get(i, j) + wm.get(i, j)) * isb[j])
        }
        ExpectedOperator::Signed(SignedRatio) => {
            m(&|i, j| db[i] * delta(i, j) - wp.get(i, j) + wm.get(i, j))
        }
        ExpectedOperator::Signed(SignedNormalized) => {
            m(&|i, j| delta(i, j) - isb[i] * (wp.get(i, j) - wm.get(i, j)) * isb[j])
        }
        ExpectedOperator::Signed(ArithmeticMean) => m(&|i, j| {
            2.0 * delta(i, j) - isp[i] * wp.get(i, j) * isp[j] + ism[i] * wm.get(i, j) * ism[j]
        }),
        ExpectedOperator::ShiftedPositive => {
            m(&|i, j| (1.0 + shift.eps1) * delta(i, j) - isp[i] * wp.get(i, j) * isp[j])
        }
        ExpectedOperator::ShiftedNegative => {
            m(&|i, j| (1.0 + shift.eps2) * delta(i, j) + ism[i] * wm.get(i, j) * ism[j])
        }
    }
}

/// One strict inequality: `holds ⇔ margin > 0`, with `margin` the right
/// side minus the left side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub holds: bool,
    pub margin: f64,
    /// A denominator vanished; `holds` is false and `margin` is NaN.
    pub degenerate: bool,
}

impl Condition {
    fn strict(margin: f64) -> Self {
        Self {
            holds: margin > 0.0,
            margin,
            degenerate: false,
        }
    }

    fn undefined() -> Self {
        Self {
            holds: false,
            margin: f64::NAN,
            degenerate: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionSet {
    pub e_plus: Condition,
    pub e_minus: Condition,
    pub e_bal: Condition,
    pub e_vol: Condition,
    pub e_conf: Condition,
    pub e_g: Condition,
    /// Exact shifted condition: the shifted geometric mean has the `χ`
    /// eigenvalues below its bulk eigenvalue, and `ε₁ + ε₂ < 1`.
    pub e_g_shifted: Condition,
    /// The simpler sufficient form `E_G left side + ε₁ + ε₂ < 1`.
    pub e_g_shifted_sufficient: Condition,
    pub shift: ShiftConfig,
}

/// The two factors of the `E_G` left side, `a = k p⁺_out / (p⁺_in + (k−1)p⁺_out)`
/// and `b = 1 + (p⁻_in − p⁻_out) / (p⁻_in + (k−1)p⁻_out)`.
fn eg_factors(k: f64, pip: f64, pop: f64, pim: f64, pom: f64) -> Option<(f64, f64)> {
    let dp = pip + (k - 1.0) * pop;
    let dm = pim + (k - 1.0) * pom;
    if dp == 0.0 || dm == 0.0 {
        return None;
    }
    Some((k * pop / dp, 1.0 + (pim - pom) / dm))
}

pub fn conditions(params: &SbmParams, shift: &ShiftConfig) -> ConditionSet {
    let k = params.k as f64;
    let (pip, pop, pim, pom) = (
        params.p_in_plus,
        params.p_out_plus,
        params.p_in_minus,
        params.p_out_minus,
    );
    let factors = eg_factors(k, pip, pop, pim, pom);
    let dp = pip + (k - 1.0) * pop;
    let dm = pim + (k - 1.0) * pom;
    let shift_ok = shift.validate().is_ok();
    let e_conf = if dp == 0.0 || dm == 0.0 {
        Condition::undefined()
    } else {
        Condition::strict(1.0 - (k * pop / dp) * (k * pim / dm))
    };
    let (e_g, e_g_shifted, e_g_shifted_sufficient) = match factors {
        None => (
            Condition::undefined(),
            Condition::undefined(),
            Condition::undefined(),
        ),
        Some((a, b)) => {
            let (e1, e2) = (shift.eps1, shift.eps2);
            let mut exact = Condition::strict((1.0 + e1) * (1.0 + e2) - (a + e1) * (b + e2));
            let mut sufficient = Condition::strict(1.0 - a * b - (e1 + e2));
            exact.holds &= shift_ok;
            sufficient.holds &= shift_ok;
            (Condition::strict(1.0 - a * b), exact, sufficient)
        }
    };
    ConditionSet {
        e_plus: Condition::strict(pip - pop),
        e_minus: Condition::strict(pom - pim),
        e_bal: Condition::strict((pip + pom) - (pim + pop)),
        e_vol: Condition::strict(dp - dm),
        e_conf,
        e_g,
        e_g_shifted,
        e_g_shifted_sufficient,
        shift: *shift,
    }
}

/// Eigenvalues of an expected operator: one per `χᵢ` and a single value on
/// the orthogonal complement of `span χ`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpectrum {
    pub chi: Vec<f64>,
    pub bulk: f64,
}

impl OperatorSpectrum {
    /// True when every `χ` eigenvalue lies strictly below the bulk.
    pub fn chi_at_bottom(&self) -> bool {
        self.chi.iter().all(|&v| v < self.bulk)
    }

    /// `min_i (bulk − χᵢ eigenvalue)`; negative when some `χ` eigenvalue is
    /// at or above the bulk.
    pub fn ordering_margin(&self) -> f64 {
        self.chi
            .iter()
            .map(|v| self.bulk - v)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedSpectrum {
    pub lambda1_plus: f64,
    pub lambdai_plus: f64,
    pub lambda1_minus: f64,
    pub lambdai_minus: f64,
    pub d_plus: f64,
    pub d_minus: f64,
    pub balance_ratio: OperatorSpectrum,
    pub signed_ratio: OperatorSpectrum,
    /// `None` when `d̄ = 0`.
    pub balance_normalized: Option<OperatorSpectrum>,
    pub signed_normalized: Option<OperatorSpectrum>,
    /// `None` when `d⁺ = 0` or `d⁻ = 0`.
    pub arithmetic_mean: Option<OperatorSpectrum>,
    /// Geometric mean of the shifted pair.
    pub geometric_mean: Option<OperatorSpectrum>,
}

pub fn expected_spectrum(params: &SbmParams, shift: &ShiftConfig) -> ExpectedSpectrum {
    let k = params.k as f64;
    let c = params.cluster_size as f64;
    let l1p = c * (params.p_in_plus + (k - 1.0) * params.p_out_plus);
    let l1m = c * (params.p_in_minus + (k - 1.0) * params.p_out_minus);
    let lip = c * (params.p_in_plus - params.p_out_plus);
    let lim = c * (params.p_in_minus - params.p_out_minus);
    let (dp, dm) = (l1p, l1m);
    let db = dp + dm;
    let lp = |i: usize| if i == 0 { l1p } else { lip };
    let lm = |i: usize| if i == 0 { l1m } else { lim };
    let build = |f: &dyn Fn(usize) -> f64, bulk: f64| OperatorSpectrum {
        chi: (0..params.k).map(f).collect(),
        bulk,
    };
    let balance_ratio = build(&|i| dp - lp(i) + lm(i), dp);
    let signed_ratio = build(&|i| db - lp(i) + lm(i), db);
    let (balance_normalized, signed_normalized) = if db > 0.0 {
        (
            Some(build(&|i| (dp - lp(i) + lm(i)) / db, dp / db)),
            Some(build(&|i| 1.0 - (lp(i) - lm(i)) / db, 1.0)),
        )
    } else {
        (None, None)
    };
    let (arithmetic_mean, geometric_mean) = if dp > 0.0 && dm > 0.0 {
        let (e1, e2) = (shift.eps1, shift.eps2);
        (
            Some(build(&|i| (1.0 - lp(i) / dp) + (1.0 + lm(i) / dm), 2.0)),
            Some(build(
                &|i| ((1.0 - lp(i) / dp + e1) * (1.0 + lm(i) / dm + e2)).sqrt(),
                ((1.0 + e1) * (1.0 + e2)).sqrt(),
            )),
        )
    } else {
        (None, None)
    };
    ExpectedSpectrum {
        lambda1_plus: l1p,
        lambdai_plus: lip,
        lambda1_minus: l1m,
        lambdai_minus: lim,
        d_plus: dp,
        d_minus: dm,
        balance_ratio,
        signed_ratio,
        balance_normalized,
        signed_normalized,
        arithmetic_mean,
        geometric_mean,
    }
}

/// `χ₁ = 𝟙`, `χᵢ = (k−1)` on cluster `i−1` and `−1` elsewhere.
pub fn indicator_basis(params: &SbmParams) -> Vec<Vec<f64>> {
    let n = params.n();
    let c = params.cluster_size;
    let km1 = params.k as f64 - 1.0;
    let mut out = vec![vec![1.0; n]];
    for i in 1..params.k {
        out.push(
            (0..n)
                .map(|v| if v / c == i - 1 { km1 } else { -1.0 })
                .collect(),
        );
    }
    out
}

/// `1/6 + 2/(3(k−1)) + 1/(k−1)²`
pub fn corollary_bound(k: usize) -> Result<f64, SbmError> {
    if k < 2 {
        return Err(SbmError::InvalidK(k));
    }
    let m = (k - 1) as f64;
    Ok(1.0 / 6.0 + 2.0 / (3.0 * m) + 1.0 / (m * m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Conditioning {
    All,
    Bal,
    PlusOrMinus,
    PlusAndMinus,
}

impl Conditioning {
    pub const ALL: [Conditioning; 4] = [
        Conditioning::All,
        Conditioning::Bal,
        Conditioning::PlusOrMinus,
        Conditioning::PlusAndMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Conditioning::All => "all",
            Conditioning::Bal => "e_bal",
            Conditioning::PlusOrMinus => "e_plus_or_minus",
            Conditioning::PlusAndMinus => "e_plus_and_minus",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    /// `E_G`
    Geometric,
    /// `E_bal ∩ E_vol`
    BalVol,
}

impl Target {
    pub const ALL: [Target; 2] = [Target::Geometric, Target::BalVol];

    pub fn name(self) -> &'static str {
        match self {
            Target::Geometric => "e_g",
            Target::BalVol => "e_bal_and_e_vol",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionFraction {
    pub numerator: u64,
    pub denominator: u64,
}

impl RegionFraction {
    /// `None` when the conditioning event is empty.
    pub fn fraction(&self) -> Option<f64> {
        (self.denominator > 0).then(|| self.numerator as f64 / self.denominator as f64)
    }
}

/// Counts for every `(conditioning, target)` combination on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionCounts {
    pub k: usize,
    pub steps: usize,
    counts: [[RegionFraction; 2]; 4],
}

impl RegionCounts {
    pub fn get(&self, c: Conditioning, t: Target) -> RegionFraction {
        self.counts[c.index()][t.index()]
    }
}

type Tally = [[(u64, u64); 2]; 4];

fn tally_point(k: f64, pip: f64, pop: f64, pim: f64, pom: f64, acc: &mut Tally) {
    let e_plus = pop < pip;
    let e_minus = pim < pom;
    let e_bal = pim + pop < pip + pom;
    let e_vol = pim + (k - 1.0) * pom < pip + (k - 1.0) * pop;
    let e_g = eg_factors(k, pip, pop, pim, pom).map(|(a, b)| a * b < 1.0);
    let cond = [true, e_bal, e_plus || e_minus, e_plus && e_minus];
    let target = [e_g, Some(e_bal && e_vol)];
    for (ci, &c) in cond.iter().enumerate() {
        if !c {
            continue;
        }
        for (ti, t) in target.iter().enumerate() {
            if let Some(t) = t {
                acc[ci][ti].1 += 1;
                if *t {
                    acc[ci][ti].0 += 1;
                }
            }
        }
    }
}

/// Evaluates the grid `((j + 0.5)/steps)⁴` once for all combinations.
pub fn region_counts(k: usize, steps: usize) -> Result<RegionCounts, SbmError> {
    if k < 2 {
        return Err(SbmError::InvalidK(k));
    }
    if steps < 2 {
        return Err(SbmError::TooFewSteps(steps));
    }
    let kf = k as f64;
    let h = 1.0 / steps as f64;
    let grid: Vec<f64> = (0..steps).map(|j| (j as f64 + 0.5) * h).collect();
    let tally = (0..steps)
        .into_par_iter()
        .map(|a| {
            let mut acc: Tally = [[(0, 0); 2]; 4];
            let pip = grid[a];
            for &pop in &grid {
                for &pim in &grid {
                    for &pom in &grid {
                        tally_point(kf, pip, pop, pim, pom, &mut acc);
                    }
                }
            }
            acc
        })
        .reduce(
            || [[(0, 0); 2]; 4],
            |mut x, y| {
                for ci in 0..4 {
                    for ti in 0..2 {
                        x[ci][ti].0 += y[ci][ti].0;
                        x[ci][ti].1 += y[ci][ti].1;
                    }
                }
                x
            },
        );
    let counts = tally.map(|row| {
        row.map(|(numerator, denominator)| RegionFraction {
            numerator,
            denominator,
        })
    });
    Ok(RegionCounts { k, steps, counts })
}

/// Fraction of grid points satisfying `target` among those satisfying
/// `conditioning`.
pub fn region_fraction(
    k: usize,
    steps: usize,
    conditioning: Conditioning,
    target: Target,
) -> Result<f64, SbmError> {
    region_counts(k, steps)?
        .get(conditioning, target)
        .fraction()
        .ok_or(SbmError::EmptyConditioning)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(k: usize, c: usize, p: [f64; 4]) -> SbmParams {
        SbmParams::new(k, c, p[0], p[1], p[2], p[3]).unwrap()
    }

    #[test]
    fn triangle_pairs_enumerate_in_order() {
        for m in 2..9 {
            let mut t = 0u64;
            for a in 0..m {
                for b in a + 1..m {
                    assert_eq!(triangle_pair(m, t), (a, b), "m={m} t={t}");
                    t += 1;
                }
            }
        }
    }

    #[test]
    fn sample_two_cliques() {
        let g = sample(&params(2, 3, [1.0, 0.0, 0.0, 0.0]), 1).unwrap();
        assert_eq!(g.w_minus().nnz(), 0);
        assert_eq!(g.w_plus().nnz(), 12);
        for i in 0..6 {
            for j in 0..6 {
                let want = (i != j && i / 3 == j / 3) as u8 as f64;
                assert_eq!(g.w_plus().get(i, j).unwrap_or(0.0), want);
            }
        }
    }

    #[test]
    fn sample_empty() {
        let g = sample(&params(3, 4, [0.0; 4]), 9).unwrap();
        assert_eq!(g.w_plus().nnz() + g.w_minus().nnz(), 0);
    }

    #[test]
    fn sample_is_deterministic() {
        let p = params(3, 20, [0.3, 0.1, 0.05, 0.2]);
        let a = sample(&p, 77).unwrap();
        let b = sample(&p, 77).unwrap();
        assert_eq!(a.w_plus().values(), b.w_plus().values());
        assert_eq!(a.w_plus().col_idx(), b.w_plus().col_idx());
        assert_eq!(a.w_minus().col_idx(), b.w_minus().col_idx());
    }

    #[test]
    fn sample_rejects_bad_probability() {
        assert!(SbmParams::new(2, 3, 1.5, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn expected_graph_blocks() {
        let (wp, wm) = expected_graph(&params(2, 2, [1.0, 0.0, 0.0, 0.0])).unwrap();
        let want = [
            1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0,
        ];
        assert_eq!(wp.entries(), &want);
        assert!(wm.entries().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn expected_graph_cap() {
        assert!(expected_graph(&params(2, 300, [0.5; 4])).is_err());
    }

    #[test]
    fn balanced_conditions() {
        let c = conditions(&params(2, 5, [1.0, 0.0, 0.0, 1.0]), &ShiftConfig::zero());
        assert!(c.e_plus.holds && c.e_minus.holds && c.e_bal.holds);
        assert!(c.e_conf.holds && c.e_g.holds);
        assert_eq!(c.e_g.margin, 1.0);
    }

    #[test]
    fn hand_evaluated_conditions() {
        let c = conditions(&params(2, 5, [0.8, 0.2, 0.2, 0.8]), &ShiftConfig::zero());
        assert_relative_eq!(1.0 - c.e_g.margin, 0.16, epsilon = 1e-15);
        assert!(c.e_g.holds);
        assert!(!c.e_vol.holds);
        assert_eq!(c.e_vol.margin, 0.0);
    }

    #[test]
    fn degenerate_negative_side() {
        let c = conditions(&params(3, 5, [0.5, 0.1, 0.0, 0.0]), &ShiftConfig::default());
        assert!(!c.e_minus.holds);
        assert!(c.e_g.degenerate && !c.e_g.holds);
        assert!(c.e_g_shifted.degenerate);
    }

    #[test]
    fn spectrum_formulas() {
        let s = expected_spectrum(&params(2, 100, [0.5, 0.1, 0.0, 0.0]), &ShiftConfig::zero());
        assert_relative_eq!(s.lambda1_plus, 60.0, epsilon = 1e-12);
        assert_relative_eq!(s.lambdai_plus, 40.0, epsilon = 1e-12);
        assert_eq!(s.d_plus, s.lambda1_plus);
        assert!(s.geometric_mean.is_none());
    }

    #[test]
    fn balanced_gm_first_eigenvalue_zero() {
        let s = expected_spectrum(&params(3, 4, [1.0, 0.0, 0.0, 1.0]), &ShiftConfig::zero());
        let gm = s.geometric_mean.unwrap();
        assert_eq!(gm.chi[0], 0.0);
        assert_eq!(gm.bulk, 1.0);
    }

    #[test]
    fn eg_matches_gm_ordering() {
        for p in [
            [0.8, 0.2, 0.2, 0.8],
            [0.2, 0.4, 0.3, 0.5],
            [0.5, 0.5, 0.1, 0.9],
            [0.1, 0.6, 0.7, 0.2],
        ] {
            for k in 2..6 {
                let sp = params(k, 3, p);
                let c = conditions(&sp, &ShiftConfig::zero());
                let gm = expected_spectrum(&sp, &ShiftConfig::zero())
                    .geometric_mean
                    .unwrap();
                let tail = gm.chi[1..].iter().all(|&v| v < gm.bulk);
                assert_eq!(c.e_g.holds, tail, "k={k} p={p:?}");
            }
        }
    }

    #[test]
    fn indicator_small_cases() {
        let b = indicator_basis(&params(2, 1, [0.0; 4]));
        assert_eq!(b, vec![vec![1.0, 1.0], vec![1.0, -1.0]]);
        let b = indicator_basis(&params(3, 1, [0.0; 4]));
        assert_eq!(b[1], vec![2.0, -1.0, -1.0]);
    }

    #[test]
    fn bound_values() {
        assert_relative_eq!(corollary_bound(2).unwrap(), 11.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(
            corollary_bound(5).unwrap(),
            1.0 / 6.0 + 1.0 / 6.0 + 1.0 / 16.0,
            epsilon = 1e-15
        );
        assert!((corollary_bound(1_000_000).unwrap() - 1.0 / 6.0).abs() < 1e-5);
        assert!(corollary_bound(1).is_err());
    }

    #[test]
    fn region_rejects_bad_grid() {
        assert!(matches!(
            region_fraction(3, 1, Conditioning::All, Target::Geometric),
            Err(SbmError::TooFewSteps(1))
        ));
    }

    #[test]
    fn eg_under_plus_and_minus_is_certain() {
        for k in [2, 3, 7] {
            let f = region_fraction(k, 12, Conditioning::PlusAndMinus, Target::Geometric).unwrap();
            assert_eq!(f, 1.0);
        }
    }
}
