//! Eigenpairs of the matrix geometric mean `A # B` without forming it.
//!
//! `A # B = A (A⁻¹B)^{1/2}`, so `(A # B)⁻¹ x = (A⁻¹B)^{-1/2} A⁻¹ x`. The inverse
//! power method needs that product once per step. Since `A # B = B # A` it
//! is evaluated as `(A⁻¹B)^{1/2} B⁻¹ x`: one preconditioned CG solve with `B`,
//! then `(A⁻¹B)^{1/2}` applied to a vector by an extended Krylov subspace
//! method (EKSM). `eksm_apply_inv_sqrt` gives the literal inverse square root.
//!
//! The EKSM basis grows by one vector from `M = A⁻¹B` and one from `M⁻¹` per
//! iteration. It is kept orthonormal in `⟨u, v⟩_A = uᵀAv`, where `M` is
//! self-adjoint, so the projected matrix is simply `VᵀBV`. The roles of `A`
//! and `B` can be swapped with [`PencilSide`].
//!
//! The kernels of the two normalized Laplacians are known in closed form, so
//! solves with `A` and `B` treat those directions exactly and run CG only on
//! the complement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{dense_sym_eig, DenseSymMatrix};
use crate::error::{EigenError, EksmError, GraphError, SolveError};
use crate::graph::{normalized_kernel, shifted_pair, ComponentVector, ShiftConfig, SignedGraph};
use crate::pcg::{pcg_solve, PcgConfig};
use crate::precond::{incomplete_cholesky, IcPreconditioner};
use crate::sparse::{axpy, dot, norm2, scale_in_place, LinearOperator, SparseSymMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EksmConfig {
    /// Stop when `‖x_{s+1} − x_s‖_A ≤ tol·‖x_s‖_A`.
    pub tol: f64,
    /// Iteration cap; the basis holds at most `2·max_s` vectors.
    pub max_s: usize,
    /// At the cap, return the last approximant instead of failing when its
    /// relative change is at most this.
    pub fallback_tol: Option<f64>,
}

impl Default for EksmConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_s: 50,
            fallback_tol: None,
        }
    }
}

/// Inner solves of the eigensolvers: the strict PCG target, falling back to
/// 1e-8 when the rounding floor of a nearly singular shifted matrix sits
/// above 1e-10.
fn inner_pcg() -> PcgConfig {
    PcgConfig {
        fallback_tol: Some(1e-8),
        ..PcgConfig::default()
    }
}

/// Orthonormal vectors with disjoint supports spanning an eigenspace of a
/// matrix for one known eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactEigenspace {
    pub vectors: Vec<ComponentVector>,
    pub value: f64,
}

impl ExactEigenspace {
    /// Solves `M z = rhs` with the eigenspace part handled in closed form
    /// and PCG on the remainder. Near-null directions of a shifted
    /// Laplacian otherwise swamp the rest of the solution by `1/ε`.
    fn solve(
        &self,
        m: &SparseSymMatrix,
        pc: &IcPreconditioner,
        cfg: &PcgConfig,
        rhs: &[f64],
    ) -> Result<Vec<f64>, SolveError> {
        let mut r = rhs.to_vec();
        let coeffs: Vec<f64> = self
            .vectors
            .iter()
            .map(|q| {
                let c: f64 = q
                    .indices
                    .iter()
                    .zip(&q.values)
                    .map(|(&i, v)| v * r[i])
                    .sum();
                for (&i, v) in q.indices.iter().zip(&q.values) {
                    r[i] -= c * v;
                }
                c
            })
            .collect();
        let mut z = pcg_solve(m, &r, pc, cfg)?.x;
        for (q, c) in self.vectors.iter().zip(coeffs) {
            let drift: f64 = q
                .indices
                .iter()
                .zip(&q.values)
                .map(|(&i, v)| v * z[i])
                .sum();
            let scale = c / self.value - drift;
            for (&i, v) in q.indices.iter().zip(&q.values) {
                z[i] += scale * v;
            }
        }
        Ok(z)
    }
}

/// The SPD pencil `(A, B)` with one IC(0) preconditioner per matrix.
#[derive(Debug, Clone)]
pub struct PencilOperator {
    a: SparseSymMatrix,
    b: SparseSymMatrix,
    pc_a: IcPreconditioner,
    pc_b: IcPreconditioner,
    pcg: PcgConfig,
    eksm: EksmConfig,
    exact_a: Option<ExactEigenspace>,
    exact_b: Option<ExactEigenspace>,
}

impl PencilOperator {
    pub fn new(a: SparseSymMatrix, b: SparseSymMatrix) -> Self {
        assert_eq!(a.n(), b.n(), "pencil matrices must have the same order");
        let pc_a = incomplete_cholesky(&a);
        let pc_b = incomplete_cholesky(&b);
        Self {
            a,
            b,
            pc_a,
            pc_b,
            pcg: inner_pcg(),
            eksm: EksmConfig::default(),
            exact_a: None,
            exact_b: None,
        }
    }

    /// `(L⁺_sym + ε₁I, Q⁻_sym + ε₂I)`, with the kernels of `L⁺_sym` and
    /// `Q⁻_sym` attached as exact eigenspaces for `ε₁` and `ε₂`.
    pub fn from_graph(g: &SignedGraph, shift: &ShiftConfig) -> Result<Self, GraphError> {
        let (a, b) = shifted_pair(g, shift)?;
        Ok(Self::new(a, b).with_exact_eigenspaces(
            ExactEigenspace {
                vectors: normalized_kernel(g.w_plus(), false),
                value: shift.eps1,
            },
            ExactEigenspace {
                vectors: normalized_kernel(g.w_minus(), true),
                value: shift.eps2,
            },
        ))
    }

    /// Known eigenspaces of `A` and `B`, used to split every linear solve.
    pub fn with_exact_eigenspaces(mut self, a: ExactEigenspace, b: ExactEigenspace) -> Self {
        self.exact_a = (!a.vectors.is_empty()).then_some(a);
        self.exact_b = (!b.vectors.is_empty()).then_some(b);
        self
    }

    pub fn with_pcg(mut self, pcg: PcgConfig) -> Self {
        self.pcg = pcg;
        self
    }

    pub fn with_eksm(mut self, eksm: EksmConfig) -> Self {
        self.eksm = eksm;
        self
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn a(&self) -> &SparseSymMatrix {
        &self.a
    }

    pub fn b(&self) -> &SparseSymMatrix {
        &self.b
    }

    pub fn preconditioners(&self) -> (&IcPreconditioner, &IcPreconditioner) {
        (&self.pc_a, &self.pc_b)
    }

    pub fn eksm_config(&self) -> &EksmConfig {
        &self.eksm
    }

    pub fn solve_a(&self, rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
        match &self.exact_a {
            Some(e) => e.solve(&self.a, &self.pc_a, &self.pcg, rhs),
            None => Ok(pcg_solve(&self.a, rhs, &self.pc_a, &self.pcg)?.x),
        }
    }

    pub fn solve_b(&self, rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
        match &self.exact_b {
            Some(e) => e.solve(&self.b, &self.pc_b, &self.pcg, rhs),
            None => Ok(pcg_solve(&self.b, rhs, &self.pc_b, &self.pcg)?.x),
        }
    }

    /// `(inner, outer)` matrices for `side`.
    fn oriented(&self, side: PencilSide) -> (&SparseSymMatrix, &SparseSymMatrix) {
        match side {
            PencilSide::A => (&self.a, &self.b),
            PencilSide::B => (&self.b, &self.a),
        }
    }

    fn solve_side(&self, side: PencilSide, rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
        match side {
            PencilSide::A => self.solve_a(rhs),
            PencilSide::B => self.solve_b(rhs),
        }
    }

    /// `A⁻¹ B x`
    pub fn apply_m(&self, x: &[f64]) -> Result<Vec<f64>, SolveError> {
        self.solve_a(&self.b.apply(x))
    }

    /// `B⁻¹ A x`
    pub fn apply_m_inv(&self, x: &[f64]) -> Result<Vec<f64>, SolveError> {
        self.solve_b(&self.a.apply(x))
    }
}

/// Columns orthonormal in the `A` inner product, with `A·v` cached.
#[derive(Debug, Clone, Default)]
pub struct ABasis {
    vectors: Vec<Vec<f64>>,
    a_vectors: Vec<Vec<f64>>,
}

/// The projected remainder was negligible: `w` lies in the span already.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoBreakdown {
    pub norm_before: f64,
    pub norm_after: f64,
}

impl ABasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn a_vectors(&self) -> &[Vec<f64>] {
        &self.a_vectors
    }

    /// Orthonormalises `w` against the basis and appends it.
    pub fn push<Op: LinearOperator + ?Sized>(
        &mut self,
        w: &[f64],
        a: &Op,
    ) -> Result<usize, OrthoBreakdown> {
        let (r, ar) = a_orthonormalize(self, w, a)?;
        self.vectors.push(r);
        self.a_vectors.push(ar);
        Ok(self.vectors.len() - 1)
    }

    /// `Σ cᵢ vᵢ`; missing trailing coefficients count as zero.
    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.vectors.first().map_or(0, Vec::len);
        let mut out = vec![0.0; n];
        for (c, v) in coeffs.iter().zip(&self.vectors) {
            axpy(*c, v, &mut out);
        }
        out
    }
}

/// Two-pass Gram–Schmidt in `⟨·,·⟩_A`.
///
/// Returns the unit `A`-norm remainder `r` and `A r`, or a breakdown when the
/// remainder's `A`-norm falls below `1e-12` times that of `w`.
pub fn a_orthonormalize<Op: LinearOperator + ?Sized>(
    basis: &ABasis,
    w: &[f64],
    a: &Op,
) -> Result<(Vec<f64>, Vec<f64>), OrthoBreakdown> {
    let mut r = w.to_vec();
    let mut ar = a.apply(&r);
    let norm_before = dot(&r, &ar).max(0.0).sqrt();
    if norm_before == 0.0 || !norm_before.is_finite() {
        return Err(OrthoBreakdown {
            norm_before,
            norm_after: 0.0,
        });
    }
    for _ in 0..2 {
        for (v, av) in basis.vectors.iter().zip(&basis.a_vectors) {
            let c = dot(av, &r);
            axpy(-c, v, &mut r);
            axpy(-c, av, &mut ar);
        }
    }
    // recompute A r rather than trusting the updated product
    let ar = a.apply(&r);
    let norm_after = dot(&r, &ar).max(0.0).sqrt();
    if !(norm_after >= 1e-12 * norm_before) {
        return Err(OrthoBreakdown {
            norm_before,
            norm_after,
        });
    }
    let inv = 1.0 / norm_after;
    let mut ar = ar;
    scale_in_place(inv, &mut r);
    scale_in_place(inv, &mut ar);
    Ok((r, ar))
}

/// Snapshot of the extended Krylov process after `s` iterations.
#[derive(Debug, Clone)]
pub struct EksmState {
    basis: ABasis,
    b_vectors: Vec<Vec<f64>>,
    h: Option<DenseSymMatrix>,
    /// Next candidates `M·q₊` and `M⁻¹·q₋`, computed lazily.
    frontier_u: Option<Vec<f64>>,
    frontier_v: Option<Vec<f64>>,
    last_pos: Option<usize>,
    last_neg: Option<usize>,
    s: usize,
    y_norm_a: f64,
    invariant: bool,
}

impl EksmState {
    pub fn basis(&self) -> &ABasis {
        &self.basis
    }

    /// `VᵀBV` for the current basis.
    pub fn h(&self) -> Option<&DenseSymMatrix> {
        self.h.as_ref()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// True once a new direction fell inside the span: the subspace is
    /// invariant under `M` and the projected solution is exact.
    pub fn is_invariant(&self) -> bool {
        self.invariant
    }

    /// `B v` for every basis column.
    pub fn b_vectors(&self) -> &[Vec<f64>] {
        &self.b_vectors
    }

    /// Indices of the columns built from powers of `M` and of `M⁻¹`, in
    /// insertion order.
    pub fn newest_columns(&self) -> (Option<usize>, Option<usize>) {
        (self.last_pos, self.last_neg)
    }
}

/// Which matrix of the pencil defines the inner product. With `A`,
/// `M = A⁻¹B` and the basis is `A`-orthonormal; with `B`, the roles swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PencilSide {
    #[default]
    A,
    B,
}

impl PencilSide {
    fn other(self) -> Self {
        match self {
            PencilSide::A => PencilSide::B,
            PencilSide::B => PencilSide::A,
        }
    }
}

/// The function applied to `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixFunction {
    #[default]
    InvSqrt,
    Sqrt,
}

impl MatrixFunction {
    fn eval(self, z: f64) -> f64 {
        match self {
            MatrixFunction::InvSqrt => 1.0 / z.sqrt(),
            MatrixFunction::Sqrt => z.sqrt(),
        }
    }
}

/// Extended Krylov iteration approximating `f(M) y`, by default
/// `(A⁻¹B)^{-1/2} y`.
pub struct ExtendedKrylov<'p> {
    pencil: &'p PencilOperator,
    side: PencilSide,
    function: MatrixFunction,
    state: EksmState,
}

impl<'p> ExtendedKrylov<'p> {
    pub fn new(pencil: &'p PencilOperator, y: &[f64]) -> Result<Self, EksmError> {
        Self::with_function(pencil, y, PencilSide::A, MatrixFunction::InvSqrt)
    }

    pub fn with_function(
        pencil: &'p PencilOperator,
        y: &[f64],
        side: PencilSide,
        function: MatrixFunction,
    ) -> Result<Self, EksmError> {
        let (inner, _) = pencil.oriented(side);
        let y_norm_a = dot(y, &inner.apply(y)).max(0.0).sqrt();
        if !(y_norm_a > 0.0) {
            return Err(EksmError::ZeroRhs);
        }
        let v0 = pencil.solve_side(side.other(), &inner.apply(y))?;
        Ok(Self {
            pencil,
            side,
            function,
            state: EksmState {
                basis: ABasis::new(),
                b_vectors: Vec::new(),
                h: None,
                frontier_u: Some(y.to_vec()),
                frontier_v: Some(v0),
                last_pos: None,
                last_neg: None,
                s: 0,
                y_norm_a,
                invariant: false,
            },
        })
    }

    pub fn state(&self) -> &EksmState {
        &self.state
    }

    /// True when no further iteration can enlarge the space.
    pub fn exhausted(&self) -> bool {
        self.state.invariant || self.state.basis.len() >= self.pencil.n()
    }

    /// Runs one iteration and returns the coefficients of the new
    /// approximant in the current basis.
    pub fn step(&mut self) -> Result<Vec<f64>, EksmError> {
        let p = self.pencil;
        let side = self.side;
        let f = self.function;
        let (inner, outer) = p.oriented(side);
        let st = &mut self.state;
        if !st.invariant {
            if st.frontier_u.is_none() {
                let bq = &st.b_vectors[st.last_pos.expect("positive column exists")];
                st.frontier_u = Some(p.solve_side(side, bq)?);
            }
            if st.frontier_v.is_none() {
                if let Some(neg) = st.last_neg {
                    let aq = &st.basis.a_vectors[neg];
                    st.frontier_v = Some(p.solve_side(side.other(), aq)?);
                }
            }
            let u = st.frontier_u.take().expect("set above");
            match st.basis.push(&u, inner) {
                Ok(idx) => {
                    st.b_vectors.push(outer.apply(&st.basis.vectors[idx]));
                    st.last_pos = Some(idx);
                }
                Err(_) => st.invariant = true,
            }
            if let Some(v) = st.frontier_v.take() {
                if !st.invariant && st.basis.len() < p.n() {
                    match st.basis.push(&v, inner) {
                        Ok(idx) => {
                            st.b_vectors.push(outer.apply(&st.basis.vectors[idx]));
                            st.last_neg = Some(idx);
                        }
                        Err(_) => st.invariant = true,
                    }
                }
            }
            st.s += 1;
        }

        let m = st.basis.len();
        let mut h = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let v = dot(&st.basis.vectors[i], &st.b_vectors[j]);
                h[i * m + j] = v;
                h[j * m + i] = v;
            }
        }
        let h = DenseSymMatrix::new(m, h).map_err(|_| EksmError::IndefinitePencil {
            min_eigenvalue: f64::NAN,
        })?;
        let eig = dense_sym_eig(&h);
        let min = eig.values[0];
        if !(min > 0.0) {
            return Err(EksmError::IndefinitePencil {
                min_eigenvalue: min,
            });
        }
        // f(H) e₁ · ‖y‖
        let fv: Vec<f64> = eig.values.iter().map(|&z| f.eval(z)).collect();
        let coeffs: Vec<f64> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|k| eig.vectors[(i, k)] * eig.vectors[(0, k)] * fv[k])
                    .sum::<f64>()
                    * st.y_norm_a
            })
            .collect();
        st.h = Some(h);
        Ok(coeffs)
    }

    pub fn approximant(&self, coeffs: &[f64]) -> Vec<f64> {
        self.state.basis.combine(coeffs)
    }
}

#[derive(Debug, Clone)]
pub struct EksmOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Relative `A`-norm change at the last iteration.
    pub change: f64,
    pub basis_size: usize,
}

/// `x ≈ (A⁻¹B)^{-1/2} y`.
pub fn eksm_apply_inv_sqrt(
    p: &PencilOperator,
    y: &[f64],
    cfg: &EksmConfig,
) -> Result<EksmOutcome, EksmError> {
    eksm_apply(p, y, PencilSide::A, MatrixFunction::InvSqrt, cfg)
}

/// `x ≈ f(M) y` with `M = A⁻¹B` on side `A` and `M = B⁻¹A` on side `B`.
pub fn eksm_apply(
    p: &PencilOperator,
    y: &[f64],
    side: PencilSide,
    f: MatrixFunction,
    cfg: &EksmConfig,
) -> Result<EksmOutcome, EksmError> {
    let mut eksm = ExtendedKrylov::with_function(p, y, side, f)?;
    let mut prev: Option<Vec<f64>> = None;
    let mut change = f64::INFINITY;
    loop {
        let coeffs = eksm.step()?;
        if let Some(prev) = &prev {
            // the basis is A-orthonormal, so A-norms are coefficient 2-norms
            let mut diff = 0.0;
            for (i, c) in coeffs.iter().enumerate() {
                let d = c - prev.get(i).copied().unwrap_or(0.0);
                diff += d * d;
            }
            change = diff.sqrt() / norm2(prev).max(f64::MIN_POSITIVE);
        }
        let s = eksm.state().s();
        if eksm.exhausted() || change <= cfg.tol {
            let x = eksm.approximant(&coeffs);
            return Ok(EksmOutcome {
                x,
                iterations: s,
                change: if eksm.exhausted() { 0.0 } else { change },
                basis_size: eksm.state().basis().len(),
            });
        }
        if s >= cfg.max_s {
            if cfg.fallback_tol.is_some_and(|f| change <= f) {
                log::debug!("eksm accepted change {change:.2e} at s = {s}");
                return Ok(EksmOutcome {
                    x: eksm.approximant(&coeffs),
                    iterations: s,
                    change,
                    basis_size: eksm.state().basis().len(),
                });
            }
            return Err(EksmError::NonConvergence {
                iterations: s,
                change,
                last_iterate: eksm.approximant(&coeffs),
            });
        }
        prev = Some(coeffs);
    }
}

/// An SPD operator whose smallest eigenpairs are sought by inverse
/// iteration.
pub trait InverseIteration {
    fn dim(&self) -> usize;

    /// `Op⁻¹ x`
    fn apply_inverse(&self, x: &[f64]) -> Result<Vec<f64>, EigenError>;

    /// `Op x`, used for the final Rayleigh quotient and residual.
    fn apply_op(&self, x: &[f64]) -> Result<Vec<f64>, EigenError>;
}

impl InverseIteration for PencilOperator {
    fn dim(&self) -> usize {
        self.n()
    }

    /// `(A⁻¹B)^{-1/2} A⁻¹ x`, evaluated as the equal `(A⁻¹B)^{1/2} B⁻¹ x`
    /// (from `A # B = B # A`). The square root damps the rounding error on
    /// the smallest projected eigenvalues, which the inverse square root
    /// would amplify.
    fn apply_inverse(&self, x: &[f64]) -> Result<Vec<f64>, EigenError> {
        let u = self.solve_b(x)?;
        if norm2(&u) == 0.0 {
            return Ok(u);
        }
        Ok(eksm_apply(self, &u, PencilSide::A, MatrixFunction::Sqrt, &self.eksm)?.x)
    }

    /// `A (A⁻¹B)^{1/2} x`
    fn apply_op(&self, x: &[f64]) -> Result<Vec<f64>, EigenError> {
        if norm2(x) == 0.0 {
            return Ok(vec![0.0; x.len()]);
        }
        let r = eksm_apply(self, x, PencilSide::A, MatrixFunction::Sqrt, &self.eksm)?.x;
        Ok(self.a.apply(&r))
    }
}

/// A single sparse SPD matrix, inverted by PCG.
#[derive(Debug, Clone)]
pub struct SparseInverse {
    m: SparseSymMatrix,
    pc: IcPreconditioner,
    pcg: PcgConfig,
}

impl SparseInverse {
    pub fn new(m: SparseSymMatrix) -> Self {
        let pc = incomplete_cholesky(&m);
        Self {
            m,
            pc,
            pcg: inner_pcg(),
        }
    }

    pub fn with_pcg(mut self, pcg: PcgConfig) -> Self {
        self.pcg = pcg;
        self
    }

    pub fn matrix(&self) -> &SparseSymMatrix {
        &self.m
    }
}

impl InverseIteration for SparseInverse {
    fn dim(&self) -> usize {
        self.m.n()
    }

    fn apply_inverse(&self, x: &[f64]) -> Result<Vec<f64>, EigenError> {
        Ok(pcg_solve(&self.m, x, &self.pc, &self.pcg)?.x)
    }

    fn apply_op(&self, x: &[f64]) -> Result<Vec<f64>, EigenError> {
        Ok(self.m.apply(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpmConfig {
    /// Stop when `‖x_{k+1} − x_k‖₂ ≤ tol` after sign alignment.
    pub tol: f64,
    pub max_iter: usize,
    /// Seed of the deterministic start vector.
    pub seed: u64,
    /// Return the last iterate, marked unconverged, instead of an error when
    /// `max_iter` is reached. Useful when only the span of several nearly
    /// degenerate eigenvectors matters.
    pub accept_unconverged: bool,
}

impl Default for IpmConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 500,
            seed: 0x5eed,
            accept_unconverged: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    /// Rayleigh quotient `xᵀ Op x` at the returned vector.
    pub value: f64,
    pub vector: Vec<f64>,
    /// `‖Op x − value·x‖₂`.
    pub residual: f64,
    /// The power-iteration estimate `1 / (xₖᵀ yₖ)` from the last step.
    pub ipm_estimate: f64,
    pub iterations: usize,
    /// False only when returned under [`IpmConfig::accept_unconverged`].
    pub converged: bool,
}

fn project_out(v: &mut [f64], deflate: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in deflate {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}

/// Smallest eigenpair of `op` on the orthogonal complement of `deflate`.
pub fn ipm_smallest_eigenpair<Op: InverseIteration + ?Sized>(
    op: &Op,
    deflate: &[Vec<f64>],
    cfg: &IpmConfig,
) -> Result<EigenPair, EigenError> {
    let n = op.dim();
    if deflate.len() >= n {
        return Err(EigenError::DeflationExhausted);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    project_out(&mut x, deflate);
    let nx = norm2(&x);
    if nx == 0.0 {
        return Err(EigenError::DeflationExhausted);
    }
    scale_in_place(1.0 / nx, &mut x);

    let mut step = f64::INFINITY;
    let mut estimate = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=cfg.max_iter {
        iterations = it;
        let mut y = op.apply_inverse(&x)?;
        project_out(&mut y, deflate);
        let xy = dot(&x, &y);
        estimate = 1.0 / xy;
        let ny = norm2(&y);
        if ny == 0.0 || !ny.is_finite() {
            return Err(EigenError::NonConvergence {
                iterations: it,
                step,
                residual: f64::NAN,
            });
        }
        scale_in_place(1.0 / ny, &mut y);
        let sign = if xy < 0.0 { -1.0 } else { 1.0 };
        step = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - sign * b).powi(2))
            .sum::<f64>()
            .sqrt();
        x = y;
        if step <= cfg.tol {
            converged = true;
            break;
        }
    }
    let ax = op.apply_op(&x)?;
    let value = dot(&x, &ax);
    let residual = ax
        .iter()
        .zip(&x)
        .map(|(a, b)| (a - value * b).powi(2))
        .sum::<f64>()
        .sqrt();
    if !converged && !cfg.accept_unconverged {
        return Err(EigenError::NonConvergence {
            iterations,
            step,
            residual,
        });
    }
    Ok(EigenPair {
        value,
        vector: x,
        residual,
        ipm_estimate: estimate,
        iterations,
        converged,
    })
}

#[derive(Debug, Clone)]
pub struct SmallestEigenpairs {
    /// In computation order, which is ascending when deflation is clean.
    pub pairs: Vec<EigenPair>,
    /// Set when a later value came out below an earlier one by more than
    /// `1e-8`.
    pub deflation_warning: bool,
}

impl SmallestEigenpairs {
    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }
}

/// The `k` smallest eigenpairs by sequential deflation.
pub fn smallest_k_eigenpairs<Op: InverseIteration + ?Sized>(
    op: &Op,
    k: usize,
    cfg: &IpmConfig,
) -> Result<SmallestEigenpairs, EigenError> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(EigenError::TooMany { k, n });
    }
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(k);
    let mut deflate: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut deflation_warning = false;
    for i in 0..k {
        let cfg_i = IpmConfig {
            seed: cfg.seed.wrapping_add(i as u64),
            ..*cfg
        };
        let pair = ipm_smallest_eigenpair(op, &deflate, &cfg_i)?;
        if let Some(prev) = pairs.last() {
            if pair.value < prev.value - 1e-8 * prev.value.abs().max(1.0) {
                log::warn!(
                    "eigenpair {i} value {:e} below previous {:e}; deflation quality is poor",
                    pair.value,
                    prev.value
                );
                deflation_warning = true;
            }
        }
        deflate.push(pair.vector.clone());
        pairs.push(pair);
    }
    Ok(SmallestEigenpairs {
        pairs,
        deflation_warning,
    })
}
