use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("entry ({row}, {col}) out of bounds for order {n}")]
    IndexOutOfBounds { row: usize, col: usize, n: usize },
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("malformed CSR arrays: {0}")]
    MalformedCsr(&'static str),
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("order {n} exceeds the dense oracle cap {cap}")]
    OracleCapExceeded { n: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("right-hand side has length {found}, operator has order {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("PCG did not converge in {iterations} iterations (relative residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error(
        "PCG breakdown at iteration {iteration}: non-positive curvature, operator is indefinite"
    )]
    Breakdown { iteration: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EksmError {
    #[error("right-hand side has zero A-norm")]
    ZeroRhs,
    #[error("projected matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e}); pencil is indefinite")]
    IndefinitePencil { min_eigenvalue: f64 },
    #[error("EKSM did not converge after {iterations} iterations (relative change {change:e})")]
    NonConvergence {
        iterations: usize,
        change: f64,
        last_iterate: Vec<f64>,
    },
    #[error("inner solve failed: {0}")]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("inverse power method did not converge in {iterations} iterations (step {step:e}, residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        step: f64,
        residual: f64,
    },
    #[error("requested {k} eigenpairs of an order-{n} operator")]
    TooMany { k: usize, n: usize },
    #[error("deflation space spans the whole space")]
    DeflationExhausted,
    #[error(transparent)]
    Eksm(#[from] EksmError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("W+ has order {plus} but W- has order {minus}")]
    OrderMismatch { plus: usize, minus: usize },
    #[error("negative weight {value} at ({row}, {col})")]
    NegativeWeight { row: usize, col: usize, value: f64 },
    #[error("non-zero diagonal entry at vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("shift parameters invalid: {0}")]
    InvalidShift(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum SbmError {
    #[error("invalid SBM parameters: {0}")]
    InvalidParams(String),
    #[error("conditioning event is empty on this grid; fraction undefined")]
    EmptyConditioning,
    #[error("grid needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error("bound requires k >= 2, got {0}")]
    InvalidK(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("k = {k} is invalid for {n} points")]
    InvalidK { k: usize, n: usize },
    #[error("label vectors differ in length ({pred} vs {truth})")]
    SizeMismatch { pred: usize, truth: usize },
    #[error("ground truth has empty class {0}")]
    EmptyTruthClass(usize),
    #[error("neighbour count {k} too large for {n} points")]
    TooManyNeighbours { k: usize, n: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
