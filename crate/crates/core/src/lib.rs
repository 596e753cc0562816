//! Spectral clustering of signed graphs through the geometric mean of the
//! positive-part Laplacian and the negative-part signless Laplacian.
//!
//! The crate is layered bottom-up: [`sparse`] storage and [`pcg`] solves,
//! [`dense`] reference routines, [`graph`] Laplacians, the matrix-free
//! eigensolver in [`geomean`], the stochastic block model in [`sbm`] and the
//! embedding/k-means pipeline in [`clustering`].

pub mod clustering;
pub mod dense;
pub mod error;
pub mod geomean;
pub mod graph;
pub mod pcg;
pub mod precond;
pub mod sbm;
pub mod sparse;

pub use error::{EigenError, EksmError, GraphError, LinalgError, SolveError};
pub use geomean::{
    eksm_apply, eksm_apply_inv_sqrt, smallest_k_eigenpairs, EigenPair, EksmConfig, IpmConfig,
    MatrixFunction, PencilOperator, PencilSide,
};
pub use graph::{ShiftConfig, SignedGraph, SignedLaplacianKind};
pub use sparse::{LinearOperator, SparseSymMatrix};

/// Seed for the `index`-th independent task derived from `base`
/// (SplitMix64 finaliser), so results do not depend on thread scheduling.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(index.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
