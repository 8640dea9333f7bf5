//! Density-matrix block expansion and Gram-matrix signatures for bipartite
//! states, with an exact simulator of Bell-measurement teleportation through
//! correlated and entangled two-qubit channels.
//!
//! The numeric layer ([`tensor`]) is a small dense complex linear algebra
//! kit; everything else builds on it.

pub mod error;
pub mod signature;
pub mod states;
pub mod teleport;
pub mod tensor;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use signature::{
    analyze, expand, product_test, reconstruct, signature, signature_default, x_matrix,
    x_matrix_coefficient_form, Analysis, BasisKind, ExpansionBlocks, ProductTest, Signature,
    XMatrix, DEFAULT_PRODUCT_TOL,
};
pub use states::{
    bell_channel, classical_corr_channel, density_from_pure, mixture, product_state,
    reduce_tripartite, separable_mixture, tripartite_pure, BipartiteDensityMatrix, DensityMatrix,
    PairSelector, PureState, STATE_TOL,
};
pub use teleport::{
    aggregate_coherence, bell_basis, channel_comparison, coherence_info, teleport,
    ChannelComparison, InputStateC, TeleportOutcome, P_FLOOR,
};
pub use tensor::{
    embed_op, hermitian_eig, hs_inner, kron, kron_vec, partial_trace, rank_by_eigs, ComplexMatrix,
    Dims, HermitianEigen, DEFAULT_RANK_TOL, HERMITIAN_TOL,
};
