//! Toda flows on isospectral manifolds of real symmetric matrices, their
//! boundary limits, and the spectral polytopes that parametrize their slices.
//!
//! Library indices are 0-based throughout.

pub mod bfr;
pub mod error;
pub mod examples;
pub mod flow;
pub mod linalg;
pub mod matrix;
pub mod polytope;
pub mod sets;
pub mod sieve;
pub mod tolerance;

pub use bfr::{bfr, bfr_jacobian, forward, invert_bfr, BfrPoint, Inversion, NewtonOptions};
pub use error::{Error, Result};
pub use flow::{
    normalize_direction, partial_trace, partial_trace_rate, toda_action, toda_trajectory,
    Normalization, TodaDirection,
};
pub use linalg::{qr_pos, reconstruct, sym_eig, QrFactors, SpectralPair};
pub use matrix::DenseMatrix;
pub use polytope::{
    accessible_vertices, extremal_vertex, is_spectrally_complete, spectral_polytope, HalfSpace,
    Permutation, SpectralPolytope,
};
pub use sieve::{boundary_limit, flow_limit, j_of_i, sieve, OrderedPartition, SievedDecomposition};
pub use tolerance::Tolerances;
