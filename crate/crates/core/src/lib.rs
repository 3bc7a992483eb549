//! Lie-group batch normalization on SPD manifolds, rotation groups and
//! Euclidean space, with the matrix kernels and manifold statistics it
//! rests on.

pub mod error;
pub mod gaussian;
pub mod group;
pub mod harness;
pub mod liebn;
pub mod matkernels;
pub mod random;
pub mod so;
pub mod spd;

pub use error::{Error, Result};
pub use group::{BackendDescriptor, BackendFamily, BatchStats, Euclidean, LieGroup};
