//! Lie-group batch normalization, its momentum and domain-specific
//! variants, and the pullback computation for SPD families.

mod momentum;
mod pullback;
mod state;

pub use momentum::{gamma_train, DsmBank, MLieBn, TrainMomentum};
pub use pullback::{liebn_via_pullback, MatrixEuclidean, Scaled};
pub use state::{batch_statistics, LieBn, LieBnRecord, Mode};
