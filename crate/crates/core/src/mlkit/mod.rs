//! Learned primitives with partial-fit contracts: standardizing scaler,
//! mini-batch k-means, and incremental PCA.
//!
//! Each model is fitted incrementally over a stream of batches, then frozen;
//! after fitting, transform/distance calls are read-only and safe to share
//! across threads.

mod kmeans;
mod pca;
mod scaler;

pub use kmeans::{KMeansInit, KMeansModel};
pub use pca::PcaModel;
pub use scaler::Scaler;
