//! Train-once, infer-anywhere structural graph embeddings.
//!
//! Models (per-depth cluster centroids, scalers, and a PCA) are pre-trained
//! on synthetic random graphs, then applied to unseen graphs to produce
//! structural node embeddings and node-order-agnostic graph signatures in
//! time linear in edges.
//!
//! Pipeline:
//! 1. [`trainer::train`] fits the model on streams of seeded random graphs.
//! 2. [`inferencer::embed_nodes`] embeds any compatible graph against the
//!    frozen model; [`inferencer::embed_graph`] pools node memberships into
//!    a `w x w` structural pseudo-adjacency signature.
//! 3. [`store`] persists models bit-exactly; [`metrics`] provides the
//!    centrality ground truths used for regression-style evaluation.
//!
//! ```
//! use sirgn_core::{generate_random_graph, RandomGraphSpec, TrainConfig};
//!
//! let cfg = TrainConfig {
//!     graphs: 2,
//!     graph_size: 40,
//!     depth: 2,
//!     clusters: 4,
//!     pca_components: 4,
//!     kmeans_iterations: 10,
//!     ..TrainConfig::default()
//! };
//! let (model, _) = sirgn_core::trainer::train(&cfg)?;
//!
//! let unseen = generate_random_graph(&RandomGraphSpec::new(100, 7))?;
//! let embedding = sirgn_core::inferencer::embed_nodes(&unseen, &model)?;
//! assert_eq!(embedding.matrix.rows(), 100);
//! assert_eq!(embedding.matrix.cols(), 4);
//! # Ok::<(), sirgn_core::Error>(())
//! ```

pub mod error;
pub mod graph;
pub mod inferencer;
pub mod kernel;
pub mod matrix;
pub mod metrics;
pub mod mlkit;
pub mod model;
pub mod store;
pub mod trainer;

pub use error::{Error, Result};
pub use graph::{generate_random_graph, Graph, RandomGraphSpec};
pub use matrix::Matrix;
pub use model::{SirgnModel, TrainConfig};
