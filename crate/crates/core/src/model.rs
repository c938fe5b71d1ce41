//! The trained model bundle: per-depth scalers and k-means, the
//! full-concatenation scaler, the PCA, and the optional graph-representation
//! head. Frozen after training; inference never mutates it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mlkit::{KMeansModel, PcaModel, Scaler};

/// Training hyperparameters, echoed into every saved model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Random graphs per fitted object.
    pub graphs: usize,
    /// Node count of each training graph.
    pub graph_size: usize,
    /// Depth of neighborhood exploration (description+aggregation rounds).
    pub depth: usize,
    /// K-means clusters for node representation.
    pub clusters: usize,
    /// Final node representation size.
    pub pca_components: usize,
    /// K-means clusters for the graph head; 0 skips the graph model.
    pub graph_clusters: usize,
    /// Lloyd iterations on each k-means' first batch.
    pub kmeans_iterations: usize,
    pub directed: bool,
    /// Node label count used in training; 0 = unlabeled.
    pub node_labels: usize,
    /// Edge label count used in training; 0 = unlabeled.
    pub edge_labels: usize,
    pub master_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            graphs: 200,
            graph_size: 5000,
            depth: 10,
            clusters: 100,
            pca_components: 100,
            graph_clusters: 0,
            kmeans_iterations: 100,
            directed: false,
            node_labels: 0,
            edge_labels: 0,
            master_seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.depth < 1 {
            return fail("depth must be at least 1".into());
        }
        if self.clusters < 2 {
            return fail("clusters must be at least 2".into());
        }
        if self.pca_components < 1 {
            return fail("pca components must be at least 1".into());
        }
        if self.pca_components > self.clusters * self.depth {
            return fail(format!(
                "pca components ({}) must not exceed clusters * depth ({})",
                self.pca_components,
                self.clusters * self.depth
            ));
        }
        if self.graphs < 1 {
            return fail("graphs per fitted object must be at least 1".into());
        }
        if self.graph_size < 2 {
            return fail("training graph size must be at least 2".into());
        }
        if self.graph_size < self.clusters {
            return fail(format!(
                "training graph size ({}) must be at least the cluster count ({})",
                self.graph_size, self.clusters
            ));
        }
        if self.graph_clusters == 1 {
            return fail("graph clusters must be 0 (disabled) or at least 2".into());
        }
        if self.graph_clusters > self.graph_size {
            return fail(format!(
                "graph clusters ({}) must not exceed the training graph size ({})",
                self.graph_clusters, self.graph_size
            ));
        }
        if self.kmeans_iterations < 1 {
            return fail("k-means iterations must be at least 1".into());
        }
        if self.directed && self.edge_labels > 0 {
            return fail("directed graphs with edge labels are not supported".into());
        }
        Ok(())
    }

    /// Width of the degree-initialized representation.
    pub fn init_dim(&self) -> usize {
        if self.directed {
            2 * self.clusters
        } else {
            self.clusters
        }
    }

    /// Width of one aggregation output block.
    pub fn block_dim(&self) -> usize {
        if self.edge_labels > 0 {
            self.clusters * self.edge_labels
        } else if self.directed {
            2 * self.clusters
        } else {
            self.clusters
        }
    }

    /// Input width of the scaler/k-means at `level` (node labels included).
    pub fn level_input_dim(&self, level: usize) -> usize {
        let structural = if level == 0 {
            self.init_dim()
        } else {
            self.block_dim()
        };
        structural + self.node_labels
    }

    /// Width of the concatenated per-depth aggregation blocks.
    pub fn concat_dim(&self) -> usize {
        self.depth * self.block_dim()
    }
}

/// One depth level: the scaler fitted on that level's inputs and the k-means
/// fitted on the scaled inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub scaler: Scaler,
    pub kmeans: KMeansModel,
}

/// Graph-representation head: scaler over PCA outputs plus the graph k-means.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphHead {
    pub scaler: Scaler,
    pub kmeans: KMeansModel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SirgnModel {
    pub config: TrainConfig,
    pub levels: Vec<Level>,
    pub full_scaler: Scaler,
    pub pca: PcaModel,
    pub graph_head: Option<GraphHead>,
}

impl SirgnModel {
    /// Final node embedding width.
    pub fn embedding_dim(&self) -> usize {
        self.config.pca_components
    }

    /// Rejects graphs whose variant (directedness, label configuration) does
    /// not match what the model was trained on.
    pub fn check_compat(&self, g: &Graph) -> Result<()> {
        let cfg = &self.config;
        if g.is_directed() != cfg.directed {
            return Err(Error::VariantMismatch(format!(
                "model trained on {} graphs, input graph is {}",
                kind(cfg.directed),
                kind(g.is_directed())
            )));
        }
        if cfg.node_labels > 0 {
            match g.max_node_label() {
                None if g.node_labels().is_none() => {
                    return Err(Error::VariantMismatch(
                        "model trained with node labels, input graph has none".into(),
                    ));
                }
                Some(max) if max as usize >= cfg.node_labels => {
                    let node = g
                        .node_labels()
                        .and_then(|l| l.iter().position(|&x| x == max))
                        .unwrap_or(0);
                    return Err(Error::NodeLabelOutOfRange {
                        node,
                        label: max,
                        limit: cfg.node_labels,
                    });
                }
                _ => {}
            }
        } else if g.node_labels().is_some() {
            return Err(Error::VariantMismatch(
                "input graph carries node labels, model was trained without".into(),
            ));
        }
        if cfg.edge_labels > 0 {
            if g.edge_count() > 0 && !g.has_edge_labels() {
                return Err(Error::VariantMismatch(
                    "model trained with edge labels, input graph has none".into(),
                ));
            }
            // Range is validated edge-by-edge during aggregation.
        } else if g.has_edge_labels() {
            return Err(Error::VariantMismatch(
                "input graph carries edge labels, model was trained without".into(),
            ));
        }
        Ok(())
    }

    /// Internal consistency of the fitted objects against the config.
    pub fn check_shapes(&self) -> Result<()> {
        let cfg = &self.config;
        let mismatch = |msg: String| Err(Error::ShapeMismatch(msg));
        if self.levels.len() != cfg.depth {
            return mismatch(format!(
                "{} levels stored, config says depth {}",
                self.levels.len(),
                cfg.depth
            ));
        }
        for (l, level) in self.levels.iter().enumerate() {
            let want = cfg.level_input_dim(l);
            if level.scaler.dim() != want {
                return mismatch(format!(
                    "level {l} scaler dim {} != {want}",
                    level.scaler.dim()
                ));
            }
            if level.kmeans.dim() != want || level.kmeans.cluster_count() != cfg.clusters {
                return mismatch(format!("level {l} k-means shape mismatch"));
            }
        }
        if self.full_scaler.dim() != cfg.concat_dim() {
            return mismatch(format!(
                "full scaler dim {} != concat dim {}",
                self.full_scaler.dim(),
                cfg.concat_dim()
            ));
        }
        if self.pca.dim() != cfg.concat_dim() || self.pca.component_count() != cfg.pca_components {
            return mismatch("pca shape mismatch".into());
        }
        match (&self.graph_head, cfg.graph_clusters) {
            (None, 0) => {}
            (Some(head), w) if w >= 2 => {
                if head.scaler.dim() != cfg.pca_components {
                    return mismatch("graph-head scaler dim mismatch".into());
                }
                if head.kmeans.dim() != cfg.pca_components || head.kmeans.cluster_count() != w {
                    return mismatch("graph-head k-means shape mismatch".into());
                }
            }
            (head, w) => {
                return mismatch(format!(
                    "graph head {} but config graph_clusters = {w}",
                    if head.is_some() { "present" } else { "absent" }
                ));
            }
        }
        Ok(())
    }
}

fn kind(directed: bool) -> &'static str {
    if directed {
        "directed"
    } else {
        "undirected"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_published_ones() {
        let cfg = TrainConfig::default();
        assert_eq!(cfg.graphs, 200);
        assert_eq!(cfg.graph_size, 5000);
        assert_eq!(cfg.depth, 10);
        assert_eq!(cfg.clusters, 100);
        assert_eq!(cfg.pca_components, 100);
        assert_eq!(cfg.kmeans_iterations, 100);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn dims_per_variant() {
        let mut cfg = TrainConfig {
            clusters: 4,
            depth: 3,
            ..TrainConfig::default()
        };
        cfg.pca_components = 4;
        assert_eq!(cfg.level_input_dim(0), 4);
        assert_eq!(cfg.level_input_dim(2), 4);
        assert_eq!(cfg.concat_dim(), 12);

        cfg.directed = true;
        assert_eq!(cfg.level_input_dim(0), 8);
        assert_eq!(cfg.level_input_dim(1), 8);
        assert_eq!(cfg.concat_dim(), 24);

        cfg.directed = false;
        cfg.edge_labels = 2;
        cfg.node_labels = 3;
        assert_eq!(cfg.level_input_dim(0), 4 + 3);
        assert_eq!(cfg.level_input_dim(1), 8 + 3);
        assert_eq!(cfg.concat_dim(), 24);
    }

    #[test]
    fn config_validation_rejects_bad_shapes() {
        let bad = [
            TrainConfig {
                pca_components: 1001,
                ..TrainConfig::default()
            },
            TrainConfig {
                directed: true,
                edge_labels: 2,
                ..TrainConfig::default()
            },
            TrainConfig {
                clusters: 1,
                ..TrainConfig::default()
            },
            // Training graphs smaller than the cluster count.
            TrainConfig {
                graph_size: 50,
                ..TrainConfig::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }
}
