//! Offline training on streams of synthetic random graphs.
//!
//! For every depth level a scaler and then a k-means are fitted, each on its
//! own stream of `g` fresh random graphs rolled forward through the already
//! trained levels. The full-concatenation scaler, the PCA, and the optional
//! graph head each get further independent streams; training on disjoint
//! streams is what lets the model generalize to unseen graphs. No user graph
//! is ever read during training.

use std::time::Instant;

use crate::error::Result;
use crate::graph::{generate_random_graph, Graph, RandomGraphSpec};
use crate::kernel;
use crate::matrix::Matrix;
use crate::mlkit::{KMeansInit, KMeansModel, PcaModel, Scaler};
use crate::model::{GraphHead, Level, SirgnModel, TrainConfig};

/// Wall-clock timings of the training phases, in seconds.
#[derive(Clone, Debug, Default)]
pub struct TrainReport {
    pub level_seconds: Vec<f64>,
    pub full_scaler_seconds: f64,
    pub pca_seconds: f64,
    pub graph_head_seconds: Option<f64>,
    pub total_seconds: f64,
}

/// Independent graph streams; every fitted object draws from its own.
#[derive(Clone, Copy)]
enum Stream {
    LevelScaler(usize),
    LevelKMeans(usize),
    FullScaler,
    Pca,
    PcaScaler,
    GraphKMeans,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::LevelScaler(l) => 2 * l as u64,
            Stream::LevelKMeans(l) => 2 * l as u64 + 1,
            Stream::FullScaler => 1 << 32,
            Stream::Pca => (1 << 32) + 1,
            Stream::PcaScaler => (1 << 32) + 2,
            Stream::GraphKMeans => (1 << 32) + 3,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(stream)) ^ index)
}

fn training_graph(cfg: &TrainConfig, stream: Stream, index: u64) -> Result<Graph> {
    let spec = RandomGraphSpec {
        nodes: cfg.graph_size,
        max_degree_factor: 10,
        seed: derive_seed(cfg.master_seed, stream.tag(), index),
        directed: cfg.directed,
        node_labels: cfg.node_labels,
        edge_labels: cfg.edge_labels,
    };
    generate_random_graph(&spec)
}

fn attach_labels(cfg: &TrainConfig, g: &Graph, emb: &Matrix) -> Result<Matrix> {
    if cfg.node_labels == 0 {
        return Ok(emb.clone());
    }
    let labels = g.node_labels().unwrap_or(&[]);
    kernel::attach_node_labels(emb, labels, cfg.node_labels)
}

fn aggregate(cfg: &TrainConfig, g: &Graph, dv: &Matrix) -> Result<Matrix> {
    if cfg.edge_labels > 0 {
        kernel::aggregate_edge_labeled(g, dv, cfg.edge_labels)
    } else if cfg.directed {
        kernel::aggregate_directed(g, dv)
    } else {
        Ok(kernel::aggregate_undirected(g, dv))
    }
}

/// Rolls a graph through the trained prefix of levels and returns the input
/// the next level's scaler/k-means would train on (node labels attached).
pub fn roll_forward(cfg: &TrainConfig, levels: &[Level], g: &Graph) -> Result<Matrix> {
    let mut emb = kernel::degree_init(g, cfg.clusters);
    for level in levels {
        let input = attach_labels(cfg, g, &emb)?;
        let dv = kernel::vertex_description(&input, &level.kmeans, &level.scaler)?;
        emb = aggregate(cfg, g, &dv)?;
    }
    attach_labels(cfg, g, &emb)
}

/// Full forward pass: the `d` post-aggregation blocks concatenated
/// (`|V| x block_dim * d`), before the full scaler and PCA.
pub fn roll_concatenated(cfg: &TrainConfig, levels: &[Level], g: &Graph) -> Result<Matrix> {
    let mut blocks = Vec::with_capacity(levels.len());
    let mut emb = kernel::degree_init(g, cfg.clusters);
    for level in levels {
        let input = attach_labels(cfg, g, &emb)?;
        let dv = kernel::vertex_description(&input, &level.kmeans, &level.scaler)?;
        emb = aggregate(cfg, g, &dv)?;
        blocks.push(emb.clone());
    }
    let refs: Vec<&Matrix> = blocks.iter().collect();
    Ok(Matrix::hstack(&refs))
}

/// PCA-reduced node representations for a training graph; used to fit the
/// graph head.
fn roll_reduced(
    cfg: &TrainConfig,
    levels: &[Level],
    full_scaler: &Scaler,
    pca: &PcaModel,
    g: &Graph,
) -> Result<Matrix> {
    let concat = roll_concatenated(cfg, levels, g)?;
    let scaled = full_scaler.transform(&concat)?;
    pca.transform(&scaled)
}

/// Trains the full model per the configuration. Deterministic: the same
/// config (including `master_seed`) yields a bitwise-identical model.
pub fn train(cfg: &TrainConfig) -> Result<(SirgnModel, TrainReport)> {
    cfg.validate()?;
    let started = Instant::now();
    let mut report = TrainReport::default();

    let mut levels: Vec<Level> = Vec::with_capacity(cfg.depth);
    for l in 0..cfg.depth {
        let level_started = Instant::now();
        let mut scaler = Scaler::new();
        for i in 0..cfg.graphs {
            let g = training_graph(cfg, Stream::LevelScaler(l), i as u64)?;
            let input = roll_forward(cfg, &levels, &g)?;
            scaler.partial_fit(&input)?;
        }
        let mut kmeans = KMeansModel::new(cfg.clusters);
        let init = KMeansInit {
            seed: derive_seed(cfg.master_seed, Stream::LevelKMeans(l).tag(), u64::MAX),
            iterations: cfg.kmeans_iterations,
        };
        for i in 0..cfg.graphs {
            let g = training_graph(cfg, Stream::LevelKMeans(l), i as u64)?;
            let input = roll_forward(cfg, &levels, &g)?;
            let scaled = scaler.transform(&input)?;
            kmeans.partial_fit(&scaled, &init)?;
        }
        levels.push(Level { scaler, kmeans });
        report
            .level_seconds
            .push(level_started.elapsed().as_secs_f64());
    }

    let phase = Instant::now();
    let mut full_scaler = Scaler::new();
    for i in 0..cfg.graphs {
        let g = training_graph(cfg, Stream::FullScaler, i as u64)?;
        let concat = roll_concatenated(cfg, &levels, &g)?;
        full_scaler.partial_fit(&concat)?;
    }
    report.full_scaler_seconds = phase.elapsed().as_secs_f64();

    let phase = Instant::now();
    let mut pca = PcaModel::new(cfg.pca_components);
    for i in 0..cfg.graphs {
        let g = training_graph(cfg, Stream::Pca, i as u64)?;
        let concat = roll_concatenated(cfg, &levels, &g)?;
        let scaled = full_scaler.transform(&concat)?;
        pca.partial_fit(&scaled)?;
    }
    pca.finalize()?;
    report.pca_seconds = phase.elapsed().as_secs_f64();

    let graph_head = if cfg.graph_clusters > 0 {
        let phase = Instant::now();
        let mut pca_scaler = Scaler::new();
        for i in 0..cfg.graphs {
            let g = training_graph(cfg, Stream::PcaScaler, i as u64)?;
            let reduced = roll_reduced(cfg, &levels, &full_scaler, &pca, &g)?;
            pca_scaler.partial_fit(&reduced)?;
        }
        let mut graph_kmeans = KMeansModel::new(cfg.graph_clusters);
        let init = KMeansInit {
            seed: derive_seed(cfg.master_seed, Stream::GraphKMeans.tag(), u64::MAX),
            iterations: cfg.kmeans_iterations,
        };
        for i in 0..cfg.graphs {
            let g = training_graph(cfg, Stream::GraphKMeans, i as u64)?;
            let reduced = roll_reduced(cfg, &levels, &full_scaler, &pca, &g)?;
            let scaled = pca_scaler.transform(&reduced)?;
            graph_kmeans.partial_fit(&scaled, &init)?;
        }
        report.graph_head_seconds = Some(phase.elapsed().as_secs_f64());
        Some(GraphHead {
            scaler: pca_scaler,
            kmeans: graph_kmeans,
        })
    } else {
        None
    };

    report.total_seconds = started.elapsed().as_secs_f64();
    let model = SirgnModel {
        config: cfg.clone(),
        levels,
        full_scaler,
        pca,
        graph_head,
    };
    debug_assert!(model.check_shapes().is_ok());
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> TrainConfig {
        TrainConfig {
            graphs: 3,
            graph_size: 50,
            depth: 2,
            clusters: 4,
            pca_components: 4,
            graph_clusters: 0,
            kmeans_iterations: 20,
            directed: false,
            node_labels: 0,
            edge_labels: 0,
            master_seed: 7,
        }
    }

    #[test]
    fn trained_shapes_match_config() {
        let (model, report) = train(&tiny_config()).unwrap();
        assert_eq!(model.levels.len(), 2);
        for level in &model.levels {
            assert_eq!(level.kmeans.dim(), 4);
            assert_eq!(level.scaler.dim(), 4);
        }
        assert_eq!(model.full_scaler.dim(), 8);
        assert_eq!(model.pca.dim(), 8);
        assert_eq!(model.pca.component_count(), 4);
        assert!(model.graph_head.is_none());
        assert!(model.check_shapes().is_ok());
        assert_eq!(report.level_seconds.len(), 2);
    }

    #[test]
    fn directed_doubles_the_dims() {
        let cfg = TrainConfig {
            directed: true,
            ..tiny_config()
        };
        let (model, _) = train(&cfg).unwrap();
        for level in &model.levels {
            assert_eq!(level.kmeans.dim(), 8);
        }
        assert_eq!(model.full_scaler.dim(), 16);
    }

    #[test]
    fn same_seed_same_model() {
        let (a, _) = train(&tiny_config()).unwrap();
        let (b, _) = train(&tiny_config()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seed_different_model() {
        let (a, _) = train(&tiny_config()).unwrap();
        let (b, _) = train(&TrainConfig {
            master_seed: 8,
            ..tiny_config()
        })
        .unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn roll_forward_level_zero_is_degree_init() {
        let cfg = tiny_config();
        let g = generate_random_graph(&RandomGraphSpec::new(20, 3)).unwrap();
        let m = roll_forward(&cfg, &[], &g).unwrap();
        assert_eq!((m.rows(), m.cols()), (20, 4));
        let degrees = g.degrees();
        for (u, row) in m.iter_rows().enumerate() {
            for &x in row {
                assert_eq!(x, degrees[u] as f64);
            }
        }
    }

    #[test]
    fn cycle_rolls_to_identical_rows() {
        let cfg = tiny_config();
        let (model, _) = train(&cfg).unwrap();
        let n = 12;
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let (cycle, _) = Graph::build(n as usize, false, &edges, None, None, None).unwrap();
        let m = roll_forward(&cfg, &model.levels[..1], &cycle).unwrap();
        let first = m.row(0).to_vec();
        for u in 1..n as usize {
            assert_eq!(m.row(u), first.as_slice());
        }
    }

    #[test]
    fn path_endpoints_roll_identically() {
        let cfg = tiny_config();
        let (model, _) = train(&cfg).unwrap();
        let (path, _) = Graph::build(3, false, &[(0, 1), (1, 2)], None, None, None).unwrap();
        let m = roll_forward(&cfg, &model.levels[..1], &path).unwrap();
        assert_eq!(m.row(0), m.row(2));
        assert_ne!(m.row(0), m.row(1));
    }

    #[test]
    fn shape_sweep_over_variants() {
        for depth in [1usize, 2] {
            for clusters in [2usize, 4] {
                for directed in [false, true] {
                    for (nnl, nel) in [(0usize, 0usize), (3, 0), (0, 3), (3, 3)] {
                        let cfg = TrainConfig {
                            graphs: 1,
                            graph_size: 20,
                            depth,
                            clusters,
                            pca_components: clusters,
                            graph_clusters: 0,
                            kmeans_iterations: 5,
                            directed,
                            node_labels: nnl,
                            edge_labels: nel,
                            master_seed: 1,
                        };
                        if directed && nel > 0 {
                            assert!(cfg.validate().is_err());
                            continue;
                        }
                        let (model, _) = train(&cfg).unwrap();
                        model.check_shapes().unwrap();
                    }
                }
            }
        }
    }
}
