mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use sirgn_core::error::Error;
use sirgn_core::graph::{
    self, generate_random_graph, random_graph_with_edges, Graph, RandomGraphSpec,
};
use sirgn_core::inferencer;
use sirgn_core::metrics::{self, Metric};
use sirgn_core::model::TrainConfig;
use sirgn_core::{store, trainer};

use config::ConfigFile;

/// Structural graph embeddings: train once on random graphs, embed anywhere.
#[derive(Parser)]
#[command(name = "sirgn", version, max_term_width = 100)]
struct Cli {
    /// Flat key=value config file; flags take precedence over file entries.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker threads (default: available cores; 1 = fully serial).
    #[arg(long, global = true, env = "SIRGN_THREADS", value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model on synthetic random graphs and write it to disk.
    Train(TrainArgs),
    /// Embed the nodes of a graph with a trained model.
    EmbedNodes(EmbedNodesArgs),
    /// Embed every graph in a directory into linearized graph signatures.
    EmbedGraphs(EmbedGraphsArgs),
    /// Generate a seeded random graph and write its edge list.
    Randgraph(RandgraphArgs),
    /// Compute a structural metric for every node (CSV output).
    Metrics(MetricsArgs),
    /// Measure node-embedding time over a series of random graphs.
    Bench(BenchArgs),
    /// Regress a structural metric on node embeddings and report held-out R^2.
    EvalR2(EvalR2Args),
}

#[derive(Args)]
struct TrainArgs {
    /// Random graphs per fitted object [default: 200]
    #[arg(long, value_name = "G")]
    graphs: Option<usize>,
    /// Node count of each training graph [default: 5000]
    #[arg(long, value_name = "M")]
    graph_size: Option<usize>,
    /// Depth of neighborhood exploration [default: 10]
    #[arg(long, value_name = "D")]
    depth: Option<usize>,
    /// K-means clusters for node representation [default: 100]
    #[arg(long, value_name = "C")]
    clusters: Option<usize>,
    /// PCA components (final embedding size) [default: 100]
    #[arg(long, value_name = "P")]
    pca: Option<usize>,
    /// Graph-representation clusters; 0 skips the graph head [default: 0]
    #[arg(long, value_name = "W")]
    graph_clusters: Option<usize>,
    /// Lloyd iterations on each k-means' first batch [default: 100]
    #[arg(long, value_name = "T")]
    kmeans_iters: Option<usize>,
    /// Train a directed-graph model.
    #[arg(long)]
    directed: bool,
    /// Node label count for labeled models; 0 = unlabeled [default: 0]
    #[arg(long, value_name = "NNL")]
    node_labels: Option<usize>,
    /// Edge label count for labeled models; 0 = unlabeled [default: 0]
    #[arg(long, value_name = "NEL")]
    edge_labels: Option<usize>,
    /// Master seed; every stream seed derives from it [default: 0]
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Output model path.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbeddingFormat {
    Csv,
    Bin,
}

#[derive(Args)]
struct EmbedNodesArgs {
    /// Trained model file.
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Edge-list file to embed.
    #[arg(long, value_name = "PATH")]
    graph: PathBuf,
    /// Load the graph as directed (must match the model).
    #[arg(long)]
    directed: bool,
    /// Companion node-label file (`node label` per line).
    #[arg(long, value_name = "PATH")]
    labels: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: EmbeddingFormat,
    /// Output path.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct EmbedGraphsArgs {
    /// Trained model file (must include a graph head).
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Directory of edge-list files, one graph per file.
    #[arg(long, value_name = "DIR")]
    graph_dir: PathBuf,
    /// Load graphs as directed (must match the model).
    #[arg(long)]
    directed: bool,
    /// Output CSV path (`graph,sig0,...`).
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct RandgraphArgs {
    /// Node count [default: 100]
    #[arg(long, value_name = "M")]
    nodes: Option<usize>,
    /// Edge target upper bound as a multiple of nodes [default: 10]
    #[arg(long, value_name = "F")]
    max_degree_factor: Option<usize>,
    /// Generator seed [default: 0]
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Generate a directed graph.
    #[arg(long)]
    directed: bool,
    /// Draw node labels uniformly from this many classes [default: 0]
    #[arg(long, value_name = "NNL")]
    node_labels: Option<usize>,
    /// Draw edge labels uniformly from this many classes [default: 0]
    #[arg(long, value_name = "NEL")]
    edge_labels: Option<usize>,
    /// Output edge-list path.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Output path for the node-label file (requires --node-labels).
    #[arg(long, value_name = "PATH")]
    labels_out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Edge-list file.
    #[arg(long, value_name = "PATH")]
    graph: PathBuf,
    /// Metric: degree|pagerank|eigenvector|betweenness|hits|ncn.
    #[arg(long, value_name = "NAME")]
    metric: String,
    /// Load the graph as directed.
    #[arg(long)]
    directed: bool,
    /// Parse (and ignore) a third edge-label column.
    #[arg(long)]
    edge_labeled: bool,
    /// Output CSV path (`node_id,metric,value`); `-` for stdout.
    #[arg(long, value_name = "PATH", default_value = "-")]
    out: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Trained model file.
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Comma-separated node counts, one per measurement.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    nodes_list: Vec<usize>,
    /// Comma-separated edge counts, parallel to --nodes-list.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    edges_list: Vec<usize>,
    /// Graph generator seed [default: 0]
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Timing repeats per graph; the minimum is reported [default: 3]
    #[arg(long, value_name = "N")]
    repeats: Option<usize>,
    /// Output CSV path (`nodes,edges,seconds`); `-` for stdout.
    #[arg(long, value_name = "PATH", default_value = "-")]
    out: String,
}

#[derive(Args)]
struct EvalR2Args {
    /// Node embeddings (CSV or binary, as written by embed-nodes).
    #[arg(long, value_name = "PATH")]
    embeddings: PathBuf,
    /// Edge-list file the embeddings belong to.
    #[arg(long, value_name = "PATH")]
    graph: PathBuf,
    /// Target metric: degree|pagerank|eigenvector|betweenness|hits|ncn.
    #[arg(long, value_name = "NAME")]
    metric: String,
    /// Load the graph as directed.
    #[arg(long)]
    directed: bool,
    /// Parse (and ignore) a third edge-label column.
    #[arg(long)]
    edge_labeled: bool,
    /// Fraction of nodes used for fitting [default: 0.75]
    #[arg(long, value_name = "F")]
    train_fraction: Option<f64>,
    /// Split seed [default: 0]
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
}

/// Exit codes: 0 ok, 1 usage, 2 data error, 3 internal.
enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) => CliError::Usage(e.to_string()),
            Error::DimensionMismatch { .. }
            | Error::NotFitted
            | Error::NotFinalized
            | Error::AlreadyFinalized => CliError::Internal(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let file = match cli.config.as_deref().map(ConfigFile::load).transpose() {
        Ok(file) => file.unwrap_or_default(),
        Err(e) => {
            eprintln!("sirgn: {e}");
            return ExitCode::from(2);
        }
    };

    let threads = cli
        .threads
        .or_else(|| file.get_usize("threads").ok().flatten());
    if let Some(n) = threads {
        if n == 0 {
            eprintln!("sirgn: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("sirgn: failed to configure thread pool: {e}");
            return ExitCode::from(3);
        }
    }

    let result = match cli.command {
        Command::Train(args) => cmd_train(args, &file),
        Command::EmbedNodes(args) => cmd_embed_nodes(args),
        Command::EmbedGraphs(args) => cmd_embed_graphs(args),
        Command::Randgraph(args) => cmd_randgraph(args, &file),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Bench(args) => cmd_bench(args, &file),
        Command::EvalR2(args) => cmd_eval_r2(args, &file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sirgn: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn resolve<T: Copy>(
    flag: Option<T>,
    file: Result<Option<T>, String>,
    default: T,
) -> Result<T, CliError> {
    match flag {
        Some(v) => Ok(v),
        None => Ok(file.map_err(usage)?.unwrap_or(default)),
    }
}

fn cmd_train(args: TrainArgs, file: &ConfigFile) -> Result<(), CliError> {
    let defaults = TrainConfig::default();
    let cfg = TrainConfig {
        graphs: resolve(args.graphs, file.get_usize("graphs"), defaults.graphs)?,
        graph_size: resolve(
            args.graph_size,
            file.get_usize("graph-size"),
            defaults.graph_size,
        )?,
        depth: resolve(args.depth, file.get_usize("depth"), defaults.depth)?,
        clusters: resolve(args.clusters, file.get_usize("clusters"), defaults.clusters)?,
        pca_components: resolve(args.pca, file.get_usize("pca"), defaults.pca_components)?,
        graph_clusters: resolve(
            args.graph_clusters,
            file.get_usize("graph-clusters"),
            defaults.graph_clusters,
        )?,
        kmeans_iterations: resolve(
            args.kmeans_iters,
            file.get_usize("kmeans-iters"),
            defaults.kmeans_iterations,
        )?,
        directed: args.directed || file.get_bool("directed").map_err(usage)?.unwrap_or(false),
        node_labels: resolve(args.node_labels, file.get_usize("node-labels"), 0)?,
        edge_labels: resolve(args.edge_labels, file.get_usize("edge-labels"), 0)?,
        master_seed: resolve(args.seed, file.get_u64("seed"), 0)?,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;

    let (model, report) = trainer::train(&cfg)?;
    for (l, secs) in report.level_seconds.iter().enumerate() {
        eprintln!("level {l}: {secs:.3}s");
    }
    eprintln!("full scaler: {:.3}s", report.full_scaler_seconds);
    eprintln!("pca: {:.3}s", report.pca_seconds);
    if let Some(secs) = report.graph_head_seconds {
        eprintln!("graph head: {secs:.3}s");
    }
    eprintln!("total: {:.3}s", report.total_seconds);
    store::save(&model, &args.out)?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

fn load_graph_for_model(
    path: &std::path::Path,
    directed: bool,
    labels: Option<&PathBuf>,
    edge_labeled: bool,
) -> Result<Graph, CliError> {
    let (g, stats) =
        graph::load_edge_list(path, directed, edge_labeled, labels.map(|p| p.as_path()))?;
    if stats.self_loops_dropped > 0 || stats.duplicates_dropped > 0 {
        eprintln!(
            "warning: dropped {} self-loops and {} duplicate edges",
            stats.self_loops_dropped, stats.duplicates_dropped
        );
    }
    Ok(g)
}

fn cmd_embed_nodes(args: EmbedNodesArgs) -> Result<(), CliError> {
    let model = store::load(&args.model)?;
    let g = load_graph_for_model(
        &args.graph,
        args.directed,
        args.labels.as_ref(),
        model.config.edge_labels > 0,
    )?;
    let started = Instant::now();
    let emb = inferencer::embed_nodes(&g, &model)?;
    eprintln!(
        "embedded {} nodes / {} edges in {:.3}s",
        g.node_count(),
        g.edge_count(),
        started.elapsed().as_secs_f64()
    );
    let out = std::fs::File::create(&args.out)?;
    let mut out = std::io::BufWriter::new(out);
    match args.format {
        EmbeddingFormat::Csv => inferencer::write_embedding_csv(&mut out, &emb)?,
        EmbeddingFormat::Bin => inferencer::write_embedding_binary(&mut out, &emb.matrix)?,
    }
    Ok(())
}

fn cmd_embed_graphs(args: EmbedGraphsArgs) -> Result<(), CliError> {
    let model = store::load(&args.model)?;
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&args.graph_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Data(format!(
            "no graph files in {}",
            args.graph_dir.display()
        )));
    }
    let mut graphs = Vec::new();
    let mut names = Vec::new();
    for p in &paths {
        let g = load_graph_for_model(p, args.directed, None, model.config.edge_labels > 0)?;
        names.push(
            p.file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
        );
        graphs.push(g);
    }
    let results = inferencer::embed_many(&graphs, &model);

    let out = std::fs::File::create(&args.out)?;
    let mut out = std::io::BufWriter::new(out);
    let w = model.config.graph_clusters;
    use std::io::Write as _;
    write!(out, "graph")?;
    for j in 0..w * w {
        write!(out, ",sig{j}")?;
    }
    writeln!(out)?;
    let mut failures = 0usize;
    for (i, result) in results.into_iter().enumerate() {
        match result {
            Ok(sig) => {
                write!(out, "{}", names[i])?;
                for &x in sig.linearized() {
                    write!(out, ",{x}")?;
                }
                writeln!(out)?;
            }
            Err(e) => {
                failures += 1;
                eprintln!("graph {i} ({}): {e}", names[i]);
            }
        }
    }
    if failures > 0 {
        return Err(CliError::Data(format!(
            "{failures} graph(s) failed to embed"
        )));
    }
    Ok(())
}

fn cmd_randgraph(args: RandgraphArgs, file: &ConfigFile) -> Result<(), CliError> {
    let spec = RandomGraphSpec {
        nodes: args.nodes.unwrap_or(100),
        max_degree_factor: args.max_degree_factor.unwrap_or(10),
        seed: resolve(args.seed, file.get_u64("seed"), 0)?,
        directed: args.directed,
        node_labels: args.node_labels.unwrap_or(0),
        edge_labels: args.edge_labels.unwrap_or(0),
    };
    if args.labels_out.is_some() && spec.node_labels == 0 {
        return Err(usage("--labels-out requires --node-labels"));
    }
    let g = generate_random_graph(&spec)?;
    let out = std::fs::File::create(&args.out)?;
    graph::write_edge_list(&g, std::io::BufWriter::new(out))?;
    if let Some(labels_out) = &args.labels_out {
        let out = std::fs::File::create(labels_out)?;
        graph::write_node_labels(&g, std::io::BufWriter::new(out))?;
    }
    eprintln!(
        "wrote {} ({} nodes, {} edges)",
        args.out.display(),
        g.node_count(),
        g.edge_count()
    );
    Ok(())
}

fn open_out(path: &str) -> Result<Box<dyn std::io::Write>, CliError> {
    if path == "-" {
        Ok(Box::new(std::io::stdout().lock()))
    } else {
        Ok(Box::new(std::io::BufWriter::new(std::fs::File::create(
            path,
        )?)))
    }
}

fn cmd_metrics(args: MetricsArgs) -> Result<(), CliError> {
    let metric = Metric::parse(&args.metric)
        .ok_or_else(|| usage(format!("unknown metric `{}`", args.metric)))?;
    let g = load_graph_for_model(&args.graph, args.directed, None, args.edge_labeled)?;
    let columns = metric.compute(&g)?;
    let mut out = open_out(&args.out)?;
    writeln!(out, "node_id,metric,value")?;
    for column in &columns {
        for (u, &v) in column.values.iter().enumerate() {
            writeln!(out, "{},{},{}", g.name_of(u), column.name, v)?;
        }
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs, file: &ConfigFile) -> Result<(), CliError> {
    if args.nodes_list.is_empty() || args.nodes_list.len() != args.edges_list.len() {
        return Err(usage(
            "--nodes-list and --edges-list must be non-empty and equal length",
        ));
    }
    let repeats = args.repeats.unwrap_or(3).max(1);
    let seed = resolve(args.seed, file.get_u64("seed"), 0)?;
    let model = store::load(&args.model)?;
    let mut out = open_out(&args.out)?;
    writeln!(out, "nodes,edges,seconds")?;
    for (i, (&nodes, &edges)) in args.nodes_list.iter().zip(&args.edges_list).enumerate() {
        let spec = RandomGraphSpec {
            nodes,
            max_degree_factor: 10,
            seed: seed.wrapping_add(i as u64),
            directed: model.config.directed,
            node_labels: model.config.node_labels,
            edge_labels: model.config.edge_labels,
        };
        let g = random_graph_with_edges(&spec, edges)?;
        let mut best = f64::INFINITY;
        for _ in 0..repeats {
            let started = Instant::now();
            let emb = inferencer::embed_nodes(&g, &model)?;
            let elapsed = started.elapsed().as_secs_f64();
            std::hint::black_box(&emb);
            best = best.min(elapsed);
        }
        writeln!(out, "{},{},{best:.6}", g.node_count(), g.edge_count())?;
    }
    Ok(())
}

fn cmd_eval_r2(args: EvalR2Args, file: &ConfigFile) -> Result<(), CliError> {
    let metric = Metric::parse(&args.metric)
        .ok_or_else(|| usage(format!("unknown metric `{}`", args.metric)))?;
    let train_fraction = resolve(args.train_fraction, file.get_f64("train-fraction"), 0.75)?;
    let seed = resolve(args.seed, file.get_u64("seed"), 0)?;
    let g = load_graph_for_model(&args.graph, args.directed, None, args.edge_labeled)?;

    let bytes = std::fs::read(&args.embeddings)?;
    let matrix = if bytes.starts_with(b"ISGNEMB1") {
        inferencer::read_embedding_binary(bytes.as_slice())?
    } else {
        let (ids, matrix) = inferencer::read_embedding_csv(bytes.as_slice())?;
        reorder_to_graph(&g, ids, matrix)?
    };
    if matrix.rows() != g.node_count() {
        return Err(CliError::Data(format!(
            "embeddings have {} rows but the graph has {} nodes",
            matrix.rows(),
            g.node_count()
        )));
    }

    for column in metric.compute(&g)? {
        match metrics::r2_score(&matrix, &column.values, train_fraction, seed) {
            Ok(r2) => println!("{},r2,{r2}", column.name),
            Err(Error::DegenerateTarget) => println!("{},r2,undefined", column.name),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

/// CSV rows may be in any order; match them to the graph by node id.
fn reorder_to_graph(
    g: &Graph,
    ids: Vec<String>,
    matrix: sirgn_core::Matrix,
) -> Result<sirgn_core::Matrix, CliError> {
    let mut index_of = std::collections::HashMap::new();
    match g.names() {
        Some(names) => {
            for (i, name) in names.iter().enumerate() {
                index_of.insert(name.clone(), i);
            }
        }
        None => {
            for i in 0..g.node_count() {
                index_of.insert(i.to_string(), i);
            }
        }
    }
    let mut rows = vec![Vec::new(); g.node_count()];
    for (row, id) in ids.iter().enumerate() {
        let &i = index_of
            .get(id)
            .ok_or_else(|| CliError::Data(format!("embedding row `{id}` is not in the graph")))?;
        rows[i] = matrix.row(row).to_vec();
    }
    if rows.iter().any(Vec::is_empty) {
        return Err(CliError::Data("embeddings do not cover every node".into()));
    }
    Ok(sirgn_core::Matrix::from_rows(rows))
}

use std::io::Write as _;
