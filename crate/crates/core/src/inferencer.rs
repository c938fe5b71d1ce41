//! Node inference and graph pooling against a frozen model.
//!
//! A single model serves any number of concurrent embed calls; inference
//! never mutates it. Runtime is linear in edges at fixed depth and cluster
//! count.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernel;
use crate::matrix::Matrix;
use crate::model::SirgnModel;
use crate::trainer;

/// Final PCA-reduced node representations plus the original-id map.
#[derive(Clone, Debug)]
pub struct NodeEmbedding {
    pub matrix: Matrix,
    /// Original node ids, parallel to the matrix rows, when the graph had
    /// non-dense ids.
    pub names: Option<Vec<String>>,
}

/// The `w x w` structural pseudo-adjacency matrix: entry `(i, j)` sums
/// `r_u[i] * r_v[j]` over edge traversals, so node order has no effect.
/// Undirected graphs traverse each edge from both endpoints (total mass
/// `2|E|`); directed graphs traverse out-neighbor lists (mass `|E|`).
#[derive(Clone, Debug, PartialEq)]
pub struct GraphSignature {
    matrix: Matrix,
}

impl GraphSignature {
    pub fn cluster_count(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Row-major linearization of length `w^2`.
    pub fn linearized(&self) -> &[f64] {
        self.matrix.data()
    }

    pub fn total(&self) -> f64 {
        self.matrix.data().iter().sum()
    }
}

/// Concatenated per-depth aggregation blocks, before the full scaler and the
/// PCA. Nodes with isomorphic k-hop neighborhoods get exactly equal rows.
pub fn embed_nodes_raw(g: &Graph, model: &SirgnModel) -> Result<Matrix> {
    model.check_compat(g)?;
    trainer::roll_concatenated(&model.config, &model.levels, g)
}

/// Full node inference: degree init, `d` description+aggregation rounds,
/// concatenation, full-scaler normalization, PCA reduction.
pub fn embed_nodes(g: &Graph, model: &SirgnModel) -> Result<NodeEmbedding> {
    let concat = embed_nodes_raw(g, model)?;
    let scaled = model.full_scaler.transform(&concat)?;
    let reduced = model.pca.transform(&scaled)?;
    Ok(NodeEmbedding {
        matrix: reduced,
        names: g.names().map(<[String]>::to_vec),
    })
}

/// Graph pooling: node embeddings are described against the graph k-means
/// and the resulting membership rows are combined over every edge traversal.
pub fn embed_graph(g: &Graph, model: &SirgnModel) -> Result<GraphSignature> {
    let head = model.graph_head.as_ref().ok_or(Error::MissingGraphModel)?;
    let nodes = embed_nodes(g, model)?;
    let memberships = kernel::vertex_description(&nodes.matrix, &head.kmeans, &head.scaler)?;

    let w = head.kmeans.cluster_count();
    let mut pooled = Matrix::zeros(w, w);
    for u in 0..g.node_count() {
        let r_u = memberships.row(u);
        for &v in g.out_neighbors(u) {
            let r_v = memberships.row(v as usize);
            for (i, &a) in r_u.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let dst = pooled.row_mut(i);
                for (d, &b) in dst.iter_mut().zip(r_v) {
                    *d += a * b;
                }
            }
        }
    }
    Ok(GraphSignature { matrix: pooled })
}

/// Embeds a batch of graphs independently (in parallel), reporting per-graph
/// failures in place so the rest of the batch still completes.
pub fn embed_many(graphs: &[Graph], model: &SirgnModel) -> Vec<Result<GraphSignature>> {
    graphs.par_iter().map(|g| embed_graph(g, model)).collect()
}

/// Stacks successful signatures row-wise (`n_graphs x w^2`); failures are
/// returned with their batch index.
pub fn stack_signatures(results: Vec<Result<GraphSignature>>) -> (Matrix, Vec<(usize, Error)>) {
    let mut errors = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(sig) => rows.push(sig.linearized().to_vec()),
            Err(e) => errors.push((i, e)),
        }
    }
    (Matrix::from_rows(rows), errors)
}

const EMBEDDING_MAGIC: &[u8; 8] = b"ISGNEMB1";

/// CSV with a `node_id,e0,...,e{p-1}` header.
pub fn write_embedding_csv<W: Write>(mut w: W, emb: &NodeEmbedding) -> std::io::Result<()> {
    write!(w, "node_id")?;
    for j in 0..emb.matrix.cols() {
        write!(w, ",e{j}")?;
    }
    writeln!(w)?;
    for (i, row) in emb.matrix.iter_rows().enumerate() {
        match &emb.names {
            Some(names) => write!(w, "{}", names[i])?,
            None => write!(w, "{i}")?,
        }
        for &x in row {
            write!(w, ",{x}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Raw binary: magic `ISGNEMB1`, u64 rows, u64 cols, then row-major
/// little-endian 64-bit floats.
pub fn write_embedding_binary<W: Write>(mut w: W, matrix: &Matrix) -> std::io::Result<()> {
    w.write_all(EMBEDDING_MAGIC)?;
    w.write_all(&(matrix.rows() as u64).to_le_bytes())?;
    w.write_all(&(matrix.cols() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(matrix.data().len() * 8);
    for &x in matrix.data() {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf)
}

pub fn read_embedding_binary<R: Read>(mut r: R) -> Result<Matrix> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != EMBEDDING_MAGIC {
        return Err(Error::BadMagic);
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        r.read_exact(&mut word)?;
        data.push(f64::from_le_bytes(word));
    }
    Ok(Matrix::from_vec(rows, cols, data))
}

/// Reads the CSV embedding format back; returns the node ids and the matrix.
pub fn read_embedding_csv<R: Read>(r: R) -> Result<(Vec<String>, Matrix)> {
    let mut text = String::new();
    let mut reader = r;
    reader.read_to_string(&mut text)?;
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 && line.starts_with("node_id") {
            continue;
        }
        let mut fields = line.split(',');
        let id = fields.next().unwrap_or_default().to_string();
        let values: std::result::Result<Vec<f64>, _> =
            fields.map(|f| f.trim().parse::<f64>()).collect();
        let values = values.map_err(|e| Error::Parse {
            path: "<embedding csv>".into(),
            line: lineno + 1,
            msg: e.to_string(),
        })?;
        ids.push(id);
        rows.push(values);
    }
    Ok((ids, Matrix::from_rows(rows)))
}
