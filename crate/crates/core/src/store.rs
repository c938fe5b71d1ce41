//! Bit-exact, versioned single-file serialization of trained models.
//!
//! Layout: magic `ISGN1\0`, format version (u32 LE), manifest length
//! (u32 LE), JSON manifest (config echo plus an array directory of
//! name/rows/cols/byte-offset entries), payload of concatenated row-major
//! little-endian f64 arrays, and a trailing CRC32 of the payload.
//!
//! Serialization is canonical: arrays are written in a fixed order (scalers
//! by level, k-means by level, full scaler, PCA, PCA scaler, graph k-means),
//! so the same model always produces identical bytes.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::mlkit::{KMeansModel, PcaModel, Scaler};
use crate::model::{GraphHead, Level, SirgnModel, TrainConfig};

const MAGIC: &[u8; 6] = b"ISGN1\0";
const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ArrayEntry {
    name: String,
    rows: u64,
    cols: u64,
    /// Byte offset into the payload.
    offset: u64,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    config: TrainConfig,
    arrays: Vec<ArrayEntry>,
}

struct PayloadWriter {
    arrays: Vec<ArrayEntry>,
    bytes: Vec<u8>,
}

impl PayloadWriter {
    fn new() -> Self {
        Self {
            arrays: Vec::new(),
            bytes: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, rows: usize, cols: usize, data: &[f64]) {
        assert_eq!(data.len(), rows * cols);
        self.arrays.push(ArrayEntry {
            name: name.to_string(),
            rows: rows as u64,
            cols: cols as u64,
            offset: self.bytes.len() as u64,
        });
        for &x in data {
            self.bytes.extend_from_slice(&x.to_le_bytes());
        }
    }

    fn push_scaler(&mut self, prefix: &str, s: &Scaler) {
        self.push(&format!("{prefix}.mean"), 1, s.dim(), s.mean());
        self.push(&format!("{prefix}.m2"), 1, s.dim(), s.m2());
        self.push(&format!("{prefix}.count"), 1, 1, &[s.count() as f64]);
    }

    fn push_kmeans(&mut self, prefix: &str, k: &KMeansModel) {
        let c = k.centroids();
        self.push(&format!("{prefix}.centroids"), c.rows(), c.cols(), c.data());
        let counts: Vec<f64> = k.counts().iter().map(|&x| x as f64).collect();
        self.push(&format!("{prefix}.counts"), 1, counts.len(), &counts);
    }
}

/// Serializes a trained model to its canonical byte representation.
pub fn to_bytes(model: &SirgnModel) -> Result<Vec<u8>> {
    model.check_shapes()?;
    let mut payload = PayloadWriter::new();
    for (l, level) in model.levels.iter().enumerate() {
        payload.push_scaler(&format!("scaler.{l}"), &level.scaler);
    }
    for (l, level) in model.levels.iter().enumerate() {
        payload.push_kmeans(&format!("kmeans.{l}"), &level.kmeans);
    }
    payload.push_scaler("full_scaler", &model.full_scaler);
    let pca = &model.pca;
    payload.push("pca.mean", 1, pca.dim(), pca.mean());
    payload.push(
        "pca.components",
        pca.components().rows(),
        pca.components().cols(),
        pca.components().data(),
    );
    payload.push(
        "pca.explained_variance",
        1,
        pca.explained_variance().len(),
        pca.explained_variance(),
    );
    payload.push("pca.count", 1, 1, &[pca.count() as f64]);
    if let Some(head) = &model.graph_head {
        payload.push_scaler("pca_scaler", &head.scaler);
        payload.push_kmeans("graph_kmeans", &head.kmeans);
    }

    let manifest = Manifest {
        config: model.config.clone(),
        arrays: payload.arrays,
    };
    let manifest_json =
        serde_json::to_vec(&manifest).map_err(|e| Error::Manifest(e.to_string()))?;

    let mut out = Vec::with_capacity(14 + manifest_json.len() + payload.bytes.len() + 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(manifest_json.len() as u32).to_le_bytes());
    out.extend_from_slice(&manifest_json);
    out.extend_from_slice(&payload.bytes);
    out.extend_from_slice(&crc32fast::hash(&payload.bytes).to_le_bytes());
    Ok(out)
}

/// Writes the model atomically (temp file + rename in the target directory).
pub fn save(model: &SirgnModel, path: &Path) -> Result<()> {
    let bytes = to_bytes(model)?;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(&bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

struct PayloadReader<'a> {
    arrays: &'a [ArrayEntry],
    payload: &'a [u8],
    next: usize,
    expected_offset: u64,
}

impl<'a> PayloadReader<'a> {
    /// Arrays must appear in exactly the canonical order with the shapes the
    /// config implies, packed back to back (no gaps or overlaps).
    fn take(&mut self, name: &str, rows: usize, cols: usize) -> Result<Vec<f64>> {
        let entry = self
            .arrays
            .get(self.next)
            .ok_or_else(|| Error::Manifest(format!("missing array `{name}`")))?;
        self.next += 1;
        if entry.name != name {
            return Err(Error::Manifest(format!(
                "expected array `{name}`, found `{}`",
                entry.name
            )));
        }
        if entry.rows != rows as u64 || entry.cols != cols as u64 {
            return Err(Error::ShapeMismatch(format!(
                "array `{name}` declared {}x{}, config implies {rows}x{cols}",
                entry.rows, entry.cols
            )));
        }
        if entry.offset != self.expected_offset {
            return Err(Error::Truncated);
        }
        let start = entry.offset as usize;
        let len = rows * cols * 8;
        let end = start.checked_add(len).ok_or(Error::Truncated)?;
        if end > self.payload.len() {
            return Err(Error::Truncated);
        }
        self.expected_offset = end as u64;
        Ok(self.payload[start..end]
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
            .collect())
    }

    fn take_scaler(&mut self, prefix: &str, dim: usize) -> Result<Scaler> {
        let mean = self.take(&format!("{prefix}.mean"), 1, dim)?;
        let m2 = self.take(&format!("{prefix}.m2"), 1, dim)?;
        let count = self.take(&format!("{prefix}.count"), 1, 1)?[0];
        Scaler::from_parts(read_count(count)?, mean, m2)
    }

    fn take_kmeans(&mut self, prefix: &str, clusters: usize, dim: usize) -> Result<KMeansModel> {
        let centroids = self.take(&format!("{prefix}.centroids"), clusters, dim)?;
        let counts = self.take(&format!("{prefix}.counts"), 1, clusters)?;
        let counts: Result<Vec<u64>> = counts.into_iter().map(read_count).collect();
        KMeansModel::from_parts(Matrix::from_vec(clusters, dim, centroids), counts?)
    }
}

fn read_count(x: f64) -> Result<u64> {
    if x < 0.0 || x.fract() != 0.0 || x > 2f64.powi(53) {
        return Err(Error::Manifest(format!("invalid count value {x}")));
    }
    Ok(x as u64)
}

/// Parses a model from bytes, verifying magic, version, checksum, directory
/// bounds, and config-implied shapes.
pub fn from_bytes(bytes: &[u8]) -> Result<SirgnModel> {
    if bytes.len() < MAGIC.len() + 8 + 4 {
        return Err(Error::Truncated);
    }
    if &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = u32::from_le_bytes(bytes[6..10].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let manifest_len = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
    let payload_start = 14 + manifest_len;
    if payload_start + 4 > bytes.len() {
        return Err(Error::Truncated);
    }
    let manifest: Manifest = serde_json::from_slice(&bytes[14..payload_start])
        .map_err(|e| Error::Manifest(e.to_string()))?;
    let payload = &bytes[payload_start..bytes.len() - 4];
    let stored_crc = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().unwrap());
    if crc32fast::hash(payload) != stored_crc {
        return Err(Error::ChecksumMismatch);
    }

    let cfg = manifest.config;
    cfg.validate()
        .map_err(|e| Error::Manifest(format!("stored config invalid: {e}")))?;
    let mut reader = PayloadReader {
        arrays: &manifest.arrays,
        payload,
        next: 0,
        expected_offset: 0,
    };

    let mut scalers = Vec::with_capacity(cfg.depth);
    for l in 0..cfg.depth {
        scalers.push(reader.take_scaler(&format!("scaler.{l}"), cfg.level_input_dim(l))?);
    }
    let mut kmeans = Vec::with_capacity(cfg.depth);
    for l in 0..cfg.depth {
        kmeans.push(reader.take_kmeans(
            &format!("kmeans.{l}"),
            cfg.clusters,
            cfg.level_input_dim(l),
        )?);
    }
    let full_scaler = reader.take_scaler("full_scaler", cfg.concat_dim())?;
    let pca_mean = reader.take("pca.mean", 1, cfg.concat_dim())?;
    let components = reader.take("pca.components", cfg.pca_components, cfg.concat_dim())?;
    let explained = reader.take("pca.explained_variance", 1, cfg.pca_components)?;
    let pca_count = read_count(reader.take("pca.count", 1, 1)?[0])?;
    let pca = PcaModel::from_parts(
        pca_count,
        pca_mean,
        Matrix::from_vec(cfg.pca_components, cfg.concat_dim(), components),
        explained,
    )?;
    let graph_head = if cfg.graph_clusters > 0 {
        let scaler = reader.take_scaler("pca_scaler", cfg.pca_components)?;
        let head_kmeans =
            reader.take_kmeans("graph_kmeans", cfg.graph_clusters, cfg.pca_components)?;
        Some(GraphHead {
            scaler,
            kmeans: head_kmeans,
        })
    } else {
        None
    };
    if reader.next != manifest.arrays.len() {
        return Err(Error::Manifest("unexpected trailing arrays".into()));
    }
    if reader.expected_offset != payload.len() as u64 {
        return Err(Error::Truncated);
    }

    let model = SirgnModel {
        config: cfg,
        levels: scalers
            .into_iter()
            .zip(kmeans)
            .map(|(scaler, kmeans)| Level { scaler, kmeans })
            .collect(),
        full_scaler,
        pca,
        graph_head,
    };
    model.check_shapes()?;
    Ok(model)
}

pub fn load(path: &Path) -> Result<SirgnModel> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}
