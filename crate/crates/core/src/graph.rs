//! Graph representation, edge-list ingestion, and the seeded random-graph
//! generator that feeds all model training.
//!
//! Graphs are immutable after construction: compressed sorted neighbor lists
//! (separate in/out lists for directed graphs), optional node and edge
//! labels, and a sidecar map from dense ids back to the original ids.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Immutable adjacency structure with dense node ids `0..n`.
///
/// Invariants: no self-loops, no duplicate edges, neighbor lists sorted
/// ascending. Undirected graphs store each edge in both endpoint lists.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edge_count: usize,
    out_offsets: Vec<usize>,
    out_nbrs: Vec<u32>,
    out_edge_labels: Option<Vec<u32>>,
    // Populated only for directed graphs.
    in_offsets: Vec<usize>,
    in_nbrs: Vec<u32>,
    in_edge_labels: Option<Vec<u32>>,
    node_labels: Option<Vec<u32>>,
    names: Option<Vec<String>>,
    max_edge_label: Option<u32>,
}

/// Counters for input rows dropped during construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

impl Graph {
    /// Builds a graph from an edge list over dense ids `0..n`.
    ///
    /// Self-loops and duplicate edges are dropped (counted in the returned
    /// stats); for duplicates the first occurrence wins, including its label.
    /// Undirected input is symmetrized.
    pub fn build(
        n: usize,
        directed: bool,
        edges: &[(u32, u32)],
        edge_labels: Option<&[u32]>,
        node_labels: Option<Vec<u32>>,
        names: Option<Vec<String>>,
    ) -> Result<(Graph, BuildStats)> {
        if let Some(labels) = edge_labels {
            if labels.len() != edges.len() {
                return Err(Error::DimensionMismatch {
                    expected: edges.len(),
                    got: labels.len(),
                });
            }
        }
        if let Some(labels) = &node_labels {
            if labels.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: labels.len(),
                });
            }
        }
        if let Some(names) = &names {
            if names.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: names.len(),
                });
            }
        }

        let mut stats = BuildStats::default();
        let mut seen: std::collections::HashSet<u64> = std::collections::HashSet::new();
        let mut out_adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        let mut in_adj: Vec<Vec<(u32, u32)>> = if directed {
            vec![Vec::new(); n]
        } else {
            Vec::new()
        };
        let mut edge_count = 0usize;

        for (idx, &(u, v)) in edges.iter().enumerate() {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidConfig(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                stats.self_loops_dropped += 1;
                continue;
            }
            let key = if directed {
                (u as u64) << 32 | v as u64
            } else {
                let (a, b) = if u < v { (u, v) } else { (v, u) };
                (a as u64) << 32 | b as u64
            };
            if !seen.insert(key) {
                stats.duplicates_dropped += 1;
                continue;
            }
            let label = edge_labels.map_or(0, |l| l[idx]);
            out_adj[u as usize].push((v, label));
            if directed {
                in_adj[v as usize].push((u, label));
            } else {
                out_adj[v as usize].push((u, label));
            }
            edge_count += 1;
        }

        let labeled = edge_labels.is_some();
        let (out_offsets, out_nbrs, out_edge_labels) = flatten(&mut out_adj, labeled);
        let (in_offsets, in_nbrs, in_edge_labels) = if directed {
            flatten(&mut in_adj, labeled)
        } else {
            (Vec::new(), Vec::new(), None)
        };
        let max_edge_label = out_edge_labels
            .as_ref()
            .and_then(|l| l.iter().copied().max());

        Ok((
            Graph {
                n,
                directed,
                edge_count,
                out_offsets,
                out_nbrs,
                out_edge_labels,
                in_offsets,
                in_nbrs,
                in_edge_labels,
                node_labels,
                names,
                max_edge_label,
            },
            stats,
        ))
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of edges (undirected edges counted once, directed arcs once).
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Neighbor list of `u`: the adjacency for undirected graphs,
    /// out-neighbors for directed ones. Sorted ascending.
    #[inline]
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.out_nbrs[self.out_offsets[u]..self.out_offsets[u + 1]]
    }

    #[inline]
    pub fn out_neighbors(&self, u: usize) -> &[u32] {
        self.neighbors(u)
    }

    /// In-neighbors of `u`; for undirected graphs this is the neighbor list.
    #[inline]
    pub fn in_neighbors(&self, u: usize) -> &[u32] {
        if self.directed {
            &self.in_nbrs[self.in_offsets[u]..self.in_offsets[u + 1]]
        } else {
            self.neighbors(u)
        }
    }

    /// Edge labels parallel to `neighbors(u)`.
    pub fn edge_labels(&self, u: usize) -> Option<&[u32]> {
        self.out_edge_labels
            .as_ref()
            .map(|l| &l[self.out_offsets[u]..self.out_offsets[u + 1]])
    }

    /// Edge labels parallel to `in_neighbors(u)`.
    pub fn in_edge_labels(&self, u: usize) -> Option<&[u32]> {
        if self.directed {
            self.in_edge_labels
                .as_ref()
                .map(|l| &l[self.in_offsets[u]..self.in_offsets[u + 1]])
        } else {
            self.edge_labels(u)
        }
    }

    pub fn has_edge_labels(&self) -> bool {
        self.out_edge_labels.is_some()
    }

    pub fn max_edge_label(&self) -> Option<u32> {
        self.max_edge_label
    }

    pub fn node_labels(&self) -> Option<&[u32]> {
        self.node_labels.as_deref()
    }

    pub fn max_node_label(&self) -> Option<u32> {
        self.node_labels
            .as_ref()
            .and_then(|l| l.iter().copied().max())
    }

    /// Original node ids, when the graph came from a file with non-dense ids.
    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn name_of(&self, u: usize) -> String {
        match &self.names {
            Some(names) => names[u].clone(),
            None => u.to_string(),
        }
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        (0..self.n)
            .map(|u| self.out_offsets[u + 1] - self.out_offsets[u])
            .collect()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        if self.directed {
            (0..self.n)
                .map(|u| self.in_offsets[u + 1] - self.in_offsets[u])
                .collect()
        } else {
            self.out_degrees()
        }
    }

    /// `|N(u)|` per node: neighbor-list length for undirected graphs, size of
    /// the in/out neighbor union for directed ones.
    pub fn degrees(&self) -> Vec<usize> {
        if !self.directed {
            return self.out_degrees();
        }
        (0..self.n)
            .map(|u| merged_count(self.out_neighbors(u), self.in_neighbors(u)))
            .collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Relabels nodes: node `u` becomes `perm[u]`. Structure is preserved.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        assert_eq!(perm.len(), self.n, "permutation length != node count");
        let mut edges = Vec::with_capacity(self.edge_count);
        let mut labels: Vec<u32> = Vec::new();
        for u in 0..self.n {
            let lab = self.edge_labels(u);
            for (i, &v) in self.neighbors(u).iter().enumerate() {
                if !self.directed && (v as usize) < u {
                    continue; // each undirected edge once
                }
                edges.push((perm[u] as u32, perm[v as usize] as u32));
                if let Some(lab) = lab {
                    labels.push(lab[i]);
                }
            }
        }
        let node_labels = self.node_labels.as_ref().map(|nl| {
            let mut permuted = vec![0u32; self.n];
            for u in 0..self.n {
                permuted[perm[u]] = nl[u];
            }
            permuted
        });
        let names = self.names.as_ref().map(|names| {
            let mut permuted = vec![String::new(); self.n];
            for u in 0..self.n {
                permuted[perm[u]] = names[u].clone();
            }
            permuted
        });
        let edge_labels = self.out_edge_labels.as_ref().map(|_| labels.as_slice());
        let (g, _) = Graph::build(
            self.n,
            self.directed,
            &edges,
            edge_labels,
            node_labels,
            names,
        )?;
        Ok(g)
    }
}

fn flatten(adj: &mut [Vec<(u32, u32)>], labeled: bool) -> (Vec<usize>, Vec<u32>, Option<Vec<u32>>) {
    let total: usize = adj.iter().map(Vec::len).sum();
    let mut offsets = Vec::with_capacity(adj.len() + 1);
    let mut nbrs = Vec::with_capacity(total);
    let mut labels = if labeled {
        Vec::with_capacity(total)
    } else {
        Vec::new()
    };
    offsets.push(0);
    for list in adj.iter_mut() {
        list.sort_unstable();
        for &(v, l) in list.iter() {
            nbrs.push(v);
            if labeled {
                labels.push(l);
            }
        }
        offsets.push(nbrs.len());
    }
    (offsets, nbrs, labeled.then_some(labels))
}

fn merged_count(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        count += 1;
        if a[i] < b[j] {
            i += 1;
        } else if a[i] > b[j] {
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    count + (a.len() - i) + (b.len() - j)
}

/// Parameters for the seeded random-graph generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomGraphSpec {
    pub nodes: usize,
    /// Upper bound on edges as a multiple of the node count.
    pub max_degree_factor: usize,
    pub seed: u64,
    pub directed: bool,
    /// Number of node labels to draw uniformly; 0 = unlabeled.
    pub node_labels: usize,
    /// Number of edge labels to draw uniformly; 0 = unlabeled.
    pub edge_labels: usize,
}

impl RandomGraphSpec {
    pub fn new(nodes: usize, seed: u64) -> Self {
        Self {
            nodes,
            max_degree_factor: 10,
            seed,
            directed: false,
            node_labels: 0,
            edge_labels: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::InvalidConfig(
                "random graph needs at least 2 nodes".into(),
            ));
        }
        if self.max_degree_factor < 1 {
            return Err(Error::InvalidConfig(
                "max_degree_factor must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Generates a random graph: the edge target is drawn uniformly from
/// `[nodes, max_degree_factor * nodes]` (clamped to the size of the pair
/// space), then distinct random node pairs are added until the target is
/// reached. Pure function of the spec.
pub fn generate_random_graph(spec: &RandomGraphSpec) -> Result<Graph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.nodes;
    let max_pairs = if spec.directed {
        n * (n - 1)
    } else {
        n * (n - 1) / 2
    };
    let target = rng
        .random_range(n..=spec.max_degree_factor * n)
        .min(max_pairs);
    fill_random_graph(spec, target, &mut rng)
}

/// Variant with an exact edge-count target; used by the benchmark driver.
pub fn random_graph_with_edges(spec: &RandomGraphSpec, edges: usize) -> Result<Graph> {
    spec.validate()?;
    let n = spec.nodes;
    let max_pairs = if spec.directed {
        n * (n - 1)
    } else {
        n * (n - 1) / 2
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    fill_random_graph(spec, edges.min(max_pairs), &mut rng)
}

fn fill_random_graph(spec: &RandomGraphSpec, target: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    let n = spec.nodes;
    let mut seen: std::collections::HashSet<u64> =
        std::collections::HashSet::with_capacity(target * 2);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(target);
    while edges.len() < target {
        let u = rng.random_range(0..n as u32);
        let v = rng.random_range(0..n as u32);
        if u == v {
            continue;
        }
        let key = if spec.directed {
            (u as u64) << 32 | v as u64
        } else {
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            (a as u64) << 32 | b as u64
        };
        if seen.insert(key) {
            edges.push((u, v));
        }
    }
    let node_labels = (spec.node_labels > 0).then(|| {
        (0..n)
            .map(|_| rng.random_range(0..spec.node_labels as u32))
            .collect()
    });
    let edge_labels: Option<Vec<u32>> = (spec.edge_labels > 0).then(|| {
        (0..edges.len())
            .map(|_| rng.random_range(0..spec.edge_labels as u32))
            .collect()
    });
    let (g, _) = Graph::build(
        n,
        spec.directed,
        &edges,
        edge_labels.as_deref(),
        node_labels,
        None,
    )?;
    Ok(g)
}

/// Stats reported by [`load_edge_list`].
pub type LoadStats = BuildStats;

/// Loads a whitespace-separated edge list (`src dst` or `src dst edge_label`
/// when `edge_labeled`). `#` lines are comments. Node tokens may be arbitrary
/// strings; they are mapped to dense ids in sorted token order (numeric when
/// every token is an integer), with the original ids retained, so the loaded
/// graph does not depend on line order. An optional companion file assigns
/// one integer node label per node (`node label`), covering every node.
pub fn load_edge_list(
    path: &Path,
    directed: bool,
    edge_labeled: bool,
    node_label_path: Option<&Path>,
) -> Result<(Graph, LoadStats)> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);

    let mut raw_edges: Vec<(String, String)> = Vec::new();
    let mut labels: Vec<u32> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let expected = if edge_labeled { 3 } else { 2 };
        if tokens.len() != expected {
            return Err(parse_err(format!(
                "expected {expected} fields, found {}",
                tokens.len()
            )));
        }
        raw_edges.push((tokens[0].to_string(), tokens[1].to_string()));
        if edge_labeled {
            let label: u32 = tokens[2]
                .parse()
                .map_err(|_| parse_err(format!("edge label `{}` is not an integer", tokens[2])))?;
            labels.push(label);
        }
    }

    let mut names: Vec<String> = raw_edges
        .iter()
        .flat_map(|(u, v)| [u.clone(), v.clone()])
        .collect();
    names.sort_unstable();
    names.dedup();
    if names.iter().all(|n| n.parse::<u64>().is_ok()) {
        names.sort_by_key(|n| n.parse::<u64>().unwrap());
    }
    let ids: HashMap<String, u32> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i as u32))
        .collect();
    let edges: Vec<(u32, u32)> = raw_edges.iter().map(|(u, v)| (ids[u], ids[v])).collect();

    let node_labels = match node_label_path {
        Some(label_path) => Some(load_node_labels(label_path, &ids, names.len())?),
        None => None,
    };

    let n = names.len();
    Graph::build(
        n,
        directed,
        &edges,
        edge_labeled.then_some(labels.as_slice()),
        node_labels,
        Some(names),
    )
}

fn load_node_labels(path: &Path, ids: &HashMap<String, u32>, n: usize) -> Result<Vec<u32>> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut labels: Vec<Option<u32>> = vec![None; n];
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(parse_err(format!(
                "expected 2 fields, found {}",
                tokens.len()
            )));
        }
        let &id = ids
            .get(tokens[0])
            .ok_or_else(|| Error::UnknownNode(tokens[0].to_string()))?;
        let label: u32 = tokens[1]
            .parse()
            .map_err(|_| parse_err(format!("node label `{}` is not an integer", tokens[1])))?;
        if labels[id as usize].replace(label).is_some() {
            return Err(Error::DuplicateNodeLabel(tokens[0].to_string()));
        }
    }
    let mut out = Vec::with_capacity(n);
    for (id, label) in labels.into_iter().enumerate() {
        match label {
            Some(l) => out.push(l),
            None => {
                let name = ids
                    .iter()
                    .find(|(_, &v)| v as usize == id)
                    .map(|(k, _)| k.clone())
                    .unwrap_or_else(|| id.to_string());
                return Err(Error::MissingNodeLabel(name));
            }
        }
    }
    Ok(out)
}

/// Writes the edge list in the loader's format: one edge per line (undirected
/// edges once, ascending), original ids when present.
pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> std::io::Result<()> {
    for u in 0..g.node_count() {
        let labels = g.edge_labels(u);
        for (i, &v) in g.neighbors(u).iter().enumerate() {
            if !g.is_directed() && (v as usize) < u {
                continue;
            }
            match labels {
                Some(l) => writeln!(w, "{}\t{}\t{}", g.name_of(u), g.name_of(v as usize), l[i])?,
                None => writeln!(w, "{}\t{}", g.name_of(u), g.name_of(v as usize))?,
            }
        }
    }
    Ok(())
}

/// Companion writer for node labels (`node label` per line).
pub fn write_node_labels<W: Write>(g: &Graph, mut w: W) -> std::io::Result<()> {
    if let Some(labels) = g.node_labels() {
        for (u, &label) in labels.iter().enumerate() {
            writeln!(w, "{}\t{}", g.name_of(u), label)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        let (g, _) = Graph::build(3, false, &[(0, 1), (1, 2), (2, 0)], None, None, None).unwrap();
        g
    }

    #[test]
    fn triangle_from_edges() {
        let g = triangle();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.neighbors(0), &[1, 2]);
    }

    #[test]
    fn duplicate_edges_dropped() {
        let (g, stats) = Graph::build(
            3,
            false,
            &[(0, 1), (1, 2), (2, 0), (1, 0)],
            None,
            None,
            None,
        )
        .unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(stats.duplicates_dropped, 1);
        assert_eq!(g, triangle());
    }

    #[test]
    fn self_loops_dropped_with_count() {
        let (g, stats) = Graph::build(2, false, &[(0, 0), (0, 1)], None, None, None).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(stats.self_loops_dropped, 1);
    }

    #[test]
    fn directed_degrees() {
        let (g, _) = Graph::build(2, true, &[(0, 1)], None, None, None).unwrap();
        assert_eq!(g.out_degrees(), vec![1, 0]);
        assert_eq!(g.in_degrees(), vec![0, 1]);
    }

    #[test]
    fn degree_vectors() {
        assert_eq!(triangle().degrees(), vec![2, 2, 2]);
        let (star, _) =
            Graph::build(4, false, &[(0, 1), (0, 2), (0, 3)], None, None, None).unwrap();
        assert_eq!(star.degrees(), vec![3, 1, 1, 1]);
    }

    #[test]
    fn undirected_degree_sum_is_twice_edges() {
        let g = generate_random_graph(&RandomGraphSpec::new(100, 7)).unwrap();
        let total: usize = g.degrees().iter().sum();
        assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn generator_respects_edge_range() {
        let g = generate_random_graph(&RandomGraphSpec::new(100, 7)).unwrap();
        assert_eq!(g.node_count(), 100);
        assert!(g.edge_count() >= 100 && g.edge_count() <= 1000);
    }

    #[test]
    fn generator_is_deterministic() {
        let spec = RandomGraphSpec::new(100, 7);
        assert_eq!(
            generate_random_graph(&spec).unwrap(),
            generate_random_graph(&spec).unwrap()
        );
    }

    #[test]
    fn generator_distinct_seeds_differ() {
        let a = generate_random_graph(&RandomGraphSpec::new(100, 7)).unwrap();
        let b = generate_random_graph(&RandomGraphSpec::new(100, 8)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn two_node_graph_exhausts_pair_space() {
        let g = generate_random_graph(&RandomGraphSpec::new(2, 3)).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.neighbors(0), &[1]);
    }

    #[test]
    fn generator_draws_labels_in_range() {
        let mut spec = RandomGraphSpec::new(50, 11);
        spec.node_labels = 3;
        spec.edge_labels = 4;
        let g = generate_random_graph(&spec).unwrap();
        assert!(g.max_node_label().unwrap() < 3);
        assert!(g.max_edge_label().unwrap() < 4);
    }

    #[test]
    fn exact_edge_target() {
        let spec = RandomGraphSpec::new(1000, 5);
        let g = random_graph_with_edges(&spec, 4321).unwrap();
        assert_eq!(g.edge_count(), 4321);
    }

    #[test]
    fn load_edge_list_round_trip_is_fixed_point() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("edges.txt");
        std::fs::write(&path, "# comment\nb\ta\nc\tb\na\tc\n").unwrap();
        let (g1, _) = load_edge_list(&path, false, false, None).unwrap();
        assert_eq!(g1.node_count(), 3);

        let s1 = {
            let mut buf = Vec::new();
            write_edge_list(&g1, &mut buf).unwrap();
            buf
        };
        let p2 = dir.path().join("edges2.txt");
        std::fs::write(&p2, &s1).unwrap();
        let (g2, _) = load_edge_list(&p2, false, false, None).unwrap();
        let mut s2 = Vec::new();
        write_edge_list(&g2, &mut s2).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(g1.edge_count(), g2.edge_count());
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "0\t1\n0\n").unwrap();
        let err = load_edge_list(&path, false, false, None).unwrap_err();
        assert!(err.to_string().contains(":2:"), "{err}");
    }

    #[test]
    fn node_label_file_unknown_node_errors() {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("e.txt");
        let labels = dir.path().join("l.txt");
        std::fs::write(&edges, "0\t1\n").unwrap();
        std::fs::write(&labels, "0\t1\n1\t0\n9\t1\n").unwrap();
        let err = load_edge_list(&edges, false, false, Some(&labels)).unwrap_err();
        assert!(matches!(err, Error::UnknownNode(_)));
    }

    #[test]
    fn node_label_file_must_cover_all_nodes() {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("e.txt");
        let labels = dir.path().join("l.txt");
        std::fs::write(&edges, "0\t1\n").unwrap();
        std::fs::write(&labels, "0\t1\n").unwrap();
        let err = load_edge_list(&edges, false, false, Some(&labels)).unwrap_err();
        assert!(matches!(err, Error::MissingNodeLabel(_)));
    }

    #[test]
    fn permutation_preserves_structure() {
        let g = generate_random_graph(&RandomGraphSpec::new(30, 4)).unwrap();
        let perm: Vec<usize> = (0..30).map(|i| (i * 7 + 3) % 30).collect();
        let p = g.permuted(&perm).unwrap();
        assert_eq!(p.edge_count(), g.edge_count());
        let mut degrees_a = g.degrees();
        let mut degrees_b = p.degrees();
        degrees_a.sort_unstable();
        degrees_b.sort_unstable();
        assert_eq!(degrees_a, degrees_b);
        for u in 0..g.node_count() {
            for &v in g.neighbors(u) {
                assert!(p.has_edge(perm[u], perm[v as usize]));
            }
        }
    }
}
