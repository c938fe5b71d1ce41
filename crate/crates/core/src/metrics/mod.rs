//! Structural graph metrics used as regression ground truth: degree
//! centrality, PageRank, eigenvector centrality, betweenness centrality,
//! HITS, and node clique number, plus an OLS R-squared evaluator.
//!
//! All functions are pure over immutable graphs.

mod cliques;
mod regression;

pub use cliques::node_clique_number;
pub use regression::r2_score;

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 1000;
/// Default cap on enumerated maximal cliques (worst case is exponential).
pub const DEFAULT_CLIQUE_BUDGET: usize = 1_000_000;

/// A named per-node metric column.
#[derive(Clone, Debug)]
pub struct MetricVector {
    pub name: &'static str,
    pub values: Vec<f64>,
}

/// The metric families exposed on the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    DegreeCentrality,
    PageRank,
    EigenvectorCentrality,
    BetweennessCentrality,
    Hits,
    NodeCliqueNumber,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::DegreeCentrality,
        Metric::PageRank,
        Metric::EigenvectorCentrality,
        Metric::BetweennessCentrality,
        Metric::Hits,
        Metric::NodeCliqueNumber,
    ];

    pub fn parse(name: &str) -> Option<Metric> {
        Some(match name {
            "degree" | "dc" => Metric::DegreeCentrality,
            "pagerank" | "pr" => Metric::PageRank,
            "eigenvector" | "ec" => Metric::EigenvectorCentrality,
            "betweenness" | "bc" => Metric::BetweennessCentrality,
            "hits" => Metric::Hits,
            "ncn" | "clique" => Metric::NodeCliqueNumber,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::DegreeCentrality => "degree",
            Metric::PageRank => "pagerank",
            Metric::EigenvectorCentrality => "eigenvector",
            Metric::BetweennessCentrality => "betweenness",
            Metric::Hits => "hits",
            Metric::NodeCliqueNumber => "ncn",
        }
    }

    /// Computes the metric with default parameters. HITS yields two columns
    /// (hub then authority); everything else yields one.
    pub fn compute(&self, g: &Graph) -> Result<Vec<MetricVector>> {
        Ok(match self {
            Metric::DegreeCentrality => vec![MetricVector {
                name: "degree",
                values: degree_centrality(g),
            }],
            Metric::PageRank => vec![MetricVector {
                name: "pagerank",
                values: pagerank(g, DEFAULT_DAMPING, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)?,
            }],
            Metric::EigenvectorCentrality => vec![MetricVector {
                name: "eigenvector",
                values: eigenvector_centrality(g, DEFAULT_TOLERANCE, 10_000)?,
            }],
            Metric::BetweennessCentrality => vec![MetricVector {
                name: "betweenness",
                values: betweenness_centrality(g),
            }],
            Metric::Hits => {
                let (hub, authority) = hits(g, DEFAULT_TOLERANCE, 10_000)?;
                vec![
                    MetricVector {
                        name: "hits_hub",
                        values: hub,
                    },
                    MetricVector {
                        name: "hits_authority",
                        values: authority,
                    },
                ]
            }
            Metric::NodeCliqueNumber => vec![MetricVector {
                name: "ncn",
                values: node_clique_number(g, DEFAULT_CLIQUE_BUDGET)?,
            }],
        })
    }
}

/// `DC(v) = |N(v)| / |V|` (divided by `|V|`, not `|V| - 1`). For directed
/// graphs `N(v)` is the union of in- and out-neighbors.
pub fn degree_centrality(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    g.degrees().iter().map(|&d| d as f64 / n as f64).collect()
}

/// Power iteration on the damped walk; dangling mass is redistributed
/// uniformly. Converges when the L1 change drops below `tol`.
pub fn pagerank(g: &Graph, damping: f64, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = g.node_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    let out_deg = g.out_degrees();
    let inv_out: Vec<f64> = out_deg
        .iter()
        .map(|&d| if d == 0 { 0.0 } else { 1.0 / d as f64 })
        .collect();
    let dangling: Vec<usize> = (0..n).filter(|&u| out_deg[u] == 0).collect();
    let mut p = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let dangling_mass: f64 = dangling.iter().map(|&u| p[u]).sum();
        let base = (1.0 - damping) / n as f64 + damping * dangling_mass / n as f64;
        let p_ref = &p;
        let next: Vec<f64> = (0..n)
            .into_par_iter()
            .with_min_len(64)
            .map(|v| {
                let mut acc = 0.0;
                for &u in g.in_neighbors(v) {
                    acc += p_ref[u as usize] * inv_out[u as usize];
                }
                base + damping * acc
            })
            .collect();
        residual = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        p = next;
        if residual < tol {
            return Ok(p);
        }
    }
    Err(Error::NonConvergence {
        what: "pagerank",
        residual,
    })
}

/// Dominant eigenvector of the adjacency matrix, L2-normalized and
/// nonnegative. Iterates `(A + I) x` so bipartite graphs converge too. For
/// disconnected graphs this is computed over the whole graph as given.
pub fn eigenvector_centrality(g: &Graph, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = g.node_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let x_ref = &x;
        let mut y: Vec<f64> = (0..n)
            .into_par_iter()
            .with_min_len(64)
            .map(|v| {
                let mut acc = x_ref[v];
                for &t in g.out_neighbors(v) {
                    acc += x_ref[t as usize];
                }
                acc
            })
            .collect();
        let norm = l2_norm(&y);
        if norm == 0.0 {
            return Ok(x);
        }
        for v in &mut y {
            *v /= norm;
        }
        residual = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        x = y;
        if residual < tol {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence {
        what: "eigenvector centrality",
        residual,
    })
}

/// Brandes' exact algorithm; raw unnormalized counts with endpoints
/// excluded. Undirected shortest-path pairs are counted once per unordered
/// pair. Deterministic under any thread count: sources are processed in
/// fixed blocks whose partial sums are combined in block order.
pub fn betweenness_centrality(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    const BLOCK: usize = 64;
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .chunks(BLOCK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|block| {
            let mut local = vec![0.0; n];
            for &s in block {
                brandes_from(g, s, &mut local);
            }
            local
        })
        .collect();
    let mut bc = vec![0.0; n];
    for partial in partials {
        for (acc, x) in bc.iter_mut().zip(partial) {
            *acc += x;
        }
    }
    if !g.is_directed() {
        for x in &mut bc {
            *x *= 0.5;
        }
    }
    bc
}

fn brandes_from(g: &Graph, s: usize, bc: &mut [f64]) {
    let n = g.node_count();
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        stack.push(v);
        for &w in g.out_neighbors(v) {
            let w = w as usize;
            if dist[w] < 0 {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    while let Some(w) = stack.pop() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if w != s {
            bc[w] += delta[w];
        }
    }
}

/// HITS hub and authority scores: independent power iterations on
/// `A A^T` and `A^T A`, each L2-normalized. On undirected graphs the two
/// recursions coincide, so hub equals authority.
pub fn hits(g: &Graph, tol: f64, max_iter: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let hub = hits_iterate(g, false, tol, max_iter)?;
    let authority = hits_iterate(g, true, tol, max_iter)?;
    Ok((hub, authority))
}

fn hits_iterate(g: &Graph, authority: bool, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = g.node_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        // authority: a <- A^T (A a); hub: h <- A (A^T h).
        let x_ref = &x;
        let mid: Vec<f64> = (0..n)
            .into_par_iter()
            .with_min_len(64)
            .map(|v| {
                let nbrs = if authority {
                    g.out_neighbors(v)
                } else {
                    g.in_neighbors(v)
                };
                nbrs.iter().map(|&t| x_ref[t as usize]).sum()
            })
            .collect();
        let mid_ref = &mid;
        let mut y: Vec<f64> = (0..n)
            .into_par_iter()
            .with_min_len(64)
            .map(|v| {
                let nbrs = if authority {
                    g.in_neighbors(v)
                } else {
                    g.out_neighbors(v)
                };
                nbrs.iter().map(|&t| mid_ref[t as usize]).sum()
            })
            .collect();
        let norm = l2_norm(&y);
        if norm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        for v in &mut y {
            *v /= norm;
        }
        residual = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        x = y;
        if residual < tol {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence {
        what: "hits",
        residual,
    })
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|&x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use nalgebra::DMatrix;

    fn build(n: usize, directed: bool, edges: &[(u32, u32)]) -> Graph {
        Graph::build(n, directed, edges, None, None, None)
            .unwrap()
            .0
    }

    fn path3() -> Graph {
        build(3, false, &[(0, 1), (1, 2)])
    }

    #[test]
    fn degree_centrality_examples() {
        let triangle = build(3, false, &[(0, 1), (1, 2), (2, 0)]);
        for &x in &degree_centrality(&triangle) {
            assert!((x - 2.0 / 3.0).abs() < 1e-15);
        }
        let star = build(4, false, &[(0, 1), (0, 2), (0, 3)]);
        assert!((degree_centrality(&star)[0] - 0.75).abs() < 1e-15);
        let lonely = build(2, false, &[(0, 1)]);
        let mut with_isolated = degree_centrality(&build(3, false, &[(0, 1)]));
        assert_eq!(with_isolated.pop().unwrap(), 0.0);
        let _ = lonely;
    }

    #[test]
    fn pagerank_symmetry_and_simplex() {
        let c3 = build(3, false, &[(0, 1), (1, 2), (2, 0)]);
        let pr = pagerank(&c3, DEFAULT_DAMPING, 1e-12, 1000).unwrap();
        for &x in &pr {
            assert!((x - 1.0 / 3.0).abs() < 1e-9);
        }
        let pr = pagerank(&path3(), DEFAULT_DAMPING, 1e-12, 1000).unwrap();
        assert!((pr.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(pr[1] > pr[0]);
        assert!((pr[0] - pr[2]).abs() < 1e-12);
    }

    #[test]
    fn pagerank_path_exact_values() {
        // Closed form for the 3-path with damping 0.85:
        // ends (2 + d) / (6 (1 + d)), middle 1 - 2 * ends.
        let d = DEFAULT_DAMPING;
        let ends = (2.0 + d) / (6.0 * (1.0 + d));
        let pr = pagerank(&path3(), d, 1e-14, 10_000).unwrap();
        assert!((pr[0] - ends).abs() < 1e-10);
        assert!((pr[1] - (1.0 - 2.0 * ends)).abs() < 1e-10);

        // And against a dense power-iteration oracle.
        let oracle = dense_pagerank(&path3(), d, 1e-13);
        for (a, b) in pr.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    /// Dense-matrix PageRank oracle, independent of the adjacency-list path.
    fn dense_pagerank(g: &Graph, damping: f64, tol: f64) -> Vec<f64> {
        let n = g.node_count();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for u in 0..n {
            let out = g.out_neighbors(u);
            if out.is_empty() {
                for v in 0..n {
                    m[(v, u)] = 1.0 / n as f64;
                }
            } else {
                for &v in out {
                    m[(v as usize, u)] = 1.0 / out.len() as f64;
                }
            }
        }
        let mut p = nalgebra::DVector::from_element(n, 1.0 / n as f64);
        for _ in 0..100_000 {
            let next =
                &m * &p * damping + nalgebra::DVector::from_element(n, (1.0 - damping) / n as f64);
            let diff = (&next - &p).abs().sum();
            p = next;
            if diff < tol {
                break;
            }
        }
        p.iter().copied().collect()
    }

    #[test]
    fn eigenvector_centrality_examples() {
        let c5 = build(5, false, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let ec = eigenvector_centrality(&c5, 1e-12, 100_000).unwrap();
        for &x in &ec {
            assert!((x - 1.0 / 5.0f64.sqrt()).abs() < 1e-8);
        }
        let k2 = build(2, false, &[(0, 1)]);
        let ec = eigenvector_centrality(&k2, 1e-12, 100_000).unwrap();
        for &x in &ec {
            assert!((x - 1.0 / 2.0f64.sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn eigenvector_centrality_star_matches_dense_eigensolve() {
        let star = build(4, false, &[(0, 1), (0, 2), (0, 3)]);
        let ec = eigenvector_centrality(&star, 1e-13, 200_000).unwrap();
        let mut a = DMatrix::<f64>::zeros(4, 4);
        for u in 0..4 {
            for &v in star.neighbors(u) {
                a[(u, v as usize)] = 1.0;
            }
        }
        let eig = nalgebra::SymmetricEigen::new(a);
        let top = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .unwrap()
            .0;
        let mut want: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
        if want[0] < 0.0 {
            for w in &mut want {
                *w = -*w;
            }
        }
        for (a, b) in ec.iter().zip(&want) {
            assert!((a - b).abs() < 1e-8, "{ec:?} vs {want:?}");
        }
    }

    #[test]
    fn betweenness_examples() {
        let bc = betweenness_centrality(&path3());
        assert_eq!(bc, vec![0.0, 1.0, 0.0]);

        // Star with 4 leaves: center bridges every leaf pair.
        let star = build(5, false, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let bc = betweenness_centrality(&star);
        assert!((bc[0] - 6.0).abs() < 1e-12);
        for &x in &bc[1..] {
            assert_eq!(x, 0.0);
        }

        // 4-cycle: opposite pairs have two shortest paths, split evenly.
        let c4 = build(4, false, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        for &x in &betweenness_centrality(&c4) {
            assert!((x - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn hits_examples() {
        let g = build(6, false, &[(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (2, 5)]);
        let (hub, authority) = hits(&g, 1e-12, 100_000).unwrap();
        for (h, a) in hub.iter().zip(&authority) {
            assert!((h - a).abs() < 1e-9);
        }
        let arc = build(2, true, &[(0, 1)]);
        let (hub, authority) = hits(&arc, 1e-12, 1000).unwrap();
        assert!((hub[0] - 1.0).abs() < 1e-9 && hub[1].abs() < 1e-9);
        assert!((authority[1] - 1.0).abs() < 1e-9 && authority[0].abs() < 1e-9);
    }

    #[test]
    fn hits_dag_matches_dense_eigensolve() {
        let g = build(4, true, &[(0, 2), (1, 2), (2, 3), (0, 3)]);
        let (hub, authority) = hits(&g, 1e-13, 200_000).unwrap();
        let mut a = DMatrix::<f64>::zeros(4, 4);
        for u in 0..4 {
            for &v in g.out_neighbors(u) {
                a[(u, v as usize)] = 1.0;
            }
        }
        let check = |got: &[f64], m: DMatrix<f64>| {
            let eig = nalgebra::SymmetricEigen::new(m);
            let top = eig
                .eigenvalues
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.total_cmp(y.1))
                .unwrap()
                .0;
            let mut want: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
            let flip = want.iter().fold(0.0f64, |acc, &w| acc + w);
            if flip < 0.0 {
                for w in &mut want {
                    *w = -*w;
                }
            }
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-7, "{got:?} vs {want:?}");
            }
        };
        check(&hub, &a * a.transpose());
        check(&authority, a.transpose() * &a);
    }
}
