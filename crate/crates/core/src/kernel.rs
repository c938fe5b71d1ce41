//! Per-level embedding kernel: vertex description (centroid distances turned
//! into cluster-membership probabilities) and vertex aggregation over
//! neighbors, in undirected, directed, and edge-labeled variants.
//!
//! Description and aggregation are phase-barrier parallel over nodes: all
//! description rows are complete before any aggregation row is computed, and
//! each output row is written by exactly one task, so results do not depend
//! on thread count.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::Matrix;
use crate::mlkit::{KMeansModel, Scaler};

/// Initial node representation: the node degree copied across `c` columns;
/// directed graphs get `2c` columns (in-degree block first, then out-degree).
pub fn degree_init(g: &Graph, c: usize) -> Matrix {
    let n = g.node_count();
    if g.is_directed() {
        let in_deg = g.in_degrees();
        let out_deg = g.out_degrees();
        Matrix::build_rows(n, 2 * c, |u, row| {
            row[..c].fill(in_deg[u] as f64);
            row[c..].fill(out_deg[u] as f64);
        })
    } else {
        let deg = g.out_degrees();
        Matrix::build_rows(n, c, |u, row| row.fill(deg[u] as f64))
    }
}

/// Scales the representation, computes centroid distances, and inverts them
/// into per-row cluster membership probabilities:
/// `(max - d_k) / (max - min)`, normalized to sum 1. A degenerate row (all
/// distances equal, including the single-cluster case) becomes uniform.
///
/// Every output row is nonnegative and sums to 1.
pub fn vertex_description(emb: &Matrix, kmeans: &KMeansModel, scaler: &Scaler) -> Result<Matrix> {
    let scaled = scaler.transform(emb)?;
    let mut dist = kmeans.distances(&scaled)?;
    let c = kmeans.cluster_count();
    if c == 0 {
        return Err(Error::NotFitted);
    }
    let uniform = 1.0 / c as f64;
    dist.data_mut()
        .chunks_mut(c)
        .for_each(|row| invert_distances(row, uniform));
    Ok(dist)
}

fn invert_distances(row: &mut [f64], uniform: f64) {
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for &d in row.iter() {
        max = max.max(d);
        min = min.min(d);
    }
    let range = max - min;
    if range == 0.0 {
        row.fill(uniform);
        return;
    }
    let inv_range = 1.0 / range;
    let mut sum = 0.0;
    for d in row.iter_mut() {
        *d = (max - *d) * inv_range;
        sum += *d;
    }
    let inv_sum = 1.0 / sum;
    for d in row.iter_mut() {
        *d *= inv_sum;
    }
}

/// `CR_u = sum of DV_v over neighbors v`, summed in ascending neighbor order.
/// Row sums equal node degrees.
pub fn aggregate_undirected(g: &Graph, dv: &Matrix) -> Matrix {
    let c = dv.cols();
    Matrix::build_rows(g.node_count(), c, |u, row| {
        for &v in g.neighbors(u) {
            add_assign(row, dv.row(v as usize));
        }
    })
}

/// Directed aggregation: the in-neighbor sum followed by the out-neighbor
/// sum (`|V| x 2c`, in-block first).
pub fn aggregate_directed(g: &Graph, dv: &Matrix) -> Result<Matrix> {
    if !g.is_directed() {
        return Err(Error::VariantMismatch(
            "directed aggregation on an undirected graph".into(),
        ));
    }
    let c = dv.cols();
    Ok(Matrix::build_rows(g.node_count(), 2 * c, |u, row| {
        let (in_block, out_block) = row.split_at_mut(c);
        for &v in g.in_neighbors(u) {
            add_assign(in_block, dv.row(v as usize));
        }
        for &v in g.out_neighbors(u) {
            add_assign(out_block, dv.row(v as usize));
        }
    }))
}

/// Edge-labeled aggregation: `nel` contiguous blocks of size `c`; block `el`
/// accumulates the descriptions of neighbors reached via label-`el` edges.
/// Inference labels must stay inside the trained range.
pub fn aggregate_edge_labeled(g: &Graph, dv: &Matrix, nel: usize) -> Result<Matrix> {
    if let Some(max) = g.max_edge_label() {
        if max as usize >= nel {
            let (from, to, label) = find_edge_with_label(g, max);
            return Err(Error::EdgeLabelOutOfRange {
                from,
                to,
                label,
                limit: nel,
            });
        }
    } else if g.node_count() > 0 && g.edge_count() > 0 {
        return Err(Error::VariantMismatch(
            "edge-labeled aggregation on a graph without edge labels".into(),
        ));
    }
    let c = dv.cols();
    Ok(Matrix::build_rows(g.node_count(), c * nel, |u, row| {
        let labels = g.edge_labels(u).unwrap_or(&[]);
        for (&v, &el) in g.neighbors(u).iter().zip(labels) {
            let at = el as usize * c;
            add_assign(&mut row[at..at + c], dv.row(v as usize));
        }
    }))
}

fn find_edge_with_label(g: &Graph, label: u32) -> (usize, usize, u32) {
    for u in 0..g.node_count() {
        if let Some(labels) = g.edge_labels(u) {
            for (i, &l) in labels.iter().enumerate() {
                if l == label {
                    return (u, g.neighbors(u)[i] as usize, l);
                }
            }
        }
    }
    (0, 0, label)
}

/// Appends a one-hot node-label block after the structural block
/// (`|V| x (dim + nnl)`); applied before scaling/clustering at every level.
pub fn attach_node_labels(emb: &Matrix, labels: &[u32], nnl: usize) -> Result<Matrix> {
    if nnl == 0 {
        return Ok(emb.clone());
    }
    if labels.len() != emb.rows() {
        return Err(Error::DimensionMismatch {
            expected: emb.rows(),
            got: labels.len(),
        });
    }
    if let Some((node, &label)) = labels.iter().enumerate().find(|(_, &l)| l as usize >= nnl) {
        return Err(Error::NodeLabelOutOfRange {
            node,
            label,
            limit: nnl,
        });
    }
    let dim = emb.cols();
    Ok(Matrix::build_rows(emb.rows(), dim + nnl, |u, row| {
        row[..dim].copy_from_slice(emb.row(u));
        row[dim + labels[u] as usize] = 1.0;
    }))
}

#[inline]
fn add_assign(acc: &mut [f64], row: &[f64]) {
    for (a, &x) in acc.iter_mut().zip(row) {
        *a += x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlkit::KMeansInit;

    fn fitted_scaler(dim: usize) -> Scaler {
        // Identity-ish scaler: mean 0, variance 1 on every dimension.
        Scaler::from_parts(2, vec![0.0; dim], vec![2.0; dim]).unwrap()
    }

    fn model_with_centroids(rows: Vec<Vec<f64>>) -> KMeansModel {
        let counts = vec![1; rows.len()];
        KMeansModel::from_parts(Matrix::from_rows(rows), counts).unwrap()
    }

    #[test]
    fn description_follows_the_inversion_formula() {
        // Distances from (0,0) to the centroids are (0, 5, 10).
        let km = model_with_centroids(vec![vec![0.0, 0.0], vec![3.0, 4.0], vec![6.0, 8.0]]);
        let emb = Matrix::from_rows(vec![vec![0.0, 0.0]]);
        let dv = vertex_description(&emb, &km, &fitted_scaler(2)).unwrap();
        let row = dv.row(0);
        assert!((row[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((row[1] - 1.0 / 3.0).abs() < 1e-12);
        assert!(row[2].abs() < 1e-12);
    }

    #[test]
    fn equidistant_row_is_uniform() {
        let km = model_with_centroids(vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ]);
        let emb = Matrix::from_rows(vec![vec![0.0, 0.0]]);
        let dv = vertex_description(&emb, &km, &fitted_scaler(2)).unwrap();
        for &x in dv.row(0) {
            assert!((x - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn two_clusters_give_one_hot() {
        let km = model_with_centroids(vec![vec![0.0], vec![4.0]]);
        let emb = Matrix::from_rows(vec![vec![1.0], vec![3.0]]);
        let dv = vertex_description(&emb, &km, &fitted_scaler(1)).unwrap();
        assert_eq!(dv.row(0), &[1.0, 0.0]);
        assert_eq!(dv.row(1), &[0.0, 1.0]);
    }

    #[test]
    fn undirected_aggregation_sums_neighbors() {
        let (g, _) = Graph::build(3, false, &[(0, 1), (1, 2), (2, 0)], None, None, None).unwrap();
        let dv = Matrix::from_rows(vec![vec![2.0 / 3.0, 1.0 / 3.0, 0.0]; 3]);
        let cr = aggregate_undirected(&g, &dv);
        for u in 0..3 {
            let row = cr.row(u);
            assert!((row[0] - 4.0 / 3.0).abs() < 1e-12);
            assert!((row[1] - 2.0 / 3.0).abs() < 1e-12);
            assert!(row[2].abs() < 1e-12);
            assert!((row.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn isolated_node_aggregates_to_zero() {
        let (g, _) = Graph::build(3, false, &[(0, 1)], None, None, None).unwrap();
        let dv = Matrix::from_rows(vec![vec![1.0, 0.0]; 3]);
        let cr = aggregate_undirected(&g, &dv);
        assert_eq!(cr.row(2), &[0.0, 0.0]);
    }

    #[test]
    fn star_center_collects_leaves() {
        let (g, _) = Graph::build(4, false, &[(0, 1), (0, 2), (0, 3)], None, None, None).unwrap();
        let dv = Matrix::from_rows(vec![vec![1.0, 0.0]; 4]);
        let cr = aggregate_undirected(&g, &dv);
        assert_eq!(cr.row(0), &[3.0, 0.0]);
    }

    #[test]
    fn directed_aggregation_splits_in_and_out() {
        let (g, _) = Graph::build(2, true, &[(0, 1)], None, None, None).unwrap();
        let dv = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let cr = aggregate_directed(&g, &dv).unwrap();
        assert_eq!(cr.row(1), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(cr.row(0), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn two_cycle_is_symmetric() {
        let (g, _) = Graph::build(2, true, &[(0, 1), (1, 0)], None, None, None).unwrap();
        let dv = Matrix::from_rows(vec![vec![1.0, 0.0]; 2]);
        let cr = aggregate_directed(&g, &dv).unwrap();
        assert_eq!(cr.row(0), &[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(cr.row(0), cr.row(1));
    }

    #[test]
    fn edge_labels_select_blocks() {
        let (g, _) = Graph::build(2, false, &[(0, 1)], Some(&[1]), None, None).unwrap();
        let dv = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let cr = aggregate_edge_labeled(&g, &dv, 2).unwrap();
        assert_eq!(cr.row(0), &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(cr.row(1), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn one_unit_per_label_block() {
        let (g, _) = Graph::build(3, false, &[(0, 1), (0, 2)], Some(&[0, 1]), None, None).unwrap();
        let dv = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0]]);
        let cr = aggregate_edge_labeled(&g, &dv, 2).unwrap();
        assert_eq!(cr.row(0), &[0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn single_label_matches_undirected() {
        let (g, _) = Graph::build(
            4,
            false,
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
            Some(&[0, 0, 0, 0]),
            None,
            None,
        )
        .unwrap();
        let dv = Matrix::from_rows(vec![
            vec![0.5, 0.5],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.25, 0.75],
        ]);
        let labeled = aggregate_edge_labeled(&g, &dv, 1).unwrap();
        let plain = aggregate_undirected(&g, &dv);
        assert_eq!(labeled, plain);
    }

    #[test]
    fn out_of_range_edge_label_names_the_edge() {
        let (g, _) = Graph::build(2, false, &[(0, 1)], Some(&[3]), None, None).unwrap();
        let dv = Matrix::from_rows(vec![vec![1.0]; 2]);
        let err = aggregate_edge_labeled(&g, &dv, 2).unwrap_err();
        assert!(matches!(
            err,
            Error::EdgeLabelOutOfRange {
                label: 3,
                limit: 2,
                ..
            }
        ));
    }

    #[test]
    fn node_label_one_hot_suffix() {
        let emb = Matrix::from_rows(vec![vec![7.0, 8.0]]);
        let out = attach_node_labels(&emb, &[1], 3).unwrap();
        assert_eq!(out.row(0), &[7.0, 8.0, 0.0, 1.0, 0.0]);
        let identity = attach_node_labels(&emb, &[], 0).unwrap();
        assert_eq!(identity, emb);
    }

    #[test]
    fn same_structure_different_labels_differ() {
        let emb = Matrix::from_rows(vec![vec![1.0], vec![1.0]]);
        let out = attach_node_labels(&emb, &[0, 1], 2).unwrap();
        assert_ne!(out.row(0), out.row(1));
    }

    #[test]
    fn node_label_out_of_range_errors() {
        let emb = Matrix::from_rows(vec![vec![1.0]]);
        let err = attach_node_labels(&emb, &[5], 3).unwrap_err();
        assert!(matches!(
            err,
            Error::NodeLabelOutOfRange {
                label: 5,
                limit: 3,
                ..
            }
        ));
    }

    #[test]
    fn degree_init_shapes() {
        let (g, _) = Graph::build(3, false, &[(0, 1), (1, 2)], None, None, None).unwrap();
        let m = degree_init(&g, 4);
        assert_eq!((m.rows(), m.cols()), (3, 4));
        assert_eq!(m.row(1), &[2.0, 2.0, 2.0, 2.0]);

        let (d, _) = Graph::build(2, true, &[(0, 1)], None, None, None).unwrap();
        let m = degree_init(&d, 2);
        assert_eq!((m.rows(), m.cols()), (2, 4));
        assert_eq!(m.row(0), &[0.0, 0.0, 1.0, 1.0]);
        assert_eq!(m.row(1), &[1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn kmeans_description_end_to_end_simplex() {
        // Fit a small k-means on real data and check the simplex invariant.
        let mut km = KMeansModel::new(3);
        let data = Matrix::build_rows(32, 2, |i, row| {
            row[0] = (i % 7) as f64;
            row[1] = (i % 5) as f64;
        });
        km.partial_fit(
            &data,
            &KMeansInit {
                seed: 1,
                iterations: 20,
            },
        )
        .unwrap();
        let mut scaler = Scaler::new();
        scaler.partial_fit(&data).unwrap();
        let dv = vertex_description(&data, &km, &scaler).unwrap();
        for row in dv.iter_rows() {
            assert!(row.iter().all(|&x| x >= 0.0));
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
