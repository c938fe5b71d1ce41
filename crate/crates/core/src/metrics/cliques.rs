//! Node clique number via Bron-Kerbosch maximal clique enumeration with
//! pivoting.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Size of the largest maximal clique containing each node. Enumeration is
/// capped at `budget` maximal cliques; exceeding it is an error rather than
/// a silent truncation.
pub fn node_clique_number(g: &Graph, budget: usize) -> Result<Vec<f64>> {
    if g.is_directed() {
        return Err(Error::UndirectedOnly("node clique number"));
    }
    let n = g.node_count();
    let mut best = vec![0usize; n];
    let mut count = 0usize;
    let mut r: Vec<u32> = Vec::new();
    let p: Vec<u32> = (0..n as u32).collect();
    bron_kerbosch(g, &mut r, p, Vec::new(), &mut count, budget, &mut best)?;
    Ok(best.into_iter().map(|b| b as f64).collect())
}

fn bron_kerbosch(
    g: &Graph,
    r: &mut Vec<u32>,
    p: Vec<u32>,
    mut x: Vec<u32>,
    count: &mut usize,
    budget: usize,
    best: &mut [usize],
) -> Result<()> {
    if p.is_empty() && x.is_empty() {
        *count += 1;
        if *count > budget {
            return Err(Error::CliqueBudgetExceeded { budget });
        }
        for &v in r.iter() {
            let b = &mut best[v as usize];
            *b = (*b).max(r.len());
        }
        return Ok(());
    }
    // Pivot on the vertex of P ∪ X with the most neighbors in P.
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| intersect_count(g.neighbors(u as usize), &p))
        .unwrap();
    let pivot_nbrs = g.neighbors(pivot as usize);
    let candidates: Vec<u32> = p
        .iter()
        .copied()
        .filter(|v| pivot_nbrs.binary_search(v).is_err())
        .collect();

    let mut p = p;
    for v in candidates {
        let nbrs = g.neighbors(v as usize);
        r.push(v);
        bron_kerbosch(
            g,
            r,
            intersect(&p, nbrs),
            intersect(&x, nbrs),
            count,
            budget,
            best,
        )?;
        r.pop();
        if let Ok(pos) = p.binary_search(&v) {
            p.remove(pos);
        }
        if let Err(pos) = x.binary_search(&v) {
            x.insert(pos, v);
        }
    }
    Ok(())
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            i += 1;
        } else if a[i] > b[j] {
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
            j += 1;
        }
    }
    out
}

fn intersect_count(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            i += 1;
        } else if a[i] > b[j] {
            j += 1;
        } else {
            c += 1;
            i += 1;
            j += 1;
        }
    }
    c
}
