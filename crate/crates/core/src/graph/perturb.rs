//! Edge perturbations and the induced normalized-Laplacian difference.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::SparseGraph;

/// Norm data for a perturbation G -> G'.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PerturbationReport {
    /// Entrywise L1 norm of L_norm(G') - L_norm(G) (unscaled Laplacians).
    pub l1_diff: f64,
    /// Accumulated closed-form per-edge growth of that norm: for each added
    /// edge (i, j), 2·|Σ_{g∈N(i)} w_ig (1/√(d_g d_i) − 1/√(d_g (d_i+1)))
    /// + Σ_{h∈N(j)} w_jh (1/√(d_h d_j) − 1/√(d_h (d_j+1)))
    /// + 1/√((d_i+1)(d_j+1))|, evaluated on the graph state with all
    /// previously listed edges already added.
    pub spectral_diff_bound: f64,
    /// The edges that were added, in input order.
    pub edges_added: Vec<(usize, usize)>,
}

/// Add unit-weight edges to `g` and report the normalized-Laplacian change.
///
/// Every requested edge must be absent from `g` and not repeated in the
/// request.
pub fn perturb_and_report(
    g: &SparseGraph,
    new_edges: &[(usize, usize)],
) -> Result<(SparseGraph, PerturbationReport)> {
    let n = g.node_count();
    let mut adjacency: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for u in 0..n {
        for (v, w) in g.neighbors(u) {
            adjacency[u].insert(v, w);
        }
    }
    let mut degrees = g.degrees();

    let mut bound = 0.0;
    for &(u, v) in new_edges {
        if u >= n || v >= n {
            return Err(Error::arg(format!("edge ({u}, {v}) out of range")));
        }
        if u == v {
            return Err(Error::arg(format!("self-loop at node {u}")));
        }
        if adjacency[u].contains_key(&v) {
            return Err(Error::arg(format!("edge ({u}, {v}) already present")));
        }
        bound += single_edge_growth(&adjacency, &degrees, u, v);
        adjacency[u].insert(v, 1.0);
        adjacency[v].insert(u, 1.0);
        degrees[u] += 1.0;
        degrees[v] += 1.0;
    }

    let edges: Vec<(usize, usize, f64)> = adjacency
        .iter()
        .enumerate()
        .flat_map(|(u, row)| {
            row.iter()
                .filter(move |&(&v, _)| u < v)
                .map(move |(&v, &w)| (u, v, w))
        })
        .collect();
    let perturbed = SparseGraph::from_undirected_edges(n, edges)?;

    let report = PerturbationReport {
        l1_diff: laplacian_l1_difference(g, &perturbed),
        spectral_diff_bound: bound,
        edges_added: new_edges.to_vec(),
    };
    Ok((perturbed, report))
}

/// Closed-form entrywise-L1 growth for adding one unit edge (u, v), on the
/// current adjacency state. N(u), N(v) are neighborhoods before the edge.
fn single_edge_growth(
    adjacency: &[BTreeMap<usize, f64>],
    degrees: &[f64],
    u: usize,
    v: usize,
) -> f64 {
    let side = |i: usize| -> f64 {
        let di = degrees[i];
        adjacency[i]
            .iter()
            .map(|(&gg, &w)| {
                let dg = degrees[gg];
                w * (1.0 / (dg * di).sqrt() - 1.0 / (dg * (di + 1.0)).sqrt())
            })
            .sum()
    };
    let cross = 1.0 / ((degrees[u] + 1.0) * (degrees[v] + 1.0)).sqrt();
    2.0 * (side(u) + side(v) + cross).abs()
}

/// Exact entrywise L1 norm of L_norm(b) - L_norm(a), computed row by row
/// over the union sparsity pattern.
fn laplacian_l1_difference(a: &SparseGraph, b: &SparseGraph) -> f64 {
    assert_eq!(a.node_count(), b.node_count());
    let n = a.node_count();
    let da = a.degrees();
    let db = b.degrees();
    let sa: Vec<f64> = da
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    let sb: Vec<f64> = db
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();

    let mut total = 0.0;
    for i in 0..n {
        // Diagonal of L_norm is 1 for non-isolated nodes, 0 otherwise.
        let diag_a: f64 = if da[i] > 0.0 { 1.0 } else { 0.0 };
        let diag_b: f64 = if db[i] > 0.0 { 1.0 } else { 0.0 };
        total += (diag_b - diag_a).abs();

        let row_a: BTreeMap<usize, f64> = a.neighbors(i).collect();
        let row_b: BTreeMap<usize, f64> = b.neighbors(i).collect();
        for (&j, &w) in &row_a {
            let va = -w * sa[i] * sa[j];
            let vb = row_b.get(&j).map_or(0.0, |&wb| -wb * sb[i] * sb[j]);
            total += (vb - va).abs();
        }
        for (&j, &w) in &row_b {
            if !row_a.contains_key(&j) {
                total += (w * sb[i] * sb[j]).abs();
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SparseGraph;

    fn two_cliques(k: usize) -> SparseGraph {
        let mut edges = Vec::new();
        for base in [0, k] {
            for a in 0..k {
                for b in (a + 1)..k {
                    edges.push((base + a, base + b));
                }
            }
        }
        SparseGraph::from_unweighted_edges(2 * k, edges).unwrap()
    }

    #[test]
    fn empty_perturbation_is_identity() {
        let g = two_cliques(4);
        let (g2, report) = perturb_and_report(&g, &[]).unwrap();
        assert_eq!(g2, g);
        assert_eq!(report.l1_diff, 0.0);
        assert_eq!(report.spectral_diff_bound, 0.0);
    }

    #[test]
    fn single_bridge_matches_closed_form() {
        // Two 4-cliques joined by one edge; d_i = d_j = 3 beforehand.
        let g = two_cliques(4);
        let (_, report) = perturb_and_report(&g, &[(0, 4)]).unwrap();
        let per_neighbor = 1.0 / 3.0 - 1.0 / 12.0f64.sqrt();
        let expected = 2.0 * (2.0 * 3.0 * per_neighbor + 0.25);
        assert!(
            (report.spectral_diff_bound - expected).abs() < 1e-12,
            "bound {} vs {}",
            report.spectral_diff_bound,
            expected
        );
        // For a single added edge the closed form IS the L1 difference.
        assert!(
            (report.l1_diff - expected).abs() < 1e-12,
            "l1 {} vs {}",
            report.l1_diff,
            expected
        );
    }

    #[test]
    fn duplicate_edge_rejected() {
        let g = two_cliques(3);
        assert!(perturb_and_report(&g, &[(0, 1)]).is_err());
        assert!(perturb_and_report(&g, &[(0, 3), (0, 3)]).is_err());
    }
}
