//! Sparse undirected graphs and their normalized-Laplacian operators.
//!
//! Graphs are stored in compressed adjacency form with symmetric, strictly
//! positive edge weights; an absent entry means weight zero. All spectral
//! work in this crate goes through [`LaplacianOperator`], which exposes the
//! halved normalized Laplacian as a matrix-free matvec with eigenvalues in
//! [0, 1].

mod generate;
mod laplacian;
mod load;
mod perturb;

pub use generate::{
    barabasi_albert, erdos_renyi, planted_clusters, watts_strogatz, GraphModel, IntraModel,
    PlantedSpec,
};
pub use laplacian::{normalized_laplacian, LaplacianOperator, SpectralOperator};
pub use load::load_edge_list;
pub use perturb::{perturb_and_report, PerturbationReport};

use crate::error::{Error, Result};

/// Undirected weighted graph in compressed sparse row form.
///
/// Neighbor lists are sorted by node index and every undirected edge is
/// stored in both directions, so `w_ij == w_ji` holds structurally. No
/// self-loops are stored and all stored weights are strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseGraph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    edge_count: usize,
}

impl SparseGraph {
    /// Build a graph from undirected edges given once per pair.
    ///
    /// Edges may be listed in either orientation; they are canonicalized
    /// internally. Self-loops, out-of-range endpoints, non-positive weights,
    /// and duplicate pairs are rejected.
    pub fn from_undirected_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut canonical: Vec<(usize, usize, f64)> = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::arg(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::arg(format!("self-loop at node {u}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::arg(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            canonical.push((u.min(v), u.max(v), w));
        }
        canonical.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for pair in canonical.windows(2) {
            if (pair[0].0, pair[0].1) == (pair[1].0, pair[1].1) {
                return Err(Error::arg(format!(
                    "duplicate edge ({}, {})",
                    pair[0].0, pair[0].1
                )));
            }
        }
        Ok(Self::from_canonical_sorted(n, &canonical))
    }

    /// Convenience constructor for unit-weight edges.
    pub fn from_unweighted_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        Self::from_undirected_edges(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    /// `edges` must be canonical (u < v), sorted, and duplicate-free.
    fn from_canonical_sorted(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(u, v, _) in edges {
            counts[u + 1] += 1;
            counts[v + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let nnz = offsets[n];
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0usize; nnz];
        let mut weights = vec![0.0f64; nnz];
        for &(u, v, w) in edges {
            neighbors[cursor[u]] = v;
            weights[cursor[u]] = w;
            cursor[u] += 1;
            neighbors[cursor[v]] = u;
            weights[cursor[v]] = w;
            cursor[v] += 1;
        }
        // Rows were filled in ascending edge order, but a row receives its
        // lower-index neighbors (as second endpoints) after its higher-index
        // ones only when edges interleave; sort each row to restore order.
        for i in 0..n {
            let range = offsets[i]..offsets[i + 1];
            let mut row: Vec<(usize, f64)> = neighbors[range.clone()]
                .iter()
                .copied()
                .zip(weights[range.clone()].iter().copied())
                .collect();
            row.sort_by_key(|&(j, _)| j);
            for (slot, (j, w)) in range.clone().zip(row) {
                neighbors[slot] = j;
                weights[slot] = w;
            }
        }
        SparseGraph {
            n,
            offsets,
            neighbors,
            weights,
            edge_count: edges.len(),
        }
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbor list of `i` with weights.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.neighbors[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    /// Weighted degree d_i = Σ_j w_ij.
    pub fn degree(&self, i: usize) -> f64 {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.weights[range].iter().sum()
    }

    /// All weighted degrees.
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    /// True if the pair (u, v) carries an edge.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let range = self.offsets[u]..self.offsets[u + 1];
        self.neighbors[range].binary_search(&v).is_ok()
    }

    /// Number of connected components (undirected reachability).
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut stack = Vec::new();
        let mut components = 0;
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(i) = stack.pop() {
                for (j, _) in self.neighbors(i) {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        components
    }

    /// Undirected edge list in canonical (u < v) order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n {
            for (v, w) in self.neighbors(u) {
                if u < v {
                    out.push((u, v, w));
                }
            }
        }
        out
    }
}
