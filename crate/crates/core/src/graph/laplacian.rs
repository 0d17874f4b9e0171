//! Matrix-free halved normalized Laplacian.

use crate::graph::SparseGraph;

/// A symmetric linear operator with spectrum in [0, 1], exposed only
/// through its matvec. Implementors must be safe for concurrent `apply`
/// calls on shared references.
pub trait SpectralOperator {
    /// Matrix dimension n.
    fn dim(&self) -> usize;

    /// y = X·x. Both slices have length `dim()`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Dense row-major materialization, built column by column through the
    /// matvec. Intended for small-n oracles only.
    fn materialize(&self) -> Vec<f64> {
        let n = self.dim();
        let mut dense = vec![0.0; n * n];
        let mut basis = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            basis[j] = 1.0;
            self.apply(&basis, &mut col);
            basis[j] = 0.0;
            for i in 0..n {
                dense[i * n + j] = col[i];
            }
        }
        dense
    }
}

/// The scaled operator X = L_norm / 2 where L_norm = D^(-1/2) (D - W) D^(-1/2).
///
/// Eigenvalues lie in [0, 1]. Zero-degree nodes get a zero row (their
/// D^(-1/2) entry is taken as 0), so each isolated vertex contributes an
/// eigenvalue 0, matching component-counting semantics.
pub struct LaplacianOperator<'g> {
    graph: &'g SparseGraph,
    inv_sqrt_degree: Vec<f64>,
    isolated_nodes: usize,
}

/// Fixed spectral scale: eigenvalues of L_norm in [0, 2] are halved to [0, 1].
pub const LAPLACIAN_SCALE: f64 = 0.5;

/// Build the scaled normalized-Laplacian operator for a graph.
pub fn normalized_laplacian(graph: &SparseGraph) -> LaplacianOperator<'_> {
    let degrees = graph.degrees();
    let isolated_nodes = degrees.iter().filter(|&&d| d == 0.0).count();
    let inv_sqrt_degree = degrees
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    LaplacianOperator {
        graph,
        inv_sqrt_degree,
        isolated_nodes,
    }
}

impl SparseGraph {
    /// See [`normalized_laplacian`].
    pub fn normalized_laplacian(&self) -> LaplacianOperator<'_> {
        normalized_laplacian(self)
    }
}

impl<'g> LaplacianOperator<'g> {
    pub fn graph(&self) -> &'g SparseGraph {
        self.graph
    }

    /// How many zero-degree nodes were mapped to zero rows.
    pub fn isolated_nodes(&self) -> usize {
        self.isolated_nodes
    }
}

impl SpectralOperator for LaplacianOperator<'_> {
    fn dim(&self) -> usize {
        self.graph.node_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        let s = &self.inv_sqrt_degree;
        for i in 0..self.dim() {
            if s[i] == 0.0 {
                y[i] = 0.0;
                continue;
            }
            let mut acc = 0.0;
            for (j, w) in self.graph.neighbors(i) {
                acc += w * s[j] * x[j];
            }
            y[i] = LAPLACIAN_SCALE * (x[i] - s[i] * acc);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SparseGraph;

    #[test]
    fn k2_matvec_matches_hand_computation() {
        let g = SparseGraph::from_unweighted_edges(2, [(0, 1)]).unwrap();
        let op = g.normalized_laplacian();
        let mut y = vec![0.0; 2];
        op.apply(&[1.0, 0.0], &mut y);
        // X = [[0.5, -0.5], [-0.5, 0.5]]
        assert_eq!(y, vec![0.5, -0.5]);
    }

    #[test]
    fn isolated_vertex_row_is_zero() {
        let g = SparseGraph::from_unweighted_edges(3, [(0, 1)]).unwrap();
        let op = g.normalized_laplacian();
        assert_eq!(op.isolated_nodes(), 1);
        let mut y = vec![0.0; 3];
        op.apply(&[1.0, 1.0, 1.0], &mut y);
        assert_eq!(y[2], 0.0);
    }

    #[test]
    fn materialize_is_symmetric() {
        let g = SparseGraph::from_unweighted_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let dense = g.normalized_laplacian().materialize();
        for i in 0..4 {
            for j in 0..4 {
                assert!((dense[i * 4 + j] - dense[j * 4 + i]).abs() < 1e-15);
            }
        }
    }
}
