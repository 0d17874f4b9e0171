//! Random-graph generators, deterministic per seed.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::SparseGraph;

/// A random-graph family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum GraphModel {
    /// Independent edges with probability `p`.
    ErdosRenyi { p: f64 },
    /// Ring lattice of `k` nearest neighbors with rewiring probability `p`.
    WattsStrogatz { k: usize, p: f64 },
    /// Preferential attachment, `r` edges per arriving node.
    BarabasiAlbert { r: usize },
}

impl GraphModel {
    pub fn generate(&self, n: usize, seed: u64) -> Result<SparseGraph> {
        match *self {
            GraphModel::ErdosRenyi { p } => erdos_renyi(n, p, seed),
            GraphModel::WattsStrogatz { k, p } => watts_strogatz(n, k, p, seed),
            GraphModel::BarabasiAlbert { r } => barabasi_albert(n, r, seed),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GraphModel::ErdosRenyi { .. } => "erdos_renyi",
            GraphModel::WattsStrogatz { .. } => "watts_strogatz",
            GraphModel::BarabasiAlbert { .. } => "barabasi_albert",
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::arg(format!("need n >= 2, got {n}")));
    }
    Ok(())
}

/// G(n, p): every pair carries an edge independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<SparseGraph> {
    check_n(n)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    SparseGraph::from_unweighted_edges(n, edges)
}

/// Watts–Strogatz small world: ring of `n` nodes each joined to its `k`
/// nearest neighbors (`k` even), then each lattice edge is rewired with
/// probability `p` to a uniform target, rejecting self-loops and duplicates.
pub fn watts_strogatz(n: usize, k: usize, p: f64, seed: u64) -> Result<SparseGraph> {
    check_n(n)?;
    if k == 0 || k % 2 != 0 || k >= n {
        return Err(Error::arg(format!(
            "ring degree k must be even and in [2, n), got k = {k}, n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg(format!("rewiring probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present: BTreeSet<(usize, usize)> = BTreeSet::new();
    let canon = |a: usize, b: usize| (a.min(b), a.max(b));
    for offset in 1..=(k / 2) {
        for i in 0..n {
            present.insert(canon(i, (i + offset) % n));
        }
    }
    for offset in 1..=(k / 2) {
        for i in 0..n {
            let old = canon(i, (i + offset) % n);
            if rng.random::<f64>() >= p || !present.contains(&old) {
                continue;
            }
            // Up to n attempts to find a free target; keep the lattice edge
            // if the neighborhood is saturated.
            for _ in 0..n {
                let t = rng.random_range(0..n);
                let candidate = canon(i, t);
                if t == i || present.contains(&candidate) {
                    continue;
                }
                present.remove(&old);
                present.insert(candidate);
                break;
            }
        }
    }
    SparseGraph::from_unweighted_edges(n, present)
}

/// Barabási–Albert preferential attachment.
///
/// Starts from a single node; the node arriving at step t attaches to
/// min(r, t) distinct existing nodes sampled proportionally to degree
/// (uniformly while all degrees are still zero).
pub fn barabasi_albert(n: usize, r: usize, seed: u64) -> Result<SparseGraph> {
    check_n(n)?;
    if r == 0 || r >= n {
        return Err(Error::arg(format!(
            "attachment count r must be in [1, n), got r = {r}, n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // One entry per edge endpoint: sampling uniformly from this list is
    // sampling nodes proportionally to degree.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * n * r);
    let mut edges = Vec::with_capacity(n * r);
    for v in 1..n {
        let t = r.min(v);
        let mut chosen = BTreeSet::new();
        while chosen.len() < t {
            let target = if endpoints.is_empty() {
                rng.random_range(0..v)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            chosen.insert(target);
        }
        for &u in &chosen {
            edges.push((v, u));
            endpoints.push(v);
            endpoints.push(u);
        }
    }
    SparseGraph::from_unweighted_edges(n, edges)
}

/// Model used inside each planted cluster.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum IntraModel {
    /// Every pair inside the cluster is connected.
    Complete,
    ErdosRenyi { p: f64 },
    WattsStrogatz { k: usize, p: f64 },
    BarabasiAlbert { r: usize },
    /// Cycle through ER(0.5), WS(k=4, p=0.3), BA(r=2) per cluster.
    Mixed,
}

/// Specification of a planted-cluster graph: disjoint dense sub-graphs plus
/// a small number of uniformly chosen inter-cluster edges.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PlantedSpec {
    pub sizes: Vec<usize>,
    pub intra: IntraModel,
    pub inter_edges: usize,
}

/// Generate a planted-cluster graph; the ground-truth cluster count is the
/// number of planted blocks.
pub fn planted_clusters(spec: &PlantedSpec, seed: u64) -> Result<(SparseGraph, usize)> {
    if spec.sizes.is_empty() {
        return Err(Error::arg("planted graph needs at least one cluster"));
    }
    if spec.sizes.iter().any(|&s| s == 0) {
        return Err(Error::arg("cluster sizes must be positive"));
    }
    let n: usize = spec.sizes.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = Vec::new();

    let mut cluster_of = vec![0usize; n];
    let mut offset = 0;
    for (c, &size) in spec.sizes.iter().enumerate() {
        for slot in &mut cluster_of[offset..offset + size] {
            *slot = c;
        }
        let block_seed = rng.random::<u64>();
        let block = match (spec.intra, c % 3) {
            (IntraModel::Complete, _) => None,
            (IntraModel::ErdosRenyi { p }, _) => Some(GraphModel::ErdosRenyi { p }),
            (IntraModel::WattsStrogatz { k, p }, _) => Some(GraphModel::WattsStrogatz { k, p }),
            (IntraModel::BarabasiAlbert { r }, _) => Some(GraphModel::BarabasiAlbert { r }),
            (IntraModel::Mixed, 0) => Some(GraphModel::ErdosRenyi { p: 0.5 }),
            (IntraModel::Mixed, 1) => Some(GraphModel::WattsStrogatz { k: 4, p: 0.3 }),
            (IntraModel::Mixed, _) => Some(GraphModel::BarabasiAlbert { r: 2 }),
        };
        match block {
            None => {
                for a in 0..size {
                    for b in (a + 1)..size {
                        edges.push((offset + a, offset + b));
                    }
                }
            }
            Some(model) if size == 1 => {
                let _ = model; // single node, nothing to wire
            }
            Some(model) => {
                let g = model.generate(size, block_seed)?;
                for (a, b, _) in g.edges() {
                    edges.push((offset + a, offset + b));
                }
            }
        }
        offset += size;
    }

    let cross_pairs: usize = {
        let total = n * (n - 1) / 2;
        let intra: usize = spec.sizes.iter().map(|&s| s * (s - 1) / 2).sum();
        total - intra
    };
    if spec.inter_edges > cross_pairs {
        return Err(Error::arg(format!(
            "requested {} inter-cluster edges but only {} cross pairs exist",
            spec.inter_edges, cross_pairs
        )));
    }

    let mut present: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    let mut placed = 0;
    while placed < spec.inter_edges {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v || cluster_of[u] == cluster_of[v] {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if present.insert(key) {
            edges.push(key);
            placed += 1;
        }
    }

    let graph = SparseGraph::from_unweighted_edges(n, edges)?;
    Ok((graph, spec.sizes.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_p1_is_complete() {
        let g = erdos_renyi(4, 1.0, 0).unwrap();
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn er_is_deterministic_per_seed() {
        let a = erdos_renyi(50, 0.2, 9).unwrap();
        let b = erdos_renyi(50, 0.2, 9).unwrap();
        let c = erdos_renyi(50, 0.2, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn ba_r1_is_tree() {
        let g = barabasi_albert(5, 1, 3).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.component_count(), 1);
    }

    #[test]
    fn ws_keeps_edge_count() {
        let g = watts_strogatz(30, 4, 0.3, 7).unwrap();
        assert_eq!(g.edge_count(), 30 * 2);
        assert!(g.edges().iter().all(|&(u, v, _)| u != v));
    }

    #[test]
    fn ws_rejects_odd_k() {
        assert!(watts_strogatz(10, 3, 0.1, 0).is_err());
        assert!(watts_strogatz(10, 10, 0.1, 0).is_err());
    }

    #[test]
    fn planted_disjoint_triangles() {
        let spec = PlantedSpec {
            sizes: vec![3, 3, 3],
            intra: IntraModel::Complete,
            inter_edges: 0,
        };
        let (g, truth) = planted_clusters(&spec, 0).unwrap();
        assert_eq!(truth, 3);
        assert_eq!(g.node_count(), 9);
        assert_eq!(g.edge_count(), 9);
        assert_eq!(g.component_count(), 3);
    }

    #[test]
    fn planted_inter_edges_connect_distinct_blocks() {
        let spec = PlantedSpec {
            sizes: vec![4, 4, 4],
            intra: IntraModel::Complete,
            inter_edges: 5,
        };
        let (g, _) = planted_clusters(&spec, 1).unwrap();
        assert_eq!(g.edge_count(), 3 * 6 + 5);
        let cross = g
            .edges()
            .iter()
            .filter(|&&(u, v, _)| u / 4 != v / 4)
            .count();
        assert_eq!(cross, 5);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(erdos_renyi(4, 1.5, 0).is_err());
        assert!(erdos_renyi(1, 0.5, 0).is_err());
        assert!(barabasi_albert(4, 0, 0).is_err());
        assert!(barabasi_albert(4, 4, 0).is_err());
    }
}
