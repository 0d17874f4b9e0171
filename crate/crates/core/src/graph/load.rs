//! SNAP-style edge-list ingestion.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::SparseGraph;

/// Load an undirected graph from a whitespace-separated edge list.
///
/// Lines starting with `#` are comments. Each data line holds two integer
/// node ids and an optional positive weight (default 1). Node ids are
/// compacted to [0, n) in ascending order of the original ids. A symmetric
/// pair listed in both orientations collapses to one edge; identical
/// directed lines repeated in the same orientation have their weights
/// summed. Self-loop lines register the node but store no edge.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<SparseGraph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);

    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    // Per canonical pair, accumulate the two directed weight sums separately
    // so duplicate symmetric listings collapse instead of doubling.
    let mut pairs: BTreeMap<(u64, u64), [f64; 2]> = BTreeMap::new();
    let mut ids: BTreeMap<u64, usize> = BTreeMap::new();
    let mut data_lines = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        data_lines += 1;
        let mut fields = trimmed.split_whitespace();
        let a: u64 = fields
            .next()
            .unwrap()
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad source id: {e}")))?;
        let b: u64 = fields
            .next()
            .ok_or_else(|| parse_err(lineno, "missing target id".into()))?
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad target id: {e}")))?;
        let w: f64 = match fields.next() {
            Some(tok) => tok
                .parse()
                .map_err(|e| parse_err(lineno, format!("bad weight: {e}")))?,
            None => 1.0,
        };
        if fields.next().is_some() {
            return Err(parse_err(lineno, "more than three columns".into()));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(parse_err(lineno, format!("negative or non-finite weight {w}")));
        }
        ids.entry(a).or_insert(0);
        ids.entry(b).or_insert(0);
        if a == b || w == 0.0 {
            continue;
        }
        let key = (a.min(b), a.max(b));
        let dir = usize::from(a > b);
        pairs.entry(key).or_insert([0.0, 0.0])[dir] += w;
    }

    if data_lines == 0 {
        return Err(parse_err(0, "no edges in file".into()));
    }

    for (next, (_, slot)) in ids.iter_mut().enumerate() {
        *slot = next;
    }
    let n = ids.len();

    let edges: Vec<(usize, usize, f64)> = pairs
        .into_iter()
        .map(|((a, b), sums)| (ids[&a], ids[&b], sums[0].max(sums[1])))
        .collect();
    SparseGraph::from_undirected_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn plain_path_graph() {
        let f = write_tmp("0 1\n1 2\n");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), vec![(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(g.degrees(), vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn comments_skipped() {
        let f = write_tmp("# a snap header\n# more\n0 1\n");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn symmetric_pair_collapses() {
        let f = write_tmp("0 1\n1 0\n");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges(), vec![(0, 1, 1.0)]);
    }

    #[test]
    fn repeated_directed_lines_sum() {
        let f = write_tmp("0 1\n0 1\n");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.edges(), vec![(0, 1, 2.0)]);
    }

    #[test]
    fn ids_compact_in_ascending_order() {
        let f = write_tmp("10 7\n7 3\n");
        let g = load_edge_list(f.path()).unwrap();
        // 3 -> 0, 7 -> 1, 10 -> 2
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), vec![(0, 1, 1.0), (1, 2, 1.0)]);
    }

    #[test]
    fn malformed_line_reports_number() {
        let f = write_tmp("0 1\nx 2\n");
        let err = load_edge_list(f.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":2:"), "{msg}");
    }

    #[test]
    fn empty_file_is_error() {
        let f = write_tmp("# only comments\n");
        assert!(load_edge_list(f.path()).is_err());
    }

    #[test]
    fn weighted_third_column() {
        let f = write_tmp("0 1 2.5\n1 2 0.5\n");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.edges(), vec![(0, 1, 2.5), (1, 2, 0.5)]);
    }
}
