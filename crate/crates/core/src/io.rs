//! Plain-text formats for graphs and cluster labels.
//!
//! Edge lists are whitespace-separated `u v` lines; label files are
//! `vertex cluster` lines. `#` starts a comment in both formats and blank
//! lines are ignored. All writers emit sorted, normalized output so a
//! write/read round trip is the identity.

use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{ClusterLabeling, Graph};

/// Result of parsing an edge list: the graph plus counts of dropped lines.
#[derive(Debug, Clone)]
pub struct EdgeListDocument {
    /// The parsed graph, with `n = 1 + max vertex id`.
    pub graph: Graph,
    /// Number of self-loop lines that were dropped.
    pub self_loops_dropped: usize,
    /// Number of duplicate edge lines that were dropped.
    pub duplicates_dropped: usize,
}

impl EdgeListDocument {
    /// Total number of dropped lines.
    pub fn dropped(&self) -> usize {
        self.self_loops_dropped + self.duplicates_dropped
    }
}

fn effective_line(raw: &str) -> &str {
    let no_comment = raw.split('#').next().unwrap_or("");
    no_comment.trim()
}

fn parse_id(token: &str, line: usize) -> Result<u32> {
    token
        .parse::<u32>()
        .map_err(|_| Error::parse(line, format!("expected a vertex id, got {token:?}")))
}

/// Parse an edge list from text.
///
/// The vertex count is `1 + max vertex id` (so sparse ids produce isolated
/// vertices rather than an error). Self-loops and duplicate edges are dropped
/// and counted instead of failing, since real-world exports routinely contain
/// both.
pub fn parse_edge_list(text: &str) -> Result<EdgeListDocument> {
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut self_loops = 0usize;
    let mut max_id: Option<u32> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = effective_line(raw);
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::parse(
                    idx + 1,
                    format!("expected `u v`, got {line:?}"),
                ))
            }
        };
        let u = parse_id(a, idx + 1)?;
        let v = parse_id(b, idx + 1)?;
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        if u == v {
            self_loops += 1;
            continue;
        }
        edges.push((u.min(v), u.max(v)));
    }
    let before = edges.len();
    edges.sort_unstable();
    edges.dedup();
    let duplicates = before - edges.len();
    let n = max_id.map_or(0, |m| m as usize + 1);
    Ok(EdgeListDocument {
        graph: Graph::new(n, edges)?,
        self_loops_dropped: self_loops,
        duplicates_dropped: duplicates,
    })
}

/// Load an edge list from a file.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<EdgeListDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text).map_err(|e| e.with_file(path))
}

/// Serialize a graph as an edge list, one `u v` line per edge, sorted.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Save a graph to a file as an edge list.
pub fn save_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_edge_list(g)).map_err(|e| Error::io(path, e))
}

/// Parse `vertex cluster` pairs from text, without validating coverage.
pub fn parse_label_pairs(text: &str) -> Result<Vec<(u32, u64)>> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = effective_line(raw);
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::parse(
                    idx + 1,
                    format!("expected `vertex cluster`, got {line:?}"),
                ))
            }
        };
        let vertex = parse_id(a, idx + 1)?;
        let cluster = b
            .parse::<u64>()
            .map_err(|_| Error::parse(idx + 1, format!("expected a cluster id, got {b:?}")))?;
        pairs.push((vertex, cluster));
    }
    Ok(pairs)
}

/// Turn parsed label pairs into a labeling over exactly `n` vertices.
///
/// Every vertex in `0..n` must be assigned exactly once; cluster ids may be
/// arbitrary and are renumbered densely by first appearance in vertex order.
pub fn labeling_from_pairs(pairs: &[(u32, u64)], n: usize) -> Result<ClusterLabeling> {
    let mut raw = vec![None; n];
    for &(vertex, cluster) in pairs {
        if vertex as usize >= n {
            return Err(Error::VertexOutOfRange {
                vertex: vertex as u64,
                n,
            });
        }
        if raw[vertex as usize].replace(cluster).is_some() {
            return Err(Error::LabelCoverage {
                vertex: vertex as u64,
                seen: 2,
            });
        }
    }
    if let Some(missing) = raw.iter().position(Option::is_none) {
        return Err(Error::LabelCoverage {
            vertex: missing as u64,
            seen: 0,
        });
    }
    let assignments: Vec<u64> = raw.into_iter().map(|c| c.expect("checked")).collect();
    ClusterLabeling::from_assignments(&assignments)
}

/// Parse a label file covering exactly `n` vertices.
pub fn parse_labeling(text: &str, n: usize) -> Result<ClusterLabeling> {
    labeling_from_pairs(&parse_label_pairs(text)?, n)
}

/// Load a label file covering exactly `n` vertices.
pub fn load_labeling(path: impl AsRef<Path>, n: usize) -> Result<ClusterLabeling> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labeling(&text, n).map_err(|e| e.with_file(path))
}

/// Serialize a labeling, one `vertex cluster` line per vertex.
pub fn write_labels(labeling: &ClusterLabeling) -> String {
    let mut out = String::new();
    for (v, &c) in labeling.labels().iter().enumerate() {
        out.push_str(&format!("{v} {c}\n"));
    }
    out
}

/// Save a labeling to a file.
pub fn save_labels(labeling: &ClusterLabeling, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_labels(labeling)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_edges_and_counts_dropped_lines() {
        let doc = parse_edge_list("0 1\n0 1\n1 1").unwrap();
        assert_eq!(doc.graph.vertex_count(), 2);
        assert_eq!(doc.graph.edges(), &[(0, 1)]);
        assert_eq!(doc.self_loops_dropped, 1);
        assert_eq!(doc.duplicates_dropped, 1);
        assert_eq!(doc.dropped(), 2);
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let doc = parse_edge_list("# header\n\n0 2 # trailing note\n1 2\n").unwrap();
        assert_eq!(doc.graph.vertex_count(), 3);
        assert_eq!(doc.graph.edges(), &[(0, 2), (1, 2)]);
        assert_eq!(doc.dropped(), 0);
    }

    #[test]
    fn sparse_ids_become_isolated_vertices() {
        let doc = parse_edge_list("0 1\n5 6\n").unwrap();
        assert_eq!(doc.graph.vertex_count(), 7);
        assert_eq!(doc.graph.degree(3), 0);
    }

    #[test]
    fn malformed_lines_report_position() {
        let err = parse_edge_list("0 1\n2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_edge_list("0 one\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_edge_list("0 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn edge_list_round_trips() {
        let g = Graph::new(5, vec![(3, 1), (0, 4), (2, 3)]).unwrap();
        let text = write_edge_list(&g);
        let doc = parse_edge_list(&text).unwrap();
        assert_eq!(doc.graph, g);
        assert_eq!(write_edge_list(&doc.graph), text);
    }

    #[test]
    fn labels_round_trip_and_validate() {
        let l = ClusterLabeling::new(vec![0, 1, 1, 0]).unwrap();
        let text = write_labels(&l);
        assert_eq!(parse_labeling(&text, 4).unwrap(), l);

        // Arbitrary cluster ids are renumbered by first appearance.
        let parsed = parse_labeling("0 70\n1 9\n2 70\n", 3).unwrap();
        assert_eq!(parsed.labels(), &[0, 1, 0]);

        // Missing and duplicate vertices are rejected.
        assert!(matches!(
            parse_labeling("0 0\n2 1\n", 3),
            Err(Error::LabelCoverage { vertex: 1, seen: 0 })
        ));
        assert!(matches!(
            parse_labeling("0 0\n0 1\n1 0\n", 2),
            Err(Error::LabelCoverage { vertex: 0, seen: 2 })
        ));
        assert!(matches!(
            parse_labeling("0 0\n7 1\n", 2),
            Err(Error::VertexOutOfRange { vertex: 7, n: 2 })
        ));
    }

    #[test]
    fn file_helpers_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Graph::complete(4);
        let l = ClusterLabeling::new(vec![0, 0, 1, 1]).unwrap();
        let gp = dir.path().join("g.edges");
        let lp = dir.path().join("g.labels");
        save_edge_list(&g, &gp).unwrap();
        save_labels(&l, &lp).unwrap();
        assert_eq!(load_edge_list(&gp).unwrap().graph, g);
        assert_eq!(load_labeling(&lp, 4).unwrap(), l);
        assert!(load_edge_list(dir.path().join("missing.edges")).is_err());
    }
}
