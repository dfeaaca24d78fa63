//! All-pairs graph-theoretic (hop) distances.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Dense matrix of shortest-path hop counts between all vertex pairs.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    hops: Vec<u32>,
}

impl DistanceMatrix {
    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Hop distance between `i` and `j` (0 on the diagonal).
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.hops[i * self.n + j]
    }

    /// The graph diameter: the largest entry in the matrix.
    pub fn max_hops(&self) -> u32 {
        self.hops.iter().copied().max().unwrap_or(0)
    }

    /// Row of distances from vertex `i`.
    pub fn row(&self, i: usize) -> &[u32] {
        &self.hops[i * self.n..(i + 1) * self.n]
    }
}

fn bfs_row(g: &Graph, source: usize) -> Vec<u32> {
    let n = g.vertex_count();
    let mut dist = vec![u32::MAX; n];
    dist[source] = 0;
    let mut queue = std::collections::VecDeque::with_capacity(n);
    queue.push_back(source as u32);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v as usize];
        for &w in g.neighbors(v as usize) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = dv + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Compute all-pairs hop distances with one BFS per vertex (parallel over
/// sources). Fails on disconnected graphs, where some distances would be
/// infinite.
pub fn bfs_all_pairs(g: &Graph) -> Result<DistanceMatrix> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(DistanceMatrix { n: 0, hops: Vec::new() });
    }
    let rows: Vec<Vec<u32>> = (0..n).into_par_iter().map(|s| bfs_row(g, s)).collect();
    if rows.iter().any(|row| row.contains(&u32::MAX)) {
        let (components, _) = g.connected_components();
        return Err(Error::Disconnected {
            components,
            context: "all-pairs distances",
        });
    }
    let mut hops = Vec::with_capacity(n * n);
    for row in rows {
        hops.extend(row);
    }
    Ok(DistanceMatrix { n, hops })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_distances() {
        let d = bfs_all_pairs(&Graph::path(4)).unwrap();
        assert_eq!(d.get(0, 3), 3);
        assert_eq!(d.get(1, 2), 1);
        assert_eq!(d.get(2, 2), 0);
        assert_eq!(d.get(3, 0), 3);
        assert_eq!(d.max_hops(), 3);
        assert_eq!(d.row(0), &[0, 1, 2, 3]);
    }

    #[test]
    fn complete_graph_distances_are_one() {
        let d = bfs_all_pairs(&Graph::complete(5)).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(d.get(i, j), u32::from(i != j));
            }
        }
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            bfs_all_pairs(&g),
            Err(Error::Disconnected { components: 2, .. })
        ));
    }
}
