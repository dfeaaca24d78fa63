//! Undirected simple graphs and ground-truth cluster labelings.

use crate::error::{Error, Result};
use crate::scalar::{cast_usize, Scalar};

/// An undirected simple graph with vertices `0..n`.
///
/// Edges are stored once, normalized as `(min, max)` and sorted; adjacency
/// lists are sorted as well, so iteration order is deterministic everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Build a graph on `n` vertices from an edge iterator.
    ///
    /// Endpoint order does not matter and duplicate edges are collapsed.
    /// Self-loops and out-of-range endpoints are rejected; loaders that want
    /// to *drop* bad lines instead should filter before calling this (see
    /// [`crate::io::parse_edge_list`]).
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut normalized = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop { vertex: u as u64 });
            }
            for end in [u, v] {
                if end as usize >= n {
                    return Err(Error::VertexOutOfRange {
                        vertex: end as u64,
                        n,
                    });
                }
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        normalized.dedup();

        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &normalized {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            adjacency,
            edges: normalized,
        })
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// All edges as normalized `(min, max)` pairs in sorted order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    /// Degree of `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Largest degree in the graph (0 for an empty graph).
    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Whether `{u, v}` is an edge.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&(v as u32)).is_ok()
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                edges.push((u, v));
            }
        }
        Self::new(n, edges).expect("complete graph is always valid")
    }

    /// Path graph `0 - 1 - … - (n-1)`.
    pub fn path(n: usize) -> Self {
        let edges = (1..n as u32).map(|v| (v - 1, v));
        Self::new(n, edges).expect("path graph is always valid")
    }

    /// Star graph with vertex 0 as the hub.
    pub fn star(n: usize) -> Self {
        let edges = (1..n as u32).map(|v| (0, v));
        Self::new(n, edges).expect("star graph is always valid")
    }

    /// Connected-component id for every vertex, plus the component count.
    ///
    /// Ids are assigned in order of the smallest vertex in each component.
    pub fn connected_components(&self) -> (usize, Vec<u32>) {
        let n = self.vertex_count();
        let mut component = vec![u32::MAX; n];
        let mut count = 0u32;
        let mut queue = std::collections::VecDeque::new();
        for start in 0..n {
            if component[start] != u32::MAX {
                continue;
            }
            component[start] = count;
            queue.push_back(start as u32);
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v as usize) {
                    if component[w as usize] == u32::MAX {
                        component[w as usize] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (count as usize, component)
    }

    /// Whether the graph is connected (the empty graph counts as connected).
    pub fn is_connected(&self) -> bool {
        self.connected_components().0 <= 1
    }

    /// Extract the largest connected component.
    ///
    /// Returns the induced subgraph with vertices renumbered densely, plus
    /// the original vertex id of each new vertex (ascending). Ties between
    /// equally large components go to the one containing the smallest vertex.
    pub fn largest_connected_component(&self) -> (Graph, Vec<u32>) {
        let (count, component) = self.connected_components();
        if count <= 1 {
            return (self.clone(), (0..self.vertex_count() as u32).collect());
        }
        let mut sizes = vec![0usize; count];
        for &c in &component {
            sizes[c as usize] += 1;
        }
        let best = sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i as u32)
            .unwrap_or(0);

        let kept: Vec<u32> = (0..self.vertex_count() as u32)
            .filter(|&v| component[v as usize] == best)
            .collect();
        let mut new_id = vec![u32::MAX; self.vertex_count()];
        for (new, &old) in kept.iter().enumerate() {
            new_id[old as usize] = new as u32;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| component[u as usize] == best && component[v as usize] == best)
            .map(|&(u, v)| (new_id[u as usize], new_id[v as usize]));
        let sub = Graph::new(kept.len(), edges).expect("induced subgraph is valid");
        (sub, kept)
    }
}

/// Assignment of every vertex to one of `k` clusters, ids dense in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabeling {
    labels: Vec<u32>,
    cluster_count: usize,
}

impl ClusterLabeling {
    /// Build from dense labels: every id in `0..=max` must occur at least once.
    pub fn new(labels: Vec<u32>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::TooFew {
                context: "cluster labeling",
                minimum: 1,
                unit: "vertices",
                actual: 0,
            });
        }
        let max_id = *labels.iter().max().expect("non-empty");
        let mut seen = vec![false; max_id as usize + 1];
        for &l in &labels {
            seen[l as usize] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::ClusterIdsNotDense {
                missing: missing as u32,
                max_id,
            });
        }
        Ok(Self {
            labels,
            cluster_count: max_id as usize + 1,
        })
    }

    /// Build from arbitrary ids, remapping them densely by first appearance.
    pub fn from_assignments(raw: &[u64]) -> Result<Self> {
        let mut remap = std::collections::HashMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        for &id in raw {
            let next = remap.len() as u32;
            labels.push(*remap.entry(id).or_insert(next));
        }
        Self::new(labels)
    }

    /// Number of vertices covered.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Whether the labeling covers no vertices (never true for a valid one).
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of clusters `k`.
    pub fn cluster_count(&self) -> usize {
        self.cluster_count
    }

    /// Label of each vertex, indexed by vertex id.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Cluster id of vertex `v`.
    pub fn label_of(&self, v: usize) -> usize {
        self.labels[v] as usize
    }

    /// Size of each cluster, indexed by cluster id.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.cluster_count];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    /// Members of each cluster, indexed by cluster id; vertices ascending.
    pub fn members(&self) -> Vec<Vec<u32>> {
        let mut members = vec![Vec::new(); self.cluster_count];
        for (v, &l) in self.labels.iter().enumerate() {
            members[l as usize].push(v as u32);
        }
        members
    }

    /// Restrict to a subset of vertices (ascending original ids), renumbering
    /// cluster ids densely by first appearance.
    ///
    /// Used together with [`Graph::largest_connected_component`] to carry a
    /// labeling over to the extracted component.
    pub fn restricted_to(&self, kept: &[u32]) -> Result<Self> {
        let raw: Vec<u64> = kept.iter().map(|&v| self.labels[v as usize] as u64).collect();
        Self::from_assignments(&raw)
    }
}

/// Density of a simple undirected graph: `2|E| / (n(n-1))`.
pub fn density<F: Scalar>(g: &Graph) -> Result<F> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::TooFew {
            context: "density",
            minimum: 2,
            unit: "vertices",
            actual: n,
        });
    }
    let pairs = n as u64 * (n as u64 - 1) / 2;
    Ok(cast_usize::<F>(g.edge_count()) / F::from_u64(pairs).expect("pair count fits scalar"))
}

/// Mean density of the subgraphs induced by each cluster.
///
/// Every cluster must have at least two vertices, since the density of a
/// singleton is undefined.
pub fn avg_cluster_density<F: Scalar>(g: &Graph, labeling: &ClusterLabeling) -> Result<F> {
    if labeling.len() != g.vertex_count() {
        return Err(Error::SizeMismatch {
            context: "avg_cluster_density",
            left: g.vertex_count(),
            right: labeling.len(),
        });
    }
    let sizes = labeling.cluster_sizes();
    if let Some(small) = sizes.iter().position(|&s| s < 2) {
        return Err(Error::invalid(
            "labeling",
            format!("cluster {small} has fewer than 2 vertices; its density is undefined"),
        ));
    }
    let mut internal_edges = vec![0u64; labeling.cluster_count()];
    for &(u, v) in g.edges() {
        let (cu, cv) = (labeling.label_of(u as usize), labeling.label_of(v as usize));
        if cu == cv {
            internal_edges[cu] += 1;
        }
    }
    let mut sum = F::zero();
    for (c, &m) in internal_edges.iter().enumerate() {
        let s = sizes[c] as u64;
        let pairs = s * (s - 1) / 2;
        sum += F::from_u64(m).expect("edge count fits scalar")
            / F::from_u64(pairs).expect("pair count fits scalar");
    }
    Ok(sum / cast_usize::<F>(labeling.cluster_count()))
}
