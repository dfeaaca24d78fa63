//! Synthetic clustered-graph generation.
//!
//! A dataset is built by expanding a small connected base graph: every base
//! vertex becomes a cluster filled with random internal edges at a target
//! density, and every base edge becomes random inter-cluster edges at a
//! (much lower) external density. Clusters whose base vertices are not
//! adjacent never receive cross edges, so the base graph's shape is the
//! dataset's cluster-level shape.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{ClusterLabeling, Graph};
use crate::seed::rng_from;

/// Named internal-density buckets (vocabulary used in dataset names).
pub const INTERNAL_DENSITY_BUCKETS: [(&str, f64); 5] = [
    ("verysparse", 0.01),
    ("sparse", 0.05),
    ("mid", 0.1),
    ("dense", 0.2),
    ("verydense", 0.4),
];

/// Named external-density buckets, one order of magnitude below the internal
/// ones.
pub const EXTERNAL_DENSITY_BUCKETS: [(&str, f64); 5] = [
    ("verysparse", 0.001),
    ("sparse", 0.005),
    ("mid", 0.01),
    ("dense", 0.02),
    ("verydense", 0.04),
];

/// Shape of the base graph whose vertices become clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseKind {
    /// Complete graph (name prefix `c`).
    Complete,
    /// Complete graph with variable cluster sizes (prefix `cv`); requires a
    /// size range.
    CompleteVariable,
    /// Balanced complete bipartite graph (prefix `b`).
    Bipartite,
    /// Star: one hub cluster adjacent to all others (prefix `s`).
    Star,
    /// Uniform random recursive tree (prefix `t`).
    Tree,
    /// Path (prefix `p`).
    Path,
    /// Random r-regular graph (prefix `r<r>`).
    RRegular(u32),
    /// Uniform random connected graph with exactly `m` edges (prefix `gnm`).
    Gnm(u64),
}

impl BaseKind {
    /// Dataset-name prefix for this base shape.
    pub fn prefix(&self) -> String {
        match self {
            BaseKind::Complete => "c".to_string(),
            BaseKind::CompleteVariable => "cv".to_string(),
            BaseKind::Bipartite => "b".to_string(),
            BaseKind::Star => "s".to_string(),
            BaseKind::Tree => "t".to_string(),
            BaseKind::Path => "p".to_string(),
            BaseKind::RRegular(r) => format!("r{r}"),
            BaseKind::Gnm(_) => "gnm".to_string(),
        }
    }
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseKind::Complete => write!(f, "complete"),
            BaseKind::CompleteVariable => write!(f, "complete-variable"),
            BaseKind::Bipartite => write!(f, "bipartite"),
            BaseKind::Star => write!(f, "star"),
            BaseKind::Tree => write!(f, "tree"),
            BaseKind::Path => write!(f, "path"),
            BaseKind::RRegular(r) => write!(f, "r-regular({r})"),
            BaseKind::Gnm(m) => write!(f, "gnm({m})"),
        }
    }
}

impl FromStr for BaseKind {
    type Err = Error;

    /// Accepts the long names (`complete`, `r-regular(3)`, `gnm(40)`, …) and
    /// the dataset-name prefixes (`c`, `cv`, `b`, `s`, `t`, `p`, `r3`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("base", format!("unknown base kind {s:?}"));
        match s {
            "complete" | "c" => return Ok(BaseKind::Complete),
            "complete-variable" | "cv" => return Ok(BaseKind::CompleteVariable),
            "bipartite" | "b" => return Ok(BaseKind::Bipartite),
            "star" | "s" => return Ok(BaseKind::Star),
            "tree" | "t" => return Ok(BaseKind::Tree),
            "path" | "p" => return Ok(BaseKind::Path),
            _ => {}
        }
        if let Some(inner) = s.strip_prefix("r-regular(").and_then(|r| r.strip_suffix(')')) {
            return inner.parse().map(BaseKind::RRegular).map_err(|_| bad());
        }
        if let Some(r) = s.strip_prefix('r') {
            if !r.is_empty() && r.chars().all(|c| c.is_ascii_digit()) {
                return r.parse().map(BaseKind::RRegular).map_err(|_| bad());
            }
        }
        if let Some(inner) = s.strip_prefix("gnm(").and_then(|m| m.strip_suffix(')')) {
            return inner.parse().map(BaseKind::Gnm).map_err(|_| bad());
        }
        Err(bad())
    }
}

impl serde::Serialize for BaseKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BaseKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Cluster sizes: all equal, or drawn uniformly from an inclusive range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterSizes {
    /// Every cluster has exactly this many vertices.
    Fixed(usize),
    /// Each cluster's size is uniform on `[min, max]`.
    Range(usize, usize),
}

/// Full description of a synthetic dataset.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeneratorSpec {
    /// Base graph shape.
    pub base: BaseKind,
    /// Number of clusters (= base graph vertices).
    pub cluster_count: usize,
    /// Cluster sizes.
    pub sizes: ClusterSizes,
    /// Target edge density inside each cluster, in (0, 1].
    pub internal_density: f64,
    /// Target edge density across each base edge's vertex pairs, in (0, 1].
    pub external_density: f64,
    /// Master seed for all random draws.
    pub seed: u64,
    /// Optional replacement for the name prefix (for externally defined
    /// dataset families whose prefix is not derivable from the base kind).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prefix_override: Option<String>,
}

impl GeneratorSpec {
    /// Check all parameters for consistency.
    pub fn validate(&self) -> Result<()> {
        if self.cluster_count < 2 {
            return Err(Error::invalid("cluster_count", "must be at least 2"));
        }
        match self.sizes {
            ClusterSizes::Fixed(s) if s < 2 => {
                return Err(Error::invalid("sizes", "clusters need at least 2 vertices"));
            }
            ClusterSizes::Range(lo, hi) if lo < 2 || lo > hi => {
                return Err(Error::invalid(
                    "sizes",
                    format!("invalid size range [{lo}, {hi}]"),
                ));
            }
            _ => {}
        }
        for (name, value) in [
            ("internal_density", self.internal_density),
            ("external_density", self.external_density),
        ] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::invalid(name, format!("{value} not in (0, 1]")));
            }
        }
        let c = self.cluster_count;
        match self.base {
            BaseKind::CompleteVariable => {
                if !matches!(self.sizes, ClusterSizes::Range(_, _)) {
                    return Err(Error::invalid(
                        "sizes",
                        "complete-variable base requires a size range",
                    ));
                }
            }
            BaseKind::RRegular(r) => {
                let r = r as usize;
                if r == 0 || r >= c {
                    return Err(Error::invalid(
                        "base",
                        format!("{r}-regular graph on {c} vertices is infeasible"),
                    ));
                }
                if !(r * c).is_multiple_of(2) {
                    return Err(Error::invalid(
                        "base",
                        format!("{r}-regular graph on {c} vertices needs an even degree sum"),
                    ));
                }
            }
            BaseKind::Gnm(m) => {
                let max = (c as u64) * (c as u64 - 1) / 2;
                if m < c as u64 - 1 || m > max {
                    return Err(Error::invalid(
                        "base",
                        format!("gnm edge count {m} outside connected range [{}, {max}]", c - 1),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

fn random_tree<R: Rng>(count: usize, rng: &mut R) -> Graph {
    // Uniform random recursive tree: each vertex attaches to an earlier one.
    let edges: Vec<(u32, u32)> = (1..count as u32)
        .map(|v| (rng.gen_range(0..v), v))
        .collect();
    Graph::new(count, edges).expect("tree edges are valid")
}

fn random_regular<R: Rng>(count: usize, r: u32, rng: &mut R) -> Result<Graph> {
    const ATTEMPTS: usize = 1000;
    let r = r as usize;
    for _ in 0..ATTEMPTS {
        // Stub matching: pair up degree slots, reject multi-edges/loops.
        let mut stubs: Vec<u32> = (0..count as u32).flat_map(|v| std::iter::repeat_n(v, r)).collect();
        stubs.shuffle(rng);
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        let mut ok = true;
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v {
                ok = false;
                break;
            }
            edges.push((u.min(v), u.max(v)));
        }
        if !ok {
            continue;
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        if edges.len() != before {
            continue;
        }
        let g = Graph::new(count, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::GenerationExhausted {
        what: "random regular base graph",
        attempts: ATTEMPTS,
    })
}

fn random_gnm<R: Rng>(count: usize, m: u64, rng: &mut R) -> Result<Graph> {
    const ATTEMPTS: usize = 1000;
    let mut all_pairs: Vec<(u32, u32)> = Vec::new();
    for u in 0..count as u32 {
        for v in (u + 1)..count as u32 {
            all_pairs.push((u, v));
        }
    }
    for _ in 0..ATTEMPTS {
        all_pairs.shuffle(rng);
        let g = Graph::new(count, all_pairs.iter().copied().take(m as usize))?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::GenerationExhausted {
        what: "random connected gnm base graph",
        attempts: ATTEMPTS,
    })
}

/// Build the small connected base graph for `kind` on `cluster_count`
/// vertices.
pub fn generate_base<R: Rng>(kind: BaseKind, cluster_count: usize, rng: &mut R) -> Result<Graph> {
    if cluster_count < 2 {
        return Err(Error::TooFew {
            context: "base graph",
            minimum: 2,
            unit: "clusters",
            actual: cluster_count,
        });
    }
    match kind {
        BaseKind::Complete | BaseKind::CompleteVariable => Ok(Graph::complete(cluster_count)),
        BaseKind::Bipartite => {
            let left = cluster_count.div_ceil(2);
            let mut edges = Vec::new();
            for u in 0..left as u32 {
                for v in left as u32..cluster_count as u32 {
                    edges.push((u, v));
                }
            }
            Graph::new(cluster_count, edges)
        }
        BaseKind::Star => Ok(Graph::star(cluster_count)),
        BaseKind::Tree => Ok(random_tree(cluster_count, rng)),
        BaseKind::Path => Ok(Graph::path(cluster_count)),
        BaseKind::RRegular(r) => {
            if r as usize >= cluster_count || r == 0 || !(r as usize * cluster_count).is_multiple_of(2) {
                return Err(Error::invalid(
                    "base",
                    format!("{r}-regular graph on {cluster_count} vertices is infeasible"),
                ));
            }
            random_regular(cluster_count, r, rng)
        }
        BaseKind::Gnm(m) => {
            let max = (cluster_count as u64) * (cluster_count as u64 - 1) / 2;
            if m < cluster_count as u64 - 1 || m > max {
                return Err(Error::invalid(
                    "base",
                    format!(
                        "gnm edge count {m} outside connected range [{}, {max}]",
                        cluster_count - 1
                    ),
                ));
            }
            random_gnm(cluster_count, m, rng)
        }
    }
}

/// How much a connectivity repair may push a measured density above its
/// target before generation fails (the requested density is then too low to
/// be honest about).
const REPAIR_OVERSHOOT: f64 = 1.1;

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[rb as usize] = ra;
        true
    }
}

/// Expand every base vertex into a cluster and every base edge into sparse
/// inter-cluster edges.
///
/// Internal edges are sampled independently at `internal_density` and the
/// cluster is repaired to connectivity with random extra edges; the same
/// happens at graph level across base edges. A repair that overshoots its
/// target density by more than 10% is an error — the requested densities are
/// too low for the requested sizes.
pub fn expand_clustered<R: Rng>(
    base: &Graph,
    spec: &GeneratorSpec,
    rng: &mut R,
) -> Result<(Graph, ClusterLabeling)> {
    spec.validate()?;
    if base.vertex_count() != spec.cluster_count {
        return Err(Error::SizeMismatch {
            context: "base graph vs cluster count",
            left: base.vertex_count(),
            right: spec.cluster_count,
        });
    }

    let count = spec.cluster_count;
    let sizes: Vec<usize> = match spec.sizes {
        ClusterSizes::Fixed(s) => vec![s; count],
        ClusterSizes::Range(lo, hi) => (0..count).map(|_| rng.gen_range(lo..=hi)).collect(),
    };
    let mut offsets = Vec::with_capacity(count);
    let mut total = 0usize;
    for &s in &sizes {
        offsets.push(total);
        total += s;
    }

    let mut edges: Vec<(u32, u32)> = Vec::new();

    // Internal edges, cluster by cluster.
    for c in 0..count {
        let s = sizes[c];
        let off = offsets[c] as u32;
        let mut uf = UnionFind::new(s);
        let mut local = std::collections::HashSet::new();
        let mut sampled = 0u64;
        for i in 0..s as u32 {
            for j in (i + 1)..s as u32 {
                if rng.gen_bool(spec.internal_density) {
                    edges.push((off + i, off + j));
                    local.insert((i, j));
                    uf.union(i, j);
                    sampled += 1;
                }
            }
        }
        // Connectivity repair with random extra edges.
        let mut components = {
            let mut roots = std::collections::HashSet::new();
            for v in 0..s as u32 {
                roots.insert(uf.find(v));
            }
            roots.len()
        };
        let mut repaired = 0u64;
        let mut tries = 0usize;
        while components > 1 {
            tries += 1;
            if tries > 10_000 * s {
                return Err(Error::GenerationExhausted {
                    what: "cluster connectivity repair",
                    attempts: tries,
                });
            }
            let u = rng.gen_range(0..s as u32);
            let v = rng.gen_range(0..s as u32);
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            if local.contains(&key) {
                continue;
            }
            if uf.union(u, v) {
                edges.push((off + key.0, off + key.1));
                local.insert(key);
                repaired += 1;
                components -= 1;
            }
        }
        if repaired > 0 {
            let pairs = (s as u64 * (s as u64 - 1) / 2) as f64;
            // Repairs come in whole edges, so small clusters get one edge of
            // slack on top of the 10% — otherwise a single bridging edge
            // would fail any cluster whose 10% budget is below one edge.
            let budget = REPAIR_OVERSHOOT * spec.internal_density * pairs + 1.0;
            if (sampled + repaired) as f64 > budget {
                return Err(Error::DensityOvershoot {
                    scope: "internal",
                    target: spec.internal_density,
                    actual: (sampled + repaired) as f64 / pairs,
                });
            }
        }
    }

    // External edges along base edges, then whole-graph connectivity repair.
    let mut cross_present: std::collections::HashSet<(u32, u32)> = std::collections::HashSet::new();
    let mut uf = UnionFind::new(count);
    let mut sampled_external = 0u64;
    let mut external_pairs = 0u64;
    for &(bu, bv) in base.edges() {
        let (su, sv) = (sizes[bu as usize], sizes[bv as usize]);
        let (ou, ov) = (offsets[bu as usize] as u32, offsets[bv as usize] as u32);
        external_pairs += su as u64 * sv as u64;
        for i in 0..su as u32 {
            for j in 0..sv as u32 {
                if rng.gen_bool(spec.external_density) {
                    let (a, b) = (ou + i, ov + j);
                    edges.push((a.min(b), a.max(b)));
                    cross_present.insert((a.min(b), a.max(b)));
                    uf.union(bu, bv);
                    sampled_external += 1;
                }
            }
        }
    }
    let mut repaired_external = 0u64;
    loop {
        let mut roots = std::collections::HashSet::new();
        for c in 0..count as u32 {
            roots.insert(uf.find(c));
        }
        if roots.len() <= 1 {
            break;
        }
        // Base edges whose endpoint clusters are still in different
        // components; add one random cross edge along one of them.
        let candidates: Vec<(u32, u32)> = base
            .edges()
            .iter()
            .copied()
            .filter(|&(bu, bv)| uf.find(bu) != uf.find(bv))
            .collect();
        let &(bu, bv) = candidates
            .choose(rng)
            .expect("a connected base graph always offers a bridging edge");
        let (su, sv) = (sizes[bu as usize], sizes[bv as usize]);
        let (ou, ov) = (offsets[bu as usize] as u32, offsets[bv as usize] as u32);
        let mut tries = 0usize;
        loop {
            tries += 1;
            if tries > 10_000 {
                return Err(Error::GenerationExhausted {
                    what: "inter-cluster connectivity repair",
                    attempts: tries,
                });
            }
            let a = ou + rng.gen_range(0..su as u32);
            let b = ov + rng.gen_range(0..sv as u32);
            let key = (a.min(b), a.max(b));
            if cross_present.contains(&key) {
                continue;
            }
            edges.push(key);
            cross_present.insert(key);
            repaired_external += 1;
            break;
        }
        uf.union(bu, bv);
    }
    if repaired_external > 0 && external_pairs > 0 {
        // Same one-edge slack as the per-cluster check above.
        let budget = REPAIR_OVERSHOOT * spec.external_density * external_pairs as f64 + 1.0;
        if (sampled_external + repaired_external) as f64 > budget {
            return Err(Error::DensityOvershoot {
                scope: "external",
                target: spec.external_density,
                actual: (sampled_external + repaired_external) as f64 / external_pairs as f64,
            });
        }
    }

    let labels: Vec<u32> = sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &s)| std::iter::repeat_n(c as u32, s))
        .collect();
    Ok((Graph::new(total, edges)?, ClusterLabeling::new(labels)?))
}

fn cluster_count_bucket(count: usize) -> &'static str {
    if count <= 15 {
        "few"
    } else if count <= 24 {
        "mid"
    } else {
        "many"
    }
}

fn density_bucket(value: f64, table: &[(&'static str, f64)]) -> &'static str {
    // Nearest bucket on a log scale, so 0.15 maps to `mid`/`dense` sensibly.
    let mut best = table[0].0;
    let mut best_gap = f64::INFINITY;
    for &(name, bucket) in table {
        let gap = (value.ln() - bucket.ln()).abs();
        if gap < best_gap {
            best_gap = gap;
            best = name;
        }
    }
    best
}

/// Deterministic dataset name:
/// `[prefix]-[few|mid|many]-[internal bucket]-[external bucket]`.
pub fn dataset_name(spec: &GeneratorSpec) -> String {
    let prefix = spec
        .prefix_override
        .clone()
        .unwrap_or_else(|| spec.base.prefix());
    format!(
        "{prefix}-{}-{}-{}",
        cluster_count_bucket(spec.cluster_count),
        density_bucket(spec.internal_density, &INTERNAL_DENSITY_BUCKETS),
        density_bucket(spec.external_density, &EXTERNAL_DENSITY_BUCKETS),
    )
}

/// Measured statistics of a generated dataset (the columns reported next to
/// each dataset: sizes, counts, global density, mean within-cluster density).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DatasetStats {
    /// Number of vertices.
    pub vertices: usize,
    /// Number of edges.
    pub edges: usize,
    /// Number of clusters.
    pub clusters: usize,
    /// Global density `2|E|/(n(n−1))`.
    pub density: f64,
    /// Mean density of the cluster-induced subgraphs.
    pub avg_cluster_density: f64,
}

/// A generated dataset with its provenance and measured statistics.
#[derive(Debug, Clone)]
pub struct GeneratedDataset {
    /// Derived dataset name.
    pub name: String,
    /// The expanded graph.
    pub graph: Graph,
    /// Ground-truth cluster labeling.
    pub labeling: ClusterLabeling,
    /// Measured statistics.
    pub stats: DatasetStats,
    /// The spec that produced it.
    pub spec: GeneratorSpec,
}

/// Generate a full dataset from a spec: base graph, expansion, name, stats.
pub fn generate(spec: &GeneratorSpec) -> Result<GeneratedDataset> {
    spec.validate()?;
    let mut rng: ChaCha8Rng = rng_from(spec.seed, 0x6E5);
    let base = generate_base(spec.base, spec.cluster_count, &mut rng)?;
    let (graph, labeling) = expand_clustered(&base, spec, &mut rng)?;
    let stats = DatasetStats {
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        clusters: labeling.cluster_count(),
        density: crate::graph::density(&graph)?,
        avg_cluster_density: crate::graph::avg_cluster_density(&graph, &labeling)?,
    };
    Ok(GeneratedDataset {
        name: dataset_name(spec),
        graph,
        labeling,
        stats,
        spec: spec.clone(),
    })
}

/// Analytic expectation of the global density for a spec.
///
/// Uses the expected internal edge count `k·p_in·E[C(S,2)]` plus the expected
/// external count `m_base·p_ext·E[S]²`, over the expected vertex count; the
/// base edge count is exact for every kind (gnm and r-regular fix it by
/// construction, the rest are deterministic shapes).
pub fn expected_global_density(spec: &GeneratorSpec) -> Result<f64> {
    spec.validate()?;
    let c = spec.cluster_count as f64;
    let base_edges = match spec.base {
        BaseKind::Complete | BaseKind::CompleteVariable => c * (c - 1.0) / 2.0,
        BaseKind::Bipartite => {
            let left = spec.cluster_count.div_ceil(2) as f64;
            left * (c - left)
        }
        BaseKind::Star | BaseKind::Tree | BaseKind::Path => c - 1.0,
        BaseKind::RRegular(r) => r as f64 * c / 2.0,
        BaseKind::Gnm(m) => m as f64,
    };
    let (mean_size, mean_sq) = match spec.sizes {
        ClusterSizes::Fixed(s) => (s as f64, (s * s) as f64),
        ClusterSizes::Range(lo, hi) => {
            let mean = (lo + hi) as f64 / 2.0;
            let width = (hi - lo + 1) as f64;
            (mean, mean * mean + (width * width - 1.0) / 12.0)
        }
    };
    let expected_pairs_per_cluster = (mean_sq - mean_size) / 2.0;
    let internal = c * spec.internal_density * expected_pairs_per_cluster;
    let external = base_edges * spec.external_density * mean_size * mean_size;
    let n = c * mean_size;
    Ok(2.0 * (internal + external) / (n * (n - 1.0)))
}
