//! Experiment protocols: deformation validation and layout comparison.
//!
//! Deformation validation takes a good drawing and degrades it through
//! cumulative random vertex displacement, scoring after every step — on a
//! useful metric the scores must fall as the clusters mix. Layout comparison
//! scores a set of layout algorithms (or imported coordinate files) across a
//! set of datasets and aggregates per layout.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::clustcmp::{cq_scores, CqReport};
use crate::dist::bfs_all_pairs;
use crate::error::{Error, Result};
use crate::geoclust::{kmeans, KMeansConfig};
use crate::graph::{ClusterLabeling, Graph};
use crate::layouts::{
    layout_classical_mds, layout_fr, layout_linlog, layout_random, layout_spectral, layout_stress,
    Layout, LayoutConfig, Point,
};
use crate::scalar::{cast, cast_usize, Scalar};
use crate::seed::{derive_seed, hash_name, rng_from};

// Every randomized stage derives its own seed from the run's master seed
// with a stage-specific salt, so stages never share an RNG stream and any
// one of them can be recomputed in isolation.
const STREAM_METHOD: u64 = 0x6d65_0000; // + method index: layout algorithm stream
const STREAM_KMEANS: u64 = 0x6b6d; // k-means stream inside score_layout
const STEP_PERTURB: u64 = 0x7062_0000_0000; // + step: displacement stream
const STEP_KMEANS: u64 = 0x6b73_0000_0000; // + step: per-step scoring seed
const CELL_LAYOUT: u64 = 0x6c63_0000_0000; // ^ cell hash: per-cell layout seed
const CELL_KMEANS: u64 = 0x6b63_0000_0000; // ^ cell hash: per-cell scoring seed

/// Salt for a (dataset, layout) cell that does not depend on listing order.
fn cell_salt(dataset: &str, layout: &str) -> u64 {
    hash_name(dataset) ^ hash_name(layout).rotate_left(17)
}

/// The built-in layout algorithms, in the order they are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayoutMethod {
    /// Uniform-random positions (the floor every real layout must beat).
    Random,
    /// Fruchterman–Reingold force-directed layout.
    FruchtermanReingold,
    /// LinLog energy layout.
    LinLog,
    /// Stress majorization over graph distances.
    StressMajorization,
    /// Classical (metric) MDS on graph distances.
    ClassicalMds,
    /// Laplacian eigenvector layout.
    Spectral,
}

impl LayoutMethod {
    /// All built-ins, in reporting order.
    pub const ALL: [LayoutMethod; 6] = [
        LayoutMethod::Random,
        LayoutMethod::FruchtermanReingold,
        LayoutMethod::LinLog,
        LayoutMethod::StressMajorization,
        LayoutMethod::ClassicalMds,
        LayoutMethod::Spectral,
    ];

    /// Short name used in output files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            LayoutMethod::Random => "random",
            LayoutMethod::FruchtermanReingold => "fr",
            LayoutMethod::LinLog => "linlog",
            LayoutMethod::StressMajorization => "stress",
            LayoutMethod::ClassicalMds => "mds",
            LayoutMethod::Spectral => "spectral",
        }
    }

    fn index(self) -> u64 {
        Self::ALL.iter().position(|&m| m == self).expect("listed") as u64
    }
}

impl fmt::Display for LayoutMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LayoutMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LayoutMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid("layout", format!("unknown layout method {s:?}")))
    }
}

impl serde::Serialize for LayoutMethod {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for LayoutMethod {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Run one built-in layout algorithm on `g`.
///
/// Stress and classical MDS consume all-pairs BFS distances, computed here;
/// they, LinLog, and the spectral layout therefore require a connected
/// graph. The RNG stream is derived from `cfg.seed` and the method, so
/// switching methods never replays the same randomness.
pub fn compute_layout<F: Scalar>(
    method: LayoutMethod,
    g: &Graph,
    cfg: &LayoutConfig<F>,
) -> Result<Layout<F>> {
    cfg.validate()?;
    let mut rng = rng_from(cfg.seed, STREAM_METHOD + method.index());
    match method {
        LayoutMethod::Random => Ok(layout_random(g, &mut rng)),
        LayoutMethod::FruchtermanReingold => layout_fr(g, cfg, &mut rng),
        LayoutMethod::LinLog => layout_linlog(g, cfg, &mut rng),
        LayoutMethod::StressMajorization => {
            let d = bfs_all_pairs(g)?;
            layout_stress(g, &d, cfg, &mut rng)
        }
        LayoutMethod::ClassicalMds => {
            let d = bfs_all_pairs(g)?;
            layout_classical_mds(g, &d, cfg)
        }
        LayoutMethod::Spectral => layout_spectral(g, cfg).map(|(layout, _)| layout),
    }
}

/// Score one drawing against the ground truth: k-means on the positions
/// (k = number of true clusters), then the five comparison metrics.
pub fn score_layout<F: Scalar>(
    truth: &ClusterLabeling,
    layout: &Layout<F>,
    kmeans_cfg: &KMeansConfig<F>,
) -> Result<CqReport<F>> {
    if truth.len() != layout.len() {
        return Err(Error::SizeMismatch {
            context: "scoring a drawing",
            left: truth.len(),
            right: layout.len(),
        });
    }
    if kmeans_cfg.k != truth.cluster_count() {
        return Err(Error::invalid(
            "k",
            format!(
                "k-means k={} must equal the {} ground-truth clusters",
                kmeans_cfg.k,
                truth.cluster_count()
            ),
        ));
    }
    let result = kmeans(layout, kmeans_cfg, &mut rng_from(kmeans_cfg.seed, STREAM_KMEANS))?;
    let mut report = cq_scores(truth, &result.labeling)?;
    report.meta.seed = Some(kmeans_cfg.seed);
    report.meta.restarts = Some(kmeans_cfg.restarts);
    Ok(report)
}

/// Parameters of a deformation run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DeformationConfig<F> {
    /// Number of cumulative deformation steps after the undeformed step 0.
    pub steps: usize,
    /// Per-step displacement bound as a fraction of the larger bounding-box
    /// side; values around 0.05–0.1 mix clusters over ~10 steps. Zero is
    /// allowed and keeps the drawing (and so the series) constant.
    pub rho: F,
    /// Master seed; per-step displacement and k-means seeds derive from it.
    pub seed: u64,
}

impl<F: Scalar> Default for DeformationConfig<F> {
    fn default() -> Self {
        Self {
            steps: 10,
            rho: cast(0.075),
            seed: 0,
        }
    }
}

impl<F: Scalar> DeformationConfig<F> {
    /// Check parameter ranges.
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::invalid("steps", "need at least 1 deformation step"));
        }
        if !(self.rho >= F::zero() && self.rho.is_finite()) {
            return Err(Error::invalid(
                "rho",
                format!("perturbation factor {} must be finite and ≥ 0", self.rho),
            ));
        }
        Ok(())
    }
}

/// Displace every vertex independently by a uniform-random direction and a
/// magnitude uniform in `[0, delta]`. The input is left untouched.
pub fn deform_step<F: Scalar, R: rand::Rng>(
    layout: &Layout<F>,
    delta: F,
    rng: &mut R,
) -> Result<Layout<F>> {
    if !(delta >= F::zero() && delta.is_finite()) {
        return Err(Error::invalid(
            "delta",
            format!("displacement bound {delta} must be finite and ≥ 0"),
        ));
    }
    if delta == F::zero() {
        return Ok(layout.clone());
    }
    let tau: F = cast(std::f64::consts::TAU);
    let moved = layout
        .positions()
        .iter()
        .map(|p| {
            let angle = rng.gen_range(F::zero()..tau);
            let magnitude = rng.gen_range(F::zero()..=delta);
            Point::new(
                p.x + magnitude * angle.cos(),
                p.y + magnitude * angle.sin(),
            )
        })
        .collect();
    Layout::new(moved)
}

/// A sequence of score reports: entry 0 is the undeformed drawing, entry t
/// the drawing after t cumulative deformation steps.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScoreSeries<F> {
    /// Dataset the drawing belongs to, when known.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dataset: Option<String>,
    /// Layout the drawing came from, when known.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub layout: Option<String>,
    /// Per-step displacement factor used between entries.
    pub rho: F,
    /// Master seed of the run.
    pub seed: u64,
    /// One report per step, starting with step 0.
    pub reports: Vec<CqReport<F>>,
}

/// Deform a drawing step by step and score every stage.
///
/// The displacement bound is recomputed each step as `rho` times the larger
/// bounding-box side of the *current* drawing (the box grows slowly, keeping
/// steps comparable in relative terms), and each step's displacement and
/// k-means seeds are derived from `cfg.seed`, so the whole series is
/// reproducible and no step reuses the previous clustering.
pub fn run_deformation<F: Scalar>(
    g: &Graph,
    truth: &ClusterLabeling,
    layout0: &Layout<F>,
    cfg: &DeformationConfig<F>,
    kmeans_cfg: &KMeansConfig<F>,
) -> Result<ScoreSeries<F>> {
    cfg.validate()?;
    if layout0.len() != g.vertex_count() {
        return Err(Error::SizeMismatch {
            context: "deformation drawing vs graph",
            left: layout0.len(),
            right: g.vertex_count(),
        });
    }
    if truth.len() != g.vertex_count() {
        return Err(Error::SizeMismatch {
            context: "deformation truth vs graph",
            left: truth.len(),
            right: g.vertex_count(),
        });
    }

    let mut reports = Vec::with_capacity(cfg.steps + 1);
    let mut current = layout0.clone();
    for step in 0..=cfg.steps {
        if step > 0 {
            let delta = cfg.rho * current.bbox_max_side();
            let mut rng = rng_from(cfg.seed, STEP_PERTURB + step as u64);
            current = deform_step(&current, delta, &mut rng)?;
        }
        let step_cfg = KMeansConfig {
            seed: derive_seed(cfg.seed, STEP_KMEANS + step as u64),
            ..*kmeans_cfg
        };
        reports.push(score_layout(truth, &current, &step_cfg)?);
    }
    Ok(ScoreSeries {
        dataset: None,
        layout: None,
        rho: cfg.rho,
        seed: cfg.seed,
        reports,
    })
}

/// A named graph with its ground-truth clustering — one comparison row.
#[derive(Debug, Clone)]
pub struct Dataset {
    /// Name used in reports and file names.
    pub name: String,
    /// The graph.
    pub graph: Graph,
    /// Ground-truth clustering.
    pub truth: ClusterLabeling,
}

impl Dataset {
    /// Bundle a graph with its truth, checking that they cover the same
    /// vertices.
    pub fn new(name: impl Into<String>, graph: Graph, truth: ClusterLabeling) -> Result<Self> {
        if graph.vertex_count() != truth.len() {
            return Err(Error::SizeMismatch {
                context: "dataset graph vs labeling",
                left: graph.vertex_count(),
                right: truth.len(),
            });
        }
        Ok(Self {
            name: name.into(),
            graph,
            truth,
        })
    }
}

impl From<crate::generators::GeneratedDataset> for Dataset {
    fn from(d: crate::generators::GeneratedDataset) -> Self {
        Self {
            name: d.name,
            graph: d.graph,
            truth: d.labeling,
        }
    }
}

/// One comparison column: a built-in algorithm, or externally computed
/// coordinates supplied per dataset.
#[derive(Debug, Clone)]
pub enum LayoutSpec<F: Scalar> {
    /// Compute the layout with a built-in algorithm.
    Builtin(LayoutMethod),
    /// Use pre-computed coordinates, keyed by dataset name. Datasets without
    /// an entry get an error cell.
    Imported {
        /// Label for this coordinate source in reports.
        name: String,
        /// Coordinates per dataset name.
        layouts: BTreeMap<String, Layout<F>>,
    },
}

impl<F: Scalar> LayoutSpec<F> {
    /// Name of this column in reports.
    pub fn name(&self) -> &str {
        match self {
            LayoutSpec::Builtin(m) => m.name(),
            LayoutSpec::Imported { name, .. } => name,
        }
    }
}

/// Parameters shared by all cells of a layout comparison.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ComparisonConfig<F> {
    /// Template for the built-in layout runs (per-cell seeds are derived).
    pub layout: LayoutConfig<F>,
    /// k-means restarts per cell.
    pub restarts: usize,
    /// Master seed; every cell derives its own layout and k-means seeds from
    /// it and the cell's (dataset, layout) names.
    pub seed: u64,
}

impl<F: Scalar> Default for ComparisonConfig<F> {
    fn default() -> Self {
        Self {
            layout: LayoutConfig::default(),
            restarts: 10,
            seed: 0,
        }
    }
}

/// One (dataset, layout) cell: a score report, or the error that prevented
/// one.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(bound(deserialize = "F: serde::Deserialize<'de>"))]
pub struct ComparisonCell<F> {
    /// Dataset name.
    pub dataset: String,
    /// Layout name.
    pub layout: String,
    /// Scores, when the cell succeeded.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub report: Option<CqReport<F>>,
    /// Failure description, when it did not.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// All cells of a layout comparison, in row-major (dataset, layout) order.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ComparisonMatrix<F> {
    /// Dataset names, in input order.
    pub datasets: Vec<String>,
    /// Layout names, in input order.
    pub layouts: Vec<String>,
    /// One cell per (dataset, layout) pair.
    pub cells: Vec<ComparisonCell<F>>,
}

impl<F> ComparisonMatrix<F> {
    /// Look up a cell by names.
    pub fn cell(&self, dataset: &str, layout: &str) -> Option<&ComparisonCell<F>> {
        self.cells
            .iter()
            .find(|c| c.dataset == dataset && c.layout == layout)
    }

    /// Look up a cell's report by names, if the cell succeeded.
    pub fn report(&self, dataset: &str, layout: &str) -> Option<&CqReport<F>> {
        self.cell(dataset, layout).and_then(|c| c.report.as_ref())
    }
}

fn score_cell<F: Scalar>(
    dataset: &Dataset,
    spec: &LayoutSpec<F>,
    cfg: &ComparisonConfig<F>,
    salt: u64,
) -> Result<CqReport<F>> {
    let layout = match spec {
        LayoutSpec::Builtin(method) => {
            let cell_cfg = LayoutConfig {
                seed: derive_seed(cfg.seed, CELL_LAYOUT ^ salt),
                ..cfg.layout
            };
            compute_layout(*method, &dataset.graph, &cell_cfg)?
        }
        LayoutSpec::Imported { name, layouts } => layouts
            .get(&dataset.name)
            .cloned()
            .ok_or_else(|| {
                Error::invalid(
                    "imported layout",
                    format!("no coordinates for dataset {:?} under {name:?}", dataset.name),
                )
            })?,
    };
    let kmeans_cfg = KMeansConfig {
        restarts: cfg.restarts,
        seed: derive_seed(cfg.seed, CELL_KMEANS ^ salt),
        ..KMeansConfig::new(dataset.truth.cluster_count())
    };
    let mut report = score_layout(&dataset.truth, &layout, &kmeans_cfg)?;
    report.meta.layout = Some(spec.name().to_string());
    Ok(report)
}

/// Score every layout on every dataset.
///
/// Cells run in parallel, each on its own derived seed. A failing cell
/// (disconnected graph for a distance-based layout, missing import, …)
/// becomes a missing cell with its error recorded; only a dataset that gets
/// no score from *any* layout fails the run.
pub fn run_layout_comparison<F: Scalar>(
    datasets: &[Dataset],
    specs: &[LayoutSpec<F>],
    cfg: &ComparisonConfig<F>,
) -> Result<ComparisonMatrix<F>> {
    if datasets.is_empty() {
        return Err(Error::TooFew {
            context: "layout comparison",
            minimum: 1,
            unit: "datasets",
            actual: 0,
        });
    }
    if specs.is_empty() {
        return Err(Error::TooFew {
            context: "layout comparison",
            minimum: 1,
            unit: "layouts",
            actual: 0,
        });
    }
    for (list, kind) in [
        (datasets.iter().map(|d| d.name.as_str()).collect::<Vec<_>>(), "dataset"),
        (specs.iter().map(|s| s.name()).collect::<Vec<_>>(), "layout"),
    ] {
        let mut seen = std::collections::BTreeSet::new();
        for name in list {
            if !seen.insert(name) {
                return Err(Error::invalid(
                    "names",
                    format!("duplicate {kind} name {name:?} would make cells ambiguous"),
                ));
            }
        }
    }

    let pairs: Vec<(usize, usize)> = (0..datasets.len())
        .flat_map(|d| (0..specs.len()).map(move |l| (d, l)))
        .collect();
    let cells: Vec<ComparisonCell<F>> = pairs
        .into_par_iter()
        .map(|(d, l)| {
            let dataset = &datasets[d];
            let spec = &specs[l];
            let salt = cell_salt(&dataset.name, spec.name());
            let (report, error) = match score_cell(dataset, spec, cfg, salt) {
                Ok(report) => (Some(report), None),
                Err(e) => (None, Some(e.to_string())),
            };
            ComparisonCell {
                dataset: dataset.name.clone(),
                layout: spec.name().to_string(),
                report,
                error,
            }
        })
        .collect();

    for dataset in datasets {
        let scored = cells
            .iter()
            .any(|c| c.dataset == dataset.name && c.report.is_some());
        if !scored {
            return Err(Error::AllLayoutsFailed {
                dataset: dataset.name.clone(),
            });
        }
    }

    Ok(ComparisonMatrix {
        datasets: datasets.iter().map(|d| d.name.clone()).collect(),
        layouts: specs.iter().map(|s| s.name().to_string()).collect(),
        cells,
    })
}

/// Arithmetic means of the five scores over some group of reports.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MeanScores<F> {
    /// Mean adjusted Rand index.
    pub cq_ari: F,
    /// Mean adjusted mutual information.
    pub cq_ami: F,
    /// Mean Fowlkes–Mallows index.
    pub cq_fmi: F,
    /// Mean homogeneity.
    pub cq_hom: F,
    /// Mean completeness.
    pub cq_cmp: F,
}

impl<F: Scalar> MeanScores<F> {
    /// Mean over a non-empty set of reports; `None` when `reports` is empty.
    pub fn over<'a>(reports: impl IntoIterator<Item = &'a CqReport<F>>) -> Option<Self> {
        let mut sums = [F::zero(); 5];
        let mut count = 0usize;
        for report in reports {
            for (slot, (_, value)) in sums.iter_mut().zip(report.metric_values()) {
                *slot += value;
            }
            count += 1;
        }
        if count == 0 {
            return None;
        }
        let d: F = cast_usize(count);
        Some(Self {
            cq_ari: sums[0] / d,
            cq_ami: sums[1] / d,
            cq_fmi: sums[2] / d,
            cq_hom: sums[3] / d,
            cq_cmp: sums[4] / d,
        })
    }

    /// The five means with their metric names, in canonical order.
    pub fn metric_values(&self) -> [(&'static str, F); 5] {
        [
            ("cq_ari", self.cq_ari),
            ("cq_ami", self.cq_ami),
            ("cq_fmi", self.cq_fmi),
            ("cq_hom", self.cq_hom),
            ("cq_cmp", self.cq_cmp),
        ]
    }
}

/// Per-step means over several deformation runs.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StepMeans<F> {
    /// Deformation step (0 = undeformed).
    pub step: usize,
    /// Number of runs that reached this step.
    pub count: usize,
    /// Means over those runs.
    #[serde(flatten)]
    pub means: MeanScores<F>,
}

/// Average several deformation runs step by step.
///
/// Runs of different lengths are allowed: each step averages the runs that
/// reached it, and `count` records how many that was.
pub fn aggregate_deformation<F: Scalar>(runs: &[ScoreSeries<F>]) -> Result<Vec<StepMeans<F>>> {
    if runs.is_empty() {
        return Err(Error::TooFew {
            context: "deformation aggregation",
            minimum: 1,
            unit: "runs",
            actual: 0,
        });
    }
    let longest = runs.iter().map(|r| r.reports.len()).max().unwrap_or(0);
    Ok((0..longest)
        .map(|step| {
            let at_step: Vec<&CqReport<F>> =
                runs.iter().filter_map(|r| r.reports.get(step)).collect();
            let count = at_step.len();
            StepMeans {
                step,
                count,
                means: MeanScores::over(at_step).expect("longest run reaches this step"),
            }
        })
        .collect())
}

/// Per-layout means over a comparison matrix.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(bound(deserialize = "F: serde::Deserialize<'de>"))]
pub struct LayoutMeans<F> {
    /// Layout name.
    pub layout: String,
    /// Number of datasets this layout scored.
    pub scored: usize,
    /// Number of datasets it failed on (missing cells, excluded from means).
    pub missing: usize,
    /// Means over the scored cells; absent when every cell failed.
    #[serde(flatten, skip_serializing_if = "Option::is_none", default)]
    pub means: Option<MeanScores<F>>,
}

/// Average a comparison matrix per layout, skipping (but counting) missing
/// cells.
pub fn aggregate_comparison<F: Scalar>(matrix: &ComparisonMatrix<F>) -> Vec<LayoutMeans<F>> {
    matrix
        .layouts
        .iter()
        .map(|layout| {
            let column: Vec<&ComparisonCell<F>> = matrix
                .cells
                .iter()
                .filter(|c| &c.layout == layout)
                .collect();
            let reports: Vec<&CqReport<F>> =
                column.iter().filter_map(|c| c.report.as_ref()).collect();
            LayoutMeans {
                layout: layout.clone(),
                scored: reports.len(),
                missing: column.len() - reports.len(),
                means: MeanScores::over(reports),
            }
        })
        .collect()
}
