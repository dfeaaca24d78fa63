//! Measure how well a drawing of a clustered graph shows its clusters.
//!
//! Given a graph with a ground-truth clustering and any 2D drawing of it,
//! the pipeline is: cluster the drawn vertex positions geometrically with
//! k-means (k = the number of true clusters), then compare the geometric
//! clustering against the truth with five partition-comparison scores —
//! adjusted Rand index, adjusted mutual information, Fowlkes–Mallows index,
//! homogeneity, and completeness. A drawing that keeps every cluster
//! visually together scores 1 on all five; mixing clusters drives the
//! scores down.
//!
//! The crate ships everything needed to exercise the metric end to end:
//! synthetic clustered-graph generators ([`generators`]), six layout
//! algorithms ([`layouts`]), the k-means step ([`geoclust`]), the comparison
//! scores ([`clustcmp`]), a deformation-validation harness and a
//! layout-comparison harness ([`experiments`]), and SVG reporting
//! ([`report`]).
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases at the crate root pick the usual double precision. Every
//! randomized stage takes an explicit seed and is bit-reproducible.
//!
//! ```
//! use cq_core::generators::{generate, BaseKind, ClusterSizes, GeneratorSpec};
//! use cq_core::layouts::ideal_grid_layout;
//! use cq_core::seed::rng_from;
//! use cq_core::{score_layout, KMeansConfig64};
//!
//! let data = generate(&GeneratorSpec {
//!     base: BaseKind::Complete,
//!     cluster_count: 4,
//!     sizes: ClusterSizes::Fixed(10),
//!     internal_density: 0.6,
//!     external_density: 0.02,
//!     seed: 1,
//!     prefix_override: None,
//! })?;
//!
//! // A drawing that separates the clusters perfectly scores 1 everywhere.
//! let drawing = ideal_grid_layout(&data.labeling, 0.1, &mut rng_from(1, 0))?;
//! let report = score_layout(&data.labeling, &drawing, &KMeansConfig64::new(4))?;
//! assert_eq!(report.cq_ari, 1.0);
//! assert_eq!(report.cq_ami, 1.0);
//! # Ok::<(), cq_core::Error>(())
//! ```

#![warn(missing_docs)]

pub mod clustcmp;
pub mod dist;
mod error;
pub mod experiments;
pub mod generators;
pub mod geoclust;
pub mod graph;
pub mod io;
pub mod layouts;
pub mod report;
mod scalar;
pub mod seed;

pub use clustcmp::{cq_scores, CqReport, ReportMeta};
pub use error::{Error, Result};
pub use experiments::{
    compute_layout, run_deformation, run_layout_comparison, score_layout, ComparisonMatrix,
    Dataset, DeformationConfig, LayoutMethod, LayoutSpec, ScoreSeries,
};
pub use generators::{generate, GeneratedDataset, GeneratorSpec};
pub use geoclust::{kmeans, KMeansConfig, KMeansResult};
pub use graph::{ClusterLabeling, Graph};
pub use layouts::{Layout, LayoutConfig, Point};
pub use scalar::Scalar;

/// [`Point`] at the default double precision.
pub type Point64 = Point<f64>;
/// [`Layout`] at the default double precision.
pub type Layout64 = Layout<f64>;
/// [`LayoutConfig`] at the default double precision.
pub type LayoutConfig64 = LayoutConfig<f64>;
/// [`KMeansConfig`] at the default double precision.
pub type KMeansConfig64 = KMeansConfig<f64>;
/// [`CqReport`] at the default double precision.
pub type CqReport64 = CqReport<f64>;
/// [`DeformationConfig`] at the default double precision.
pub type DeformationConfig64 = DeformationConfig<f64>;
/// [`ScoreSeries`] at the default double precision.
pub type ScoreSeries64 = ScoreSeries<f64>;
/// [`ComparisonMatrix`] at the default double precision.
pub type ComparisonMatrix64 = ComparisonMatrix<f64>;
