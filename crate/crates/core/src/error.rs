//! Error type shared by the whole crate.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while building graphs, layouts, clusterings,
/// or running experiments.
#[derive(Debug, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// A text input (edge list, labels, coordinates, …) failed to parse.
    #[error("parse error{} at line {line}: {message}", match path { Some(p) => format!(" in {}", p.display()), None => String::new() })]
    Parse {
        /// File the text came from, when it was read from disk.
        path: Option<PathBuf>,
        /// 1-based line number in the input.
        line: usize,
        /// What was wrong with the line.
        message: String,
    },

    /// Reading or writing a file failed.
    #[error("io error on {path}")]
    Io {
        /// File that was being accessed.
        path: PathBuf,
        /// Underlying error.
        #[source]
        source: std::io::Error,
    },

    /// An edge references a vertex id outside `0..n`.
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange {
        /// Offending vertex id.
        vertex: u64,
        /// Number of vertices in the graph.
        n: usize,
    },

    /// An edge connects a vertex to itself.
    #[error("self-loop on vertex {vertex}")]
    SelfLoop {
        /// Offending vertex id.
        vertex: u64,
    },

    /// An operation needs more vertices (or points, or clusters) than it got.
    #[error("{context} needs at least {minimum} {unit}, got {actual}")]
    TooFew {
        /// What was being attempted.
        context: &'static str,
        /// Minimum count required.
        minimum: usize,
        /// What the count refers to (vertices, points, clusters, …).
        unit: &'static str,
        /// Count actually provided.
        actual: usize,
    },

    /// Two inputs that must describe the same vertex set disagree in length.
    #[error("{context}: size mismatch ({left} vs {right})")]
    SizeMismatch {
        /// What was being paired up.
        context: &'static str,
        /// Length of the first input.
        left: usize,
        /// Length of the second input.
        right: usize,
    },

    /// Cluster ids passed to a labeling are not the dense range `0..k`.
    #[error("cluster ids are not contiguous: id {missing} is unused below max id {max_id}")]
    ClusterIdsNotDense {
        /// Smallest unused id.
        missing: u32,
        /// Largest id that was used.
        max_id: u32,
    },

    /// A label file does not cover every vertex exactly once.
    #[error("label file does not assign vertex {vertex} exactly once (seen {seen} times)")]
    LabelCoverage {
        /// Vertex with the wrong number of assignments.
        vertex: u64,
        /// How many assignments it received.
        seen: usize,
    },

    /// The graph must be connected for this operation but is not.
    #[error("graph is disconnected ({components} components); {context} requires a connected graph")]
    Disconnected {
        /// Number of connected components found.
        components: usize,
        /// Operation that needed connectivity.
        context: &'static str,
    },

    /// A configuration value is outside its allowed range.
    #[error("invalid value for {name}: {message}")]
    InvalidParameter {
        /// Parameter name.
        name: &'static str,
        /// Why the value was rejected.
        message: String,
    },

    /// Randomized construction gave up after too many rejected attempts.
    #[error("{what} failed after {attempts} attempts")]
    GenerationExhausted {
        /// What was being constructed.
        what: &'static str,
        /// Number of attempts made.
        attempts: usize,
    },

    /// Connectivity repair pushed a density too far above its target.
    #[error("{scope} density {actual:.4} overshoots target {target:.4} after connectivity repair")]
    DensityOvershoot {
        /// `"internal"` (a cluster) or `"external"` (between clusters).
        scope: &'static str,
        /// Requested density.
        target: f64,
        /// Density actually reached.
        actual: f64,
    },

    /// An iterative numeric routine failed to make progress or produced
    /// non-finite values.
    #[error("numerical failure in {context}: {message}")]
    Numerical {
        /// Routine that failed.
        context: &'static str,
        /// Diagnostic detail.
        message: String,
    },

    /// k-means needs at least `k` distinct positions to seed centroids.
    #[error("k-means with k={k} needs {k} distinct points, but only {distinct} are distinct")]
    NotEnoughDistinctPoints {
        /// Requested number of clusters.
        k: usize,
        /// Number of distinct positions available.
        distinct: usize,
    },

    /// In a layout comparison, a dataset got no score from any layout.
    /// Individual failures are tolerated as missing cells; losing a whole
    /// row means the run cannot say anything about that dataset.
    #[error("every layout failed for dataset {dataset:?}")]
    AllLayoutsFailed {
        /// Dataset whose row is empty.
        dataset: String,
    },
}

impl Error {
    /// Wrap an io error with the path that produced it.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Shorthand for [`Error::Parse`], without a source file.
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: None,
            line,
            message: message.into(),
        }
    }

    /// Attach the source file to a parse error. Commands read several files,
    /// so a bare line number is not enough to point at the broken one.
    /// Non-parse errors pass through unchanged.
    pub fn with_file(self, path: impl Into<PathBuf>) -> Self {
        match self {
            Error::Parse { line, message, .. } => Error::Parse {
                path: Some(path.into()),
                line,
                message,
            },
            other => other,
        }
    }

    /// Shorthand for [`Error::InvalidParameter`].
    pub fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}
