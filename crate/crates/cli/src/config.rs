//! Declarative experiment configuration: one TOML file describes the
//! datasets, layouts, and seeds of a run, so a whole experiment is a single
//! command. Flags override the file's values; everything left unset falls
//! back to a default, and the fully resolved result is echoed into the run
//! manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use cq_core::generators::{BaseKind, ClusterSizes};
use cq_core::seed::derive_seed;
use cq_core::GeneratorSpec;

use crate::CliError;

/// Deformation experiment file.
///
/// ```toml
/// seed = 7
/// steps = 10
/// rho = 0.075
/// restarts = 10
/// layout = "fr"
/// seeds = [1, 2, 3, 4, 5]
///
/// [[datasets]]
/// edges = "data/email.edges"
/// labels = "data/email.labels"
/// lcc = true
///
/// [[datasets]]
/// [datasets.generate]
/// base = "complete"
/// clusters = 9
/// size = 30
/// internal = 0.4
/// external = 0.01
/// ```
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformFile {
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    pub rho: Option<f64>,
    pub restarts: Option<usize>,
    /// Built-in algorithm drawing the undeformed layout (ignored for
    /// datasets that import one).
    pub layout: Option<String>,
    pub layout_iterations: Option<usize>,
    /// One deformation run per seed and dataset; defaults to the single
    /// master seed.
    pub seeds: Option<Vec<u64>>,
    pub datasets: Vec<DatasetEntry>,
}

/// Layout comparison file.
///
/// ```toml
/// seed = 7
/// restarts = 10
/// layouts = ["random", "fr", "linlog", "stress", "mds", "spectral"]
///
/// [[datasets]]
/// edges = "data/email.edges"
/// labels = "data/email.labels"
///
/// [[imports]]
/// name = "external-tool"
/// [imports.files]
/// "email" = "layouts/email-external.layout"
/// ```
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareFile {
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    /// Built-in layouts to compare; defaults to all six.
    pub layouts: Option<Vec<String>>,
    pub layout_iterations: Option<usize>,
    pub datasets: Vec<DatasetEntry>,
    /// Externally computed drawings, one column each.
    #[serde(default)]
    pub imports: Vec<ImportEntry>,
}

/// One dataset: either a pair of files or an inline generator spec.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    /// Name used in outputs; defaults to the edge file's stem or the
    /// generated dataset's derived name.
    pub name: Option<String>,
    pub edges: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    /// Restrict a file dataset to its largest connected component.
    #[serde(default)]
    pub lcc: bool,
    /// Deformation only: start from this imported drawing instead of
    /// computing one.
    pub layout_file: Option<PathBuf>,
    pub generate: Option<GenerateEntry>,
}

/// Inline generator parameters; `seed` defaults to a value derived from the
/// master seed and the entry's position.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateEntry {
    pub base: String,
    pub clusters: usize,
    pub size: Option<usize>,
    pub size_range: Option<[usize; 2]>,
    pub internal: f64,
    pub external: f64,
    pub seed: Option<u64>,
    pub prefix: Option<String>,
}

/// An imported layout column of a comparison: a name plus one coordinate
/// file per dataset it covers.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImportEntry {
    pub name: String,
    pub files: BTreeMap<String, PathBuf>,
}

/// Read and parse a TOML config; any failure here is a usage error.
pub fn load_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("reading config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("parsing config {}: {e}", path.display())))
}

/// Salt for per-entry generator seeds (mixed with the entry index).
const GENERATE_SALT: u64 = 0xD5_0000;

impl GenerateEntry {
    /// Turn the entry into a full generator spec, deriving a seed from the
    /// master seed and `index` when none is given.
    pub fn resolve(&self, master: u64, index: usize) -> Result<GeneratorSpec, CliError> {
        let base: BaseKind = self
            .base
            .parse()
            .map_err(|e: cq_core::Error| CliError::Usage(e.to_string()))?;
        let sizes = match (self.size, self.size_range) {
            (Some(s), None) => ClusterSizes::Fixed(s),
            (None, Some([lo, hi])) => ClusterSizes::Range(lo, hi),
            (None, None) => {
                return Err(CliError::Usage(
                    "generator entry needs `size` or `size_range`".into(),
                ))
            }
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "generator entry takes `size` or `size_range`, not both".into(),
                ))
            }
        };
        let spec = GeneratorSpec {
            base,
            cluster_count: self.clusters,
            sizes,
            internal_density: self.internal,
            external_density: self.external,
            seed: self
                .seed
                .unwrap_or_else(|| derive_seed(master, GENERATE_SALT + index as u64)),
            prefix_override: self.prefix.clone(),
        };
        spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(spec)
    }
}

/// Resolved form of a dataset entry, echoed into the manifest.
#[derive(Debug, Serialize)]
pub struct ResolvedDataset {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<String>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub lcc: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generate: Option<GeneratorSpec>,
}

/// Output names must stay safe to embed in file names and CSV without
/// quoting.
pub fn validate_name(name: &str) -> Result<(), CliError> {
    let ok = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "name {name:?} may only contain ASCII letters, digits, '-', '_', '.'"
        )))
    }
}
