//! Run manifests, atomic file writes, and the CSV score format.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use cq_core::experiments::ScoreSeries;
use cq_core::ComparisonMatrix64;

use crate::CliError;

/// Everything that determined a run's output bytes: the command, the tool
/// version, the master seed, all resolved parameters, and a digest of every
/// input file. Written next to the outputs; two runs with equal manifests
/// produce byte-identical results. Execution details that do not affect the
/// output (worker count, output directory) are deliberately excluded.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    /// Subcommand that produced the outputs.
    pub command: String,
    /// Crate version of the binary.
    pub version: String,
    /// Master seed all internal seeds derive from.
    pub seed: u64,
    /// Fully resolved parameters, defaults included.
    pub parameters: serde_json::Value,
    /// SHA-256 of every input file, keyed by the path as it was given.
    pub inputs: BTreeMap<String, String>,
    /// Files the run wrote, relative to the output directory, sorted.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, parameters: impl Serialize) -> Result<Self, CliError> {
        Ok(Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            parameters: serde_json::to_value(parameters)
                .map_err(|e| CliError::Data(format!("serializing parameters: {e}")))?,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        })
    }

    /// Record an input file under the path the user wrote, digesting the
    /// bytes at `resolved`.
    pub fn record_input(&mut self, given: &Path, resolved: &Path) -> Result<(), CliError> {
        self.inputs
            .insert(given.display().to_string(), sha256_file(resolved)?);
        Ok(())
    }

    /// Write the manifest itself, listing `outputs` (sorted) as the run's
    /// files.
    pub fn write(mut self, path: &Path, outputs: Vec<String>) -> Result<(), CliError> {
        self.outputs = outputs;
        self.outputs.sort();
        write_json(path, &self)
    }
}

/// SHA-256 of a file's contents, hex encoded.
pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Data(format!("reading {}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Write a file atomically: the bytes land under a temporary name in the
/// same directory and are renamed into place, so a crashed run never leaves
/// a half-written output.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let context = |e: &dyn std::fmt::Display| format!("writing {}: {e}", path.display());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(|e| CliError::Data(context(&e)))?;
    tmp.write_all(bytes).map_err(|e| CliError::Data(context(&e)))?;
    tmp.persist(path).map_err(|e| CliError::Data(context(&e)))?;
    Ok(())
}

/// Serialize `value` as pretty JSON with a trailing newline and write it
/// atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Data(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

/// One deformation run: which dataset, which user-facing seed, and the
/// scored series.
#[derive(Debug, Serialize)]
pub struct DeformRun {
    pub dataset: String,
    pub run_seed: u64,
    pub series: ScoreSeries<f64>,
}

/// A dataset that had to be skipped, and why.
#[derive(Debug, Serialize)]
pub struct FailureNote {
    pub dataset: String,
    pub error: String,
}

/// Scores of a deformation experiment in long CSV form, one row per
/// (dataset, seed, step, metric).
pub fn deform_csv(runs: &[DeformRun]) -> String {
    let mut out = String::from("dataset,seed,step,metric,score\n");
    for run in runs {
        for (step, report) in run.series.reports.iter().enumerate() {
            for (metric, value) in report.metric_values() {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    run.dataset, run.run_seed, step, metric, value
                ));
            }
        }
    }
    out
}

/// Scores of a layout comparison in long CSV form, one row per scored
/// (dataset, layout, metric); failed cells contribute no rows.
pub fn compare_csv(matrix: &ComparisonMatrix64) -> String {
    let mut out = String::from("dataset,layout,metric,score\n");
    for cell in &matrix.cells {
        if let Some(report) = &cell.report {
            for (metric, value) in report.metric_values() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    cell.dataset, cell.layout, metric, value
                ));
            }
        }
    }
    out
}
