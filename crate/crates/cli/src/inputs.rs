//! File ingestion shared by the subcommands: edge lists, label files,
//! coordinate files, and optional reduction to the largest connected
//! component with a persisted id map.

use std::path::{Path, PathBuf};

use cq_core::io::{load_edge_list, load_labeling, EdgeListDocument};
use cq_core::layouts::load_layout;
use cq_core::{ClusterLabeling, Dataset, Graph, Layout64};

use crate::config::{validate_name, DatasetEntry, ResolvedDataset};
use crate::CliError;

/// File stem as a string, for deriving names from paths.
pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".to_string())
}

/// Resolve a config-relative path against the config file's directory;
/// absolute paths pass through.
pub fn resolve_path(base: &Path, given: &Path) -> PathBuf {
    if given.is_absolute() {
        given.to_path_buf()
    } else {
        base.join(given)
    }
}

/// Load an edge list, warning about (but keeping) inputs that drop
/// self-loops or duplicate lines.
pub fn load_graph(path: &Path) -> Result<EdgeListDocument, CliError> {
    let doc = load_edge_list(path).map_err(CliError::from)?;
    if doc.dropped() > 0 {
        eprintln!(
            "warning: {}: dropped {} self-loop and {} duplicate line(s)",
            path.display(),
            doc.self_loops_dropped,
            doc.duplicates_dropped
        );
    }
    Ok(doc)
}

/// Restrict a graph and its labels to the largest connected component.
/// Returns the reduced pair plus the id map (`kept[new] = old`).
pub fn reduce_to_lcc(
    graph: &Graph,
    truth: &ClusterLabeling,
) -> Result<(Graph, ClusterLabeling, Vec<u32>), CliError> {
    let (reduced, kept) = graph.largest_connected_component();
    let labels = truth.restricted_to(&kept).map_err(CliError::from)?;
    Ok((reduced, labels, kept))
}

/// Serialize an id map as `new old` lines.
pub fn idmap_text(kept: &[u32]) -> String {
    let mut out = String::from("# new old\n");
    for (new, old) in kept.iter().enumerate() {
        out.push_str(&format!("{new} {old}\n"));
    }
    out
}

/// Accept a coordinate file for a possibly LCC-reduced graph: a file
/// covering the reduced vertex set is used as-is, one covering the original
/// set is restricted through the id map.
pub fn fit_layout(
    layout: Layout64,
    reduced_n: usize,
    original_n: usize,
    kept: Option<&[u32]>,
) -> Result<Layout64, CliError> {
    if layout.len() == reduced_n {
        return Ok(layout);
    }
    if let Some(kept) = kept {
        if layout.len() == original_n && original_n != reduced_n {
            return layout.restricted_to(kept).map_err(CliError::from);
        }
    }
    Err(CliError::Data(format!(
        "coordinate file covers {} vertices, expected {}{}",
        layout.len(),
        reduced_n,
        if kept.is_some() {
            format!(" (or {original_n} before the -lcc reduction)")
        } else {
            String::new()
        }
    )))
}

/// A dataset ready to run: the core triple plus manifest bookkeeping.
pub struct LoadedDataset {
    pub dataset: Dataset,
    /// Resolved entry for the manifest.
    pub resolved: ResolvedDataset,
    /// Input files to digest: (path as configured, path on disk).
    pub digests: Vec<(PathBuf, PathBuf)>,
    /// Initial drawing for deformation runs, when imported.
    pub initial_layout: Option<Layout64>,
    /// LCC id map, when the dataset was reduced.
    pub idmap: Option<Vec<u32>>,
    /// Vertex count before any LCC reduction.
    pub original_n: usize,
}

/// Resolve one config entry into a loaded dataset. `index` feeds derived
/// generator seeds; `base_dir` anchors relative paths.
pub fn resolve_dataset(
    entry: &DatasetEntry,
    master: u64,
    index: usize,
    base_dir: &Path,
) -> Result<LoadedDataset, CliError> {
    match (&entry.generate, &entry.edges, &entry.labels) {
        (Some(gen_entry), None, None) => {
            if entry.lcc {
                return Err(CliError::Usage(
                    "`lcc` applies to file datasets; generated ones are connected".into(),
                ));
            }
            let spec = gen_entry.resolve(master, index)?;
            let data = cq_core::generate(&spec).map_err(CliError::from)?;
            let name = entry.name.clone().unwrap_or(data.name);
            validate_name(&name)?;
            let original_n = data.graph.vertex_count();
            let mut loaded = LoadedDataset {
                dataset: Dataset::new(&name, data.graph, data.labeling).map_err(CliError::from)?,
                resolved: ResolvedDataset {
                    name,
                    edges: None,
                    labels: None,
                    lcc: false,
                    layout_file: None,
                    generate: Some(spec),
                },
                digests: Vec::new(),
                initial_layout: None,
                idmap: None,
                original_n,
            };
            load_entry_layout(entry, base_dir, &mut loaded)?;
            Ok(loaded)
        }
        (None, Some(edges), Some(labels)) => {
            let edges_path = resolve_path(base_dir, edges);
            let labels_path = resolve_path(base_dir, labels);
            let doc = load_graph(&edges_path)?;
            let original_n = doc.graph.vertex_count();
            let truth = load_labeling(&labels_path, original_n).map_err(CliError::from)?;
            let (graph, truth, idmap) = if entry.lcc {
                let (g, t, kept) = reduce_to_lcc(&doc.graph, &truth)?;
                (g, t, Some(kept))
            } else {
                (doc.graph, truth, None)
            };
            let name = entry.name.clone().unwrap_or_else(|| stem(edges));
            validate_name(&name)?;
            let mut loaded = LoadedDataset {
                dataset: Dataset::new(&name, graph, truth).map_err(CliError::from)?,
                resolved: ResolvedDataset {
                    name,
                    edges: Some(edges.display().to_string()),
                    labels: Some(labels.display().to_string()),
                    lcc: entry.lcc,
                    layout_file: None,
                    generate: None,
                },
                digests: vec![
                    (edges.clone(), edges_path),
                    (labels.clone(), labels_path),
                ],
                initial_layout: None,
                idmap,
                original_n,
            };
            load_entry_layout(entry, base_dir, &mut loaded)?;
            Ok(loaded)
        }
        _ => Err(CliError::Usage(
            "each dataset entry needs either `edges` + `labels` or a `generate` table".into(),
        )),
    }
}

/// Attach an imported initial drawing, fitting it through the LCC id map if
/// the dataset was reduced.
fn load_entry_layout(
    entry: &DatasetEntry,
    base_dir: &Path,
    loaded: &mut LoadedDataset,
) -> Result<(), CliError> {
    let Some(given) = &entry.layout_file else {
        return Ok(());
    };
    let path = resolve_path(base_dir, given);
    let layout: Layout64 = load_layout(&path).map_err(CliError::from)?;
    let n = loaded.dataset.graph.vertex_count();
    loaded.initial_layout = Some(fit_layout(
        layout,
        n,
        loaded.original_n,
        loaded.idmap.as_deref(),
    )?);
    loaded.resolved.layout_file = Some(given.display().to_string());
    loaded.digests.push((given.clone(), path));
    Ok(())
}
