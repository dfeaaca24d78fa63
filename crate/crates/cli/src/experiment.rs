//! Drivers for the `deform` and `compare` subcommands: resolve the config
//! into datasets and layouts, fan the cells out over the worker pool, and
//! write the result tree — structured JSON, a flat CSV score table, charts —
//! with the run manifest last, so a manifest on disk implies complete
//! outputs.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use cq_core::experiments::{aggregate_comparison, aggregate_deformation, ComparisonConfig, LayoutSpec};
use cq_core::report::{
    artifact_file_name, render_comparison_chart, render_drawing, render_series_chart, RenderStyle,
};
use cq_core::seed::{derive_seed, hash_name};
use cq_core::{
    compute_layout, run_deformation, run_layout_comparison, Dataset, DeformationConfig64,
    KMeansConfig, Layout64, LayoutConfig, LayoutConfig64, LayoutMethod,
};

use crate::config::{load_toml, validate_name, CompareFile, DatasetEntry, DeformFile};
use crate::inputs::{fit_layout, idmap_text, resolve_dataset, resolve_path, stem, LoadedDataset};
use crate::outputs::{atomic_write, compare_csv, deform_csv, write_json, DeformRun, FailureNote, RunManifest};
use crate::{CliError, CompareArgs, DeformArgs};

/// Directory that relative paths inside a config file resolve against.
fn config_dir(config: &Path) -> PathBuf {
    match config.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Load every dataset entry, rejecting duplicate names. Load failures are
/// fatal: a config that references broken inputs is an input error, unlike a
/// layout that fails on a loaded dataset.
fn load_datasets(
    entries: &[DatasetEntry],
    master: u64,
    base_dir: &Path,
) -> Result<Vec<LoadedDataset>, CliError> {
    if entries.is_empty() {
        return Err(CliError::Usage("config lists no datasets".into()));
    }
    let mut loaded = Vec::with_capacity(entries.len());
    for (index, entry) in entries.iter().enumerate() {
        loaded.push(resolve_dataset(entry, master, index, base_dir)?);
    }
    let mut seen = BTreeSet::new();
    for l in &loaded {
        if !seen.insert(l.dataset.name.as_str()) {
            return Err(CliError::Usage(format!(
                "duplicate dataset name {:?}",
                l.dataset.name
            )));
        }
    }
    Ok(loaded)
}

fn ensure_out_dir(out_dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Data(format!("creating {}: {e}", out_dir.display())))
}

/// Write `<name>.idmap` for every dataset that was reduced to its largest
/// connected component, returning the file names.
fn write_idmaps(loaded: &[LoadedDataset], out_dir: &Path) -> Result<Vec<String>, CliError> {
    let mut names = Vec::new();
    for l in loaded {
        if let Some(kept) = &l.idmap {
            let name = format!("{}.idmap", l.dataset.name);
            atomic_write(&out_dir.join(&name), idmap_text(kept).as_bytes())?;
            names.push(name);
        }
    }
    Ok(names)
}

/// A dataset with its undeformed drawing, ready to deform.
struct Prepared<'a> {
    data: &'a LoadedDataset,
    layout_name: String,
    layout: Layout64,
}

pub fn deform(args: &DeformArgs) -> Result<(), CliError> {
    let file: DeformFile = load_toml(&args.config)?;
    let base_dir = config_dir(&args.config);

    let master = args.seed.or(file.seed).unwrap_or(0);
    let steps = args.steps.or(file.steps).unwrap_or(10);
    let rho = args.rho.or(file.rho).unwrap_or(0.075);
    let restarts = args.restarts.or(file.restarts).unwrap_or(10);
    let method: LayoutMethod = file
        .layout
        .as_deref()
        .unwrap_or("fr")
        .parse()
        .map_err(|e: cq_core::Error| CliError::Usage(e.to_string()))?;
    let layout_iterations = file
        .layout_iterations
        .unwrap_or(LayoutConfig64::default().max_iterations);
    let seeds = file.seeds.clone().unwrap_or_else(|| vec![master]);
    if seeds.is_empty() {
        return Err(CliError::Usage("`seeds` must not be empty".into()));
    }

    let loaded = load_datasets(&file.datasets, master, &base_dir)?;
    ensure_out_dir(&args.out_dir)?;

    // Undeformed drawings: imported where the entry names one, computed
    // otherwise. A dataset whose layout fails is skipped, not fatal.
    let mut failures: Vec<FailureNote> = Vec::new();
    let prepared: Vec<Result<Prepared, FailureNote>> = loaded
        .par_iter()
        .map(|l| {
            let name = &l.dataset.name;
            if let Some(layout) = &l.initial_layout {
                let file_stem = l
                    .resolved
                    .layout_file
                    .as_deref()
                    .map(|p| stem(Path::new(p)))
                    .unwrap_or_else(|| "import".to_string());
                return Ok(Prepared {
                    data: l,
                    layout_name: file_stem,
                    layout: layout.clone(),
                });
            }
            let cfg = LayoutConfig {
                seed: derive_seed(master, hash_name(name)),
                max_iterations: layout_iterations,
                ..LayoutConfig64::default()
            };
            match compute_layout(method, &l.dataset.graph, &cfg) {
                Ok(layout) => Ok(Prepared {
                    data: l,
                    layout_name: method.name().to_string(),
                    layout,
                }),
                Err(e) => Err(FailureNote {
                    dataset: name.clone(),
                    error: format!("{} layout: {e}", method.name()),
                }),
            }
        })
        .collect();
    let mut ready: Vec<Prepared> = Vec::new();
    for p in prepared {
        match p {
            Ok(p) => ready.push(p),
            Err(note) => {
                eprintln!("warning: skipping {}: {}", note.dataset, note.error);
                failures.push(note);
            }
        }
    }

    // One run per (dataset, seed); each gets its own derived seed stream so
    // no two cells share perturbations.
    let cells: Vec<(usize, u64)> = (0..ready.len())
        .flat_map(|d| seeds.iter().map(move |&s| (d, s)))
        .collect();
    let outcomes: Vec<Result<DeformRun, FailureNote>> = cells
        .par_iter()
        .map(|&(d, run_seed)| {
            let p = &ready[d];
            let dataset = &p.data.dataset;
            let cfg = DeformationConfig64 {
                steps,
                rho,
                seed: derive_seed(run_seed, hash_name(&dataset.name)),
            };
            let km = KMeansConfig {
                restarts,
                ..KMeansConfig::new(dataset.truth.cluster_count())
            };
            match run_deformation(&dataset.graph, &dataset.truth, &p.layout, &cfg, &km) {
                Ok(mut series) => {
                    series.dataset = Some(dataset.name.clone());
                    series.layout = Some(p.layout_name.clone());
                    Ok(DeformRun {
                        dataset: dataset.name.clone(),
                        run_seed,
                        series,
                    })
                }
                Err(e) => Err(FailureNote {
                    dataset: dataset.name.clone(),
                    error: format!("seed {run_seed}: {e}"),
                }),
            }
        })
        .collect();
    let mut runs: Vec<DeformRun> = Vec::new();
    for o in outcomes {
        match o {
            Ok(run) => runs.push(run),
            Err(note) => {
                eprintln!("warning: {}: {}", note.dataset, note.error);
                failures.push(note);
            }
        }
    }
    if runs.is_empty() {
        return Err(CliError::Data("every deformation run failed".into()));
    }

    let series: Vec<_> = runs.iter().map(|r| r.series.clone()).collect();
    let aggregate = aggregate_deformation(&series).map_err(CliError::from)?;

    let style = RenderStyle::default();
    let mut outputs = Vec::new();
    write_json(&args.out_dir.join("results.json"), &json!({"runs": &runs, "failures": &failures}))?;
    outputs.push("results.json".to_string());
    write_json(&args.out_dir.join("aggregate.json"), &aggregate)?;
    outputs.push("aggregate.json".to_string());
    atomic_write(&args.out_dir.join("scores.csv"), deform_csv(&runs).as_bytes())?;
    outputs.push("scores.csv".to_string());
    let chart = render_series_chart(&aggregate, &style).map_err(CliError::from)?;
    atomic_write(&args.out_dir.join("chart.svg"), chart.as_bytes())?;
    outputs.push("chart.svg".to_string());
    for p in &ready {
        let name = artifact_file_name(&p.data.dataset.name, &p.layout_name, Some(0));
        let svg = render_drawing(&p.data.dataset.graph, &p.layout, &p.data.dataset.truth, &style)
            .map_err(CliError::from)?;
        atomic_write(&args.out_dir.join(&name), svg.as_bytes())?;
        outputs.push(name);
    }
    outputs.extend(write_idmaps(&loaded, &args.out_dir)?);

    let parameters = json!({
        "steps": steps,
        "rho": rho,
        "restarts": restarts,
        "layout": method.name(),
        "layout_iterations": layout_iterations,
        "seeds": seeds,
        "datasets": loaded.iter().map(|l| &l.resolved).collect::<Vec<_>>(),
    });
    let mut manifest = RunManifest::new("deform", master, parameters)?;
    manifest.record_input(&args.config, &args.config)?;
    for l in &loaded {
        for (given, resolved) in &l.digests {
            manifest.record_input(given, resolved)?;
        }
    }
    manifest.write(&args.out_dir.join("manifest.json"), outputs)
}

pub fn compare(args: &CompareArgs) -> Result<(), CliError> {
    let file: CompareFile = load_toml(&args.config)?;
    let base_dir = config_dir(&args.config);

    let master = args.seed.or(file.seed).unwrap_or(0);
    let restarts = args.restarts.or(file.restarts).unwrap_or(10);
    let layout_iterations = file
        .layout_iterations
        .unwrap_or(LayoutConfig64::default().max_iterations);

    let loaded = load_datasets(&file.datasets, master, &base_dir)?;
    ensure_out_dir(&args.out_dir)?;

    // Imported columns: each file is fitted to its dataset (possibly through
    // the LCC id map). A file that does not fit is a per-cell failure — the
    // entry is dropped with a warning and the cell reports the miss.
    let mut import_digests: Vec<(PathBuf, PathBuf)> = Vec::new();
    let mut imports: BTreeMap<String, LayoutSpec<f64>> = BTreeMap::new();
    for entry in &file.imports {
        validate_name(&entry.name)?;
        let mut layouts: BTreeMap<String, Layout64> = BTreeMap::new();
        for (ds_name, given) in &entry.files {
            let Some(l) = loaded.iter().find(|l| &l.dataset.name == ds_name) else {
                return Err(CliError::Usage(format!(
                    "import {:?} references unknown dataset {ds_name:?}",
                    entry.name
                )));
            };
            let path = resolve_path(&base_dir, given);
            let fitted = cq_core::layouts::load_layout(&path)
                .map_err(CliError::from)
                .and_then(|layout| {
                    fit_layout(
                        layout,
                        l.dataset.graph.vertex_count(),
                        l.original_n,
                        l.idmap.as_deref(),
                    )
                });
            match fitted {
                Ok(layout) => {
                    layouts.insert(ds_name.clone(), layout);
                    import_digests.push((given.clone(), path));
                }
                Err(e) => eprintln!("warning: import {:?} for {ds_name}: {e}", entry.name),
            }
        }
        imports.insert(
            entry.name.clone(),
            LayoutSpec::Imported {
                name: entry.name.clone(),
                layouts,
            },
        );
    }

    // Column order: the `layouts` list when given (imports referenced by
    // name), otherwise every built-in followed by every import.
    let mut specs: Vec<LayoutSpec<f64>> = Vec::new();
    match &file.layouts {
        Some(names) => {
            for name in names {
                if let Some(spec) = imports.remove(name) {
                    specs.push(spec);
                } else {
                    let method: LayoutMethod = name
                        .parse()
                        .map_err(|e: cq_core::Error| CliError::Usage(e.to_string()))?;
                    specs.push(LayoutSpec::Builtin(method));
                }
            }
        }
        None => {
            specs.extend(LayoutMethod::ALL.iter().map(|&m| LayoutSpec::Builtin(m)));
            for entry in &file.imports {
                if let Some(spec) = imports.remove(&entry.name) {
                    specs.push(spec);
                }
            }
        }
    }

    let datasets: Vec<Dataset> = loaded.iter().map(|l| l.dataset.clone()).collect();
    let cfg = ComparisonConfig {
        layout: LayoutConfig {
            max_iterations: layout_iterations,
            ..LayoutConfig64::default()
        },
        restarts,
        seed: master,
    };
    let matrix = run_layout_comparison(&datasets, &specs, &cfg).map_err(CliError::from)?;
    for cell in &matrix.cells {
        if let Some(error) = &cell.error {
            eprintln!("warning: {}/{}: {error}", cell.dataset, cell.layout);
        }
    }
    let aggregate = aggregate_comparison(&matrix);

    let mut outputs = Vec::new();
    write_json(&args.out_dir.join("results.json"), &matrix)?;
    outputs.push("results.json".to_string());
    write_json(&args.out_dir.join("aggregate.json"), &aggregate)?;
    outputs.push("aggregate.json".to_string());
    atomic_write(&args.out_dir.join("scores.csv"), compare_csv(&matrix).as_bytes())?;
    outputs.push("scores.csv".to_string());
    let chart = render_comparison_chart(&aggregate, &RenderStyle::default()).map_err(CliError::from)?;
    atomic_write(&args.out_dir.join("chart.svg"), chart.as_bytes())?;
    outputs.push("chart.svg".to_string());
    outputs.extend(write_idmaps(&loaded, &args.out_dir)?);

    let parameters = json!({
        "restarts": restarts,
        "layout_iterations": layout_iterations,
        "layouts": matrix.layouts,
        "datasets": loaded.iter().map(|l| &l.resolved).collect::<Vec<_>>(),
        "imports": file.imports.iter().map(|e| json!({
            "name": e.name,
            "files": e.files.iter()
                .map(|(k, v)| (k.clone(), v.display().to_string()))
                .collect::<BTreeMap<_, _>>(),
        })).collect::<Vec<_>>(),
    });
    let mut manifest = RunManifest::new("compare", master, parameters)?;
    manifest.record_input(&args.config, &args.config)?;
    for l in &loaded {
        for (given, resolved) in &l.digests {
            manifest.record_input(given, resolved)?;
        }
    }
    for (given, resolved) in &import_digests {
        manifest.record_input(given, resolved)?;
    }
    manifest.write(&args.out_dir.join("manifest.json"), outputs)
}
