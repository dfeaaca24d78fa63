//! `cq` — generate clustered graphs, draw them, and score how well the
//! drawings preserve the clustering.
//!
//! Exit codes are a stable contract: 0 success, 1 data error (unreadable or
//! inconsistent inputs, failed computations), 2 usage error (bad flags or
//! config).

mod config;
mod experiment;
mod inputs;
mod outputs;

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cq_core::experiments::{LayoutMeans, StepMeans};
use cq_core::generators::{BaseKind, ClusterSizes};
use cq_core::io::{load_labeling, write_edge_list, write_labels};
use cq_core::layouts::{export_layout, load_layout};
use cq_core::report::{
    artifact_file_name, render_comparison_chart, render_drawing, render_series_chart, RenderStyle,
};
use cq_core::{
    compute_layout, generate, score_layout, ClusterLabeling, GeneratorSpec, KMeansConfig,
    Layout64, LayoutConfig64, LayoutMethod,
};

use config::validate_name;
use inputs::{fit_layout, idmap_text, load_graph, reduce_to_lcc, stem};
use outputs::{atomic_write, write_json, RunManifest};

/// Failures split by exit code: usage errors exit 2, data errors exit 1.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config — the invocation itself is wrong.
    Usage(String),
    /// Bad data or a failed computation — the invocation was fine.
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) => f.write_str(msg),
        }
    }
}

impl From<cq_core::Error> for CliError {
    fn from(e: cq_core::Error) -> Self {
        // Flatten the source chain: `io error on x.edges` alone does not say
        // whether the file is missing or unreadable.
        let mut msg = e.to_string();
        let mut source = std::error::Error::source(&e);
        while let Some(cause) = source {
            let _ = write!(msg, ": {cause}");
            source = cause.source();
        }
        CliError::Data(msg)
    }
}

#[derive(Parser)]
#[command(
    name = "cq",
    version,
    about = "Clustering-quality scores for graph drawings",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for parallel cells (default: all cores).
    #[arg(long, global = true, env = "CQ_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic clustered graph (edge list + labels + sidecar).
    Generate(GenerateArgs),
    /// Compute a drawing of a graph with a built-in algorithm.
    Layout(LayoutArgs),
    /// Score how well a drawing preserves a ground-truth clustering.
    Score(ScoreArgs),
    /// Deform drawings step by step and score every stage.
    Deform(DeformArgs),
    /// Score several layout algorithms across several datasets.
    Compare(CompareArgs),
    /// Render a drawing or an aggregate chart to SVG.
    Render(RenderArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("sizes").required(true).args(["size", "size_range"])))]
struct GenerateArgs {
    /// Base shape connecting the clusters: complete, complete-variable,
    /// bipartite, star, tree, path, r<k> (r-regular), gnm(<m>).
    #[arg(long)]
    base: String,
    /// Number of clusters.
    #[arg(long)]
    clusters: usize,
    /// Vertices per cluster.
    #[arg(long)]
    size: Option<usize>,
    /// Per-cluster size drawn uniformly from LO:HI.
    #[arg(long, value_name = "LO:HI")]
    size_range: Option<String>,
    /// Edge density inside each cluster, in (0, 1].
    #[arg(long)]
    internal: f64,
    /// Edge density between endpoint clusters of base edges, in [0, 1].
    #[arg(long)]
    external: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the derived dataset-name prefix.
    #[arg(long)]
    prefix: Option<String>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct LayoutArgs {
    /// Edge-list file (`u v` per line, `#` comments).
    #[arg(long)]
    graph: PathBuf,
    /// random, fr, linlog, stress, mds, or spectral.
    #[arg(long, default_value = "fr")]
    method: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output coordinate file; defaults to `<stem>[-lcc]-<method>.layout`
    /// in --out-dir.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Iteration cap for the iterative algorithms.
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Convergence tolerance for the iterative algorithms.
    #[arg(long)]
    tol: Option<f64>,
    /// Draw only the largest connected component (writes the reduced edge
    /// list and an id map next to the coordinates).
    #[arg(long)]
    lcc: bool,
}

#[derive(Args)]
struct ScoreArgs {
    /// Edge-list file the labels and coordinates belong to.
    #[arg(long)]
    graph: PathBuf,
    /// Ground-truth labels (`vertex cluster` per line).
    #[arg(long)]
    labels: PathBuf,
    /// Coordinates to score (`vertex x y` per line).
    #[arg(long)]
    layout: PathBuf,
    /// k-means restarts.
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report format on stdout.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Score only the largest connected component (the coordinate file may
    /// cover either the full or the reduced vertex set).
    #[arg(long)]
    lcc: bool,
}

#[derive(Args)]
pub struct DeformArgs {
    /// Experiment description (TOML).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Master seed; overrides the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Deformation steps per run; overrides the config.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Per-step displacement bound (fraction of the bounding box); overrides
    /// the config.
    #[arg(long)]
    pub rho: Option<f64>,
    /// k-means restarts; overrides the config.
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Args)]
pub struct CompareArgs {
    /// Experiment description (TOML).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Master seed; overrides the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// k-means restarts; overrides the config.
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["graph", "series", "bars"])))]
struct RenderArgs {
    /// Draw this edge-list file (requires --layout).
    #[arg(long, requires = "layout")]
    graph: Option<PathBuf>,
    /// Coordinates for the drawing.
    #[arg(long, requires = "graph")]
    layout: Option<PathBuf>,
    /// Cluster labels coloring the drawing; one gray cluster without.
    #[arg(long, requires = "graph")]
    labels: Option<PathBuf>,
    /// Line chart from a deformation aggregate JSON.
    #[arg(long)]
    series: Option<PathBuf>,
    /// Grouped bar chart from a comparison aggregate JSON.
    #[arg(long)]
    bars: Option<PathBuf>,
    /// Output SVG; defaults to a name derived from the inputs, in --out-dir.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Canvas width in pixels.
    #[arg(long, default_value_t = 800.0)]
    width: f64,
    /// Canvas height in pixels.
    #[arg(long, default_value_t = 600.0)]
    height: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        // Ignore "already initialized": tests and repeated calls are fine
        // with the existing pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let result = match &cli.command {
        Command::Generate(args) => run_generate(args),
        Command::Layout(args) => run_layout(args),
        Command::Score(args) => run_score(args),
        Command::Deform(args) => experiment::deform(args),
        Command::Compare(args) => experiment::compare(args),
        Command::Render(args) => run_render(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Data(format!("creating {}: {e}", dir.display())))
}

fn run_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let base: BaseKind = args
        .base
        .parse()
        .map_err(|e: cq_core::Error| CliError::Usage(e.to_string()))?;
    let sizes = match (&args.size, &args.size_range) {
        (Some(s), None) => ClusterSizes::Fixed(*s),
        (None, Some(range)) => {
            let parts: Vec<&str> = range.split(':').collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| {
                    CliError::Usage(format!("--size-range expects LO:HI, got {range:?}"))
                })
            };
            match parts.as_slice() {
                [lo, hi] => ClusterSizes::Range(parse(lo)?, parse(hi)?),
                _ => {
                    return Err(CliError::Usage(format!(
                        "--size-range expects LO:HI, got {range:?}"
                    )))
                }
            }
        }
        // The argument group guarantees exactly one of the two.
        _ => unreachable!(),
    };
    let spec = GeneratorSpec {
        base,
        cluster_count: args.clusters,
        sizes,
        internal_density: args.internal,
        external_density: args.external,
        seed: args.seed,
        prefix_override: args.prefix.clone(),
    };
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let data = generate(&spec).map_err(CliError::from)?;
    validate_name(&data.name)?;
    ensure_dir(&args.out_dir)?;

    let edges_name = format!("{}.edges", data.name);
    let labels_name = format!("{}.labels", data.name);
    let sidecar_name = format!("{}.json", data.name);
    atomic_write(
        &args.out_dir.join(&edges_name),
        write_edge_list(&data.graph).as_bytes(),
    )?;
    atomic_write(
        &args.out_dir.join(&labels_name),
        write_labels(&data.labeling).as_bytes(),
    )?;
    write_json(
        &args.out_dir.join(&sidecar_name),
        &json!({"name": data.name, "spec": data.spec, "stats": data.stats}),
    )?;
    let manifest = RunManifest::new("generate", spec.seed, json!({"spec": data.spec}))?;
    manifest.write(
        &args.out_dir.join(format!("{}.manifest.json", data.name)),
        vec![edges_name, labels_name, sidecar_name],
    )?;
    println!("{}", data.name);
    Ok(())
}

fn run_layout(args: &LayoutArgs) -> Result<(), CliError> {
    let method: LayoutMethod = args
        .method
        .parse()
        .map_err(|e: cq_core::Error| CliError::Usage(e.to_string()))?;
    let doc = load_graph(&args.graph)?;
    ensure_dir(&args.out_dir)?;

    let mut outputs = Vec::new();
    let mut graph = doc.graph;
    let mut base = stem(&args.graph);
    if args.lcc {
        let (reduced, kept) = graph.largest_connected_component();
        base = format!("{base}-lcc");
        let idmap_name = format!("{base}.idmap");
        let edges_name = format!("{base}.edges");
        atomic_write(&args.out_dir.join(&idmap_name), idmap_text(&kept).as_bytes())?;
        atomic_write(
            &args.out_dir.join(&edges_name),
            write_edge_list(&reduced).as_bytes(),
        )?;
        outputs.push(idmap_name);
        outputs.push(edges_name);
        graph = reduced;
    } else if !graph.is_connected() {
        eprintln!(
            "warning: {} is disconnected; distance-based methods will fail (consider --lcc)",
            args.graph.display()
        );
    }

    let cfg = LayoutConfig64 {
        seed: args.seed,
        max_iterations: args
            .max_iterations
            .unwrap_or(LayoutConfig64::default().max_iterations),
        convergence_tol: args.tol.unwrap_or(LayoutConfig64::default().convergence_tol),
        ..LayoutConfig64::default()
    };
    let layout = compute_layout(method, &graph, &cfg).map_err(CliError::from)?;

    let out_name = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{base}-{}.layout", method.name())));
    let out_path = if out_name.is_absolute() {
        out_name
    } else {
        args.out_dir.join(out_name)
    };
    atomic_write(&out_path, export_layout(&layout).as_bytes())?;
    outputs.push(stem_file_name(&out_path));

    let parameters = json!({
        "method": method.name(),
        "max_iterations": cfg.max_iterations,
        "tol": cfg.convergence_tol,
        "lcc": args.lcc,
    });
    let mut manifest = RunManifest::new("layout", args.seed, parameters)?;
    manifest.record_input(&args.graph, &args.graph)?;
    manifest.write(
        &out_path.with_file_name(format!("{}.manifest.json", stem(&out_path))),
        outputs,
    )?;
    println!("{}", out_path.display());
    Ok(())
}

/// File name (not path) of an output, for manifest listings.
fn stem_file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn run_score(args: &ScoreArgs) -> Result<(), CliError> {
    let doc = load_graph(&args.graph)?;
    let original_n = doc.graph.vertex_count();
    let truth = load_labeling(&args.labels, original_n).map_err(CliError::from)?;
    let layout: Layout64 = load_layout(&args.layout).map_err(CliError::from)?;

    let (graph, truth, idmap) = if args.lcc {
        let (g, t, kept) = reduce_to_lcc(&doc.graph, &truth)?;
        (g, t, Some(kept))
    } else {
        (doc.graph, truth, None)
    };
    let layout = fit_layout(layout, graph.vertex_count(), original_n, idmap.as_deref())?;

    let km = KMeansConfig {
        restarts: args.restarts,
        seed: args.seed,
        ..KMeansConfig::new(truth.cluster_count())
    };
    let mut report = score_layout(&truth, &layout, &km).map_err(CliError::from)?;
    report.meta.layout = Some(stem(&args.layout));

    match args.format {
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Data(format!("serializing report: {e}")))?;
            println!("{text}");
        }
        OutputFormat::Csv => {
            println!("metric,score");
            for (metric, value) in report.metric_values() {
                println!("{metric},{value}");
            }
        }
    }
    Ok(())
}

fn run_render(args: &RenderArgs) -> Result<(), CliError> {
    if !(args.width > 0.0 && args.height > 0.0) {
        return Err(CliError::Usage(
            "--width and --height must be positive".into(),
        ));
    }
    let style = RenderStyle {
        width: args.width,
        height: args.height,
        ..RenderStyle::default()
    };

    let (svg, default_name) = if let (Some(graph), Some(layout)) = (&args.graph, &args.layout) {
        let doc = load_graph(graph)?;
        let coords: Layout64 = load_layout(layout).map_err(CliError::from)?;
        let n = doc.graph.vertex_count();
        let truth = match &args.labels {
            Some(path) => load_labeling(path, n).map_err(CliError::from)?,
            None => ClusterLabeling::from_assignments(&vec![0; n]).map_err(CliError::from)?,
        };
        let svg =
            render_drawing(&doc.graph, &coords, &truth, &style).map_err(CliError::from)?;
        (svg, artifact_file_name(&stem(graph), &stem(layout), None))
    } else if let Some(path) = &args.series {
        let steps: Vec<StepMeans<f64>> = read_json(path)?;
        let svg = render_series_chart(&steps, &style).map_err(CliError::from)?;
        (svg, "chart.svg".to_string())
    } else if let Some(path) = &args.bars {
        let means: Vec<LayoutMeans<f64>> = read_json(path)?;
        let svg = render_comparison_chart(&means, &style).map_err(CliError::from)?;
        (svg, "chart.svg".to_string())
    } else {
        // --layout/--labels without --graph; the group only checks --graph.
        return Err(CliError::Usage(
            "render needs --graph with --layout, or --series, or --bars".into(),
        ));
    };

    ensure_dir(&args.out_dir)?;
    let out_name = args.out.clone().unwrap_or_else(|| PathBuf::from(default_name));
    let out_path = if out_name.is_absolute() {
        out_name
    } else {
        args.out_dir.join(out_name)
    };
    atomic_write(&out_path, svg.as_bytes())?;
    println!("{}", out_path.display());
    Ok(())
}

/// Read a JSON file produced by an earlier run.
fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("parsing {}: {e}", path.display())))
}
