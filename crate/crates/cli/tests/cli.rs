//! Black-box tests of the `cq` binary: argument handling, exit codes, output
//! files, and determinism, all through real process invocations.

use std::path::Path;
use std::process::{Command, Output};

fn cq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cq"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn cq")
}

fn assert_ok(out: &Output, what: &str) {
    assert!(
        out.status.success(),
        "{what} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Two well-separated triangles joined by one bridge edge.
const TOY_EDGES: &str = "0 1\n0 2\n1 2\n3 4\n3 5\n4 5\n0 3\n";
const TOY_LABELS: &str = "0 0\n1 0\n2 0\n3 1\n4 1\n5 1\n";
const TOY_LAYOUT: &str = "0 0.0 0.0\n1 0.1 0.0\n2 0.0 0.1\n3 10.0 10.0\n4 10.1 10.0\n5 10.0 10.1\n";

fn write_toy(dir: &Path) {
    std::fs::write(dir.join("toy.edges"), TOY_EDGES).unwrap();
    std::fs::write(dir.join("toy.labels"), TOY_LABELS).unwrap();
    std::fs::write(dir.join("toy.layout"), TOY_LAYOUT).unwrap();
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cq(tmp.path(), &["layout"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--graph"), "stderr should name the missing flag: {err}");
}

#[test]
fn zero_jobs_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    write_toy(tmp.path());
    let out = cq(
        tmp.path(),
        &["--jobs", "0", "score", "--graph", "toy.edges", "--labels", "toy.labels", "--layout", "toy.layout"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreadable_config_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cq(tmp.path(), &["deform", "--config", "missing.toml"]);
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(tmp.path().join("broken.toml"), "steps = \"lots\"").unwrap();
    let out = cq(tmp.path(), &["deform", "--config", "broken.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_is_deterministic_and_names_the_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "generate", "--base", "complete", "--clusters", "9", "--size", "30",
        "--internal", "0.4", "--external", "0.01", "--seed", "7", "--out-dir",
    ];
    let mut first = args.to_vec();
    first.push("a");
    let out = cq(tmp.path(), &first);
    assert_ok(&out, "generate");
    assert_eq!(stdout(&out).trim(), "c-few-verydense-mid");

    let mut second = args.to_vec();
    second.push("b");
    assert_ok(&cq(tmp.path(), &second), "second generate");

    for file in ["c-few-verydense-mid.edges", "c-few-verydense-mid.labels"] {
        let a = std::fs::read(tmp.path().join("a").join(file)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(file)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{file} not reproducible");
    }
}

#[test]
fn score_reports_perfect_separation() {
    let tmp = tempfile::tempdir().unwrap();
    write_toy(tmp.path());
    let out = cq(
        tmp.path(),
        &["score", "--graph", "toy.edges", "--labels", "toy.labels", "--layout", "toy.layout"],
    );
    assert_ok(&out, "score");
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for metric in ["cq_ari", "cq_ami", "cq_fmi", "cq_hom", "cq_cmp"] {
        assert_eq!(report[metric], 1.0, "{metric} on a perfectly separated toy");
    }
    assert_eq!(report["meta"]["layout"], "toy");

    let csv = cq(
        tmp.path(),
        &[
            "score", "--graph", "toy.edges", "--labels", "toy.labels",
            "--layout", "toy.layout", "--format", "csv",
        ],
    );
    assert_ok(&csv, "score --format csv");
    let text = stdout(&csv);
    assert!(text.starts_with("metric,score\n"));
    assert!(text.contains("cq_ari,1\n"));
}

#[test]
fn score_rejects_a_layout_missing_vertices() {
    let tmp = tempfile::tempdir().unwrap();
    write_toy(tmp.path());
    let short: String = TOY_LAYOUT.lines().take(5).map(|l| format!("{l}\n")).collect();
    std::fs::write(tmp.path().join("short.layout"), short).unwrap();
    let out = cq(
        tmp.path(),
        &["score", "--graph", "toy.edges", "--labels", "toy.labels", "--layout", "short.layout"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn layout_is_deterministic_and_writes_a_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    write_toy(tmp.path());
    let args = ["layout", "--graph", "toy.edges", "--method", "fr", "--seed", "4", "--out-dir"];
    for side in ["a", "b"] {
        let mut argv = args.to_vec();
        argv.push(side);
        let out = cq(tmp.path(), &argv);
        assert_ok(&out, "layout");
        assert_eq!(stdout(&out).trim(), format!("{side}/toy-fr.layout"));
    }
    let a = std::fs::read(tmp.path().join("a/toy-fr.layout")).unwrap();
    let b = std::fs::read(tmp.path().join("b/toy-fr.layout")).unwrap();
    assert_eq!(a, b, "layout not reproducible");
    assert!(tmp.path().join("a/toy-fr.manifest.json").exists());
}

#[test]
fn lcc_reduction_flows_from_layout_to_score() {
    let tmp = tempfile::tempdir().unwrap();
    // The toy graph plus a detached edge 6–7 in a third cluster.
    std::fs::write(tmp.path().join("dis.edges"), format!("{TOY_EDGES}6 7\n")).unwrap();
    std::fs::write(tmp.path().join("dis.labels"), format!("{TOY_LABELS}6 2\n7 2\n")).unwrap();

    let out = cq(
        tmp.path(),
        &["layout", "--graph", "dis.edges", "--method", "fr", "--seed", "4", "--lcc"],
    );
    assert_ok(&out, "layout --lcc");
    assert!(stdout(&out).trim().ends_with("dis-lcc-fr.layout"));
    let idmap = std::fs::read_to_string(tmp.path().join("dis-lcc.idmap")).unwrap();
    assert_eq!(idmap.lines().filter(|l| !l.starts_with('#')).count(), 6);
    assert!(tmp.path().join("dis-lcc.edges").exists());

    // The component-restricted layout scores against the full inputs + --lcc.
    let out = cq(
        tmp.path(),
        &[
            "score", "--graph", "dis.edges", "--labels", "dis.labels",
            "--layout", "dis-lcc-fr.layout", "--lcc",
        ],
    );
    assert_ok(&out, "score --lcc");
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["meta"]["n"], 6);
    assert_eq!(report["meta"]["k_truth"], 2);
}

#[test]
fn render_produces_an_svg_drawing() {
    let tmp = tempfile::tempdir().unwrap();
    write_toy(tmp.path());
    let out = cq(
        tmp.path(),
        &[
            "render", "--graph", "toy.edges", "--layout", "toy.layout",
            "--labels", "toy.labels", "--out", "drawing.svg",
        ],
    );
    assert_ok(&out, "render");
    let svg = std::fs::read_to_string(tmp.path().join("drawing.svg")).unwrap();
    assert!(svg.contains("<svg"), "not an SVG: {}", &svg[..svg.len().min(60)]);
    assert!(svg.contains("<circle"));
}

#[test]
fn deform_writes_the_full_result_tree() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("study.toml"),
        r#"
seed = 9
steps = 2
rho = 0.08
restarts = 3
layout = "fr"
layout_iterations = 100
seeds = [1]

[[datasets]]
[datasets.generate]
base = "tree"
clusters = 4
size = 10
internal = 0.5
external = 0.02
"#,
    )
    .unwrap();
    let out = cq(tmp.path(), &["deform", "--config", "study.toml", "--out-dir", "out"]);
    assert_ok(&out, "deform");

    let results: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("out/results.json")).unwrap())
            .unwrap();
    let runs = results["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 1);
    assert_eq!(runs[0]["series"]["reports"].as_array().unwrap().len(), 3);
    let name = runs[0]["dataset"].as_str().unwrap().to_owned();

    for file in [
        "aggregate.json",
        "scores.csv",
        "chart.svg",
        "manifest.json",
        &format!("{name}_fr_step0.svg"),
    ] {
        assert!(tmp.path().join("out").join(file).exists(), "missing {file}");
    }
    let csv = std::fs::read_to_string(tmp.path().join("out/scores.csv")).unwrap();
    assert!(csv.starts_with("dataset,seed,step,metric,score\n"));
    // 1 run × 3 steps × 5 metrics, plus the header.
    assert_eq!(csv.lines().count(), 16);
}

#[test]
fn compare_scores_imported_coordinates_alongside_builtins() {
    let tmp = tempfile::tempdir().unwrap();
    write_toy(tmp.path());
    std::fs::write(
        tmp.path().join("matchup.toml"),
        r#"
seed = 9
restarts = 3
layout_iterations = 100
layouts = ["fr", "random", "premade"]

[[datasets]]
name = "toy"
edges = "toy.edges"
labels = "toy.labels"

[[imports]]
name = "premade"
[imports.files]
toy = "toy.layout"
"#,
    )
    .unwrap();
    let out = cq(tmp.path(), &["compare", "--config", "matchup.toml", "--out-dir", "out"]);
    assert_ok(&out, "compare");

    let csv = std::fs::read_to_string(tmp.path().join("out/scores.csv")).unwrap();
    assert!(csv.starts_with("dataset,layout,metric,score\n"));
    // 1 dataset × 3 layouts × 5 metrics, plus the header.
    assert_eq!(csv.lines().count(), 16);
    // The imported drawing separates the two triangles perfectly.
    assert!(csv.contains("toy,premade,cq_ari,1\n"));

    let aggregate: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("out/aggregate.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(aggregate.as_array().unwrap().len(), 3);
}
