use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const TWO_TRIANGLES: &str = "# two triangles sharing node 1\n0 1\n0 3\n1 2\n1 3\n1 4\n1 6\n2 4\n4 5\n";

fn homcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homcount"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn lists_cycle_family() {
    let out = homcount(&["patterns", "--kind", "cycles", "--max-order", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().filter(|l| l.starts_with('C')).collect();
    assert_eq!(names, ["C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10"]);
}

#[test]
fn listing_reads_back_as_custom_family() {
    let dir = tempfile::tempdir().unwrap();
    let listing = dir.path().join("trees.txt");
    assert_eq!(homcount(&["patterns", "--family", "trees:6", "--out", path_str(&listing)]).status.code(), Some(0));
    assert!(dir.path().join("run.resolved.json").exists());
    let spec = format!("custom:{}", listing.display());
    let out = homcount(&["patterns", "--family", &spec]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), fs::read_to_string(&listing).unwrap());
}

#[test]
fn embeds_two_triangle_graph() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("triangles.edges");
    fs::write(&graph, TWO_TRIANGLES).unwrap();
    let out_csv = dir.path().join("emb.csv");
    let out = homcount(&[
        "embed", "--graph", path_str(&graph), "--family", "cycles:3", "--family", "paths:3", "--node-id", "--out", path_str(&out_csv),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&out_csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("node_id,C3:ch0,P1:ch0,P2:ch0,P3:ch0"));
    assert_eq!(lines.next(), Some("0,2,1,2,7"));
    assert_eq!(lines.nth(1), Some("2,2,1,2,8"));

    let resolved: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("run.resolved.json")).unwrap()).unwrap();
    assert_eq!(resolved["embedding"]["families"], serde_json::json!(["cycles:3", "paths:3"]));
    assert_eq!(resolved["epsilon"], serde_json::json!(0.01));
}

#[test]
fn tensor_embedding_with_features_and_binary_output() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.edges");
    fs::write(&graph, TWO_TRIANGLES).unwrap();
    let feats = dir.path().join("g.csv");
    fs::write(&feats, "a,b\n1,0\n2,1\n0,1\n1,1\n1,2\n3,1\n1,1\n").unwrap();
    let bin = dir.path().join("g.bin");
    let out = homcount(&[
        "embed", "--graph", path_str(&graph), "--features", path_str(&feats), "--family", "paths:2", "--tensor", "--log",
        "--append-features", "--format", "bin", "--out", path_str(&bin),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let e = homcount_core::io::read_embedding(&bin).unwrap();
    assert_eq!(e.labels(), ["log:P1:ch0", "log:P2:ch0", "log:P1:ch1", "log:P2:ch1", "log:rawfeat:0", "log:rawfeat:1"]);
    // node 2 has a zero in channel 0, replaced by epsilon
    assert!((e.get(2, 0) - 0.01f64.ln_1p()).abs() < 1e-15);
}

#[test]
fn usage_errors_exit_1() {
    let out = homcount(&["patterns", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(homcount(&["embed", "--graph", "x", "--family", "paths:2", "--log", "--density", "--out", "y"]).status.code(), Some(1));
    assert_eq!(homcount(&["embed", "--graph", "x", "--family", "paths:2", "--epsilon", "0", "--out", "y"]).status.code(), Some(1));
    assert_eq!(homcount(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(homcount(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.edges");
    let out_csv = dir.path().join("e.csv");
    assert_eq!(homcount(&["embed", "--graph", path_str(&missing), "--family", "paths:2", "--out", path_str(&out_csv)]).status.code(), Some(2));
    let looped = dir.path().join("loop.edges");
    fs::write(&looped, "0 1\n1 1\n").unwrap();
    assert_eq!(homcount(&["embed", "--graph", path_str(&looped), "--family", "paths:2", "--out", path_str(&out_csv)]).status.code(), Some(2));
}

#[test]
fn oracle_counts_and_size_guard() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("triangles.edges");
    fs::write(&graph, TWO_TRIANGLES).unwrap();
    let out = homcount(&["oracle", "--graph", path_str(&graph), "--pattern", "C3", "--node", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0\t2\n");

    let custom = dir.path().join("big.txt");
    fs::write(&custom, "wheel\nroot 0\nedges 0-1,0-2,0-3,0-4,0-5,0-6,1-2,2-3,3-4,4-5,5-6,6-1\n").unwrap();
    let args = ["oracle", "--graph", path_str(&graph), "--custom", path_str(&custom), "--pattern", "wheel"];
    assert_eq!(homcount(&args).status.code(), Some(3));
    let mut forced = args.to_vec();
    forced.push("--force");
    let out = homcount(&forced);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 7);
}

#[test]
fn generate_evaluate_and_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let out = homcount(&["gen-sbm", "--kind", "pattern", "--graphs", "6", "--nodes", "30:36", "--seed", "3", "--out", path_str(&data)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(data.join("meta.json").exists() && data.join("graph_5.edges").exists());
    assert_eq!(homcount(&["gen-sbm", "--kind", "cluster", "--p", "0.1", "--q", "0.5", "--out", path_str(&data)]).status.code(), Some(1));

    let run = dir.path().join("run");
    let out = homcount(&[
        "--threads", "1", "pipeline", "--dataset", path_str(&data), "--family", "cycles:5", "--structural", "--density",
        "--folds", "3", "--reps", "2", "--trees", "10", "--out", path_str(&run),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(run.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["per_fold"].as_array().unwrap().len(), 6);
    let importance_sum: f64 = report["importances"].as_object().unwrap().values().map(|v| v.as_f64().unwrap()).sum();
    assert!((importance_sum - 1.0).abs() < 1e-9);
    let resolved: serde_json::Value = serde_json::from_str(&fs::read_to_string(run.join("run.resolved.json")).unwrap()).unwrap();
    assert_eq!(resolved["threads"], 1);

    let report2 = dir.path().join("again.json");
    let out = homcount(&[
        "evaluate", "--embeddings", path_str(&run.join("embeddings.csv")), "--labels", path_str(&run.join("labels.txt")),
        "--folds", "3", "--reps", "2", "--trees", "10", "--report", path_str(&report2),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(&report2).unwrap(), fs::read(run.join("report.json")).unwrap());
}

#[test]
fn thread_count_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let listing = dir.path().join("p.txt");
    let out = Command::new(env!("CARGO_BIN_EXE_homcount"))
        .args(["patterns", "--family", "paths:3", "--out", path_str(&listing)])
        .env("HOMCOUNT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let resolved: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("run.resolved.json")).unwrap()).unwrap();
    assert_eq!(resolved["threads"], 2);
}

#[test]
fn run_is_callable_in_process() {
    assert_eq!(homcount_cli::run(["homcount", "patterns", "--kind", "paths", "--max-order", "2"]), 0);
    assert_eq!(homcount_cli::run(["homcount", "patterns", "--max-order", "2"]), 1);
}
