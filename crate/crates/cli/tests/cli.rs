use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mrp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrp"))
        .args(args)
        .env_remove("MRP_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Two K6 joined by a single edge, with its planted labels.
fn bridged_cliques(dir: &TempDir) -> (PathBuf, PathBuf) {
    let mut text = String::new();
    for base in [0, 6] {
        for u in base..base + 6 {
            for v in u + 1..base + 6 {
                text.push_str(&format!("{u} {v}\n"));
            }
        }
    }
    text.push_str("5 6\n");
    let graph = dir.path().join("cliques.txt");
    std::fs::write(&graph, text).unwrap();
    let truth = dir.path().join("cliques.truth.json");
    let labels: Vec<usize> = (0..12).map(|v| v / 6).collect();
    std::fs::write(&truth, serde_json::json!({ "labels": labels }).to_string()).unwrap();
    (graph, truth)
}

#[test]
fn generate_writes_graph_and_truth() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("sbm.txt");
    let out = mrp(&[
        "generate",
        "--seed",
        "3",
        "--sizes",
        "10,12",
        "--p-in",
        "0.6",
        "--output",
        path_str(&graph),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&graph).unwrap();
    assert!(text.starts_with('#'));
    let truth: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sbm.truth.json")).unwrap())
            .unwrap();
    assert_eq!(truth["vertices"], 22);
    assert_eq!(truth["labels"].as_array().unwrap().len(), 22);
    assert_eq!(truth["params"]["p_out"], 0.01);
}

#[test]
fn cluster_fills_defaults_and_recovers_cliques() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, truth) = bridged_cliques(&dir);
    let v = json(&mrp(&[
        "cluster-mrp",
        "--graph",
        path_str(&graph),
        "--seed",
        "1",
        "--reference",
        path_str(&truth),
    ]));
    let params = &v["params"];
    assert_eq!(params["n_c"], 4);
    assert_eq!(params["scale"], 2);
    assert_eq!(params["n_b"], 8);
    assert_eq!(params["ra_threshold"], 1.0);
    assert_eq!(params["phi_threshold"], 0.1);
    assert_eq!(params["merge_rule"], "agglomerative");
    assert_eq!(v["metrics"]["ari"], 1.0);
    assert_eq!(v["clusters"].as_array().unwrap().len(), 2);
}

#[test]
fn negative_threshold_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, _) = bridged_cliques(&dir);
    let out = mrp(&[
        "cluster-mrp",
        "--graph",
        path_str(&graph),
        "--seed",
        "1",
        "--ra-al",
        "-1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, _) = bridged_cliques(&dir);
    let config = dir.path().join("run.conf");
    std::fs::write(
        &config,
        format!(
            "# run settings\ngraph = {}\nseed = 9\nscale = 1\nphi_al = 0.2\n",
            graph.display()
        ),
    )
    .unwrap();
    let from_file = json(&mrp(&["cluster-mrp", "--config", path_str(&config)]));
    assert_eq!(from_file["params"]["scale"], 1);
    assert_eq!(from_file["params"]["phi_threshold"], 0.2);
    assert_eq!(from_file["seed"], 9);

    let overridden = json(&mrp(&[
        "cluster-mrp",
        "--config",
        path_str(&config),
        "--scale",
        "3",
    ]));
    assert_eq!(overridden["params"]["scale"], 3);
    assert_eq!(overridden["params"]["phi_threshold"], 0.2);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, _) = bridged_cliques(&dir);
    let config = dir.path().join("bad.conf");
    std::fs::write(
        &config,
        format!("graph = {}\nseed = 1\nkappa = 4\n", graph.display()),
    )
    .unwrap();
    let out = mrp(&["cluster-mrp", "--config", path_str(&config)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kappa"));
}

#[test]
fn missing_seed_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, _) = bridged_cliques(&dir);
    for cmd in ["cluster-mrp", "cluster-entropy", "diagnose"] {
        let out = mrp(&[cmd, "--graph", path_str(&graph)]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert!(
            String::from_utf8_lossy(&out.stderr).contains("seed"),
            "{cmd}"
        );
    }
}

#[test]
fn invalid_graph_leaves_no_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("broken.txt");
    std::fs::write(&graph, "0 1\n1 two\n").unwrap();
    let output = dir.path().join("out.json");
    let out = mrp(&[
        "cluster-mrp",
        "--graph",
        path_str(&graph),
        "--seed",
        "1",
        "--output",
        path_str(&output),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!output.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn diagnose_triangle_passes() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("k3.txt");
    std::fs::write(&graph, "0 1\n1 2\n2 0\n").unwrap();
    let out = mrp(&["diagnose", "--graph", path_str(&graph), "--seed", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["statistics"]["mixing_time"], 2);
}

#[test]
fn evaluate_reads_a_clustering_file() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, truth) = bridged_cliques(&dir);
    let clustering = dir.path().join("c.json");
    let out = mrp(&[
        "cluster-mrp",
        "--graph",
        path_str(&graph),
        "--seed",
        "2",
        "--output",
        path_str(&clustering),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v = json(&mrp(&[
        "evaluate",
        "--graph",
        path_str(&graph),
        "--clustering",
        path_str(&clustering),
        "--reference",
        path_str(&truth),
    ]));
    assert_eq!(v["metrics"]["ari"], 1.0);
    assert_eq!(v["metrics"]["coverage"], 1.0);
    // One bridge edge over a clique volume of 31.
    let phi = v["metrics"]["mean_conductance"].as_f64().unwrap();
    assert!((phi - 1.0 / 31.0).abs() < 1e-12);
}

#[test]
fn entropy_ranks_requested_sets() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, _) = bridged_cliques(&dir);
    let v = json(&mrp(&[
        "cluster-entropy",
        "--graph",
        path_str(&graph),
        "--seed",
        "4",
        "--kappa",
        "3",
        "--n-sets",
        "12",
        "--top-m",
        "4",
    ]));
    let ranked = v["ranked"].as_array().unwrap();
    assert_eq!(ranked.len(), 4);
    let scores: Vec<f64> = ranked
        .iter()
        .map(|s| s["score"].as_f64().unwrap())
        .collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    assert!(ranked
        .iter()
        .all(|s| s["vertices"].as_array().unwrap().len() == 3));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let (graph, _) = bridged_cliques(&dir);
    let args = [
        "cluster-entropy",
        "--graph",
        path_str(&graph),
        "--seed",
        "6",
        "--n-sets",
        "20",
    ];
    let one = mrp(&[&args[..], &["--threads", "1"]].concat());
    let many = mrp(&[&args[..], &["--threads", "3"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    let zero = mrp(&[&args[..], &["--threads", "0"]].concat());
    assert_eq!(zero.status.code(), Some(2));
}
