use std::path::Path;
use std::process::{Command, Output};

use dpapsp_core::shortcut::SyntheticGraph;
use dpapsp_core::Graph;

fn cli(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dp-apsp"));
    cmd.args(args).env("RUST_LOG", "warn");
    if let Some(d) = out_dir {
        cmd.env("APSP_DP_OUTPUT_DIR", d);
    }
    cmd.output().unwrap()
}

fn generate(dir: &Path, family: &str, n: &str, extra: &str) -> String {
    let path = dir.join(format!("{family}.txt"));
    let p = path.to_str().unwrap().to_string();
    let out = cli(
        &["generate", "--family", family, "--n", n, "--extra-edges", extra, "--seed", "5", "--out", &p],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn release_alg1_writes_graph_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let input = generate(dir.path(), "multi-stage", "41", "0");
    let out = dir.path().join("released.txt");
    let o = out.to_str().unwrap();
    let status = cli(&["release", &input, "--mechanism", "alg1", "--epsilon", "1", "--seed", "9", "--out", o], None);
    assert!(status.status.success());
    let sg = SyntheticGraph::load(&out).unwrap();
    assert_eq!(sg.base.n(), 41);
    assert_eq!(sg.shortcut_vertices.len(), 7);
    assert!(out.with_extension("txt.meta").exists());
}

#[test]
fn release_alg2_writes_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let input = generate(dir.path(), "connected-random", "25", "3");
    let out = dir.path().join("d.txt");
    let o = out.to_str().unwrap();
    let status = cli(&["release", &input, "--mechanism", "alg2", "--epsilon", "2", "--out", o], None);
    assert!(status.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r.split(' ').count() == 25));
}

#[test]
fn fvs_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let input = generate(dir.path(), "random-tree", "30", "0");
    let out = cli(&["fvs", &input], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("k 0\n"));
    assert!(text.contains("n 30\n"));
}

#[test]
fn rejected_inputs_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad_graph = dir.path().join("bad.txt");
    std::fs::write(&bad_graph, "3 2\n0 1 1.0\n1 1 2.0\n").unwrap();
    let g = bad_graph.to_str().unwrap();
    let o = dir.path().join("o").to_str().unwrap().to_string();
    let out = cli(&["release", g, "--mechanism", "alg1", "--epsilon", "1", "--out", &o], None);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());

    let input = generate(dir.path(), "random-tree", "10", "0");
    let out = cli(&["release", &input, "--mechanism", "alg1", "--epsilon", "-1", "--out", &o], None);
    assert!(!out.status.success());

    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "mechanisms = alg1, alg9\n").unwrap();
    let out = cli(&["run", cfg.to_str().unwrap()], Some(dir.path()));
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("alg9"));
    assert!(!dir.path().join("errors.csv").exists());
}

#[test]
fn two_weight_ranges_give_two_panels() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.cfg");
    std::fs::write(
        &cfg,
        "weight_ranges = 2000:3000, 10000:100000\nsizes = 21, 31\nmechanisms = alg1\nepsilons = 1\nrepetitions = 2\n",
    )
    .unwrap();
    let out = cli(&["run", cfg.to_str().unwrap()], Some(dir.path()));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("errors_panel0.csv").exists());
    assert!(dir.path().join("errors_panel1.csv").exists());
    let svg = std::fs::read_to_string(dir.path().join("errors.svg")).unwrap();
    assert_eq!(svg.matches("weights in [").count(), 2);
    assert!(dir.path().join("errors.dat").exists());
    let graph = Graph::load(generate(dir.path(), "multi-stage", "21", "0")).unwrap();
    assert_eq!(graph.n(), 21);
}
