use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn permqubo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permqubo")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("permqubo-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn kernel_stats_for_dual_matrix_four() {
    let o = permqubo(&["kernel", "--technique", "dual-matrix", "--kind", "qubo", "-n", "4", "--stats"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for line in ["quad_count 52", "vars 24", "offset 7"] {
        assert!(s.lines().any(|l| l == line), "missing '{line}' in:\n{s}");
    }
}

#[test]
fn verify_one_hot_ising_three() {
    let o = permqubo(&["verify", "--technique", "one-hot", "--kind", "ising", "-n", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("minimum 0, minimizers 6, decode 100%"), "{}", stdout(&o));
}

#[test]
fn verify_partial_extended() {
    let o = permqubo(&["verify", "--technique", "extended", "--kind", "qubo", "-n", "3", "-m", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("minimum 2.5, minimizers 12, decode 100%, covered 6/6"), "{}", stdout(&o));
}

#[test]
fn counts_for_generated_graph_tsp() {
    let o = permqubo(&["counts", "--problem", "tsp-graph", "--nodes", "300", "--edges", "874", "--technique", "extended"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().next(), Some("total 1062000, kernel 537600"));
    assert!(s.contains("interactions 524400"));
}

#[test]
fn reduce_compose_solve_agrees_with_oracle() {
    let input = scratch("qap.txt");
    fs::write(&input, "3\n0 5 1\n5 0 2\n1 2 0\n\n0 1 8\n1 0 3\n8 3 0\n").unwrap();
    let ppp = scratch("qap.ppp.json");
    let o = permqubo(&["reduce", "--problem", "qap", "--input", input.to_str().unwrap(), "--out", ppp.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let oracle = json(&permqubo(&["solve", "--solver", "oracle", "--model", ppp.to_str().unwrap()]));
    for technique in ["one-hot", "dual-matrix", "extended", "all-different"] {
        let model = scratch(&format!("qap.{technique}.json"));
        let o = permqubo(&[
            "compose", "--ppp", ppp.to_str().unwrap(), "--technique", technique, "--kind", "qubo", "--out",
            model.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        for solver in ["brute", "exact"] {
            let sol = json(&permqubo(&["solve", "--solver", solver, "--model", model.to_str().unwrap()]));
            assert_eq!(sol["feasible"], true, "{technique} {solver}");
            assert_eq!(sol["objective"], oracle["objective"], "{technique} {solver}");
            assert_eq!(sol["solver"], solver);
        }
    }
}

#[test]
fn sa_is_deterministic_and_decodes() {
    let model = scratch("kernel.json");
    let o = permqubo(&["kernel", "--technique", "dual-matrix", "--kind", "ising", "-n", "4", "--out", model.to_str().unwrap()]);
    assert!(o.status.success());
    let args = ["solve", "--solver", "sa", "--model", model.to_str().unwrap(), "--seed", "7", "--sweeps", "300", "--restarts", "2"];
    let a = json(&permqubo(&args));
    let b = json(&permqubo(&args));
    assert_eq!(a, b);
    assert_eq!(a["seed"], 7);
    assert_eq!(a["energy"]["num"], 16);
    assert_eq!(a["feasible"], true);
    assert_eq!(a["permutation"].as_array().unwrap().len(), 4);
}

#[test]
fn qubo_text_output_round_trips_through_stats() {
    let path = scratch("one-hot.qubo");
    let o = permqubo(&[
        "kernel", "--technique", "one-hot", "--kind", "qubo", "-n", "3", "--format", "qubo", "--out", path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let s = stdout(&permqubo(&["stats", "--model", path.to_str().unwrap()]));
    assert!(s.contains("quad_count 18\n") && s.contains("offset 3\n"), "{s}");
}

#[test]
fn model_goes_to_stdout_by_default() {
    let o = permqubo(&["kernel", "--technique", "one-hot", "--kind", "ising", "-n", "2", "--out", "-"]);
    let v = json(&o);
    assert_eq!(v["kind"], "ising");
}

#[test]
fn validation_errors_exit_with_two() {
    let cases: &[&[&str]] = &[
        &["kernel", "--technique", "all-different", "--kind", "qubo", "-n", "4", "-m", "3"],
        &["kernel", "--technique", "nope", "--kind", "qubo", "-n", "3"],
        &["kernel", "--technique", "one-hot", "--kind", "qubo", "-n", "3", "-m", "4"],
        &["verify", "--technique", "dual-matrix", "--kind", "qubo", "-n", "6"],
        &["counts", "--problem", "tsp", "--technique", "extended"],
        &["--threads", "0", "verify", "--technique", "one-hot", "--kind", "qubo", "-n", "3"],
    ];
    for args in cases {
        let o = permqubo(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
    let model = scratch("small.json");
    permqubo(&["kernel", "--technique", "one-hot", "--kind", "qubo", "-n", "3", "--out", model.to_str().unwrap()]);
    let o = permqubo(&["solve", "--solver", "sa", "--model", model.to_str().unwrap(), "--sweeps", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = permqubo(&["solve", "--solver", "brute", "--model", model.to_str().unwrap(), "--max-vars", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_one() {
    let o = permqubo(&["stats", "--model", "/nonexistent/model.json"]);
    assert_eq!(o.status.code(), Some(1));
    let bad = scratch("bad.json");
    fs::write(&bad, "{not json").unwrap();
    let o = permqubo(&["stats", "--model", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn threads_flag_is_accepted() {
    let o = permqubo(&["--threads", "1", "verify", "--technique", "dual-matrix", "--kind", "qubo", "-n", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("minimum 3, minimizers 6"));
}
