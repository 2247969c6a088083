use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatmap-tsp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn generate(dir: &TempDir, n: usize, seed: u64) -> String {
    let path = p(dir, &format!("inst{n}_{seed}.txt"));
    let o = run(&["generate", "--n", &n.to_string(), "--seed", &seed.to_string(), "--out", &path]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn length_of(csv: &str) -> f64 {
    let row = csv.lines().nth(1).unwrap();
    row.split(',').nth(2).unwrap().parse().unwrap()
}

#[test]
fn generate_is_seeded() {
    let a = stdout(&run(&["generate", "--n", "15", "--seed", "4"]));
    let b = stdout(&run(&["generate", "--n", "15", "--seed", "4"]));
    let c = stdout(&run(&["generate", "--n", "15", "--seed", "5"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with("UTSP-INSTANCE v1\n15\n"));
}

#[test]
fn solve_matches_oracle_on_small_instance() {
    let dir = TempDir::new().unwrap();
    let inst = generate(&dir, 9, 3);
    let tour = p(&dir, "tour.txt");
    let svg = p(&dir, "tour.svg");
    let solved = run(&[
        "solve", "--instance", &inst, "--seed", "1", "--rounds", "10", "--out", &tour, "--svg", &svg,
    ]);
    assert!(solved.status.success(), "{}", String::from_utf8_lossy(&solved.stderr));
    let exact = run(&["oracle", "--instance", &inst]);
    assert!(exact.status.success());
    assert!((length_of(&stdout(&solved)) - length_of(&stdout(&exact))).abs() < 1e-9);
    assert!(std::fs::read_to_string(&tour).unwrap().starts_with("UTSP-TOUR v1"));
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<circle").count(), 9);
}

#[test]
fn train_then_search_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let inst = generate(&dir, 30, 8);
    let heat = p(&dir, "heat.txt");
    let trace = p(&dir, "trace.csv");
    let o = run(&[
        "train-heatmap", "--instance", &inst, "--steps", "50", "--lr", "0.02", "--lambda1", "10",
        "--lambda2", "0.1", "--init-scale", "0.1", "--seed", "2", "--out", &heat, "--trace", &trace,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = std::fs::read_to_string(&trace).unwrap();
    assert!(trace.starts_with("step,total,row_penalty,self_loop,expected_length\n"));
    assert_eq!(trace.lines().count(), 52);

    let args = ["search", "--instance", &inst, "--heatmap", &heat, "--preset", "tsp50", "--rounds", "2", "--seed", "9", "--format", "json"];
    let a: serde_json::Value = serde_json::from_str(&stdout(&run(&args))).unwrap();
    let b: serde_json::Value = serde_json::from_str(&stdout(&run(&args))).unwrap();
    assert_eq!(a["length"], b["length"]);
    assert_eq!(a["method"], "heatmap-search");
}

#[test]
fn tsplib_input_and_rounding() {
    let dir = TempDir::new().unwrap();
    let inst = p(&dir, "square.tsp");
    std::fs::write(
        &inst,
        "NAME : square\nTYPE : TSP\nDIMENSION : 4\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 10.4 0\n3 10.4 10.4\n4 0 10.4\nEOF\n",
    )
    .unwrap();
    let exact = stdout(&run(&["oracle", "--instance", &inst]));
    let rounded = stdout(&run(&["oracle", "--instance", &inst, "--tsplib-round"]));
    assert!((length_of(&exact) - 41.6).abs() < 1e-9);
    assert_eq!(length_of(&rounded), 40.0);
    assert!(exact.lines().nth(1).unwrap().starts_with("square,held-karp,"));
}

#[test]
fn baseline_and_bench_outputs() {
    let dir = TempDir::new().unwrap();
    let inst = generate(&dir, 20, 1);
    let o = run(&["baseline", "--instance", &inst, "--seed", "3", "--rounds", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1).unwrap().contains(",nn-2opt,"));

    let csv = p(&dir, "bench.csv");
    let o = run(&["bench", "--n", "10", "--count", "3", "--rounds", "3", "--jobs", "2", "--out", &csv]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 3);
    let json = stdout(&run(&["bench", "--n", "10", "--count", "2", "--rounds", "2", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 6);
    assert_eq!(v["summary"].as_array().unwrap().len(), 3);
}

#[test]
fn coverage_report_csv() {
    let o = run(&["coverage", "--n", "8", "--count", "4", "--m", "7", "--steps", "20"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "instance,seed,M,eta,pi_size,fully_covered");
    // keeping every neighbour covers the optimal tour
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[3], "1.0");
        assert_eq!(f[5], "true");
    }
}

#[test]
fn invalid_arguments_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let inst = generate(&dir, 19, 0);
    assert_eq!(run(&["oracle", "--instance", &inst]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--instance", &inst, "--time-budget", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--instance", &inst, "--preset", "tsp7"]).status.code(), Some(2));
    assert_eq!(run(&["generate", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["oracle", "--instance", "/nonexistent/file"]).status.code(), Some(2));
    let bad = p(&dir, "bad.txt");
    std::fs::write(&bad, "UTSP-INSTANCE v1\n3\n0 0\n1 x\n0 1\n").unwrap();
    let o = run(&["oracle", "--instance", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn runtime_failures_exit_with_three() {
    let dir = TempDir::new().unwrap();
    let inst = generate(&dir, 10, 0);
    let o = run(&["train-heatmap", "--instance", &inst, "--lr", "1e308", "--steps", "50"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let unwritable = Path::new("/nonexistent/dir/tour.txt").to_str().unwrap();
    let o = run(&["oracle", "--instance", &inst, "--out", unwritable]);
    assert_eq!(o.status.code(), Some(3));
}
