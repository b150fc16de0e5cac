use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use icp::config::ScenarioConfig;
use icp::instance::write_instance;
use icp::metrics::read_metrics;
use icp_core::cp::build_sudoku;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn icp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

/// `name=value` lines of a solve or fit printout.
fn values(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[test]
fn contradictory_instance_is_unsat() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.txt", "var x 1 2\neq x 1\neq x 2\n");
    let o = icp(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "UNSAT");
}

#[test]
fn sudoku_file_solves_to_a_valid_grid() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "sudoku.txt", &write_instance(&build_sudoku(&[[0; 9]; 9])));
    let o = icp(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut grid = [[0i64; 9]; 9];
    for (name, v) in values(&stdout(&o)) {
        // puzzle[i,j], 1-based
        let inner = name.trim_start_matches("puzzle[").trim_end_matches(']');
        let (i, j) = inner.split_once(',').unwrap();
        grid[i.parse::<usize>().unwrap() - 1][j.parse::<usize>().unwrap() - 1] = v.parse().unwrap();
    }
    let perm = |mut cells: Vec<i64>| {
        cells.sort_unstable();
        cells == (1..=9).collect::<Vec<_>>()
    };
    for k in 0..9 {
        assert!(perm((0..9).map(|j| grid[k][j]).collect()));
        assert!(perm((0..9).map(|i| grid[i][k]).collect()));
        assert!(perm((0..9).map(|c| grid[(k / 3) * 3 + c / 3][(k % 3) * 3 + c % 3]).collect()));
    }
}

#[test]
fn minimize_prints_objective() {
    let dir = tempfile::tempdir().unwrap();
    let text = "var a 0 5\nvar b 0 5\nvar m 0 10\ncumulative 1 2\ntask a 2 1\ntask b 3 1\n\
                lin 1 a -1 m <= -2\nlin 1 b -1 m <= -3\nminimize m\n";
    let p = write(dir.path(), "two.txt", text);
    let o = icp(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(values(&stdout(&o)).contains(&("objective".into(), "5".into())));
}

#[test]
fn tiny_budget_reports_budget() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "sudoku.txt", &write_instance(&build_sudoku(&[[0; 9]; 9])));
    let o = icp(&["solve", p.to_str().unwrap(), "--budget", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).lines().next(), Some("BUDGET"));
}

#[test]
fn malformed_directive_exits_3_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.txt", "var x 0 3\n# fine\nvariable y 0 3\n");
    let o = icp(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn fit_two_point_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "line.csv", "f1,target\n0,0\n1,2\n");
    let o = icp(&["fit", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = values(&stdout(&o));
    let num = |k: &str| v.iter().find(|(n, _)| n == k).unwrap().1.parse::<f64>().unwrap();
    assert!((num("w1") - 2.0).abs() < 1e-9);
    assert!(num("intercept").abs() < 1e-9);
    assert!(num("loss") < 1e-12);
}

#[test]
fn fit_constant_target_is_intercept_only() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "flat.csv", "f1,target\n1,4\n2,4\n5,4\n");
    let o = icp(&["fit", p.to_str().unwrap()]);
    let v = values(&stdout(&o));
    let num = |k: &str| v.iter().find(|(n, _)| n == k).unwrap().1.parse::<f64>().unwrap();
    assert!(num("w1").abs() < 1e-9);
    assert!((num("intercept") - 4.0).abs() < 1e-9);
}

#[test]
fn fit_recovers_generator() {
    let w = [0.5, -1.25, 3.0, 2.0];
    let b = -0.75;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut text = String::from("f1,f2,f3,f4,target\n");
    for _ in 0..40 {
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-5.0..5.0)).collect();
        let y = x.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>() + b;
        let cells: Vec<String> = x.iter().chain([y].iter()).map(|v| format!("{v:?}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "gen.csv", &text);
    let o = icp(&["fit", p.to_str().unwrap()]);
    let got: Vec<f64> = values(&stdout(&o)).iter().take(5).map(|(_, v)| v.parse().unwrap()).collect();
    let expected = [w[0], w[1], w[2], w[3], b];
    for (g, e) in got.iter().zip(expected) {
        assert!((g - e).abs() < 1e-6, "{got:?}");
    }
}

#[test]
fn fit_rejects_ragged_and_empty() {
    let dir = tempfile::tempdir().unwrap();
    let ragged = write(dir.path(), "r.csv", "f1,target\n1,2\n3\n");
    let empty = write(dir.path(), "e.csv", "");
    assert_eq!(icp(&["fit", ragged.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(icp(&["fit", empty.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn conacq_run_converges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.jsonl");
    let o = icp(&["run", scenario("conacq.toml").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("converged: yes"), "{s}");
    assert!(s.contains("queries: "), "{s}");
    let metrics = read_metrics(fs::read(&out).unwrap().as_slice()).unwrap();
    assert!(metrics.last().unwrap().converged);
    assert!(metrics.windows(2).all(|w| w[0].cycle + 1 == w[1].cycle));
}

#[test]
fn hospital_run_reports_mae() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.jsonl");
    let o = icp(&["run", scenario("hospital_noisy.toml").to_str().unwrap(), "--out", out.to_str().unwrap(), "--cycles", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("final MAE: "));
    let metrics = read_metrics(fs::read(&out).unwrap().as_slice()).unwrap();
    assert_eq!(metrics.len(), 3);
    assert!(metrics.iter().all(|m| m.prediction_mae.is_some() && m.violations == Some(0)));
}

#[test]
fn zero_cycles_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.jsonl");
    let o = icp(&["run", scenario("conacq.toml").to_str().unwrap(), "--cycles", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("cycles"));
    assert!(!out.exists());
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario("conacq.toml")).unwrap().replace("n_vars", "nvars");
    let p = write(dir.path(), "typo.toml", &text);
    let o = icp(&["run", p.to_str().unwrap(), "--out", dir.path().join("m").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("nvars"));
}

#[test]
fn same_seed_same_metrics_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str, seed: &str| {
        let out = dir.path().join(format!("{tag}.jsonl"));
        let log = dir.path().join(format!("{tag}.log"));
        let cfg = scenario("hospital_noisy.toml");
        let o = icp(&["run", cfg.to_str().unwrap(), "--seed", seed, "--out", out.to_str().unwrap(), "--log", log.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        (fs::read(out).unwrap(), fs::read(log).unwrap())
    };
    let a = run("a", "5");
    let b = run("b", "5");
    let c = run("c", "6");
    assert_eq!(a, b);
    assert_ne!(a.1, c.1);
}

#[test]
fn shipped_scenarios_validate() {
    for name in ["hospital_noiseless.toml", "hospital_noisy.toml", "conacq.toml"] {
        let c = ScenarioConfig::from_toml(&fs::read_to_string(scenario(name)).unwrap()).unwrap();
        c.validate().unwrap();
    }
}
