use std::path::Path;
use std::process::{Command, Output};

use decoupled_cli::read_table;

fn ldd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldd"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn forrester_writes_a_parseable_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "f.toml", "t_grid = [20.0, 40.0, 80.0]\n");
    let out = ldd(
        &["forrester", "--config", &cfg, "--out", "f.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("f.csv")).unwrap();
    let table = read_table(&text).unwrap();
    assert_eq!(
        &table.columns[..5],
        ["t", "observed", "predicted", "residual", "runtime"]
    );
    assert_eq!(table.column("t").unwrap(), vec![20.0, 40.0, 80.0]);
    assert!(table
        .metadata
        .iter()
        .any(|(k, v)| k == "study" && v == "forrester"));
    for row in &table.rows {
        assert!((row[3] - (row[1] - row[2])).abs() < 1e-9 * row[1].abs());
    }
}

#[test]
fn empty_grid_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "e.toml", "t_grid = []\n");
    let out = ldd(&["local-clt", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("t_grid"), "{}", stderr(&out));
    assert!(!dir.path().join("local-clt.csv").exists());
}

#[test]
fn unknown_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "u.toml", "tgrid = [1.0]\n");
    let out = ldd(&["forrester", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("tgrid"), "{}", stderr(&out));
}

#[test]
fn violated_hypothesis_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "h.toml",
        "[step]\nfamily = \"pareto\"\nalpha = 3.0\nscale = 1.0\n",
    );
    let out = ldd(&["light-expansion-t24", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!stderr(&out).is_empty());
}

#[test]
fn unknown_study_and_help() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ldd(&["no-such-study"], dir.path()).status.code(), Some(1));
    let help = ldd(&["--help"], dir.path());
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("convergence-t21"));
}

#[test]
fn same_seed_gives_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        "t_grid = [30.0, 40.0]\nn_samples = 5000\n",
    );
    let run = |name: &str| {
        let out = ldd(
            &[
                "is-compare",
                "--config",
                &cfg,
                "--seed",
                "11",
                "--out",
                name,
            ],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let mut t = read_table(&std::fs::read_to_string(dir.path().join(name)).unwrap()).unwrap();
        let rt = t.columns.iter().position(|c| c == "runtime").unwrap();
        for row in &mut t.rows {
            row[rt] = 0.0;
        }
        t
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn zero_budget_leaves_a_partial_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = ldd(
        &[
            "variance-asymptotics",
            "--budget-seconds",
            "0",
            "--out",
            "v.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let table = read_table(&std::fs::read_to_string(dir.path().join("v.csv")).unwrap()).unwrap();
    assert!(table.rows.is_empty());
    assert_eq!(table.columns[0], "t");
}

#[test]
fn rates_table_has_one_row_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "r.toml", "b_grid = [0.5, 2.0]\nalpha = 0.3\n");
    let out = ldd(&["rates", "--config", &cfg, "--out", "r.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table = read_table(&std::fs::read_to_string(dir.path().join("r.csv")).unwrap()).unwrap();
    assert_eq!(table.column("b").unwrap(), vec![0.5, 2.0]);
}
