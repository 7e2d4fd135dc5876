use std::path::Path;
use std::process::{Command, Output};

fn quadfeat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadfeat"))
        .args(args)
        .output()
        .expect("run quadfeat")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn map_header_records_feature_dim() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "d4.csv",
        "x1,x2,x3,x4\n1,2,3,4\n0.5,0,1,-1\n2,2,2,2\n",
    );
    let out = dir.path().join("f.csv");
    let o = quadfeat(&[
        "map",
        "--input",
        &input,
        "--method",
        "sr33",
        "--n",
        "2",
        "--seed",
        "7",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("seed: 7"));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(
        header.contains("method=sr33-butterfly")
            && header.contains("D=21")
            && header.contains("seed=7"),
        "{header}"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.split(',').count() == 21));
}

#[test]
fn map_is_deterministic_and_seed_sensitive() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.csv", "1,2,3\n4,5,6\n-1,0,2\n");
    let run = |seed: &str| {
        stdout(&quadfeat(&[
            "map", "--input", &input, "--method", "gort", "--dim", "9", "--seed", seed,
        ]))
    };
    assert_eq!(run("3"), run("3"));
    assert_ne!(run("3"), run("4"));
}

#[test]
fn rom_pads_to_power_of_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d5.csv", "1,2,3,4,5\n5,4,3,2,1\n");
    let o = quadfeat(&[
        "map", "--input", &input, "--method", "rom", "--n", "1", "--kernel", "arccos0",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let header = stdout(&o).lines().next().unwrap().to_string();
    assert!(
        header.contains("padded_d=8") && header.contains("D=13"),
        "{header}"
    );
}

#[test]
fn libsvm_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "d.svm",
        "1 1:0.5 3:2.0\n-1 2:1.0\n1 1:1 2:1 3:1\n",
    );
    let o = quadfeat(&[
        "map",
        "--input",
        &input,
        "--format",
        "libsvm",
        "--method",
        "sr33-haar",
        "--n",
        "1",
        "--kernel",
        "arccos1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.csv", "1,2,3,4,5\n5,4,3,2,1\n");
    for args in [
        vec!["map", "--input", &input, "--method", "sr33", "--dim", "10"],
        vec!["map", "--input", &input, "--method", "sr33"],
        vec!["map", "--input", &input, "--n", "1", "--dim", "13"],
        vec!["map", "--input", &input, "--n", "1", "--bogus"],
        vec!["map", "--input", &input, "--n", "1", "--method", "nope"],
        vec![
            "map", "--input", &input, "--n", "1", "--kernel", "arccos0", "--gamma", "1",
        ],
        vec!["bound", "--prop", "variance", "--d", "2"],
        vec!["frobnicate"],
    ] {
        let o = quadfeat(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(
        quadfeat(&["map", "--input", missing.to_str().unwrap(), "--n", "1"])
            .status
            .code(),
        Some(1)
    );
    let bad = write(dir.path(), "bad.csv", "1,2,3\n4,abc,6\n");
    let o = quadfeat(&["map", "--input", &bad, "--n", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn approx_error_smoke_and_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"dataset": {"synthetic": {"kind": "uniform-cube", "n": 50, "d": 5, "seed": 2}},
            "experiment": {"kernels": ["gaussian", "arccos0"], "methods": ["sr33", "g", "qmc"],
                           "n_values": [1, 2], "subset_size": 20, "runs": 3, "seed": 5,
                           "gamma": {"explicit": 0.3}},
            "output_dir": "out"}"#,
    );
    let o = quadfeat(&["approx-error", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("seed: 5"));
    let csv = std::fs::read_to_string(dir.path().join("out/report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3 * 2 * 3);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(
        json["results"]["uniform-cube-d5"]["arccos0"]["sr33-butterfly"]["2"]["D"],
        25
    );
    assert!(dir.path().join("out/timings.csv").exists());

    let malformed = write(dir.path(), "m.json", "{\"dataset\": ");
    assert_eq!(
        quadfeat(&["approx-error", "--config", &malformed])
            .status
            .code(),
        Some(2)
    );
    let unknown = write(
        dir.path(),
        "u.json",
        r#"{"dataset": {"synthetic": {"kind": "uniform-cube", "n": 50, "d": 5}},
            "experiment": {"kernels": ["gaussian"], "methods": ["g"], "n_values": [1], "subset_size": 20,
                           "runs": 1, "seed": 0, "repeats": 3}}"#,
    );
    let o = quadfeat(&["approx-error", "--config", &unknown]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("repeats"), "{}", stderr(&o));
    let too_big = write(
        dir.path(),
        "t.json",
        r#"{"dataset": {"synthetic": {"kind": "uniform-cube", "n": 10, "d": 5}},
            "experiment": {"kernels": ["gaussian"], "methods": ["g"], "n_values": [1], "subset_size": 20,
                           "runs": 1, "seed": 0}}"#,
    );
    let o = quadfeat(&["approx-error", "--config", &too_big]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("subset_size"), "{}", stderr(&o));
}

#[test]
fn bound_prints_beta_and_flags() {
    let o = quadfeat(&[
        "bound", "--prop", "3.1-quad", "--d", "86", "--eps", "0.1", "--delta", "0.05", "--l", "10",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let beta: f64 = s
        .lines()
        .find_map(|l| l.strip_prefix("beta_d: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((beta - 64.7).abs() < 0.05);
    assert!(
        s.contains("vacuous: false") && s.contains("quadrature_le_rff: true"),
        "{s}"
    );
    let s = stdout(&quadfeat(&[
        "bound", "--prop", "rff", "--d", "4", "--eps", "1e6",
    ]));
    assert!(
        s.contains("vacuous: true") && s.contains("required_D: 0"),
        "{s}"
    );
    let s = stdout(&quadfeat(&[
        "bound",
        "--prop",
        "krr",
        "--d",
        "4",
        "--sigma-y",
        "0",
    ]));
    assert!(s.contains("degenerate: true"), "{s}");
    let s = stdout(&quadfeat(&[
        "bound", "--prop", "variance", "--d", "4", "--n", "2",
    ]));
    assert!(s.contains("variance_bound: 1\n"), "{s}");
}

#[test]
fn walltime_reports_stats() {
    let o = quadfeat(&[
        "walltime",
        "--method",
        "rom",
        "--kernel",
        "arccos1",
        "--d",
        "20",
        "--dim",
        "64",
        "--batch",
        "4",
        "--repeats",
        "3",
        "--seed",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(
        s.contains("seed: 2") && s.contains("median_seconds=") && s.contains("D=64"),
        "{s}"
    );
}

#[test]
fn selftest_passes() {
    let o = quadfeat(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("selftest: 8/8 passed"));
}
