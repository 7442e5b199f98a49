use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bcs-sha"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

fn bundled_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/four_level_n28.json")
}

const THREE_LEVEL: &str = r#"{"levels":[{"j":2,"epsilon":0.0},{"j":2.5,"epsilon":1.1},{"j":1.5,"epsilon":2.4}],
    "N":4,"G":{"rule":"linear-gap","g":0.3}}"#;

#[test]
fn single_level_matches_closed_form() {
    let cfg = r#"{"levels":[{"j":4.5,"epsilon":0.8}],"N":3,"G":[[0.4]]}"#;
    let out = stdout(&run(&["--config-json", cfg, "--command", "exact"]));
    let e = csv_column(&out, "energy");
    // E(n) = 2 eps n - G n (2j - n + 1)
    assert_eq!(e.len(), 1);
    assert!((e[0] - (2.0 * 0.8 * 3.0 - 0.4 * 3.0 * 7.0)).abs() < 1e-10);
}

#[test]
fn zero_coupling_excitations_are_filling_differences() {
    let cfg = r#"{"levels":[{"j":0.5,"epsilon":0.0},{"j":0.5,"epsilon":1.0},{"j":0.5,"epsilon":2.5}],"N":1,"G":[[0,0,0],[0,0,0],[0,0,0]]}"#;
    let out = stdout(&run(&["--config-json", cfg, "--command", "exact"]));
    assert_eq!(out, "index,energy,excitation\n0,0,0\n1,2,2\n2,5,5\n");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["--command", "exact"],
        vec!["--command", "sweep", "--sweep", "0.1:0.5:5"],
        vec!["--command", "compare", "--subspace", "su2-states:8"],
    ] {
        let mut outputs = Vec::new();
        for i in 0..2 {
            let path = dir.path().join(format!("run{i}.csv"));
            let mut full = vec!["--config-json", THREE_LEVEL, "--out", path.to_str().unwrap()];
            full.extend(&args);
            let o = run(&full);
            assert!(o.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&o.stderr));
            outputs.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{args:?}");
        assert!(!outputs[0].is_empty());
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--config", "/nonexistent/model.json"]).status.code(), Some(2));
    assert_eq!(run(&["--config-json", "{\"levels\":[]}"]).status.code(), Some(2));
    assert_eq!(run(&["--config-json", THREE_LEVEL, "--command", "sweep", "--sweep", "0.5:0.1:3"]).status.code(), Some(2));
    assert_eq!(run(&["--config-json", THREE_LEVEL, "--command", "sweep"]).status.code(), Some(2));
    assert_eq!(run(&["--config-json", THREE_LEVEL, "--subspace", "bogus:3", "--command", "subspace"]).status.code(), Some(2));
    assert_eq!(run(&["--command", "exact"]).status.code(), Some(2));
    let uncoupled = r#"{"levels":[{"j":2,"epsilon":0},{"j":2,"epsilon":1}],"N":2,"G":[[0,0],[0,0]]}"#;
    assert_eq!(run(&["--config-json", uncoupled, "--command", "sha"]).status.code(), Some(3));
}

#[test]
fn sha_report_for_degenerate_levels() {
    let cfg = r#"{"levels":[{"j":3,"epsilon":1},{"j":3,"epsilon":1},{"j":3,"epsilon":1}],"N":7,"G":{"rule":"linear-gap","g":0.2}}"#;
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("states.csv");
    let out = stdout(&run(&["--config-json", cfg, "--command", "sha", "--quanta-max", "2", "--csv-out", csv.to_str().unwrap()]));
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    let x0: Vec<f64> = report["x0"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(x0.iter().all(|x| (x - x0[0]).abs() < 1e-12));
    assert_eq!(report["omega"].as_array().unwrap().len(), 2);
    assert_eq!(report["states"].as_array().unwrap().len(), 6);
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("nu1,nu2,energy,excitation\n0,0,"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn sweep_rows_are_harmonic() {
    let out = stdout(&run(&["--config-json", THREE_LEVEL, "--command", "sweep", "--sweep", "0.2:0.6:3"]));
    assert!(out.starts_with("g,sha_1_0,sha_0_1,sha_2_0,exact_1,exact_2,exact_3,exact_4\n"));
    let one = csv_column(&out, "sha_1_0");
    let two = csv_column(&out, "sha_2_0");
    assert_eq!(csv_column(&out, "g"), vec![0.2, 0.4, 0.6]);
    for (a, b) in one.iter().zip(&two) {
        assert!((2.0 * a - b).abs() <= 1e-10 * b);
    }
    assert!(csv_column(&out, "exact_4").iter().all(|v| v.is_finite()));
}

#[test]
fn full_subspace_equals_exact() {
    let exact = csv_column(&stdout(&run(&["--config-json", THREE_LEVEL, "--command", "exact", "--levels", "100"])), "energy");
    let n = exact.len().to_string();
    let spec = format!("su2-states:{n}");
    let sub = stdout(&run(&["--config-json", THREE_LEVEL, "--command", "subspace", "--subspace", &spec, "--levels", &n]));
    let cmp = stdout(&run(&["--config-json", THREE_LEVEL, "--command", "compare", "--subspace", &spec, "--levels", "4"]));
    let sub = csv_column(&sub, "energy");
    assert_eq!(sub.len(), exact.len());
    for (a, b) in sub.iter().zip(&exact) {
        assert!((a - b).abs() < 1e-9);
    }
    let ex = csv_column(&cmp, "exact");
    let ss = csv_column(&cmp, "subspace");
    assert_eq!(ex.len(), 5);
    for (a, b) in ex.iter().zip(&ss) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!(csv_column(&cmp, "overlap").iter().all(|o| (o - 1.0).abs() < 1e-8));
}

#[test]
fn matrix_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    stdout(&run(&["--config-json", THREE_LEVEL, "--dump-matrix", path.to_str().unwrap()]));
    let text = std::fs::read_to_string(path).unwrap();
    for line in text.lines() {
        let f: Vec<&str> = line.split(' ').collect();
        assert_eq!(f.len(), 3);
        assert!(f[0].parse::<usize>().unwrap() <= f[1].parse::<usize>().unwrap());
    }
}

#[test]
fn bundled_model_lowest_excitation() {
    let out = stdout(&run(&["--config", bundled_config().to_str().unwrap(), "--levels", "2"]));
    let ex = csv_column(&out, "excitation");
    assert!((ex[1] - 15.03).abs() <= 0.01, "{}", ex[1]);
}
