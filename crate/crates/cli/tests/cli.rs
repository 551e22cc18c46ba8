#![allow(clippy::approx_constant)]

use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radial-qes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn truncate_examples() {
    let out = stdout(&["truncate", "--n", "1", "--s", "0", "--fix", "b=0"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("n,s,i,root,W,c_0,c_1"));
    assert!(lines.next().unwrap().starts_with("1,0,1,1.41421356237,4,"));
    assert!(lines.next().unwrap().starts_with("1,0,2,-1.41421356237,4,"));

    let r = rows(&stdout(&["truncate", "--n", "2", "--fix", "b=0"]));
    let roots: Vec<f64> = r.iter().map(|x| x[3]).collect();
    assert!((roots[0] - 3.464102).abs() < 1e-6 && roots[1].abs() < 1e-12 && (roots[2] + 3.464102).abs() < 1e-6);
    assert!(r.iter().all(|x| x[4] == 6.0));

    let r = rows(&stdout(&["truncate", "--n", "1", "--fix", "b=1"]));
    assert_eq!((r[0][3], r[1][3], r[0][4]), (0.5, -2.5, 3.75));
}

#[test]
fn variational_harmonic() {
    let r = rows(&stdout(&["variational", "--s", "0", "--a", "0", "--b", "0", "--basis", "20"]));
    let w: Vec<f64> = r.iter().map(|x| x[1]).collect();
    assert_eq!(w, [2.0, 6.0, 10.0, 14.0]);
}

#[test]
fn scan_bands_are_monotone() {
    let args = ["scan", "--axis", "a", "--min", "-3", "--max", "3", "--points", "61", "--s", "0", "--b", "0", "--bands", "4"];
    let out = stdout(&args);
    assert!(out.starts_with("a,W_0,W_1,W_2,W_3\n"));
    let r = rows(&out);
    assert_eq!(r.len(), 61);
    for nu in 1..=4 {
        assert!(r.windows(2).all(|w| w[1][nu] > w[0][nu]));
    }
    assert_eq!(out, stdout(&args), "CSV must be byte-stable");
}

#[test]
fn physical_allowed_frequency() {
    let out = stdout(&["physical", "allowed-frequency", "--model", "coulomb-ho", "--k", "1", "--m", "1", "--alpha", "1", "--l", "0", "--n", "1"]);
    assert_eq!(out, "n,n_bar,i,root,omega,energy\n1,2,1,2.44948974278,0.666666666667,2\n");
}

#[test]
fn check_suites() {
    let out = stdout(&["check", "point-on-curve", "--nmax", "10"]);
    let r: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(r.len(), 66);
    assert!(r.iter().all(|x| x[5].parse::<f64>().unwrap() <= 1e-4 && x[6] == "true"));

    let out = stdout(&["check", "hft", "--s", "0", "--a", "0", "--b", "0"]);
    let first: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert!((first[2].parse::<f64>().unwrap() - 1.772454).abs() < 1e-6);
    assert!(first[4].parse::<f64>().unwrap() <= 1e-3);

    let out = stdout(&["check", "rootcount", "--nmax", "15", "--format", "json"]);
    assert!(out.contains("\"passed\": true"));
    assert_eq!(out.matches("\"pass\": true").count(), 48);
}

#[test]
fn failing_check_sets_exit_status() {
    // with a 2-function basis the upper truncation points are missed
    let out = run(&["check", "point-on-curve", "--nmax", "3", "--basis", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["scan", "--axis", "a", "--min", "0", "--max", "1", "--points", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn figure_bundles() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for (id, b) in [("1", 0.0), ("2", f64::NAN), ("3", 1.0)] {
        stdout(&["figure", "--id", id, "--dir", d, "--points", "41"]);
        let points = fs::read_to_string(dir.path().join(format!("fig{id}_points.csv"))).unwrap();
        assert!(points.starts_with("n,i,param,W\n"));
        for row in rows(&points) {
            let b = if b.is_nan() { row[2] } else { b };
            let w = 2.0 * (row[0] + 1.0) - 0.25 * b * b;
            assert!((w - row[3]).abs() <= 1e-9, "fig {id}: {row:?}");
        }
        let curves = fs::read_to_string(dir.path().join(format!("fig{id}_curves.csv"))).unwrap();
        assert_eq!(rows(&curves).len(), 41);
        let guide = fs::read_to_string(dir.path().join(format!("fig{id}_guide.csv"))).unwrap();
        assert!(guide.starts_with("param,W\n"));
    }
    let points = rows(&fs::read_to_string(dir.path().join("fig1_points.csv")).unwrap());
    assert_eq!(points.len(), 66);
    assert!(points.iter().any(|r| (r[2] - 1.414214).abs() < 1e-6 && r[3] == 4.0));
    let curves = fs::read_to_string(dir.path().join("fig1_curves.csv")).unwrap();
    assert_eq!(curves.lines().next().unwrap().split(',').count(), 12);

    let points = rows(&fs::read_to_string(dir.path().join("fig2_points.csv")).unwrap());
    assert_eq!(points.len(), 136);
    assert!(points.iter().any(|r| (r[2] - 1.632993).abs() < 1e-6 && (r[3] - 3.333333).abs() < 1e-6));
    assert!(points.iter().any(|r| (r[2] + 1.632993).abs() < 1e-6 && (r[3] - 3.333333).abs() < 1e-6));

    let points = rows(&fs::read_to_string(dir.path().join("fig3_points.csv")).unwrap());
    assert!(points.iter().any(|r| r[2] == 0.5 && r[3] == 3.75));
    assert!(points.iter().any(|r| r[2] == -2.5 && r[3] == 3.75));
}

#[test]
fn figure_one_curve_passes_through_point() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    stdout(&["figure", "--id", "1", "--dir", d, "--points", "2", "--min", "1.41421356237", "--max", "2"]);
    let curves = rows(&fs::read_to_string(dir.path().join("fig1_curves.csv")).unwrap());
    assert!((curves[0][1] - 4.0).abs() < 1e-4);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# harmonic\nbasis = 20\ncount = 2\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(rows(&stdout(&["variational", "--config", c])).len(), 2);
    assert_eq!(rows(&stdout(&["variational", "--config", c, "--count", "3"])).len(), 3);
    assert_eq!(rows(&stdout(&["--config", c, "variational", "--count", "5"])).len(), 5);
}

#[test]
fn output_flag_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let out = stdout(&["variational", "--format", "json", "--output", path.to_str().unwrap()]);
    assert!(out.is_empty());
    let text = fs::read_to_string(path).unwrap();
    assert!(text.trim_start().starts_with('['));
    assert!(text.find("\"nu\"").unwrap() < text.find("\"W\"").unwrap());
}
