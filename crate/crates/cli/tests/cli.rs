use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsd")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = hsd(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn close(v: &Value, expected: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - expected).abs() <= tol
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn write_points(dir: &Path, rows: &[[f64; 3]]) -> String {
    let path = dir.join("points.csv");
    let body: String = rows.iter().map(|r| format!("{},{},{}\n", r[0], r[1], r[2])).collect();
    fs::write(&path, format!("a,b,c\n{body}")).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn orthogonal_bell_states() {
    let r = json(&["distance", "bell:phi+", "bell:phi-"]);
    assert!(close(&r["hsd_squared"], 2.0, 1e-12));
    assert!(close(&r["overlaps"]["rho1_rho1"], 1.0, 1e-12));
    assert!(close(&r["overlaps"]["rho1_rho2"], 0.0, 1e-12));
}

#[test]
fn werner_against_itself() {
    let r = json(&["distance", "werner:p=0.5", "werner:p=0.5"]);
    assert_eq!(r["hsd_squared"].as_f64().unwrap(), 0.0);
}

#[test]
fn werner_one_against_horodecki_one() {
    for mode in ["exact", "simulated"] {
        let r = json(&["distance", "werner:p=1", "horodecki:q=1", "--mode", mode]);
        assert!(close(&r["hsd_squared"], 2.0, 1e-9), "{mode}: {r}");
    }
}

#[test]
fn state_from_json_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("state.json");
    fs::write(&path, r#"{"named":"bell","params":{"kind":"psi-"}}"#).unwrap();
    let r = json(&["distance", path.to_str().unwrap(), "separable:01"]);
    // |⟨01|Ψ⁻⟩|² = 1/2 → D² = 1 + 1 − 2·½
    assert!(close(&r["hsd_squared"], 1.0, 1e-12));
}

#[test]
fn simulate_exact_matches_distance_exact() {
    let pairs = [("werner:p=0.3", "horodecki:q=0.7"), ("bell:psi+", "separable:10"), ("werner:0", "werner:1")];
    for (a, b) in pairs {
        let d = json(&["distance", a, b]);
        let s = json(&["simulate", a, b]);
        assert!(close(&s["hsd_squared"], d["hsd_squared"].as_f64().unwrap(), 1e-9));
        assert!(close(&s["exact"]["hsd_squared"], d["hsd_squared"].as_f64().unwrap(), 1e-12));
        assert_eq!(s["steps"].as_array().unwrap().len(), 3);
        assert_eq!(s["plan"]["overlap_settings"], 12);
        assert_eq!(s["plan"]["tomography_settings"], 32);
    }
}

#[test]
fn simulate_reports_counts() {
    let s = json(&["simulate", "bell:phi+", "bell:phi-", "--noise", "binomial", "--shots", "5000", "--seed", "3"]);
    let step = &s["steps"][2];
    assert_eq!(step["configuration"], "rho1,rho2");
    assert_eq!(step["estimate"]["counts"]["f_ii"], 5000.0);
    assert_eq!(step["estimate"]["counts"]["f_ss"], 0.0);
    assert!(s["hsd_squared_std_error"].as_f64().unwrap() > 0.0);
    assert_eq!(s["plan"]["total_shots"], 60_000);
}

#[test]
fn plan_command() {
    let p = json(&["plan"]);
    assert_eq!(p["overlap_settings"], 12);
    assert_eq!(p["tomography_settings"], 32);
}

#[test]
fn exit_codes() {
    assert_eq!(hsd(&["distance", "werner:p=2", "bell:phi+"]).status.code(), Some(2));
    assert_eq!(hsd(&["distance", "bell:phi+"]).status.code(), Some(2));
    assert_eq!(hsd(&["distance", "bell:phi+", "bell:phi+", "--noise", "gaussian"]).status.code(), Some(2));
    assert_eq!(hsd(&["distance", "bell:phi+", "missing-state.json"]).status.code(), Some(4));
    assert_eq!(hsd(&["cluster", "missing.csv", "--k", "2", "--out-dir", "unused"]).status.code(), Some(4));

    // one Poisson trial per configuration regularly leaves f_II at zero
    let codes: Vec<i32> = (0..20)
        .map(|seed| {
            let s = seed.to_string();
            hsd(&["overlap", "bell:phi+", "bell:phi+", "--noise", "poisson", "--shots", "1", "--seed", &s])
                .status
                .code()
                .unwrap()
        })
        .collect();
    assert!(codes.contains(&3) && codes.iter().all(|c| *c == 0 || *c == 3), "{codes:?}");
}

#[test]
fn cluster_backends_agree_and_repeat() {
    let dir = TempDir::new().unwrap();
    let demo = dir.path().join("demo");
    let out = hsd(&["reproduce", "clusters-demo", "--points", "200", "--out-dir", demo.to_str().unwrap()]);
    assert!(out.status.success());
    let points = demo.join("clusters_demo_points.csv");
    let run = |backend: &str, name: &str| {
        let target = dir.path().join(name);
        let out = hsd(&[
            "cluster",
            points.to_str().unwrap(),
            "--k",
            "2",
            "--backend",
            backend,
            "--seed",
            "5",
            "--out-dir",
            target.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        target
    };
    let (e, h, h2) = (run("euclidean", "e"), run("hsd-exact", "h"), run("hsd-exact", "h2"));
    assert_eq!(fs::read(e.join("labels.csv")).unwrap(), fs::read(h.join("labels.csv")).unwrap());
    assert_eq!(fs::read(h.join("model.json")).unwrap(), fs::read(h2.join("model.json")).unwrap());
    let model: Value = serde_json::from_slice(&fs::read(h.join("model.json")).unwrap()).unwrap();
    assert_eq!(model["schema_version"], 1);
    assert_eq!(model["centroids"].as_array().unwrap().len(), 2);
    assert!(model["cost"].as_f64().unwrap() > 0.0);
    assert!(fs::read_to_string(h.join("labels.csv")).unwrap().starts_with("# schema_version=1\nindex,label\n"));
}

#[test]
fn single_cluster_is_column_mean() {
    let dir = TempDir::new().unwrap();
    let rows = [[0.1, 0.0, -0.2], [0.3, 0.1, 0.0], [-0.1, 0.2, 0.1], [0.0, -0.1, 0.2]];
    let points = write_points(dir.path(), &rows);
    let out_dir = dir.path().join("out");
    let out = hsd(&["cluster", &points, "--k", "1", "--backend", "hsd-exact", "--out-dir", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let model: Value = serde_json::from_slice(&fs::read(out_dir.join("model.json")).unwrap()).unwrap();
    for c in 0..3 {
        let mean = rows.iter().map(|r| r[c]).sum::<f64>() / rows.len() as f64;
        assert!(close(&model["centroids"][0][c], mean, 1e-12));
    }
    assert!(model["iterations"].as_u64().unwrap() <= 2);
    let labels = csv_rows(&out_dir.join("labels.csv"));
    assert!(labels.iter().all(|r| r[1] == "0"));
}

#[test]
fn hypercube_embedding_accepts_data_outside_ball() {
    let dir = TempDir::new().unwrap();
    let rows = [[1.0, 1.0, 1.0], [0.9, 0.8, 1.0], [-1.0, -1.0, -0.9], [-0.8, -1.0, -1.0]];
    let points = write_points(dir.path(), &rows);
    let out_dir = dir.path().join("out");
    let ball = hsd(&["cluster", &points, "--k", "2", "--backend", "hsd-exact", "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(ball.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&ball.stderr).contains("point"));
    let cube = hsd(&[
        "cluster",
        &points,
        "--k",
        "2",
        "--backend",
        "hsd-exact",
        "--embedding",
        "hypercube",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(cube.status.success(), "{}", String::from_utf8_lossy(&cube.stderr));
    let labels: Vec<String> = csv_rows(&out_dir.join("labels.csv")).into_iter().map(|r| r[1].clone()).collect();
    assert_eq!(labels[0], labels[1]);
    assert_eq!(labels[2], labels[3]);
    assert_ne!(labels[0], labels[2]);
}

#[test]
fn reproduce_tables_and_grids() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r");
    let status = hsd(&["reproduce", "all", "--points", "100", "--out-dir", out.to_str().unwrap()]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));

    for table in ["bell_table.csv", "separable_table.csv"] {
        let rows = csv_rows(&out.join(table));
        assert_eq!(rows.len(), 4);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row[1..].iter().enumerate() {
                let expected = if i == j { 0.0 } else { 2.0 };
                assert!((v.parse::<f64>().unwrap() - expected).abs() <= 1e-9);
            }
        }
    }

    let werner = csv_rows(&out.join("werner_grid.csv"));
    assert_eq!(werner.len(), 441);
    for row in &werner {
        let v: Vec<f64> = row.iter().map(|x| x.parse().unwrap()).collect();
        assert!((v[2] - 0.75 * (v[0] - v[1]).powi(2)).abs() <= 1e-9);
    }
    let wh = csv_rows(&out.join("werner_horodecki_grid.csv"));
    assert_eq!(wh.len(), 441);
    assert_eq!(&wh[0][..2], &["0", "0"]);
    assert!((wh[0][2].parse::<f64>().unwrap() - 0.75).abs() <= 1e-12);
    assert!((wh[440][2].parse::<f64>().unwrap() - 2.0).abs() <= 1e-12);

    let manifest: Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["schema_version"], 1);
    for file in manifest["files"].as_array().unwrap() {
        assert!(out.join(file.as_str().unwrap()).exists());
    }
}

#[test]
fn reproduce_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let args = [
            "reproduce", "bell-table", "--noise", "binomial", "--shots", "2000", "--seed", "11", "--out-dir",
        ];
        let mut all: Vec<&str> = args.to_vec();
        all.push(out.to_str().unwrap());
        assert!(hsd(&all).status.success());
        out
    };
    let (a, b) = (run("a"), run("b"));
    for name in ["bell_table.csv", "bell_table_measured.csv", "bell_table_std_error.csv", "manifest.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}
