use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn flyq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flyq"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv(out: &Output) -> Vec<Vec<f64>> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

fn cell(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn fermion_gate_at_optimum() {
    let v = json(&flyq(&["gate", "fermion", "--pa", "0.5", "--pb", "0.5", "--c", "1.0"]));
    let r = &v["result"];
    let row = &r["outputs"][1];
    assert_eq!(row["input"], "up,down");
    // 1/(1+i) and i/(1+i)
    let (a, b) = (cell(&row["amplitudes"][1]), cell(&row["amplitudes"][2]));
    assert!((a.0 - 0.5).abs() < 1e-12 && (a.1 + 0.5).abs() < 1e-12, "{a:?}");
    assert!((b.0 - 0.5).abs() < 1e-12 && (b.1 - 0.5).abs() < 1e-12, "{b:?}");
    assert!((row["concurrence"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(r["unitarity_residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["manifest"]["command"], "gate");
    assert_eq!(v["manifest"]["timestamp"], "2023-11-14T22:13:20Z");
}

#[test]
fn idealized_spinless_and_free_boson() {
    let v = json(&flyq(&["gate", "spinless-ideal"]));
    let m = &v["result"]["matrix"];
    let diag: Vec<f64> = (0..4).map(|i| cell(&m[i][i]).0).collect();
    assert_eq!(diag, vec![-1.0, 1.0, 1.0, 1.0]);

    let v = json(&flyq(&["gate", "boson", "--pa", "1", "--pb", "1", "--c", "0"]));
    let m = &v["result"]["matrix"];
    for i in 0..4 {
        for j in 0..4 {
            let (re, im) = cell(&m[i][j]);
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((re - expect).abs() < 1e-15 && im.abs() < 1e-15);
        }
    }
}

#[test]
fn gate_usage_errors() {
    assert_eq!(code(&flyq(&["gate", "fermion", "--pa", "1", "--c", "1"])), 2);
    assert_eq!(code(&flyq(&["gate", "quark"])), 2);
    assert_eq!(code(&flyq(&["gate", "boson", "--pa", "-1", "--pb", "1", "--c", "1"])), 2);
    assert_eq!(code(&flyq(&["gate", "spinless-ideal", "--c", "1"])), 2);
}

#[test]
fn spinless_exact_gate_near_ideal() {
    let v = json(&flyq(&["gate", "spinless", "--lambda0", "0.001", "--lambda1", "1000", "--c", "1"]));
    let m = &v["result"]["matrix"];
    let (re, _) = cell(&m[0][0]);
    assert!((re + 1.0).abs() < 1e-5);
}

#[test]
fn single_ratio_sweep_is_maximally_entangling() {
    let rows = csv(&flyq(&["sweep", "--min", "1", "--max", "1", "--points", "1", "--samples", "2000"]));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][3] - 1.0).abs() < 1e-12);
}

#[test]
fn sweep_peaks_at_unit_ratio() {
    let rows = csv(&flyq(&["sweep", "--samples", "10000"]));
    assert_eq!(rows.len(), 41);
    let best = rows.iter().enumerate().max_by(|a, b| a.1[1].total_cmp(&b.1[1])).unwrap().0;
    assert_eq!(best, 20);
    assert!((rows[best][0] - 1.0).abs() < 1e-12);
}

#[test]
fn sweep_rejects_empty_range() {
    assert_eq!(code(&flyq(&["sweep", "--min", "10", "--max", "1"])), 2);
    assert_eq!(code(&flyq(&["sweep", "--points", "0"])), 2);
}

#[test]
fn files_are_reproducible_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = flyq(&["sweep", "--points", "5", "--samples", "3000", "--seed", "11", "--output", path.to_str().unwrap()]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
        path
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert!(!bytes.contains(&b'\r'));
    let text = String::from_utf8(bytes).unwrap();
    assert_eq!(text.lines().next().unwrap(), "ratio,entangling_power,stderr,max_concurrence");
    let field = text.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    assert_eq!(field.split('e').next().unwrap().len(), 18, "17 significant digits: {field}");

    let side = |p: &Path| -> Value {
        let s = format!("{}.manifest.json", p.display());
        serde_json::from_str(&std::fs::read_to_string(s).unwrap()).unwrap()
    };
    let m = side(&a);
    assert_eq!(m["seed"], 11);
    assert_eq!(m["parameters"]["samples"], "3000");
    assert_eq!(m, side(&b));

    let other = dir.path().join("c.csv");
    let out = flyq(&["sweep", "--points", "5", "--samples", "3000", "--seed", "12", "--output", other.to_str().unwrap()]);
    assert!(out.status.success());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&other).unwrap());
}

#[test]
fn fidelity_scales_quadratically() {
    let rows = csv(&flyq(&["fidelity", "--delta-p", "0,0.01,0.02,0.04"]));
    assert_eq!(rows[0][2], 0.0);
    for w in rows[1..].windows(2) {
        let ratio = w[1][2] / w[0][2];
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }
    assert_eq!(code(&flyq(&["fidelity", "--delta-p", "0.5"])), 2);
    assert_eq!(code(&flyq(&["fidelity", "--delta-p", "0.25", "--order", "2"])), 3);
}

#[test]
fn bundled_rubidium_config() {
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/data/rb87.cfg");
    let v = json(&flyq(&["params", cfg]));
    let r = &v["result"];
    for conv in r["conventions"].as_array().unwrap() {
        let c = conv["coupling_per_m"].as_f64().unwrap();
        assert!((5e5..=5e7).contains(&c), "{c}");
    }
    let p = r["wavenumber_per_atom_per_m"].as_f64().unwrap();
    assert!((5e5..=5e6).contains(&p));
}

#[test]
fn params_errors() {
    let out = flyq(&["params", "/definitely/not/here.cfg"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/definitely/not/here.cfg"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "mass_kg=1.4e-25\na3d_m=5e-9\nomega_perp_rad_s=6e5\nvelocity_m_s=1e-3\nspin=1\n").unwrap();
    let out = flyq(&["params", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("spin"));
}

#[test]
fn oracle_unit_ratio_and_boundary_guard() {
    let rows = csv(&flyq(&["oracle", "--ratios", "1", "--widths", "3"]));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][2] + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    assert!(rows[0][3] < 5e-3);

    let out = flyq(&["oracle", "--ratios", "1", "--widths", "3", "--domain-scale", "0.6"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("boundary"));
}
