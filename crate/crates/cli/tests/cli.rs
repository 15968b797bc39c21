//! End-to-end checks of the command-line surface: exit codes, sample
//! ingestion, and the CSV round trip.

use meanapprox::grid::{DiskGrid, Field};
use meanapprox::Complex64;
use meanapprox_cli::fieldio::{export_field, import_field, IngestedField};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_meanapprox")
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

#[test]
fn exit_codes_follow_verdicts() {
    // certified -> 0
    let (code, _) = run(&[
        "certify",
        "--omega",
        "monomial:0,1",
        "--fstar",
        "zero",
        "--p",
        "1",
        "--grid",
        "64,128",
    ]);
    assert_eq!(code, 0);
    // refuted -> 2
    let (code, _) = run(&[
        "certify",
        "--omega",
        "conj_shift:2",
        "--fstar",
        "zero",
        "--p",
        "1",
        "--grid",
        "64,128",
    ]);
    assert_eq!(code, 2);
    // config errors -> 1
    let (code, _) = run(&["certify", "--omega", "nonsense:1", "--fstar", "zero"]);
    assert_eq!(code, 1);
    // inapplicable thinness criterion -> 3
    let (code, _) = run(&["peakset", "thinness", "--region", "annulus:0.9,1.0"]);
    assert_eq!(code, 3);
}

#[test]
fn csv_round_trip_is_exact() {
    let grid = DiskGrid::product(12, 16).unwrap();
    let field = Field::from_fn(&grid, |z| (z * 1.3).exp() + z.conj() * 0.7);
    let dir = std::env::temp_dir().join(format!("meanapprox-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("roundtrip.csv");
    export_field(&path, &grid, &field).unwrap();
    match import_field(&path).unwrap() {
        IngestedField::OnGrid {
            grid: back_grid,
            field: back,
        } => {
            assert_eq!(back_grid.len(), grid.len());
            for (a, b) in field.values.iter().zip(&back.values) {
                assert_eq!(a.re.to_bits(), b.re.to_bits(), "17 digits must round-trip");
                assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
        IngestedField::FreePoints { .. } => panic!("product layout must reconstruct"),
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn free_points_header_ingests_for_projection() {
    let dir = std::env::temp_dir().join(format!("meanapprox-free-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("free.csv");
    // scattered points sampling omega = z^2
    let mut text = String::from("x,y,re,im\n");
    let mut state = 1u64;
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..200 {
        let x = next() * 1.6 - 0.8;
        let y = next() * 1.6 - 0.8;
        let z = Complex64::new(x, y);
        let v = z * z;
        text += &format!("{x:.16e},{y:.16e},{:.16e},{:.16e}\n", v.re, v.im);
    }
    std::fs::write(&path, text).unwrap();

    let omega = format!("samples:{}", path.display());
    let (code, out) = run(&[
        "solve",
        "--omega",
        &omega,
        "--p",
        "2",
        "--basis",
        "analytic:3",
    ]);
    assert_eq!(code, 0, "free-point projection should succeed: {out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let coeffs = v["results"]["coefficients"].as_array().unwrap();
    // projection must recover the z² coefficient
    let c2 = &coeffs[2];
    assert!((c2[0].as_f64().unwrap() - 1.0).abs() < 1e-10);
    // non-quadratic coefficients vanish
    for k in [0usize, 1, 3] {
        assert!(coeffs[k][0].as_f64().unwrap().abs() < 1e-10);
    }
    // p = 1 on free points is refused with a clear error
    let out = Command::new(bin())
        .args([
            "solve",
            "--omega",
            &omega,
            "--p",
            "1",
            "--basis",
            "analytic:3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn grid_samples_solve_matches_catalog_solve() {
    let dir = std::env::temp_dir().join(format!("meanapprox-grid-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("field.csv");
    let grid = DiskGrid::product(32, 64).unwrap();
    let field = Field::from_fn(&grid, |z| z * z * z.conj());
    export_field(&path, &grid, &field).unwrap();

    let omega = format!("samples:{}", path.display());
    let (code, out) = run(&[
        "solve",
        "--omega",
        &omega,
        "--p",
        "2",
        "--basis",
        "harmonic2d:3",
    ]);
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    // projection of z²z̄ onto harmonics: (2/3) z
    let coeffs = v["results"]["coefficients"].as_array().unwrap();
    assert!((coeffs[1][0].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-8);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reports_state_their_full_configuration() {
    let (code, out) = run(&[
        "solve",
        "--omega",
        "monomial:1,1",
        "--p",
        "1",
        "--basis",
        "analytic:2",
        "--grid",
        "32,64",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in [
        "grid",
        "seed",
        "tol",
        "p",
        "basis",
        "eps0",
        "eps_decay",
        "eps_min",
    ] {
        assert!(
            !v["config"][key].is_null(),
            "config must pin '{key}': {}",
            v["config"]
        );
    }
    assert!(v["results"]["lambda"].is_number());
    assert!(v["claims"]
        .as_array()
        .map(|a| !a.is_empty())
        .unwrap_or(false));
}
