//! End-to-end runs of the command-line tool.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use corrugated_cp::cli::config::ScenarioConfig;
use corrugated_cp::cli::output::{read_csv_table, Cell, Table};
use corrugated_cp::cli::{execute, Command as Sub};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_corrugated-cp");
const NM: f64 = 1e-9;

const PARTICLE: &str = r#""particle": {"material": "diamond", "semi_major_m": 3e-9, "semi_minor_m": 2e-9,
    "phi": "0deg", "theta": "90deg", "density_kg_m3": 3510}"#;

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str], config: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .expect("binary runs")
}

/// Runs a command writing CSV to a file; returns the primary table and extras.
fn run_tables(dir: &TempDir, sub: &str, body: &str, extras: &[&str]) -> (Table, Vec<Table>) {
    let cfg = write_config(dir, &format!("{sub}.json"), body);
    let out = dir.path().join(format!("{sub}.csv"));
    let o = run(&[sub, "--out", out.to_str().unwrap()], &cfg);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let primary = read_csv_table(sub, std::fs::File::open(&out).unwrap()).unwrap().0;
    let others = extras
        .iter()
        .map(|name| {
            let p = dir.path().join(format!("{sub}.{name}.csv"));
            read_csv_table(name, std::fs::File::open(p).unwrap()).unwrap().0
        })
        .collect();
    (primary, others)
}

fn num(t: &Table, row: usize, col: &str) -> f64 {
    match &t.rows[row][t.column(col).unwrap_or_else(|| panic!("column {col}"))] {
        Cell::Num(v) => *v,
        Cell::Int(v) => *v as f64,
        other => panic!("{col} is not numeric: {other:?}"),
    }
}

fn text(t: &Table, row: usize, col: &str) -> String {
    match &t.rows[row][t.column(col).unwrap()] {
        Cell::Text(s) => s.clone(),
        other => panic!("{col} is not text: {other:?}"),
    }
}

fn missing(t: &Table, row: usize, col: &str) -> bool {
    t.rows[row][t.column(col).unwrap()] == Cell::Missing
}

#[test]
fn energy_landscapes_for_the_three_diamond_heights() {
    let dir = TempDir::new().unwrap();
    let body = format!(
        r#"{{"mode": "quantum", {PARTICLE},
        "geometry": {{"z0_m": 30.2e-9, "amplitude_m": 2e-9, "wavelength_m": 8.5e-9}},
        "energy": {{"z0_m": [28e-9, 28.9554e-9, 30.2e-9], "periods": 1, "points": 101}}}}"#
    );
    let (energy, extra) = run_tables(&dir, "energy", &body, &["regime"]);
    assert_eq!(energy.rows.len(), 303);
    let regime = &extra[0];
    assert_eq!(text(regime, 0, "regime"), "peak");
    assert_eq!(text(regime, 2, "regime"), "valley");
    let argmin = |block: usize| {
        (0..101)
            .map(|i| block * 101 + i)
            .min_by(|&a, &b| num(&energy, a, "U1_J").total_cmp(&num(&energy, b, "U1_J")))
            .map(|r| num(&energy, r, "x0_m"))
            .unwrap()
    };
    assert_eq!(argmin(0), 0.0);
    assert!((argmin(2) - 4.25 * NM).abs() < 1e-15);
    // Near the null height the landscape is flat compared with its neighbours.
    let spread = |block: usize| {
        let vals: Vec<f64> = (0..101).map(|i| num(&energy, block * 101 + i, "U1_J")).collect();
        vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min)
    };
    assert!(spread(1) < 1e-3 * spread(0));
    assert!(spread(1) < 1e-3 * spread(2));
    for r in 0..energy.rows.len() {
        let total = num(&energy, r, "U0_J") + num(&energy, r, "U1_J");
        assert_eq!(num(&energy, r, "Utotal_J"), total);
    }
}

#[test]
fn zero_amplitude_gives_zero_first_order_energy() {
    let dir = TempDir::new().unwrap();
    let body = r#"{"mode": "classical", "dipole": {"magnitude_C_m": 1e-29, "phi": "30deg", "theta": "60deg"},
        "geometry": {"z0_m": 1e-8, "amplitude_m": 0, "wavelength_m": 2e-8},
        "energy": {"points": 11}}"#;
    let (energy, _) = run_tables(&dir, "energy", body, &[]);
    assert_eq!(energy.rows.len(), 11);
    for r in 0..11 {
        assert_eq!(num(&energy, r, "U1_J"), 0.0);
        assert!(num(&energy, r, "U0_J") < 0.0);
    }
}

#[test]
fn classical_x_dipole_sits_over_valleys_at_lambda_two_z0() {
    let dir = TempDir::new().unwrap();
    let body = r#"{"mode": "classical", "dipole": {"magnitude_C_m": 1e-29, "phi": "0deg", "theta": "90deg"},
        "geometry": {"z0_m": 1e-8, "amplitude_m": 5e-10, "wavelength_m": 2e-8},
        "energy": {"periods": 1, "points": 201}}"#;
    let (energy, extra) = run_tables(&dir, "energy", body, &["regime"]);
    assert_eq!(text(&extra[0], 0, "regime"), "valley");
    let best = (0..201).min_by(|&a, &b| num(&energy, a, "U1_J").total_cmp(&num(&energy, b, "U1_J"))).unwrap();
    assert_eq!(best, 100);
}

#[test]
fn energy_with_explicit_profile_modes() {
    let dir = TempDir::new().unwrap();
    let k = 2.0 * std::f64::consts::PI / 2e-8;
    let body = format!(
        r#"{{"mode": "classical", "dipole": {{"magnitude_C_m": 1e-29, "phi": "0deg", "theta": "90deg"}},
        "geometry": {{"z0_m": 1e-8, "amplitude_m": 5e-10, "wavelength_m": 2e-8}},
        "profile": {{"modes": [{{"amplitude_m": 5e-10, "kx_per_m": {k:e}}}]}},
        "energy": {{"periods": 1, "points": 21}}}}"#
    );
    let (general, _) = run_tables(&dir, "energy", &body, &[]);
    let sinusoid_body = body.replace(&format!(r#""profile": {{"modes": [{{"amplitude_m": 5e-10, "kx_per_m": {k:e}}}]}},"#), "");
    let (sinusoid, _) = run_tables(&dir, "energy", &sinusoid_body, &[]);
    let scale = (0..21).map(|r| num(&sinusoid, r, "U1_J").abs()).fold(0.0, f64::max);
    for r in 0..21 {
        assert!((num(&general, r, "U1_J") - num(&sinusoid, r, "U1_J")).abs() <= 1e-10 * scale);
    }
}

#[test]
fn height_map_profiles_are_accepted() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("nx,ny,dx_m,dy_m\n8,1,2.5e-9,1e-9\n");
    let heights: Vec<String> = (0..8)
        .map(|i| format!("{:e}", 5e-10 * (2.0 * std::f64::consts::PI * i as f64 / 8.0).cos()))
        .collect();
    csv.push_str(&heights.join(","));
    csv.push('\n');
    let map = dir.path().join("map.csv");
    std::fs::write(&map, csv).unwrap();
    let body = format!(
        r#"{{"mode": "classical", "dipole": {{"magnitude_C_m": 1e-29, "phi": "0deg", "theta": "0deg"}},
        "geometry": {{"z0_m": 1e-8, "amplitude_m": 5e-10, "wavelength_m": 2e-8}},
        "profile": {{"height_map": {:?}}},
        "energy": {{"periods": 1, "points": 9}}}}"#,
        map.to_str().unwrap()
    );
    let (grid, _) = run_tables(&dir, "energy", &body, &[]);
    let without = body.replace(&format!(r#""profile": {{"height_map": {:?}}},"#, map.to_str().unwrap()), "");
    let (sinusoid, _) = run_tables(&dir, "energy", &without, &[]);
    // An 8-point sampled cosine has exactly the same spectral lines.
    let scale = (0..9).map(|r| num(&sinusoid, r, "U1_J").abs()).fold(0.0, f64::max);
    for r in 0..9 {
        assert!((num(&grid, r, "U1_J") - num(&sinusoid, r, "U1_J")).abs() <= 1e-10 * scale);
    }
}

#[test]
fn regime_maps_and_borders() {
    let dir = TempDir::new().unwrap();
    let classical = r#"{"mode": "classical", "dipole": {"magnitude_C_m": 1e-29, "phi": "0deg", "theta": "90deg"},
        "regime_map": {"lambda_over_z0": {"start": 0.5, "stop": 5, "count": 10, "scale": "log"},
                       "phi": ["0deg", "45deg", "90deg"]}}"#;
    let (map, extra) = run_tables(&dir, "regime-map", classical, &["border"]);
    assert_eq!(map.rows.len(), 30);
    let border = &extra[0];
    let b0 = num(border, 0, "border_lambda_over_z0");
    assert!((b0 - std::f64::consts::E).abs() / std::f64::consts::E < 0.01);
    assert!(num(border, 1, "border_lambda_over_z0") < b0);
    assert!(missing(border, 2, "border_lambda_over_z0"));
    // Every cell with phi = 90deg is a peak; phi = 0 below the border is a valley.
    for r in 0..map.rows.len() {
        let phi = num(&map, r, "phi_rad");
        let ratio = num(&map, r, "lambda_over_z0");
        let label = text(&map, r, "regime");
        if phi > 1.5 {
            assert_eq!(label, "peak");
        } else if phi == 0.0 {
            assert_eq!(label, if ratio < b0 { "valley" } else { "peak" });
        }
    }

    let quantum = format!(
        r#"{{"mode": "quantum", {PARTICLE},
        "regime_map": {{"lambda_over_z0": [0.1, 0.2, 0.4], "phi": {{"start": "0deg", "stop": "80deg", "count": 9}}}}}}"#
    );
    let (_, extra) = run_tables(&dir, "regime-map", &quantum, &["border"]);
    let borders: Vec<f64> = (0..9).map(|r| num(&extra[0], r, "border_lambda_over_z0")).collect();
    assert!((borders[0] - 0.293).abs() / 0.293 < 0.01);
    assert!(borders.windows(2).all(|w| w[1] < w[0]));

    let sphere = quantum.replace("\"semi_major_m\": 3e-9", "\"semi_major_m\": 2e-9");
    let (map, extra) = run_tables(&dir, "regime-map", &sphere, &["border"]);
    assert!((0..map.rows.len()).all(|r| text(&map, r, "regime") == "peak"));
    assert!((0..9).all(|r| missing(&extra[0], r, "border_lambda_over_z0")));
}

#[test]
fn xmin_map_summaries() {
    let dir = TempDir::new().unwrap();
    let body = format!(
        r#"{{"mode": "quantum", {PARTICLE},
        "xmin_map": {{"lambda_over_z0": [0.1, 0.5],
            "phi": {{"start": "0deg", "stop": "180deg", "count": 91}},
            "theta": {{"start": "0deg", "stop": "180deg", "count": 91}}, "bins": 50}}}}"#
    );
    let (map, extra) = run_tables(&dir, "xmin-map", &body, &["summary"]);
    assert_eq!(map.rows.len(), 2 * 91 * 91);
    let summary = &extra[0];
    assert!(num(summary, 0, "coverage_fraction") >= 0.99);
    let beta = num(summary, 1, "peak_band_halfwidth");
    assert!(beta > 0.0 && beta < 0.25);
    assert_eq!(num(summary, 0, "bins"), 50.0);

    // phi = 0 only: the theta curve below the transition reaches the valley.
    let phi0 = body.replace(r#""phi": {"start": "0deg", "stop": "180deg", "count": 91}"#, r#""phi": ["0deg"]"#);
    let (map, _) = run_tables(&dir, "xmin-map", &phi0, &[]);
    let below: Vec<f64> = (0..91).map(|r| num(&map, r, "xmin_over_lambda")).collect();
    assert!(below.iter().any(|&x| (x - 0.5).abs() < 1e-9));
    let above: Vec<f64> = (91..182).map(|r| num(&map, r, "xmin_over_lambda")).collect();
    assert!(above.iter().all(|&x| x.min(1.0 - x) < 0.25));
}

#[test]
fn transition_reports() {
    let dir = TempDir::new().unwrap();
    let body = format!(r#"{{"mode": "quantum", {PARTICLE}, "transition": {{"aspects": [1.0, 1.5]}}}}"#);
    let (t, _) = run_tables(&dir, "transition", &body, &[]);
    assert_eq!(num(&t, 0, "border_lambda_over_z0"), 0.0);
    assert!((num(&t, 1, "border_lambda_over_z0") - 0.293).abs() / 0.293 < 0.01);

    let sweep = format!(
        r#"{{"mode": "quantum", {PARTICLE}, "transition": {{"aspects": {{"start": 1.05, "stop": 3, "count": 40}}}}}}"#
    );
    let (t, _) = run_tables(&dir, "transition", &sweep, &[]);
    let g: Vec<f64> = (0..40).map(|r| num(&t, r, "border_lambda_over_z0")).collect();
    assert!(g.windows(2).all(|w| w[1] > w[0]));

    let classical = r#"{"mode": "classical", "dipole": {"magnitude_C_m": 1e-29, "phi": "0deg", "theta": "90deg"},
        "transition": {"aspects": [1.0, 2.0, 3.0]}}"#;
    let (t, _) = run_tables(&dir, "transition", classical, &[]);
    let first = num(&t, 0, "border_lambda_over_z0");
    assert!((first - std::f64::consts::E).abs() / std::f64::consts::E < 0.01);
    assert!((0..3).all(|r| num(&t, r, "border_lambda_over_z0") == first));
}

fn frequency_body(extra_particle: &str, amplitude: f64) -> String {
    let particle = PARTICLE.replace("\"density_kg_m3\": 3510", extra_particle);
    format!(
        r#"{{"mode": "quantum", {particle},
        "geometry": {{"z0_m": 30.2e-9, "amplitude_m": {amplitude:e}, "wavelength_m": 8.5e-9}},
        "frequency": {{"z0_m": {{"start": 27e-9, "stop": 35e-9, "count": 33}}}}}}"#
    )
}

#[test]
fn frequency_curve_null_and_maximum() {
    let dir = TempDir::new().unwrap();
    let (f, extra) = run_tables(&dir, "frequency", &frequency_body("\"density_kg_m3\": 3510", 2e-9), &["points"]);
    let points = &extra[0];
    assert_eq!(text(points, 0, "kind"), "null");
    assert!((num(points, 0, "z0_m") / NM - 28.9554).abs() < 0.03);
    assert_eq!(text(points, 1, "kind"), "valley_max");
    assert!((num(points, 1, "z0_m") / NM - 30.2).abs() < 0.9);
    assert!((num(points, 1, "f_Hz") - 2.3).abs() < 0.575);
    let z: Vec<f64> = (0..33).map(|r| num(&f, r, "z0_m")).collect();
    let hz: Vec<f64> = (0..33).map(|r| num(&f, r, "f_Hz")).collect();
    // Decreasing towards the null, then up to the maximum, then down.
    let null = num(points, 0, "z0_m");
    let peak = num(points, 1, "z0_m");
    for i in 1..33 {
        if z[i] < null {
            assert!(hz[i] < hz[i - 1]);
        } else if z[i - 1] > null && z[i] < peak {
            assert!(hz[i] > hz[i - 1]);
        } else if z[i - 1] > peak {
            assert!(hz[i] < hz[i - 1]);
        }
    }

    let heavy_mass = 2.0 * 3510.0 * 4.0 / 3.0 * std::f64::consts::PI * 4e-18 * 3e-9;
    let (heavy, _) = run_tables(&dir, "frequency", &frequency_body(&format!("\"mass_kg\": {heavy_mass:e}"), 2e-9), &[]);
    let (shallow, _) = run_tables(&dir, "frequency", &frequency_body("\"density_kg_m3\": 3510", 1e-9), &[]);
    for r in 0..33 {
        let base = num(&f, r, "f_Hz");
        assert!((num(&heavy, r, "f_Hz") * 2f64.sqrt() - base).abs() <= 1e-12 * base.max(1e-300));
        assert!((num(&shallow, r, "f_Hz") * 2f64.sqrt() - base).abs() <= 1e-12 * base.max(1e-300));
    }
}

#[test]
fn exit_codes_and_early_rejection() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("never.csv");
    let unknown = write_config(&dir, "unknown.json", r#"{"mode": "classical", "colour": "blue"}"#);
    let o = run(&["energy", "--out", out.to_str().unwrap()], &unknown);
    assert_eq!(o.status.code(), Some(2));

    let large = write_config(
        &dir,
        "large.json",
        r#"{"mode": "classical", "dipole": {"magnitude_C_m": 1e-29, "phi": "0deg", "theta": "0deg"},
        "geometry": {"z0_m": 1e-8, "amplitude_m": 2e-9, "wavelength_m": 2e-8}, "energy": {"points": 5}}"#,
    );
    let o = run(&["energy", "--out", out.to_str().unwrap()], &large);
    assert_eq!(o.status.code(), Some(4));
    assert!(!out.exists());
    let o = run(&["energy", "--allow-large-amplitude", "--out", out.to_str().unwrap()], &large);
    assert!(o.status.success());

    let bad_angle = write_config(
        &dir,
        "angle.json",
        r#"{"mode": "classical", "dipole": {"magnitude_C_m": 1e-29, "phi": "90", "theta": "0deg"}}"#,
    );
    assert_eq!(run(&["energy"], &bad_angle).status.code(), Some(2));

    let no_section = write_config(&dir, "empty.json", r#"{"mode": "classical"}"#);
    assert_eq!(run(&["frequency"], &no_section).status.code(), Some(2));
    assert_eq!(run(&["energy"], &no_section).status.code(), Some(2));

    let o = Command::new(BIN).arg("energy").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_output_mirrors_csv() {
    let dir = TempDir::new().unwrap();
    let body = format!(r#"{{"mode": "quantum", {PARTICLE}, "transition": {{"aspects": [1.0, 1.5, 2.0]}}}}"#);
    let cfg = write_config(&dir, "t.json", &body);
    let o = run(&["transition", "--format", "json"], &cfg);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["meta"]["command"], "transition");
    assert_eq!(v["meta"]["scenario_hash"].as_str().unwrap().len(), 64);
    let rows = v["tables"]["transition"]["rows"].as_array().unwrap();
    let (csv_table, hash) = {
        let o = run(&["transition"], &cfg);
        read_csv_table("transition", o.stdout.as_slice()).unwrap()
    };
    assert_eq!(hash, v["meta"]["scenario_hash"].as_str().unwrap());
    for (r, row) in rows.iter().enumerate() {
        assert_eq!(row[2].as_f64().unwrap(), num(&csv_table, r, "border_lambda_over_z0"));
    }
}

#[test]
fn csv_round_trip_reproduces_payload() {
    let dir = TempDir::new().unwrap();
    let body = format!(
        r#"{{"mode": "quantum", {PARTICLE},
        "regime_map": {{"lambda_over_z0": {{"start": 0.05, "stop": 1, "count": 7, "scale": "log"}},
                        "phi": ["0deg", "pi/6rad", "60deg"]}}}}"#
    );
    let report = execute(Sub::RegimeMap, ScenarioConfig::parse(&body).unwrap(), false).unwrap();
    let (map, extra) = run_tables(&dir, "regime-map", &body, &["border"]);
    assert_eq!(map.columns, report.tables[0].columns);
    assert_eq!(map.rows, report.tables[0].rows);
    assert_eq!(extra[0], report.tables[1]);
}
