use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nlfm::analysis::PsdComparison;
use nlfm::cli::{analyze_config, write_analysis, OutputFormat, RunConfig, SWEEP_HEADERS};
use nlfm::windows::WindowSpec;

fn nlfm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlfm"))
        .args(args)
        .output()
        .expect("spawn nlfm")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (headers, rows)
}

fn column(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn design_defaults_write_full_waveform() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlfm(&["design", "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (headers, rows) = read_csv(&dir.path().join("waveform.csv"));
    assert_eq!(headers, ["t_s", "i", "q", "freq_hz", "phase_rad"]);
    assert_eq!(rows.len(), 2500);
    let t = column(&rows, 0);
    assert!((t[0] + 1.25e-6).abs() < 1e-18);
    let design: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("design.json")).unwrap()).unwrap();
    assert_eq!(design["sample_count"], 2500);
    assert_eq!(design["grid_n"], 2501);
    assert_eq!(design["window"]["family"], "raised_cosine");
}

#[test]
fn flat_kaiser_gives_linear_frequency_law() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlfm(&["design", "--window", "kaiser", "--param", "0", "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = read_csv(&dir.path().join("waveform.csv"));
    let t = column(&rows, 0);
    let f = column(&rows, 3);
    let slope = 100e6 / 2.5e-6;
    for (ti, fi) in t.iter().zip(&f) {
        assert!((fi - slope * ti).abs() < 1e-6 * 100e6, "t={ti} f={fi}");
    }
}

#[test]
fn design_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = nlfm(&["design", "--window", "taylor", "--param", "-35", "--out", path_str(d.path())]);
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["waveform.csv", "design.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    }
}

#[test]
fn even_grid_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"grid_n": 2500}"#).unwrap();
    let out = nlfm(&["design", "--config", path_str(&cfg), "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("grid_n must be odd"), "{err}");
    assert!(!dir.path().join("waveform.csv").exists());
}

#[test]
fn bad_inputs_exit_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = path_str(dir.path());
    let cases: [&[&str]; 4] = [
        &["design", "--window", "hann", "--out", d],
        &["design", "--window", "raised_cosine", "--param", "1.5", "--out", d],
        &["analyze", "--window", "kaiser", "--param", "-1", "--out", d],
        &["sweep", "--window", "chebyshev", "--grid", "0", "--out", d],
    ];
    for args in cases {
        let out = nlfm(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("nlfm: "));
    }
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"pulse_width": 2.5}"#).unwrap();
    let out = nlfm(&["design", "--config", path_str(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = nlfm(&["design", "--out", path_str(&blocker.join("sub"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_config_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlfm(&["design", "--config", path_str(&dir.path().join("absent.json"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_writes_one_table_per_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlfm(&["sweep", "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for family in ["raised_cosine", "taylor", "chebyshev", "kaiser"] {
        let path = dir.path().join(format!("sweep_{family}.csv"));
        let bytes = fs::read(&path).unwrap();
        assert_eq!(bytes.last(), Some(&b'\n'));
        let (headers, rows) = read_csv(&path);
        assert_eq!(headers, SWEEP_HEADERS);
        assert!(rows.len() >= 46, "{family}: {}", rows.len());
        assert!(rows.iter().all(|r| r[0] == family));
        let params = column(&rows, 1);
        assert!(params.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn sweep_json_with_custom_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlfm(&[
        "sweep", "--window", "taylor", "--grid", "-40,-30,-20", "--format", "json", "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("sweep_taylor.json")).unwrap()).unwrap();
    for h in SWEEP_HEADERS {
        assert_eq!(v[h].as_array().unwrap().len(), 3, "{h}");
    }
    assert_eq!(v["param_value"][0], -40.0);
    assert_eq!(v["status"][2], "ok");
}

#[test]
fn analyze_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlfm(&["analyze", "--window", "chebyshev", "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    for name in ["acf.csv", "acf_lfm.csv"] {
        let (headers, rows) = read_csv(&dir.path().join(name));
        assert_eq!(headers, ["lag_s", "magnitude", "magnitude_db"]);
        assert_eq!(rows.len(), 2 * 2500 - 1);
    }
    let (headers, rows) = read_csv(&dir.path().join("psd.csv"));
    assert_eq!(headers, ["freq_hz", "desired", "simulated"]);
    assert_eq!(rows.len(), 2501);
    let m: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("metrics.json")).unwrap()).unwrap();
    assert!(m["psl_db"].as_f64().unwrap() < -20.0);
    assert!(m["normalized_width"].as_f64().unwrap() > 1.0);
}

#[test]
fn lfm_metrics_and_zero_psd_error() {
    let cfg = RunConfig {
        window: WindowSpec::Kaiser { beta: 0.0 },
        ..RunConfig::default()
    };
    let mut a = analyze_config(&cfg).unwrap();
    let psl = a.report.psl_db.unwrap();
    assert!((psl + 13.26).abs() < 0.2, "{psl}");
    assert!((a.report.normalized_width - 1.0).abs() < 1e-9);

    a.psd = PsdComparison::new(a.psd.freqs.clone(), a.psd.desired.clone(), a.psd.desired.clone()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_analysis(&a, &cfg.window, dir.path(), OutputFormat::Json).unwrap();
    let m: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("metrics.json")).unwrap()).unwrap();
    assert_eq!(m["psd_error_percent"], 0.0);
    assert!(m.get("reason").is_none());
    assert!(dir.path().join("acf.json").exists());
}
