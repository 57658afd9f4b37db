//! End-to-end checks of the command-line surface: exit codes, file
//! outputs, and the documented observation/curve schemas.

use std::path::Path;
use std::process::{Command, Output};

fn windstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_windstat"))
        .args(args)
        .output()
        .unwrap()
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

const HEADER: &str = "station_key,timestamp_iso8601,speed_mps,direction_deg\n";

#[test]
fn usage_errors_exit_1() {
    let out = windstat(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    let out = windstat(&["report", "--input", "x.csv", "--table", "bogus"]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn help_exits_0() {
    let out = windstat(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "fit",
        "report",
        "rose",
        "histogram",
        "curve-check",
        "verify",
        "synth",
    ] {
        assert!(text.contains(sub), "help is missing '{sub}'");
    }
}

#[test]
fn missing_input_exits_2() {
    let out = windstat(&["fit", "--input", "/nonexistent/obs.csv"]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn schema_error_exits_2_and_names_the_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    write(
        &path,
        "station,time,speed,dir\na,2001-01-01T00:00:00,3.0,90\n",
    );
    let out = windstat(&["fit", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("station_key"), "{err}");
}

#[test]
fn degenerate_data_exits_2_with_station_context() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.csv");
    let mut text = String::from(HEADER);
    for i in 0..10 {
        text.push_str(&format!("flat,2001-01-01T{i:02}:00:00,4.0,90\n"));
    }
    write(&path, &text);
    let out = windstat(&["fit", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("flat") && err.contains("degenerate"), "{err}");
}

#[test]
fn verify_passes_and_prints_cells() {
    let out = windstat(&["verify"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS thumrait"), "{text}");
    assert!(text.contains("naep tabular"));
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn curve_check_reports_fit_errors() {
    let out = windstat(&["curve-check", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("mad_kw,rmse_kw,max_abs_dev_kw,argmax_speed_mps"));
    assert!(text.contains("11"), "{text}");
}

#[test]
fn synth_fit_report_rose_histogram_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let obs = dir.path().join("obs.csv");
    let out = windstat(&[
        "synth",
        "--station",
        "thumrait",
        "--shape",
        "2.16538",
        "--scale",
        "6.38352",
        "-n",
        "50000",
        "--seed",
        "11",
        "--out",
        obs.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    // fit recovers the generating parameters
    let out = windstat(&["fit", "--input", obs.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    let row = text.lines().nth(1).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[0], "thumrait");
    let shape: f64 = cols[4].parse().unwrap();
    assert!((shape - 2.16538).abs() / 2.16538 < 0.02, "shape {shape}");

    // report tables on stdout, registry altitude applied (467 m station)
    let out = windstat(&[
        "report",
        "--input",
        obs.to_str().unwrap(),
        "--table",
        "corrected",
        "--format",
        "csv",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Thumrait"), "{text}");
    let row = text.lines().nth(1).unwrap();
    let density: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((density - 1.1710).abs() < 5e-4, "density {density}");

    // rose CSV has 36 sectors summing to 1
    let out = windstat(&["rose", "--input", obs.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let sum: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert_eq!(text.lines().count(), 37);
    // the CSV carries 6-significant-digit frequencies
    assert!((sum - 1.0).abs() < 1e-4, "frequency sum {sum}");

    // histogram CSV densities integrate to 1
    let out = windstat(&[
        "histogram",
        "--input",
        obs.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let total: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse::<f64>().unwrap() * 0.5)
        .sum();
    assert!((total - 1.0).abs() < 1e-4, "density integral {total}");

    // SVG outputs are well-formed
    for cmd in ["rose", "histogram"] {
        let args = vec![cmd, "--input", obs.to_str().unwrap(), "--format", "svg"];
        let out = windstat(&args);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn user_curve_and_registry_flow() {
    let dir = tempfile::tempdir().unwrap();

    let curve_path = dir.path().join("curve.csv");
    write(
        &curve_path,
        "speed_mps,power_kw\n0,0\n3,0\n6,300\n9,900\n12,1000\n20,1000\n",
    );
    let out = windstat(&["curve-check", "--curve", curve_path.to_str().unwrap()]);
    // user curves carry no polynomial coefficients
    assert_eq!(out.status.code(), Some(2));

    let bad_curve = dir.path().join("bad_curve.csv");
    write(&bad_curve, "speed_mps,power_kw\n0,0\n5,100\n4,200\n");
    let out = windstat(&["curve-check", "--curve", bad_curve.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let obs = dir.path().join("obs.csv");
    let out = windstat(&[
        "synth",
        "--station",
        "custom",
        "--shape",
        "2.0",
        "--scale",
        "7.0",
        "-n",
        "20000",
        "--seed",
        "3",
        "--out",
        obs.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let registry = dir.path().join("stations.toml");
    write(
        &registry,
        r#"
[[station]]
key = "custom"
name = "Custom Site"
governorate = "Testland"
coastal = false
latitude_deg = 15.0
longitude_deg = 50.0
altitude_m = 1000.0
icao = "XXXX"
"#,
    );
    let out = windstat(&[
        "report",
        "--input",
        obs.to_str().unwrap(),
        "--stations",
        registry.to_str().unwrap(),
        "--curve",
        curve_path.to_str().unwrap(),
        "--table",
        "corrected",
        "--format",
        "csv",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Custom Site"), "{text}");
    // 1000 m altitude: density ratio about 0.9075
    let ratio: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert!((ratio - 0.9075).abs() < 1e-3, "ratio {ratio}");
}

#[test]
fn strict_mode_rejects_bad_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("obs.csv");
    let text = format!(
        "{HEADER}\
         a,2001-01-01T00:00:00,5.0,90\n\
         a,2001-01-01T01:00:00,-2.0,90\n\
         a,2001-01-01T02:00:00,5.5,90\n"
    );
    write(&path, &text);
    let strict = windstat(&["fit", "--input", path.to_str().unwrap(), "--strict"]);
    assert_eq!(strict.status.code(), Some(2));
    let lenient = windstat(&["fit", "--input", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(lenient.status.code(), Some(0));
    let out = String::from_utf8_lossy(&lenient.stdout);
    let cols: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(cols[1], "3"); // n_raw
    assert_eq!(cols[2], "2"); // n_used
    assert_eq!(cols[3], "1"); // n_dropped
}

#[test]
fn multi_station_rose_requires_a_choice() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("obs.csv");
    let text = format!(
        "{HEADER}\
         a,2001-01-01T00:00:00,5.0,90\n\
         b,2001-01-01T00:00:00,6.0,180\n"
    );
    write(&path, &text);
    let out = windstat(&["rose", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = windstat(&["rose", "--input", path.to_str().unwrap(), "--station", "b"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("180 deg (S)"), "{text}");
}
