use std::path::Path;
use std::process::{Command, Output};

fn awi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_awi"))
        .args(args)
        .output()
        .expect("failed to spawn awi")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn spectrum_is_byte_identical_across_runs() {
    let args = ["spectrum", "--kappa0", "370", "--scan-n", "201"];
    let a = awi(&args);
    let b = awi(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("# Gamma31 [s^-1] = "));
    assert!(text.contains("delta_p_over_Gamma31,Im_f,Re_f"));
    assert_eq!(data_rows(&text).len(), 201);
}

#[test]
fn out_dir_gets_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = awi(&[
        "spectrum",
        "--kappa0",
        "370",
        "--scan-n",
        "21",
        "--out",
        out.to_str().unwrap(),
        "--plot",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    let svg = std::fs::read_to_string(out.join("spectrum.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));

    // Plotting must not change the numbers.
    let plain = awi(&["spectrum", "--kappa0", "370", "--scan-n", "21"]);
    assert_eq!(csv, stdout(&plain));
}

#[test]
fn populations_for_potassium_at_threshold_minimum() {
    let o = awi(&[
        "populations",
        "--species",
        "K",
        "--kappa0",
        "92",
        "--pressure-torr",
        "3.1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = data_rows(&stdout(&o));
    let deg = rows.iter().find(|r| r[0] == "degenerate").unwrap();
    let r: Vec<f64> = deg[1..5].iter().map(|x| x.parse().unwrap()).collect();
    for (got, want) in r.iter().zip([0.28, 0.50, 0.22]) {
        assert!((got - want).abs() <= 0.05, "{r:?}");
    }
    for row in &rows {
        let sum: f64 = row[4].parse().unwrap();
        assert!((sum - 1.0).abs() < 1e-6);
    }
}

#[test]
fn thresholds_mark_absent_inversion_below_critical_pressure() {
    let o = awi(&[
        "thresholds",
        "--species",
        "Na",
        "--p-min",
        "1",
        "--p-max",
        "1000",
        "--p-n",
        "16",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let critical: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# critical pressure [Torr] = "))
        .unwrap()
        .parse()
        .unwrap();
    for row in data_rows(&text) {
        let p: f64 = row[0].parse().unwrap();
        if p < 0.9 * critical {
            assert_eq!(row[1], "nan");
            assert_eq!(row[3], "0");
        }
        if row[3] == "1" && row[4] == "1" {
            let inv: f64 = row[1].parse().unwrap();
            let gain: f64 = row[2].parse().unwrap();
            assert!(gain <= inv);
        }
    }
}

#[test]
fn validate_passes_on_builtin_catalog() {
    let o = awi(&["validate"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains(" 0 failed"));
}

#[test]
fn conflicting_drive_flags_are_config_errors() {
    let o = awi(&["spectrum", "--kappa0", "1", "--rabi", "1e8"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invalid_values_name_the_field() {
    let o = awi(&["spectrum", "--kappa0", "1", "--pressure-torr", "-3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("pressure-torr"));
    let o = awi(&["spectrum", "--kappa0", "1", "--plot"]);
    assert_eq!(o.status.code(), Some(1));
    let o = awi(&["spectrum"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("drive"));
    let o = awi(&["spectrum", "--kappa0", "1", "--species", "Xe"]);
    assert_eq!(o.status.code(), Some(1));
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn corrupted_catalog_aborts_validation() {
    let dir = tempfile::tempdir().unwrap();
    let good = awi_core::species::DEFAULT_CATALOG;

    let broken = dir.path().join("broken.toml");
    write(&broken, &good.replacen("[species.Na]", "[species.Na", 1));
    let o = awi(&["validate", "--catalog", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let negative = dir.path().join("negative.toml");
    let text = good
        .lines()
        .map(|l| {
            if l.trim_start().starts_with("sigma_23") {
                "sigma_23 = -1.0"
            } else {
                l
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    write(&negative, &text);
    let o = awi(&["validate", "--catalog", negative.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sigma_23"), "{}", stderr(&o));

    let o = awi(&[
        "validate",
        "--catalog",
        dir.path().join("missing.toml").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn doppler_reports_nodes_and_halfwidth() {
    let o = awi(&[
        "doppler",
        "--kappa0",
        "3400",
        "--scan-min",
        "-1",
        "--scan-max",
        "1",
        "--scan-n",
        "5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("# velocity nodes = "));
    assert!(text.contains("# doppler halfwidth [s^-1] = "));
    let centre: f64 = data_rows(&text)[2][1].parse().unwrap();
    assert!(centre < 0.0);
}

#[test]
fn coarse_velocity_grid_is_a_numerical_error() {
    let o = awi(&["doppler", "--kappa0", "3400", "--nodes", "8", "--scan-n", "3"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
