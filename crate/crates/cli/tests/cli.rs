use std::path::Path;
use std::process::{Command, Output};

use tumorlevy_cli::csvout::parse_rows;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tumorlevy"));
    c.env_remove("TUMORLEVY_WORKERS").env("RUST_LOG", "error");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn column_header(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).unwrap()
}

#[test]
fn met_defaults_have_501_rows_with_zero_ends() {
    let csv = stdout(&["met"]);
    assert_eq!(column_header(&csv), "x,u");
    let rows = parse_rows(&csv);
    assert_eq!(rows.len(), 501);
    assert_eq!(rows[0], vec![0.0, 0.0]);
    assert_eq!(rows[500], vec![5.0, 0.0]);
    assert!(rows[1..500].iter().all(|r| r[1] > 0.0));
    assert!(csv.contains("# schema: tumorlevy-csv/1"));
    assert!(!csv.contains('\r'));
}

#[test]
fn met_is_byte_identical_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    stdout(&["met", "--eps", "0.3", "--out", p1.to_str().unwrap()]);
    stdout(&["met", "--eps", "0.3", "--out", p2.to_str().unwrap(), "--workers", "1"]);
    let (a, b) = (std::fs::read_to_string(&p1).unwrap(), std::fs::read_to_string(&p2).unwrap());
    assert!(a == b, "outputs differ");
}

#[test]
fn echoed_config_reproduces_the_run() {
    let csv = stdout(&["met", "--a", "0.25", "--alpha", "1.1", "--h", "0.05"]);
    let json = csv
        .lines()
        .find_map(|l| l.strip_prefix("# config: "))
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, json).unwrap();
    assert_eq!(stdout(&["met", "--config", cfg.to_str().unwrap()]), csv);
}

#[test]
fn escape_endpoints_and_duality() {
    let left = parse_rows(&stdout(&["escape", "--target", "left", "--h", "0.02"]));
    let right = parse_rows(&stdout(&["escape", "--target", "right", "--h", "0.02"]));
    assert_eq!(left.first().unwrap()[1], 1.0);
    assert_eq!(left.last().unwrap()[1], 0.0);
    assert_eq!(right.first().unwrap()[1], 0.0);
    assert_eq!(right.last().unwrap()[1], 1.0);
    for (l, r) in left.iter().zip(&right) {
        assert_eq!(l[0], r[0]);
        // 12 printed digits bound the check here
        assert!((l[1] + r[1] - 1.0).abs() < 1e-10, "{l:?} {r:?}");
    }
}

#[test]
fn symmetric_escape_is_one_half_at_center() {
    let csv = stdout(&["escape", "--drift", "zero", "--c=-2", "--d", "2", "--a", "0.3", "--eps", "0.7", "--alpha", "0.8"]);
    let rows = parse_rows(&csv);
    let center = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!((center[1] - 0.5).abs() < 1e-6, "{center:?}");
}

#[test]
fn single_value_sweep_matches_met() {
    let met = parse_rows(&stdout(&["met", "--h", "0.025", "--eps", "0.3"]));
    let sweep = stdout(&["sweep", "--h", "0.025", "--param", "epsilon", "--values", "0.3"]);
    assert_eq!(column_header(&sweep), "swept_value,x,value");
    let rows = parse_rows(&sweep);
    assert_eq!(rows.len(), met.len());
    for (s, m) in rows.iter().zip(&met) {
        assert_eq!(s[0], 0.3);
        assert_eq!(&s[1..], &m[..]);
    }
}

#[test]
fn eps_sweep_gives_four_curves_decreasing_at_probe() {
    let csv = stdout(&[
        "sweep", "--a", "0", "--alpha", "1.0", "--param", "epsilon", "--values", "0.1,0.3,0.5,0.7",
    ]);
    let rows = parse_rows(&csv);
    assert_eq!(rows.len(), 4 * 501);
    let at_probe: Vec<f64> = rows
        .iter()
        .filter(|r| (r[1] - 2.5).abs() < 1e-9)
        .map(|r| r[2])
        .collect();
    assert_eq!(at_probe.len(), 4);
    assert!(at_probe.windows(2).all(|w| w[1] < w[0]), "{at_probe:?}");
}

#[test]
fn x0_sweep_reports_nearest_node_values() {
    let met = parse_rows(&stdout(&["met", "--h", "0.05"]));
    let rows = parse_rows(&stdout(&["sweep", "--h", "0.05", "--param", "x0", "--values", "1,2.5"]));
    assert_eq!(rows.len(), 2);
    let at = |x: f64| met.iter().find(|r| (r[0] - x).abs() < 1e-9).unwrap()[1];
    assert_eq!(rows[0], vec![1.0, 1.0, at(1.0)]);
    assert_eq!(rows[1], vec![2.5, 2.5, at(2.5)]);
}

#[test]
fn invalid_sweep_value_is_a_config_error() {
    let out = run(&["sweep", "--param", "alpha", "--values", "0.5,2.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn figure_fig3_writes_four_panels() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f3");
    stdout(&["figure", "fig3", "--h", "0.05", "--out", out.to_str().unwrap()]);
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["fig3a.csv", "fig3b.csv", "fig3c.csv", "fig3d.csv"]);
    for (name, alpha) in [("fig3a.csv", "0.1"), ("fig3c.csv", "1")] {
        let text = std::fs::read_to_string(Path::new(&out).join(name)).unwrap();
        assert!(text.contains(&format!("a=0 alpha={alpha}")), "{name}");
        assert!(text.contains("default set"));
        assert_eq!(parse_rows(&text).len(), 4 * 101);
    }
}

#[test]
fn figure_svg_alongside_csv() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&["figure", "fig11", "--h", "0.05", "--format", "svg", "--out", dir.path().to_str().unwrap()]);
    assert!(dir.path().join("fig11d.svg").exists());
    assert!(dir.path().join("fig11d.csv").exists());
}

#[test]
fn mc_report_is_single_line_and_repeatable() {
    let args = ["mc", "--h", "0.05", "--dt", "1e-3", "--paths", "500", "--seed", "3", "--x0", "2.5"];
    let a = stdout(&args);
    assert_eq!(a.lines().count(), 1);
    assert!(a.contains("estimate=") && a.contains("solver=") && a.contains("z="));
    let b = bin()
        .args(args)
        .env("TUMORLEVY_WORKERS", "1")
        .output()
        .unwrap();
    assert_eq!(a.as_bytes(), &b.stdout[..]);
}

#[test]
fn mc_symmetric_escape_within_three_se() {
    let line = stdout(&[
        "mc", "--quantity", "escape", "--drift", "zero", "--c=-1", "--d", "1", "--h", "0.02",
        "--a", "0", "--eps", "1", "--alpha", "1.2", "--x0", "0", "--paths", "3000", "--seed", "5",
    ]);
    let field = |k: &str| -> f64 {
        line.split_whitespace()
            .find_map(|t| t.strip_prefix(&format!("{k}=")))
            .unwrap()
            .parse()
            .unwrap()
    };
    let z = (field("estimate") - 0.5) / field("stderr");
    assert!(z.abs() <= 3.0, "{line}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["met", "--h", "0.003"]).status.code(), Some(2));
    assert_eq!(run(&["met", "--alpha", "2.5"]).status.code(), Some(2));
    assert_eq!(run(&["figure", "fig1"]).status.code(), Some(2));
    assert_eq!(run(&["met", "--bogus"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"noise": {"gamma": 1}}"#).unwrap();
    assert_eq!(run(&["met", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let out = bin().args(["met"]).env("TUMORLEVY_WORKERS", "lots").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_fault_injection_names_zeta_check() {
    let out = run(&["validate", "--skip-slow", "--inject-fault", "zeta"]);
    assert_eq!(out.status.code(), Some(1));
    let report = String::from_utf8(out.stdout).unwrap();
    let failed: Vec<&str> = report.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert!(failed.iter().any(|l| l.contains("special.zeta-known-values")));
    assert!(failed.iter().all(|l| l.contains("zeta")), "{failed:?}");
}

#[test]
fn validate_fast_suite_passes_with_measured_and_expected() {
    let out = run(&["validate", "--skip-slow"]);
    let report = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{report}");
    for line in report.lines().filter(|l| l.starts_with("PASS")) {
        assert!(line.contains("measured:") && line.contains("expected:"), "{line}");
    }
}
