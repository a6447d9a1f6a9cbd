use std::path::{Path, PathBuf};

use siet::bounds::BoundsReport;
use siet::montecarlo::{SimulationReport, ValidationLedger};

fn shipped() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs/reference_16qam.json")
        .to_str()
        .unwrap()
        .to_string()
}

fn run(args: &[&str]) -> i32 {
    siet::cli::run(std::iter::once("siet").chain(args.iter().copied()))
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.json");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const QAM4: &str = r#"{
    "constellation": {"preset": "qam4", "half_spacing": 1.0},
    "sigma2": 1.0, "n": 8, "delta": 0.01,
    "harvester": {"k2": 1.0, "k4": 0.5},
    "trials": 20000, "seed": 3
}"#;

#[test]
fn bounds_on_shipped_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(&["bounds", "--config", &shipped(), "--out", out]), 0);
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report: BoundsReport = serde_json::from_str(&text).unwrap();
    assert!((report.rate_ub_exact - 3.554).abs() < 1e-3);
    assert!(report.reference_rate_discrepancy);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
    assert!(lines[1].contains("3.55395762127"));
}

#[test]
fn missing_constellation_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"sigma2": 2.0, "n": 4, "harvester": {"k2": 1, "k4": 1}}"#,
    );
    assert_eq!(
        run(&[
            "bounds",
            "--config",
            &cfg,
            "--out",
            dir.path().to_str().unwrap()
        ]),
        2
    );
}

#[test]
fn bad_values_and_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = write_config(
        dir.path(),
        &QAM4.replace("\"sigma2\": 1.0", "\"sigma2\": 0.0"),
    );
    assert_eq!(run(&["bounds", "--config", &cfg, "--out", out]), 2);
    assert_eq!(
        run(&["bounds", "--config", &shipped(), "--out", out, "--nope"]),
        2
    );
    assert_eq!(
        run(&["bounds", "--config", "/nonexistent/cfg.json", "--out", out]),
        2
    );
    assert_eq!(
        run(&["simulate", "--config", &shipped(), "--out", out, "--B=-1"]),
        2
    );
}

#[test]
fn too_many_messages_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &QAM4.replace("\"n\": 8", "\"n\": 2, \"messages\": 100"),
    );
    assert_eq!(
        run(&[
            "simulate",
            "--config",
            &cfg,
            "--out",
            dir.path().to_str().unwrap()
        ]),
        3
    );
}

#[test]
fn zero_threshold_never_outages() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QAM4);
    let out = dir.path().join("sim");
    let codebook = dir.path().join("codebook.csv");
    let code = run(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--B",
        "0",
        "--codebook",
        codebook.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report: SimulationReport =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let eop = report.eop.unwrap();
    assert_eq!(eop.eop_hat, 0.0);
    assert_eq!(eop.outages, 0);
    assert!(report.dep.consistent());
    let book = std::fs::read_to_string(codebook).unwrap();
    assert_eq!(book.lines().next().unwrap(), "message_id,t,symbol_index");
    assert_eq!(book.lines().count(), 1 + report.messages as usize * 8);
}

#[test]
fn validate_passes_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QAM4);
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        run(&["validate", "--config", &cfg, "--out", out]),
        2,
        "B is required"
    );
    assert_eq!(
        run(&["validate", "--config", &cfg, "--out", out, "--B", "2.5"]),
        0
    );
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let ledger: ValidationLedger = serde_json::from_str(&text).unwrap();
    assert!(ledger.all_passed());
    assert_eq!(serde_json::to_string_pretty(&ledger).unwrap() + "\n", text);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + ledger.checks.len());
}

#[test]
fn frontier_modes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &QAM4.replace("\"n\": 8", "\"n\": 6, \"lambda_points\": 5, \"deltas\": [0.0, 0.5], \"dep_targets\": [0.1, 0.5, 1.0]"),
    );
    for (mode, rows) in [("family", 10), ("dep-curve", 3), ("exhaustive", 84)] {
        let out = dir.path().join(mode);
        let code = run(&[
            "frontier",
            "--config",
            &cfg,
            "--mode",
            mode,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{mode}");
        let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with(
            "lambda,p_1,p_2,p_3,p_4,rate_ub_exact,rate_ub_stirling,energy_ub,dep_lb,delta"
        ));
        assert_eq!(lines.count(), rows, "{mode}");
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap())
                .unwrap();
        assert_eq!(json["schema_version"], 1);
    }
}
