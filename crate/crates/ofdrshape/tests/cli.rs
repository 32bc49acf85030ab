//! End-to-end runs of the command line binary: full workflows over real
//! files plus the exit-code contract (0 ok, 1 usage, 2 bad data, 3 I/O).

use std::path::Path;
use std::process::{Command, Output};

use ofdrshape::calibration::{CalibrationModel, Direction};
use ofdrshape::io::formats;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ofdrshape"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_code(out: &Output, want: i32) {
    assert_eq!(
        out.status.code(),
        Some(want),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

// ====================================================================
// Workflows
// ====================================================================

#[test]
fn calibrate_recovers_the_reference_model_from_jig_samples() {
    let dir = TempDir::new().unwrap();
    let samples_path = dir.path().join("samples.csv");
    let model_path = dir.path().join("model.json");

    // Exact jig data: 14 radii per direction plus straight rows, 1 trial.
    let reference = CalibrationModel::reference();
    let mut samples = Vec::new();
    for i in 0..14 {
        let rho = 35.0 + 5.0 * i as f64;
        samples.push(ofdrshape::calibration::CalibrationSample {
            radius_mm: rho,
            direction: Direction::Pos,
            strain_ue: reference.positive.strain_ue(rho),
            trial: 0,
        });
        samples.push(ofdrshape::calibration::CalibrationSample {
            radius_mm: rho,
            direction: Direction::Neg,
            strain_ue: -reference.negative.strain_ue(rho),
            trial: 0,
        });
    }
    samples.push(ofdrshape::calibration::CalibrationSample {
        radius_mm: f64::INFINITY,
        direction: Direction::Pos,
        strain_ue: 2.0,
        trial: 0,
    });
    formats::write_calibration_samples(&samples_path, &samples).unwrap();

    let out = run(&[
        "calibrate",
        "--samples",
        path_str(&samples_path),
        "--out",
        path_str(&model_path),
    ]);
    assert_code(&out, 0);
    let fitted = formats::read_calibration_model(&model_path).unwrap();
    assert!((fitted.positive.coefficient - reference.positive.coefficient).abs() < 30.0);
    assert!((fitted.positive.exponent - reference.positive.exponent).abs() < 1e-4);
    assert!((fitted.negative.exponent - reference.negative.exponent).abs() < 1e-4);
}

#[test]
fn simulate_reconstruct_evaluate_chain_produces_a_sane_report() {
    let dir = TempDir::new().unwrap();
    let frames = dir.path().join("frames.csv");
    let shapes = dir.path().join("shapes");
    let report = dir.path().join("report.csv");

    let out = run(&[
        "simulate",
        "--trajectory",
        "R121",
        "--seed",
        "7",
        "--out",
        path_str(&frames),
    ]);
    assert_code(&out, 0);
    assert!(frames.exists());
    assert!(formats::metadata_path_for(&frames).exists());

    let out = run(&[
        "reconstruct",
        "--frames",
        path_str(&frames),
        "--trajectory",
        "R121",
        "--out",
        path_str(&shapes),
    ]);
    assert_code(&out, 0);
    // Default schedule on a 65 mm path: depths 10..60 step 10 plus 65.
    let n_shapes = std::fs::read_dir(&shapes).unwrap().count();
    assert_eq!(n_shapes, 7);

    let out = run(&[
        "evaluate",
        "--shapes",
        path_str(&shapes),
        "--trajectory",
        "R121",
        "--out",
        path_str(&report),
    ]);
    assert_code(&out, 0);
    let rows = formats::read_reports(&report, 45.0).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].label, "R121");
    assert!(rows[0].tip_error_mm < 2.0, "tip {}", rows[0].tip_error_mm);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("R121:"), "stdout: {stdout}");
}

#[test]
fn reconstruct_without_a_plan_stays_instrument_local() {
    let dir = TempDir::new().unwrap();
    let frames = dir.path().join("frames.csv");
    let shapes = dir.path().join("shapes");
    assert_code(
        &run(&[
            "simulate",
            "--trajectory",
            "Rinf",
            "--sigma-ue",
            "0",
            "--out",
            path_str(&frames),
        ]),
        0,
    );
    assert_code(
        &run(&[
            "reconstruct",
            "--frames",
            path_str(&frames),
            "--out",
            path_str(&shapes),
        ]),
        0,
    );
    let shape = formats::read_shape(&shapes.join("shape_000.csv")).unwrap();
    assert!((shape.start_arc_mm() - 0.0).abs() < 1e-9);
    assert_eq!(shape.points[0].x_mm, 0.0);
    assert_eq!(shape.points[0].y_mm, 0.0);
}

#[test]
fn replay_emits_every_frame_at_an_accelerated_rate() {
    let dir = TempDir::new().unwrap();
    let frames = dir.path().join("frames.csv");
    assert_code(
        &run(&[
            "simulate",
            "--trajectory",
            "R50",
            "--out",
            path_str(&frames),
        ]),
        0,
    );
    let out = run(&[
        "replay",
        "--frames",
        path_str(&frames),
        "--rate",
        "500",
        "--quiet",
    ]);
    assert_code(&out, 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("emitted 7 frames, dropped 0"),
        "stdout: {stdout}"
    );
}

#[test]
fn demo_writes_report_plots_and_presets() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("demo");
    let out = run(&["demo", "--trials", "1", "--out", path_str(&out_dir)]);
    assert_code(&out, 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    for label in ["R117", "R50", "R39", "Rinf", "R121", "R53", "R46"] {
        assert!(stdout.contains(label), "{label} missing from: {stdout}");
        assert!(out_dir.join(format!("strain_{label}.svg")).exists());
        assert!(out_dir.join(format!("shape_{label}.svg")).exists());
        assert!(out_dir
            .join("presets")
            .join(format!("{label}.json"))
            .exists());
    }
    assert!(out_dir.join("report.csv").exists());
}

// ====================================================================
// Exit codes
// ====================================================================

#[test]
fn usage_errors_exit_1() {
    assert_code(&run(&["no-such-subcommand"]), 1);
    assert_code(&run(&["simulate", "--no-such-flag"]), 1);
    assert_code(&run(&[]), 1);
}

#[test]
fn help_and_version_exit_0() {
    assert_code(&run(&["--help"]), 0);
    assert_code(&run(&["--version"]), 0);
    assert_code(&run(&["simulate", "--help"]), 0);
}

#[test]
fn data_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    // Malformed CSV content is a data error, not an I/O error.
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "radius_mm,direction,strain_ue,trial\nx,pos,1,0\n").unwrap();
    let out_model = dir.path().join("model.json");
    assert_code(
        &run(&[
            "calibrate",
            "--samples",
            path_str(&bad),
            "--out",
            path_str(&out_model),
        ]),
        2,
    );
    // Evaluating an empty directory is a data error too.
    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    assert_code(
        &run(&[
            "evaluate",
            "--shapes",
            path_str(&empty),
            "--trajectory",
            "R50",
            "--out",
            path_str(&dir.path().join("r.csv")),
        ]),
        2,
    );
    // Out-of-range parameter.
    assert_code(
        &run(&[
            "simulate",
            "--trajectory",
            "R50",
            "--attenuation",
            "1.5",
            "--out",
            path_str(&dir.path().join("frames.csv")),
        ]),
        2,
    );
}

#[test]
fn io_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    assert_code(
        &run(&[
            "calibrate",
            "--samples",
            path_str(&dir.path().join("missing.csv")),
            "--out",
            path_str(&dir.path().join("model.json")),
        ]),
        3,
    );
    assert_code(
        &run(&[
            "replay",
            "--frames",
            path_str(&dir.path().join("missing.csv")),
        ]),
        3,
    );
}
