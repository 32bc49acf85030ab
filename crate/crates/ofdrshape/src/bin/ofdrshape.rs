//! Command line front end: calibrate, simulate, reconstruct, evaluate,
//! replay, and the all-in-one demo.
//!
//! Exit codes: 0 success, 1 usage, 2 bad data or parameters, 3 I/O failure.
//! Set `OFDRSHAPE_LOG=debug` (or any `env_logger` filter) for diagnostics.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use log::info;

use ofdrshape::calibration::{fit_calibration_model, DEFAULT_DEAD_ZONE_UE};
use ofdrshape::error::Error;
use ofdrshape::io::{self, formats};
use ofdrshape::pipeline::{self, DemoConfig, ReconstructedFrame};
use ofdrshape::reconstruction::{
    DEFAULT_GAUGE_PITCH_MM, DEFAULT_SENSING_LENGTH_MM, DEFAULT_SMOOTHING_WINDOW_MM,
};
use ofdrshape::simulator::{
    simulate_series, ComplianceModel, NoiseModel, DEFAULT_ATTENUATION, DEFAULT_NOISE_SIGMA_UE,
    DEFAULT_RAMP_LENGTH_MM,
};
use ofdrshape::trajectory::InsertionSchedule;

#[derive(Parser)]
#[command(
    name = "ofdrshape",
    version,
    about = "Shape sensing for a flexible instrument from distributed fiber strain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit strain-to-radius power laws from bend-jig samples.
    Calibrate {
        /// Samples CSV with header radius_mm,direction,strain_ue,trial.
        #[arg(long)]
        samples: PathBuf,
        /// Dead zone half-width in microstrain.
        #[arg(long, default_value_t = DEFAULT_DEAD_ZONE_UE)]
        dead_zone_ue: f64,
        /// Output calibration model JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate an insertion and write a frame series with metadata sidecar.
    Simulate {
        /// Preset label (R117, R50, R39, Rinf, R121, R53, R46) or a
        /// trajectory JSON path.
        #[arg(long)]
        trajectory: String,
        /// Calibration model JSON; defaults to the reference model.
        #[arg(long)]
        calibration: Option<PathBuf>,
        /// Fraction of the channel's curvature the instrument takes on.
        #[arg(long, default_value_t = DEFAULT_ATTENUATION)]
        attenuation: f64,
        /// Length of the gradual strain transition at curvature changes.
        #[arg(long, default_value_t = DEFAULT_RAMP_LENGTH_MM)]
        ramp_mm: f64,
        /// Gaussian strain noise, microstrain.
        #[arg(long, default_value_t = DEFAULT_NOISE_SIGMA_UE)]
        sigma_ue: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Depth step between frames.
        #[arg(long, default_value_t = 10.0)]
        increment_mm: f64,
        /// Feed rate used for timestamps.
        #[arg(long, default_value_t = 1.5)]
        speed_mm_s: f64,
        #[arg(long, default_value_t = DEFAULT_SENSING_LENGTH_MM)]
        sensing_length_mm: f64,
        #[arg(long, default_value_t = DEFAULT_GAUGE_PITCH_MM)]
        gauge_pitch_mm: f64,
        /// Output frames CSV (the sidecar lands next to it).
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct one shape CSV per frame from a frame series.
    Reconstruct {
        /// Frames CSV with its <stem>.meta.json sidecar.
        #[arg(long)]
        frames: PathBuf,
        /// Calibration model JSON; defaults to the one in the sidecar.
        #[arg(long)]
        calibration: Option<PathBuf>,
        /// Plan to register against (preset label or JSON path). Without
        /// it, shapes stay in instrument-local coordinates.
        #[arg(long)]
        trajectory: Option<String>,
        /// Frames CSV whose first frame is subtracted as an unloaded
        /// baseline before reconstruction.
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// Centered smoothing window applied to each profile.
        #[arg(long, default_value_t = DEFAULT_SMOOTHING_WINDOW_MM)]
        window_mm: f64,
        /// Override the sensing window length from the sidecar.
        #[arg(long)]
        sensing_length_mm: Option<f64>,
        /// Output directory for shape_NNN.csv files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score reconstructed shapes against a plan and write a report row.
    Evaluate {
        /// Directory of shape_NNN.csv files registered onto the plan.
        #[arg(long)]
        shapes: PathBuf,
        /// Plan the shapes were registered against.
        #[arg(long)]
        trajectory: String,
        /// Instrument length used to express errors as percentages.
        #[arg(long, default_value_t = DEFAULT_SENSING_LENGTH_MM)]
        sensing_length_mm: f64,
        /// Report CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a stored frame series in real time through a bounded queue.
    Replay {
        #[arg(long)]
        frames: PathBuf,
        /// Frames per second; defaults to the rate stored in the sidecar.
        #[arg(long)]
        rate: Option<f64>,
        /// Print only the final summary.
        #[arg(long)]
        quiet: bool,
    },
    /// Run every built-in preset end to end: simulate, reconstruct, score,
    /// and write report.csv plus strain and shape plots.
    Demo {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Simulated insertions per preset.
        #[arg(long, default_value_t = 3)]
        trials: u32,
        #[arg(long, default_value_t = DEFAULT_SMOOTHING_WINDOW_MM)]
        window_mm: f64,
        #[arg(long, default_value_t = DEFAULT_GAUGE_PITCH_MM)]
        gauge_pitch_mm: f64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("OFDRSHAPE_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        let code = match e {
            Error::Io(_) => 3,
            _ => 2,
        };
        std::process::exit(code);
    }
}

fn run(command: Command) -> ofdrshape::Result<()> {
    match command {
        Command::Calibrate {
            samples,
            dead_zone_ue,
            out,
        } => calibrate(&samples, dead_zone_ue, &out),
        Command::Simulate {
            trajectory,
            calibration,
            attenuation,
            ramp_mm,
            sigma_ue,
            seed,
            increment_mm,
            speed_mm_s,
            sensing_length_mm,
            gauge_pitch_mm,
            out,
        } => simulate(
            &trajectory,
            calibration.as_deref(),
            attenuation,
            ramp_mm,
            sigma_ue,
            seed,
            increment_mm,
            speed_mm_s,
            sensing_length_mm,
            gauge_pitch_mm,
            &out,
        ),
        Command::Reconstruct {
            frames,
            calibration,
            trajectory,
            baseline,
            window_mm,
            sensing_length_mm,
            out,
        } => reconstruct(
            &frames,
            calibration.as_deref(),
            trajectory.as_deref(),
            baseline.as_deref(),
            window_mm,
            sensing_length_mm,
            &out,
        ),
        Command::Evaluate {
            shapes,
            trajectory,
            sensing_length_mm,
            out,
        } => evaluate(&shapes, &trajectory, sensing_length_mm, &out),
        Command::Replay {
            frames,
            rate,
            quiet,
        } => replay(&frames, rate, quiet),
        Command::Demo {
            seed,
            trials,
            window_mm,
            gauge_pitch_mm,
            out,
        } => demo(seed, trials, window_mm, gauge_pitch_mm, &out),
    }
}

fn calibrate(samples: &Path, dead_zone_ue: f64, out: &Path) -> ofdrshape::Result<()> {
    let rows = formats::read_calibration_samples(samples)?;
    info!("fitting {} samples", rows.len());
    let model = fit_calibration_model(&rows, dead_zone_ue)?;
    formats::write_calibration_model(out, &model)?;
    println!(
        "positive bends: radius = {:.4} * strain^({:.6})",
        model.positive.coefficient, model.positive.exponent
    );
    println!(
        "negative bends: radius = {:.4} * |strain|^({:.6})",
        model.negative.coefficient, model.negative.exponent
    );
    println!("dead zone: +/-{} ue", model.dead_zone_ue);
    println!("wrote {}", out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    trajectory: &str,
    calibration: Option<&Path>,
    attenuation: f64,
    ramp_mm: f64,
    sigma_ue: f64,
    seed: u64,
    increment_mm: f64,
    speed_mm_s: f64,
    sensing_length_mm: f64,
    gauge_pitch_mm: f64,
    out: &Path,
) -> ofdrshape::Result<()> {
    let spec = pipeline::resolve_trajectory(trajectory)?;
    let model = pipeline::load_calibration(calibration)?;
    let schedule = InsertionSchedule::new(increment_mm, speed_mm_s)?;
    let compliance = ComplianceModel {
        attenuation,
        ramp_length_mm: ramp_mm,
    };
    let noise = NoiseModel::new(sigma_ue, seed)?;
    let series = simulate_series(
        &spec,
        &schedule,
        &model,
        &compliance,
        &noise,
        sensing_length_mm,
        gauge_pitch_mm,
    )?;
    let metadata = formats::SeriesMetadata {
        rate_hz: series.rate_hz,
        gauge_pitch_mm,
        origin_offset_mm: series.frames[0].profile.origin_offset_mm,
        sensing_length_mm,
        seed,
        sigma_ue,
        speed_mm_s,
        attenuation,
        ramp_length_mm: ramp_mm,
        trajectory_label: Some(spec.label.clone()),
        calibration: model,
    };
    formats::write_frame_series(out, &series, &metadata)?;
    println!(
        "wrote {} frames ({} gauges each) to {}",
        series.frames.len(),
        series.frames[0].profile.samples.len(),
        out.display()
    );
    Ok(())
}

fn reconstruct(
    frames: &Path,
    calibration: Option<&Path>,
    trajectory: Option<&str>,
    baseline: Option<&Path>,
    window_mm: f64,
    sensing_length_mm: Option<f64>,
    out: &Path,
) -> ofdrshape::Result<()> {
    let (mut series, metadata) = formats::read_frame_series(frames)?;
    if let Some(b) = baseline {
        let (base, _) = formats::read_frame_series(b)?;
        series = io::tare(&series, &base.frames[0].profile)?;
        info!("tared against first frame of {}", b.display());
    }
    let model = match calibration {
        Some(p) => formats::read_calibration_model(p)?,
        None => metadata.calibration,
    };
    let plan = trajectory.map(pipeline::resolve_trajectory).transpose()?;
    let sensing = sensing_length_mm.unwrap_or(metadata.sensing_length_mm);
    let shapes = pipeline::reconstruct_series(&series, &model, window_mm, sensing, plan.as_ref())?;
    std::fs::create_dir_all(out)?;
    for (i, frame) in shapes.iter().enumerate() {
        formats::write_shape(&out.join(format!("shape_{i:03}.csv")), &frame.shape)?;
    }
    println!("wrote {} shapes to {}", shapes.len(), out.display());
    Ok(())
}

fn evaluate(
    shapes_dir: &Path,
    trajectory: &str,
    sensing_length_mm: f64,
    out: &Path,
) -> ofdrshape::Result<()> {
    let spec = pipeline::resolve_trajectory(trajectory)?;
    let mut paths: Vec<PathBuf> = std::fs::read_dir(shapes_dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .map(|n| n.starts_with("shape_") && n.ends_with(".csv"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::domain(format!(
            "no shape_*.csv files in {}",
            shapes_dir.display()
        )));
    }
    let mut frames = Vec::with_capacity(paths.len());
    for p in &paths {
        let shape = formats::read_shape(p)?;
        frames.push(ReconstructedFrame {
            depth_mm: shape.end_arc_mm(),
            shape,
        });
    }
    let (per_frame, report) = pipeline::evaluate_frames(&frames, &spec, sensing_length_mm)?;
    for fe in &per_frame {
        println!(
            "depth {:7.2} mm   tip {:7.3} mm   shape {:7.3} mm",
            fe.depth_mm, fe.tip_error_mm, fe.shape_error_mm
        );
    }
    println!(
        "{}: tip {:.3} mm ({:.2}%)   shape {:.3} mm ({:.2}%)",
        report.label,
        report.tip_error_mm,
        report.tip_error_pct,
        report.shape_error_mm,
        report.shape_error_pct
    );
    formats::write_reports(out, &[report])?;
    println!("wrote {}", out.display());
    Ok(())
}

fn replay(frames: &Path, rate: Option<f64>, quiet: bool) -> ofdrshape::Result<()> {
    let (series, metadata) = formats::read_frame_series(frames)?;
    let rate = rate.unwrap_or(metadata.rate_hz);
    let report = io::replay(&series, rate, |idx, frame| {
        if !quiet {
            println!(
                "frame {idx:4}   depth {:7.2} mm   t {:7.3} s",
                frame.depth_mm, frame.profile.timestamp_s
            );
        }
        Ok(())
    })?;
    println!(
        "emitted {} frames, dropped {}, {:.3} s at {} Hz, jitter mean {:.2} ms max {:.2} ms",
        report.frames_emitted,
        report.frames_dropped,
        report.elapsed_s,
        rate,
        report.mean_abs_jitter_ms,
        report.max_abs_jitter_ms
    );
    Ok(())
}

fn demo(
    seed: u64,
    trials: u32,
    window_mm: f64,
    gauge_pitch_mm: f64,
    out: &Path,
) -> ofdrshape::Result<()> {
    let mut config = DemoConfig::new(out);
    config.seed = seed;
    config.trials = trials;
    config.smoothing_window_mm = window_mm;
    config.gauge_pitch_mm = gauge_pitch_mm;
    let reports = pipeline::run_demo(&config)?;
    println!(
        "{:<6} {:>8} {:>7} {:>9} {:>8} {:>7}",
        "path", "tip mm", "tip %", "shape mm", "shape %", "trials"
    );
    for r in &reports {
        println!(
            "{:<6} {:>8.3} {:>7.2} {:>9.3} {:>8.2} {:>7}",
            r.label, r.tip_error_mm, r.tip_error_pct, r.shape_error_mm, r.shape_error_pct, r.trials
        );
    }
    println!("outputs in {}", out.display());
    Ok(())
}
