//! End-to-end runs: register frames onto a planned path, reconstruct, score,
//! and produce the bundled demonstration outputs.
//!
//! Registration convention: the last gauge of a frame's profile sits at the
//! frame's insertion depth along the plan, so the gauge at instrument
//! coordinate `c` sits at plan arc position `depth - (c_last - c)`. Windows
//! that begin behind the entry start on the straight extension of the plan.

use std::path::{Path, PathBuf};

use crate::calibration::CalibrationModel;
use crate::error::{Error, Result};
use crate::io::formats;
use crate::io::plots;
use crate::metrics::{aggregate_trials, shape_error_at_gauges, tip_error_mm, EvaluationReport};
use crate::reconstruction::{
    reconstruct_frame, PlanarShape, Pose2D, DEFAULT_SENSING_LENGTH_MM, DEFAULT_SMOOTHING_WINDOW_MM,
};
use crate::simulator::{
    simulate_series, ComplianceModel, FrameSeries, NoiseModel, DEFAULT_NOISE_SIGMA_UE,
};
use crate::trajectory::{InsertionSchedule, TrajectorySpec, PRESET_LABELS};

/// Half of the guide channel's inner width; used for the wall overlay in
/// shape plots (3.1 mm channel around a 2 mm instrument).
pub const CHANNEL_HALF_WIDTH_MM: f64 = 1.55;

/// One reconstructed frame, with arc positions along the plan when a plan
/// was supplied (instrument-local otherwise).
#[derive(Debug, Clone)]
pub struct ReconstructedFrame {
    pub depth_mm: f64,
    pub shape: PlanarShape,
}

/// Per-frame error pair.
#[derive(Debug, Clone, Copy)]
pub struct FrameErrors {
    pub depth_mm: f64,
    pub tip_error_mm: f64,
    pub shape_error_mm: f64,
}

/// Reconstruct every frame of a series. With `plan`, each window is started
/// from the plan pose at its proximal end and arc positions are shifted to
/// plan coordinates; without, windows start at the identity pose.
pub fn reconstruct_series(
    series: &FrameSeries,
    model: &CalibrationModel,
    smoothing_window_mm: f64,
    sensing_length_mm: f64,
    plan: Option<&TrajectorySpec>,
) -> Result<Vec<ReconstructedFrame>> {
    series.validate()?;
    let mut out = Vec::with_capacity(series.frames.len());
    for frame in &series.frames {
        let profile = &frame.profile;
        let n = profile.samples.len();
        let c_last = profile.gauge_position_mm(n - 1);
        // First gauge inside the window; mirrors the selection rule used by
        // the per-frame reconstruction.
        let slack = 1e-9 * sensing_length_mm.max(1.0);
        let c0 = (0..n)
            .map(|i| profile.gauge_position_mm(i))
            .find(|&s| s >= -slack)
            .ok_or_else(|| {
                Error::domain(format!(
                    "no gauges inside the sensing window [0, {sensing_length_mm}] mm"
                ))
            })?;
        let (start, shift) = match plan {
            Some(spec) => {
                let start_arc = frame.depth_mm - (c_last - c0);
                (spec.pose_at_mm(start_arc)?, frame.depth_mm - c_last)
            }
            None => (Pose2D::identity(), 0.0),
        };
        let mut shape = reconstruct_frame(
            profile,
            model,
            smoothing_window_mm,
            sensing_length_mm,
            start,
        )?;
        if shift != 0.0 {
            shape.shift_arc_positions(shift);
        }
        out.push(ReconstructedFrame {
            depth_mm: frame.depth_mm,
            shape,
        });
    }
    Ok(out)
}

/// Plan poses sampled at the given arc positions.
pub fn plan_truth_at(spec: &TrajectorySpec, positions_mm: &[f64]) -> Result<PlanarShape> {
    let points = positions_mm
        .iter()
        .map(|&s| spec.pose_at_mm(s))
        .collect::<Result<Vec<_>>>()?;
    PlanarShape::new(points, positions_mm.to_vec())
}

/// Score reconstructed frames against the plan. The run-level report
/// averages the per-frame tip and shape errors (one insertion = one trial).
pub fn evaluate_frames(
    frames: &[ReconstructedFrame],
    spec: &TrajectorySpec,
    instrument_length_mm: f64,
) -> Result<(Vec<FrameErrors>, EvaluationReport)> {
    if frames.is_empty() {
        return Err(Error::InsufficientData { got: 0, need: 1 });
    }
    let mut per_frame = Vec::with_capacity(frames.len());
    let mut tip_sum = 0.0;
    let mut shape_sum = 0.0;
    for frame in frames {
        let truth = plan_truth_at(spec, &frame.shape.arc_positions_mm)?;
        let tip = tip_error_mm(&frame.shape, &truth);
        let shape = shape_error_at_gauges(&frame.shape, &truth)?;
        tip_sum += tip;
        shape_sum += shape;
        per_frame.push(FrameErrors {
            depth_mm: frame.depth_mm,
            tip_error_mm: tip,
            shape_error_mm: shape,
        });
    }
    let n = frames.len() as f64;
    let report = EvaluationReport::new(
        spec.label.clone(),
        tip_sum / n,
        shape_sum / n,
        instrument_length_mm,
        1,
    )?;
    Ok((per_frame, report))
}

/// Resolve a trajectory argument: a built-in preset label first, otherwise a
/// path to a trajectory JSON file.
pub fn resolve_trajectory(arg: &str) -> Result<TrajectorySpec> {
    if let Some(spec) = TrajectorySpec::preset(arg) {
        return Ok(spec);
    }
    formats::read_trajectory(Path::new(arg))
}

/// Load a calibration model from JSON, or fall back to the reference model.
pub fn load_calibration(path: Option<&Path>) -> Result<CalibrationModel> {
    match path {
        Some(p) => formats::read_calibration_model(p),
        None => Ok(CalibrationModel::reference()),
    }
}

// ====================================================================
// Demo bundle
// ====================================================================

/// Settings for the bundled demonstration run.
#[derive(Debug, Clone)]
pub struct DemoConfig {
    pub seed: u64,
    pub trials: u32,
    pub smoothing_window_mm: f64,
    pub sensing_length_mm: f64,
    pub gauge_pitch_mm: f64,
    pub output_dir: PathBuf,
}

impl DemoConfig {
    pub fn new(output_dir: impl Into<PathBuf>) -> Self {
        DemoConfig {
            seed: 42,
            trials: 3,
            smoothing_window_mm: DEFAULT_SMOOTHING_WINDOW_MM,
            sensing_length_mm: DEFAULT_SENSING_LENGTH_MM,
            gauge_pitch_mm: crate::reconstruction::DEFAULT_GAUGE_PITCH_MM,
            output_dir: output_dir.into(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::domain("demo needs at least one trial"));
        }
        if !(self.gauge_pitch_mm.is_finite() && self.gauge_pitch_mm > 0.0) {
            return Err(Error::domain(format!(
                "gauge pitch must be positive, got {} mm",
                self.gauge_pitch_mm
            )));
        }
        if !(self.sensing_length_mm.is_finite() && self.sensing_length_mm > 0.0) {
            return Err(Error::domain(format!(
                "sensing length must be positive, got {} mm",
                self.sensing_length_mm
            )));
        }
        Ok(())
    }
}

/// Run every built-in path preset through simulate, reconstruct, and score;
/// write `report.csv`, per-path strain and shape plots, and the preset
/// definitions under `presets/`. Outputs are byte-for-byte reproducible for
/// a given configuration.
pub fn run_demo(config: &DemoConfig) -> Result<Vec<EvaluationReport>> {
    config.validate()?;
    std::fs::create_dir_all(&config.output_dir)?;
    let presets_dir = config.output_dir.join("presets");
    std::fs::create_dir_all(&presets_dir)?;

    let model = CalibrationModel::reference();
    let schedule = InsertionSchedule::default();
    let compliance = ComplianceModel::default();
    let mut reports = Vec::with_capacity(PRESET_LABELS.len());

    for (li, label) in PRESET_LABELS.iter().enumerate() {
        let spec = TrajectorySpec::preset(label).expect("every listed preset resolves");
        let mut trial_reports = Vec::with_capacity(config.trials as usize);
        let mut final_shapes: Vec<PlanarShape> = Vec::with_capacity(config.trials as usize);
        let mut first_series: Option<FrameSeries> = None;

        for trial in 0..config.trials {
            let seed = config
                .seed
                .wrapping_add((li as u64) * config.trials as u64 + trial as u64);
            let series = simulate_series(
                &spec,
                &schedule,
                &model,
                &compliance,
                &NoiseModel {
                    sigma_ue: DEFAULT_NOISE_SIGMA_UE,
                    seed,
                },
                config.sensing_length_mm,
                config.gauge_pitch_mm,
            )?;
            let frames = reconstruct_series(
                &series,
                &model,
                config.smoothing_window_mm,
                config.sensing_length_mm,
                Some(&spec),
            )?;
            let (_, report) = evaluate_frames(&frames, &spec, config.sensing_length_mm)?;
            trial_reports.push(report);
            final_shapes.push(
                frames
                    .last()
                    .expect("schedule yields at least one frame")
                    .shape
                    .clone(),
            );
            if trial == 0 {
                first_series = Some(series);
            }
        }
        reports.push(aggregate_trials(&trial_reports)?);

        let series = first_series.expect("at least one trial ran");
        let strain_svg = plots::strain_plot_svg(&series, &format!("strain frames ({label})"))?;
        plots::write_svg(
            &config.output_dir.join(format!("strain_{label}.svg")),
            &strain_svg,
        )?;

        let plan = spec.centerline(config.gauge_pitch_mm)?;
        let labels: Vec<String> = (0..final_shapes.len())
            .map(|t| format!("trial {t}"))
            .collect();
        let measured: Vec<(&str, &PlanarShape)> = labels
            .iter()
            .map(String::as_str)
            .zip(final_shapes.iter())
            .collect();
        let shape_svg = plots::shape_overlay_svg(
            &measured,
            &plan,
            CHANNEL_HALF_WIDTH_MM,
            &format!("final shapes ({label})"),
        )?;
        plots::write_svg(
            &config.output_dir.join(format!("shape_{label}.svg")),
            &shape_svg,
        )?;

        formats::write_trajectory(&presets_dir.join(format!("{label}.json")), &spec)?;
    }

    formats::write_reports(&config.output_dir.join("report.csv"), &reports)?;
    Ok(reports)
}

// ====================================================================
// Tests
// ====================================================================
