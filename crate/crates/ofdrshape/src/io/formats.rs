//! File formats: CSV for tabular data, JSON for models and trajectories.
//!
//! Floats are written with 12 significant digits, so every value survives a
//! write-then-read round trip within one part in 1e9. The straight jig slot
//! is spelled `inf` in the radius column.
//!
//! Formats:
//! - calibration samples CSV: `radius_mm,direction,strain_ue,trial`
//! - calibration model JSON: `{"positive":{"a","b"},"negative":{...},"dead_zone_ue"}`
//! - trajectory JSON: `{"label","segments":[{"kind","length_mm","radius_mm"?}]}`
//! - frame series CSV: `frame_idx,depth_mm,s_mm,strain_ue` plus a JSON
//!   metadata sidecar (`<stem>.meta.json`)
//! - shape CSV: `s_mm,x_mm,y_mm,theta_rad`
//! - report CSV: `label,tip_mm,tip_pct,shape_mm,shape_pct,trials`

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calibration::{CalibrationModel, CalibrationSample, Direction};
use crate::error::{Error, Result};
use crate::metrics::EvaluationReport;
use crate::reconstruction::{PlanarShape, Pose2D, StrainProfile};
use crate::simulator::{Frame, FrameSeries};
use crate::trajectory::TrajectorySpec;

/// Format a float with 12 significant digits.
pub fn fmt_sig(value: f64) -> String {
    if value.is_infinite() {
        return if value > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    format!("{value:.11e}")
}

fn parse_f64(field: &str, row: usize, column: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::format(format!("row {row}: cannot parse {column} from {field:?}")))
}

fn open_reader(path: &Path) -> Result<csv::Reader<BufReader<File>>> {
    let file = File::open(path)?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(file)))
}

fn open_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path)?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn record_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::format(format!("csv error: {other:?}")),
        }
    } else {
        Error::format(format!("csv error: {e}"))
    }
}

fn check_header(actual: &csv::StringRecord, expected: &[&str], path: &Path) -> Result<()> {
    let actual: Vec<&str> = actual.iter().map(|f| f.trim()).collect();
    if actual != expected {
        return Err(Error::format(format!(
            "{}: expected header {:?}, got {:?}",
            path.display(),
            expected.join(","),
            actual.join(",")
        )));
    }
    Ok(())
}

// ====================================================================
// Calibration samples
// ====================================================================

pub fn write_calibration_samples(path: &Path, samples: &[CalibrationSample]) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record(["radius_mm", "direction", "strain_ue", "trial"])
        .map_err(record_error)?;
    for s in samples {
        w.write_record([
            fmt_sig(s.radius_mm),
            s.direction.as_str().to_string(),
            fmt_sig(s.strain_ue),
            s.trial.to_string(),
        ])
        .map_err(record_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_calibration_samples(path: &Path) -> Result<Vec<CalibrationSample>> {
    let mut r = open_reader(path)?;
    check_header(
        r.headers().map_err(record_error)?,
        &["radius_mm", "direction", "strain_ue", "trial"],
        path,
    )?;
    let mut samples = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(record_error)?;
        let row = i + 2;
        if record.len() != 4 {
            return Err(Error::format(format!(
                "row {row}: expected 4 fields, got {}",
                record.len()
            )));
        }
        samples.push(CalibrationSample {
            radius_mm: parse_f64(&record[0], row, "radius_mm")?,
            direction: Direction::parse(record[1].trim())?,
            strain_ue: parse_f64(&record[2], row, "strain_ue")?,
            trial: record[3].trim().parse::<u32>().map_err(|_| {
                Error::format(format!(
                    "row {row}: cannot parse trial from {:?}",
                    &record[3]
                ))
            })?,
        });
    }
    Ok(samples)
}

// ====================================================================
// JSON models
// ====================================================================

pub fn write_calibration_model(path: &Path, model: &CalibrationModel) -> Result<()> {
    model.validate()?;
    write_json(path, model)
}

pub fn read_calibration_model(path: &Path) -> Result<CalibrationModel> {
    let model: CalibrationModel = read_json(path)?;
    model.validate()?;
    Ok(model)
}

pub fn write_trajectory(path: &Path, spec: &TrajectorySpec) -> Result<()> {
    spec.validate()?;
    write_json(path, spec)
}

pub fn read_trajectory(path: &Path) -> Result<TrajectorySpec> {
    let spec: TrajectorySpec = read_json(path)?;
    spec.validate()?;
    Ok(spec)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let file = File::open(path)?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))
}

// ====================================================================
// Frame series
// ====================================================================

/// Sidecar describing how a frame series was produced. `speed_mm_s` restores
/// per-frame timestamps (`depth / speed`) on read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMetadata {
    pub rate_hz: f64,
    pub gauge_pitch_mm: f64,
    pub origin_offset_mm: f64,
    pub sensing_length_mm: f64,
    pub seed: u64,
    pub sigma_ue: f64,
    pub speed_mm_s: f64,
    pub attenuation: f64,
    pub ramp_length_mm: f64,
    pub trajectory_label: Option<String>,
    pub calibration: CalibrationModel,
}

/// Sidecar path convention: `frames.csv` -> `frames.meta.json`.
pub fn metadata_path_for(csv_path: &Path) -> PathBuf {
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "frames".into());
    csv_path.with_file_name(format!("{stem}.meta.json"))
}

pub fn write_frame_series(
    csv_path: &Path,
    series: &FrameSeries,
    metadata: &SeriesMetadata,
) -> Result<()> {
    series.validate()?;
    let mut w = open_writer(csv_path)?;
    w.write_record(["frame_idx", "depth_mm", "s_mm", "strain_ue"])
        .map_err(record_error)?;
    for (idx, frame) in series.frames.iter().enumerate() {
        for (g, &strain) in frame.profile.samples.iter().enumerate() {
            w.write_record([
                idx.to_string(),
                fmt_sig(frame.depth_mm),
                fmt_sig(frame.profile.gauge_position_mm(g)),
                fmt_sig(strain),
            ])
            .map_err(record_error)?;
        }
    }
    w.flush()?;
    write_json(&metadata_path_for(csv_path), metadata)
}

pub fn read_frame_series(csv_path: &Path) -> Result<(FrameSeries, SeriesMetadata)> {
    let metadata: SeriesMetadata = read_json(&metadata_path_for(csv_path))?;
    let mut r = open_reader(csv_path)?;
    check_header(
        r.headers().map_err(record_error)?,
        &["frame_idx", "depth_mm", "s_mm", "strain_ue"],
        csv_path,
    )?;

    let mut frames: Vec<Frame> = Vec::new();
    let mut current: Option<(usize, f64, Vec<f64>)> = None;
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(record_error)?;
        let row = i + 2;
        if record.len() != 4 {
            return Err(Error::format(format!(
                "row {row}: expected 4 fields, got {}",
                record.len()
            )));
        }
        let idx = record[0].trim().parse::<usize>().map_err(|_| {
            Error::format(format!(
                "row {row}: cannot parse frame_idx from {:?}",
                &record[0]
            ))
        })?;
        let depth = parse_f64(&record[1], row, "depth_mm")?;
        let s = parse_f64(&record[2], row, "s_mm")?;
        let strain = parse_f64(&record[3], row, "strain_ue")?;

        let flush_needed = match &current {
            Some((ci, _, _)) => *ci != idx,
            None => false,
        };
        if flush_needed {
            let (ci, cd, samples) = current.take().expect("current is set");
            frames.push(build_frame(ci, cd, samples, &metadata, frames.len())?);
        }
        match &mut current {
            Some((_, cd, samples)) => {
                if (*cd - depth).abs() > 1e-9 {
                    return Err(Error::format(format!(
                        "row {row}: frame {idx} mixes depths {cd} and {depth}"
                    )));
                }
                let expected =
                    metadata.origin_offset_mm + samples.len() as f64 * metadata.gauge_pitch_mm;
                if (s - expected).abs() > 1e-6 {
                    return Err(Error::format(format!(
                        "row {row}: gauge position {s} does not sit on the grid (expected {expected})"
                    )));
                }
                samples.push(strain);
            }
            None => {
                if idx != frames.len() {
                    return Err(Error::format(format!(
                        "row {row}: frame indices must be contiguous from 0, got {idx}"
                    )));
                }
                if (s - metadata.origin_offset_mm).abs() > 1e-6 {
                    return Err(Error::format(format!(
                        "row {row}: first gauge at {s}, metadata says {}",
                        metadata.origin_offset_mm
                    )));
                }
                current = Some((idx, depth, vec![strain]));
            }
        }
    }
    if let Some((ci, cd, samples)) = current.take() {
        frames.push(build_frame(ci, cd, samples, &metadata, frames.len())?);
    }
    if frames.is_empty() {
        return Err(Error::format(format!(
            "{}: no frame rows",
            csv_path.display()
        )));
    }
    Ok((FrameSeries::new(frames, metadata.rate_hz)?, metadata))
}

fn build_frame(
    idx: usize,
    depth: f64,
    samples: Vec<f64>,
    metadata: &SeriesMetadata,
    expected_idx: usize,
) -> Result<Frame> {
    if idx != expected_idx {
        return Err(Error::format(format!(
            "frame indices must be contiguous from 0, got {idx} where {expected_idx} expected"
        )));
    }
    let timestamp = if metadata.speed_mm_s > 0.0 {
        depth / metadata.speed_mm_s
    } else {
        0.0
    };
    Ok(Frame {
        depth_mm: depth,
        profile: StrainProfile::new(
            metadata.gauge_pitch_mm,
            metadata.origin_offset_mm,
            samples,
            timestamp,
        )?,
    })
}

// ====================================================================
// Shapes
// ====================================================================

pub fn write_shape(path: &Path, shape: &PlanarShape) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record(["s_mm", "x_mm", "y_mm", "theta_rad"])
        .map_err(record_error)?;
    for (p, &s) in shape.points.iter().zip(&shape.arc_positions_mm) {
        w.write_record([
            fmt_sig(s),
            fmt_sig(p.x_mm),
            fmt_sig(p.y_mm),
            fmt_sig(p.theta_rad),
        ])
        .map_err(record_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_shape(path: &Path) -> Result<PlanarShape> {
    let mut r = open_reader(path)?;
    check_header(
        r.headers().map_err(record_error)?,
        &["s_mm", "x_mm", "y_mm", "theta_rad"],
        path,
    )?;
    let mut points = Vec::new();
    let mut positions = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(record_error)?;
        let row = i + 2;
        if record.len() != 4 {
            return Err(Error::format(format!(
                "row {row}: expected 4 fields, got {}",
                record.len()
            )));
        }
        positions.push(parse_f64(&record[0], row, "s_mm")?);
        points.push(Pose2D {
            x_mm: parse_f64(&record[1], row, "x_mm")?,
            y_mm: parse_f64(&record[2], row, "y_mm")?,
            theta_rad: parse_f64(&record[3], row, "theta_rad")?,
        });
    }
    PlanarShape::new(points, positions)
}

// ====================================================================
// Reports
// ====================================================================

pub fn write_reports(path: &Path, reports: &[EvaluationReport]) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record([
        "label",
        "tip_mm",
        "tip_pct",
        "shape_mm",
        "shape_pct",
        "trials",
    ])
    .map_err(record_error)?;
    for r in reports {
        w.write_record([
            r.label.clone(),
            fmt_sig(r.tip_error_mm),
            fmt_sig(r.tip_error_pct),
            fmt_sig(r.shape_error_mm),
            fmt_sig(r.shape_error_pct),
            r.trials.to_string(),
        ])
        .map_err(record_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_reports(path: &Path, instrument_length_mm: f64) -> Result<Vec<EvaluationReport>> {
    let mut r = open_reader(path)?;
    check_header(
        r.headers().map_err(record_error)?,
        &[
            "label",
            "tip_mm",
            "tip_pct",
            "shape_mm",
            "shape_pct",
            "trials",
        ],
        path,
    )?;
    let mut reports = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(record_error)?;
        let row = i + 2;
        if record.len() != 6 {
            return Err(Error::format(format!(
                "row {row}: expected 6 fields, got {}",
                record.len()
            )));
        }
        let report = EvaluationReport::new(
            record[0].trim(),
            parse_f64(&record[1], row, "tip_mm")?,
            parse_f64(&record[3], row, "shape_mm")?,
            instrument_length_mm,
            record[5].trim().parse::<u32>().map_err(|_| {
                Error::format(format!(
                    "row {row}: cannot parse trials from {:?}",
                    &record[5]
                ))
            })?,
        )?;
        // The stored percentages must agree with the recomputed ones.
        let tip_pct = parse_f64(&record[2], row, "tip_pct")?;
        let shape_pct = parse_f64(&record[4], row, "shape_pct")?;
        if (tip_pct - report.tip_error_pct).abs() > 5e-3
            || (shape_pct - report.shape_error_pct).abs() > 5e-3
        {
            return Err(Error::format(format!(
                "row {row}: stored percentages do not match the absolute errors \
                 over {instrument_length_mm} mm"
            )));
        }
        reports.push(report);
    }
    Ok(reports)
}

// ====================================================================
// Tests
// ====================================================================
