//! Error metrics between a measured shape and its ground truth.
//!
//! Both shapes live in a shared base frame (registration happens upstream),
//! so the metrics are deliberately sensitive to rigid offsets: a translated
//! reconstruction is a wrong reconstruction. Comparisons pair points at
//! equal arc position,
//!
//! ```text
//! tip error   = |P_meas(L) - P_truth(L)|
//! shape error = mean_i |P_meas(s_i) - P_truth(s_i)|
//! ```
//!
//! and normalized errors divide by the instrument's sensed length (45 mm by
//! default) times 100, reported in percent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reconstruction::PlanarShape;

// ====================================================================
// Resampling
// ====================================================================

/// Linear interpolation of a shape at the requested arc positions.
/// Positions must lie inside the shape's arc range (1e-9 slack per mm);
/// queries exactly on a node return that node's point.
pub fn resample_by_arclength(shape: &PlanarShape, positions_mm: &[f64]) -> Result<Vec<(f64, f64)>> {
    let start = shape.start_arc_mm();
    let end = shape.end_arc_mm();
    let slack = 1e-9 * (end - start).abs().max(1.0);
    let mut out = Vec::with_capacity(positions_mm.len());
    for &s in positions_mm {
        if !s.is_finite() || s < start - slack || s > end + slack {
            return Err(Error::domain(format!(
                "arc position {s} mm lies outside the shape's range [{start}, {end}] mm"
            )));
        }
        let s = s.clamp(start, end);
        // Index of the last node at or before s.
        let idx = match shape
            .arc_positions_mm
            .binary_search_by(|p| p.partial_cmp(&s).expect("finite arc positions"))
        {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        if idx + 1 >= shape.len() {
            let p = shape.points[shape.len() - 1];
            out.push((p.x_mm, p.y_mm));
            continue;
        }
        let (s0, s1) = (shape.arc_positions_mm[idx], shape.arc_positions_mm[idx + 1]);
        let t = (s - s0) / (s1 - s0);
        let (p0, p1) = (shape.points[idx], shape.points[idx + 1]);
        out.push((
            p0.x_mm + t * (p1.x_mm - p0.x_mm),
            p0.y_mm + t * (p1.y_mm - p0.y_mm),
        ));
    }
    Ok(out)
}

// ====================================================================
// Errors
// ====================================================================

/// Euclidean distance between the two tip points, in mm.
pub fn tip_error_mm(measured: &PlanarShape, truth: &PlanarShape) -> f64 {
    measured.tip().distance_mm(truth.tip())
}

/// Mean pointwise distance over `n_points` arc positions spread evenly
/// across the measured shape's span. The truth shape must cover that span.
pub fn shape_error_mm(measured: &PlanarShape, truth: &PlanarShape, n_points: usize) -> Result<f64> {
    if n_points < 2 {
        return Err(Error::domain(format!(
            "shape error needs at least 2 comparison points, got {n_points}"
        )));
    }
    if measured.len() < 2 {
        return Err(Error::InsufficientData {
            got: measured.len(),
            need: 2,
        });
    }
    let (start, end) = (measured.start_arc_mm(), measured.end_arc_mm());
    let positions: Vec<f64> = (0..n_points)
        .map(|i| start + (end - start) * i as f64 / (n_points - 1) as f64)
        .collect();
    shape_error_at(measured, truth, &positions)
}

/// Mean pointwise distance on the measured shape's own gauge grid.
pub fn shape_error_at_gauges(measured: &PlanarShape, truth: &PlanarShape) -> Result<f64> {
    shape_error_at(measured, truth, &measured.arc_positions_mm)
}

fn shape_error_at(measured: &PlanarShape, truth: &PlanarShape, positions: &[f64]) -> Result<f64> {
    let slack = 1e-9
        * (measured.end_arc_mm() - measured.start_arc_mm())
            .abs()
            .max(1.0);
    if truth.start_arc_mm() > measured.start_arc_mm() + slack
        || truth.end_arc_mm() < measured.end_arc_mm() - slack
    {
        return Err(Error::domain(format!(
            "truth shape spans [{}, {}] mm and does not cover the measured span [{}, {}] mm",
            truth.start_arc_mm(),
            truth.end_arc_mm(),
            measured.start_arc_mm(),
            measured.end_arc_mm(),
        )));
    }
    let m = resample_by_arclength(measured, positions)?;
    let t = resample_by_arclength(truth, positions)?;
    let sum: f64 = m
        .iter()
        .zip(&t)
        .map(|(a, b)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
        .sum();
    Ok(sum / positions.len() as f64)
}

/// Absolute error as a percentage of the instrument's sensed length.
pub fn normalize_error_pct(error_mm: f64, instrument_length_mm: f64) -> Result<f64> {
    if !(error_mm.is_finite() && error_mm >= 0.0) {
        return Err(Error::domain(format!(
            "error must be finite and nonnegative, got {error_mm} mm"
        )));
    }
    if !(instrument_length_mm.is_finite() && instrument_length_mm > 0.0) {
        return Err(Error::domain(format!(
            "instrument length must be finite and positive, got {instrument_length_mm} mm"
        )));
    }
    Ok(error_mm / instrument_length_mm * 100.0)
}

/// Radius of the circle best matching a shape's net turn: arc span over
/// total heading change. `None` when the shape is straight to 1e-12 rad.
pub fn fit_arc_radius_mm(shape: &PlanarShape) -> Option<f64> {
    if shape.len() < 2 {
        return None;
    }
    let dtheta = shape.tip().theta_rad - shape.points[0].theta_rad;
    if dtheta.abs() < 1e-12 {
        return None;
    }
    Some((shape.end_arc_mm() - shape.start_arc_mm()) / dtheta.abs())
}

// ====================================================================
// Reports
// ====================================================================

/// One evaluated run (or aggregate of runs) against a labeled trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub label: String,
    pub tip_error_mm: f64,
    pub tip_error_pct: f64,
    pub shape_error_mm: f64,
    pub shape_error_pct: f64,
    pub instrument_length_mm: f64,
    pub trials: u32,
}

impl EvaluationReport {
    pub fn new(
        label: impl Into<String>,
        tip_error_mm: f64,
        shape_error_mm: f64,
        instrument_length_mm: f64,
        trials: u32,
    ) -> Result<Self> {
        if trials == 0 {
            return Err(Error::domain("a report needs at least one trial"));
        }
        Ok(EvaluationReport {
            label: label.into(),
            tip_error_pct: normalize_error_pct(tip_error_mm, instrument_length_mm)?,
            shape_error_pct: normalize_error_pct(shape_error_mm, instrument_length_mm)?,
            tip_error_mm,
            shape_error_mm,
            instrument_length_mm,
            trials,
        })
    }
}

/// Unweighted mean of per-trial reports for one trajectory. All reports
/// must share the label and instrument length; trial counts add up.
pub fn aggregate_trials(reports: &[EvaluationReport]) -> Result<EvaluationReport> {
    if reports.is_empty() {
        return Err(Error::InsufficientData { got: 0, need: 1 });
    }
    let first = &reports[0];
    for r in reports {
        if r.label != first.label {
            return Err(Error::domain(format!(
                "cannot aggregate mixed labels {:?} and {:?}",
                first.label, r.label
            )));
        }
        if r.instrument_length_mm != first.instrument_length_mm {
            return Err(Error::domain(format!(
                "cannot aggregate mixed instrument lengths {} and {} mm",
                first.instrument_length_mm, r.instrument_length_mm
            )));
        }
    }
    let n = reports.len() as f64;
    let tip = reports.iter().map(|r| r.tip_error_mm).sum::<f64>() / n;
    let shape = reports.iter().map(|r| r.shape_error_mm).sum::<f64>() / n;
    let trials = reports.iter().map(|r| r.trials).sum();
    EvaluationReport::new(
        first.label.clone(),
        tip,
        shape,
        first.instrument_length_mm,
        trials,
    )
}

// ====================================================================
// Tests
// ====================================================================
