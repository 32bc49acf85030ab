//! Planar shape reconstruction from a distributed strain profile.
//!
//! # Pipeline
//!
//! ```text
//! strain profile --smooth--> strain --calibrate--> curvature --integrate--> shape
//! ```
//!
//! Strain is sampled on a uniform gauge grid (default pitch 0.65 mm) along
//! the fiber. Each gauge maps to a signed curvature through the calibration
//! model, and the curvature profile integrates to a planar polyline: over
//! one gauge interval the heading turns by `dtheta = kappa * ds` and the
//! point advances along the mid-interval heading,
//!
//! ```text
//! x += cos(theta + dtheta/2) * ds
//! y += sin(theta + dtheta/2) * ds
//! ```
//!
//! which is exact in heading for piecewise-constant curvature and second
//! order in position. Every step moves along a chord of exact length `ds`,
//! so the polyline's chord sum always equals the sensed length.
//!
//! Bending in the instrument happens in one plane by construction (the
//! fiber is bonded off-axis in a known orientation), so the reconstruction
//! is strictly 2D.

use crate::calibration::CalibrationModel;
use crate::error::{Error, Result};

/// Default gauge pitch of the interrogator in mm.
pub const DEFAULT_GAUGE_PITCH_MM: f64 = 0.65;

/// Default centered smoothing window in mm (3 gauges at the default pitch).
pub const DEFAULT_SMOOTHING_WINDOW_MM: f64 = 2.0;

/// Default sensed length of the instrument's flexible section in mm.
pub const DEFAULT_SENSING_LENGTH_MM: f64 = 45.0;

// ====================================================================
// Types
// ====================================================================

/// One frame of distributed strain on a uniform gauge grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StrainProfile {
    /// Gauge spacing in mm, strictly positive.
    pub gauge_pitch_mm: f64,
    /// Arc position of the first gauge relative to the start of the
    /// instrument's flexible section, in mm. Negative values are gauges in
    /// the rigid proximal section.
    pub origin_offset_mm: f64,
    /// Strain per gauge in microstrain, signed.
    pub samples: Vec<f64>,
    /// Acquisition time in seconds, metadata only.
    pub timestamp_s: f64,
}

impl StrainProfile {
    pub fn new(
        gauge_pitch_mm: f64,
        origin_offset_mm: f64,
        samples: Vec<f64>,
        timestamp_s: f64,
    ) -> Result<Self> {
        if !(gauge_pitch_mm.is_finite() && gauge_pitch_mm > 0.0) {
            return Err(Error::domain(format!(
                "gauge pitch must be finite and positive, got {gauge_pitch_mm} mm"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InsufficientData { got: 0, need: 1 });
        }
        Ok(StrainProfile {
            gauge_pitch_mm,
            origin_offset_mm,
            samples,
            timestamp_s,
        })
    }

    /// Arc length spanned by the gauge grid: `(n - 1) * pitch`.
    pub fn sensed_length_mm(&self) -> f64 {
        (self.samples.len().saturating_sub(1)) as f64 * self.gauge_pitch_mm
    }

    /// Arc position of gauge `i` relative to the flexible-section start.
    pub fn gauge_position_mm(&self, i: usize) -> f64 {
        self.origin_offset_mm + i as f64 * self.gauge_pitch_mm
    }
}

/// Signed curvature per gauge in 1/mm, on the same grid as its source
/// strain profile.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile {
    pub gauge_pitch_mm: f64,
    pub origin_offset_mm: f64,
    pub samples: Vec<f64>,
}

/// Planar pose: position in mm, heading in radians from the +x axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2D {
    pub x_mm: f64,
    pub y_mm: f64,
    pub theta_rad: f64,
}

impl Pose2D {
    pub fn identity() -> Self {
        Pose2D {
            x_mm: 0.0,
            y_mm: 0.0,
            theta_rad: 0.0,
        }
    }

    pub fn distance_mm(&self, other: &Pose2D) -> f64 {
        ((self.x_mm - other.x_mm).powi(2) + (self.y_mm - other.y_mm).powi(2)).sqrt()
    }
}

/// A reconstructed or analytic planar centerline: one pose per arc position,
/// arc positions strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarShape {
    pub points: Vec<Pose2D>,
    pub arc_positions_mm: Vec<f64>,
}

impl PlanarShape {
    pub fn new(points: Vec<Pose2D>, arc_positions_mm: Vec<f64>) -> Result<Self> {
        if points.len() != arc_positions_mm.len() {
            return Err(Error::domain(format!(
                "shape has {} points but {} arc positions",
                points.len(),
                arc_positions_mm.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::InsufficientData { got: 0, need: 1 });
        }
        for w in arc_positions_mm.windows(2) {
            // Written so NaN fails the check too.
            let increasing = w[1] > w[0];
            if !increasing {
                return Err(Error::domain(format!(
                    "arc positions must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(PlanarShape {
            points,
            arc_positions_mm,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn tip(&self) -> &Pose2D {
        self.points.last().expect("shape is never empty")
    }

    pub fn start_arc_mm(&self) -> f64 {
        self.arc_positions_mm[0]
    }

    pub fn end_arc_mm(&self) -> f64 {
        *self.arc_positions_mm.last().expect("shape is never empty")
    }

    /// Sum of consecutive point distances in mm.
    pub fn chord_length_mm(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[0].distance_mm(&w[1]))
            .sum()
    }

    /// Shift all arc positions by a constant (registering a window onto an
    /// absolute arc coordinate, for example).
    pub fn shift_arc_positions(&mut self, delta_mm: f64) {
        for s in &mut self.arc_positions_mm {
            *s += delta_mm;
        }
    }
}

// ====================================================================
// Operations
// ====================================================================

/// Centered moving average over gauges within `window_mm / 2` of each gauge.
///
/// Half-width in gauges is `floor((window_mm / 2) / pitch)`, so the default
/// 2.0 mm window at 0.65 mm pitch averages 3 gauges. Near the ends the
/// half-width shrinks symmetrically, which keeps constant profiles exactly
/// constant. A window of zero is the identity.
pub fn smooth_strain(profile: &StrainProfile, window_mm: f64) -> Result<StrainProfile> {
    if !(window_mm.is_finite() && window_mm >= 0.0) {
        return Err(Error::domain(format!(
            "smoothing window must be finite and nonnegative, got {window_mm} mm"
        )));
    }
    let sensed = profile.sensed_length_mm();
    if profile.samples.len() > 1 && window_mm >= sensed {
        return Err(Error::domain(format!(
            "smoothing window {window_mm} mm must be shorter than the sensed length {sensed} mm"
        )));
    }
    let half = ((window_mm / 2.0) / profile.gauge_pitch_mm).floor() as usize;
    if half == 0 {
        return Ok(profile.clone());
    }
    let n = profile.samples.len();
    let mut smoothed = Vec::with_capacity(n);
    for i in 0..n {
        let h = half.min(i).min(n - 1 - i);
        let lo = i - h;
        let hi = i + h;
        let sum: f64 = profile.samples[lo..=hi].iter().sum();
        smoothed.push(sum / (hi - lo + 1) as f64);
    }
    Ok(StrainProfile {
        gauge_pitch_mm: profile.gauge_pitch_mm,
        origin_offset_mm: profile.origin_offset_mm,
        samples: smoothed,
        timestamp_s: profile.timestamp_s,
    })
}

/// Map every gauge's strain to signed curvature through the calibration.
/// Gauges inside the dead zone get exactly zero curvature. A non-finite
/// sample is a domain error naming the gauge index.
pub fn strain_to_curvature(
    profile: &StrainProfile,
    model: &CalibrationModel,
) -> Result<CurvatureProfile> {
    let mut samples = Vec::with_capacity(profile.samples.len());
    for (i, &strain) in profile.samples.iter().enumerate() {
        if !strain.is_finite() {
            return Err(Error::domain(format!(
                "non-finite strain {strain} at gauge {i}"
            )));
        }
        let bend = model.radius_from_strain(strain)?;
        samples.push(bend.curvature_per_mm());
    }
    Ok(CurvatureProfile {
        gauge_pitch_mm: profile.gauge_pitch_mm,
        origin_offset_mm: profile.origin_offset_mm,
        samples,
    })
}

/// Integrate a curvature profile into a planar polyline from `start`.
///
/// N curvature samples produce N poses spanning `(N-1) * pitch`; interval
/// `i` turns by `samples[i] * pitch` and the final sample only sets the tip
/// heading context (it drives no interval). The first pose equals `start`
/// exactly, and local arc positions run from 0 to `(N-1) * pitch`.
pub fn integrate_shape(curvature: &CurvatureProfile, start: Pose2D) -> Result<PlanarShape> {
    if curvature.samples.is_empty() {
        return Err(Error::InsufficientData { got: 0, need: 1 });
    }
    for (i, &k) in curvature.samples.iter().enumerate() {
        if !k.is_finite() {
            return Err(Error::domain(format!(
                "non-finite curvature {k} at gauge {i}"
            )));
        }
    }
    let ds = curvature.gauge_pitch_mm;
    let n = curvature.samples.len();
    let mut points = Vec::with_capacity(n);
    let mut arc_positions = Vec::with_capacity(n);
    let mut pose = start;
    points.push(pose);
    arc_positions.push(0.0);
    for i in 0..n - 1 {
        let dtheta = curvature.samples[i] * ds;
        let mid = pose.theta_rad + dtheta / 2.0;
        pose = Pose2D {
            x_mm: pose.x_mm + mid.cos() * ds,
            y_mm: pose.y_mm + mid.sin() * ds,
            theta_rad: pose.theta_rad + dtheta,
        };
        points.push(pose);
        arc_positions.push((i + 1) as f64 * ds);
    }
    PlanarShape::new(points, arc_positions)
}

/// Full per-frame pipeline: smooth, calibrate to curvature, window to the
/// instrument's flexible section, and integrate from `start`.
///
/// Only gauges whose arc position lies in `[0, sensing_length_mm]` are
/// integrated; gauges in the rigid proximal section (negative positions)
/// are measured but carry no shape. The returned arc positions are the
/// selected gauges' positions along the flexible section.
pub fn reconstruct_frame(
    profile: &StrainProfile,
    model: &CalibrationModel,
    smoothing_window_mm: f64,
    sensing_length_mm: f64,
    start: Pose2D,
) -> Result<PlanarShape> {
    if !(sensing_length_mm.is_finite() && sensing_length_mm > 0.0) {
        return Err(Error::domain(format!(
            "sensing length must be finite and positive, got {sensing_length_mm} mm"
        )));
    }
    let smoothed = smooth_strain(profile, smoothing_window_mm)?;
    let curvature = strain_to_curvature(&smoothed, model)?;

    // Window selection tolerates float fuzz of one part in 1e9 at the ends.
    let slack = 1e-9 * sensing_length_mm.max(1.0);
    let selected: Vec<usize> = (0..curvature.samples.len())
        .filter(|&i| {
            let s = profile.gauge_position_mm(i);
            s >= -slack && s <= sensing_length_mm + slack
        })
        .collect();
    if selected.is_empty() {
        return Err(Error::domain(format!(
            "no gauges inside the sensing window [0, {sensing_length_mm}] mm \
             (profile spans [{}, {}] mm)",
            profile.gauge_position_mm(0),
            profile.gauge_position_mm(profile.samples.len() - 1),
        )));
    }
    let first = selected[0];
    let window = CurvatureProfile {
        gauge_pitch_mm: curvature.gauge_pitch_mm,
        origin_offset_mm: profile.gauge_position_mm(first),
        samples: selected.iter().map(|&i| curvature.samples[i]).collect(),
    };
    let mut shape = integrate_shape(&window, start)?;
    shape.shift_arc_positions(window.origin_offset_mm);
    Ok(shape)
}

// ====================================================================
// Tests
// ====================================================================
