//! Ground-truth trajectories: straight and constant-curvature segments.
//!
//! Desk-scale stand-ins for the bench experiments: a guide tube holds the
//! instrument straight for the first 15 mm of insertion, then a curved
//! section of constant radius follows. A trajectory is a label plus a list
//! of segments; the centerline is available in closed form, so every pose
//! and curvature query is analytic, never numerically integrated.
//!
//! Arc positions are measured from the entry point (s = 0). Negative
//! positions are inside the rigid guide and are straight by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reconstruction::{CurvatureProfile, PlanarShape, Pose2D};

/// Straight guide length preceding every curved preset, in mm.
pub const PRESET_STRAIGHT_INSERTION_MM: f64 = 15.0;

/// Curved-section arc length of every curved preset, in mm.
pub const PRESET_CURVE_LENGTH_MM: f64 = 50.0;

/// Preset labels in report order: free-bending tubes first, then the
/// drilled-channel ground truths ("Rinf" is the straight channel).
pub const PRESET_LABELS: [&str; 7] = ["R117", "R50", "R39", "Rinf", "R121", "R53", "R46"];

// ====================================================================
// Types
// ====================================================================

/// One trajectory segment. Arc radius is signed: positive bends toward +y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Segment {
    Straight { length_mm: f64 },
    Arc { length_mm: f64, radius_mm: f64 },
}

impl Segment {
    pub fn length_mm(&self) -> f64 {
        match self {
            Segment::Straight { length_mm } => *length_mm,
            Segment::Arc { length_mm, .. } => *length_mm,
        }
    }

    /// Signed curvature in 1/mm.
    pub fn curvature_per_mm(&self) -> f64 {
        match self {
            Segment::Straight { .. } => 0.0,
            Segment::Arc { radius_mm, .. } => 1.0 / radius_mm,
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        let length = self.length_mm();
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::domain(format!(
                "segment {index}: length must be finite and positive, got {length} mm"
            )));
        }
        if let Segment::Arc { radius_mm, .. } = self {
            if !(radius_mm.is_finite() && *radius_mm != 0.0) {
                return Err(Error::domain(format!(
                    "segment {index}: arc radius must be finite and nonzero, got {radius_mm} mm"
                )));
            }
        }
        Ok(())
    }
}

/// A labeled piecewise trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpec {
    pub label: String,
    pub segments: Vec<Segment>,
}

impl TrajectorySpec {
    pub fn new(label: impl Into<String>, segments: Vec<Segment>) -> Result<Self> {
        let spec = TrajectorySpec {
            label: label.into(),
            segments,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::domain(format!(
                "trajectory {:?} has no segments",
                self.label
            )));
        }
        for (i, segment) in self.segments.iter().enumerate() {
            segment.validate(i)?;
        }
        Ok(())
    }

    pub fn total_length_mm(&self) -> f64 {
        self.segments.iter().map(|s| s.length_mm()).sum()
    }

    /// Bundled bench trajectories: tube midlines R39/R50/R117 and drilled
    /// channels R46/R53/R121/Rinf, each a 15 mm straight guide followed by
    /// a 50 mm curve (Rinf is fully straight at the same total length).
    pub fn preset(label: &str) -> Option<TrajectorySpec> {
        let arc = |radius: f64| {
            vec![
                Segment::Straight {
                    length_mm: PRESET_STRAIGHT_INSERTION_MM,
                },
                Segment::Arc {
                    length_mm: PRESET_CURVE_LENGTH_MM,
                    radius_mm: radius,
                },
            ]
        };
        let (label, segments) = match label.to_ascii_uppercase().as_str() {
            "R39" => ("R39", arc(39.0)),
            "R50" => ("R50", arc(50.0)),
            "R117" => ("R117", arc(117.0)),
            "R46" => ("R46", arc(46.0)),
            "R53" => ("R53", arc(53.0)),
            "R121" => ("R121", arc(121.0)),
            "RINF" => (
                "Rinf",
                vec![Segment::Straight {
                    length_mm: PRESET_STRAIGHT_INSERTION_MM + PRESET_CURVE_LENGTH_MM,
                }],
            ),
            _ => return None,
        };
        Some(TrajectorySpec {
            label: label.to_string(),
            segments,
        })
    }

    /// Nominal radius of the curved section, if any.
    pub fn arc_radius_mm(&self) -> Option<f64> {
        self.segments.iter().find_map(|s| match s {
            Segment::Arc { radius_mm, .. } => Some(*radius_mm),
            Segment::Straight { .. } => None,
        })
    }

    /// Signed curvature at arc position `s_mm`. Positions at or past a joint
    /// belong to the following segment; negative positions are inside the
    /// rigid guide and are straight.
    pub fn curvature_at_mm(&self, s_mm: f64) -> Result<f64> {
        if !s_mm.is_finite() {
            return Err(Error::domain(format!(
                "arc position must be finite, got {s_mm} mm"
            )));
        }
        if s_mm < 0.0 {
            return Ok(0.0);
        }
        let total = self.total_length_mm();
        if s_mm > total + position_slack(total) {
            return Err(Error::domain(format!(
                "arc position {s_mm} mm lies beyond the trajectory ({total} mm)"
            )));
        }
        let mut start = 0.0;
        for segment in &self.segments {
            let end = start + segment.length_mm();
            if s_mm < end {
                return Ok(segment.curvature_per_mm());
            }
            start = end;
        }
        // s == total (within slack): the last segment.
        Ok(self
            .segments
            .last()
            .expect("validated spec has segments")
            .curvature_per_mm())
    }

    /// Closed-form pose at arc position `s_mm`. Negative positions extend
    /// the straight guide backward: pose `(s, 0, 0)`.
    pub fn pose_at_mm(&self, s_mm: f64) -> Result<Pose2D> {
        if !s_mm.is_finite() {
            return Err(Error::domain(format!(
                "arc position must be finite, got {s_mm} mm"
            )));
        }
        let total = self.total_length_mm();
        if s_mm > total + position_slack(total) {
            return Err(Error::domain(format!(
                "arc position {s_mm} mm lies beyond the trajectory ({total} mm)"
            )));
        }
        if s_mm <= 0.0 {
            return Ok(Pose2D {
                x_mm: s_mm,
                y_mm: 0.0,
                theta_rad: 0.0,
            });
        }
        let mut remaining = s_mm.min(total);
        let mut pose = Pose2D::identity();
        for segment in &self.segments {
            let step = segment.length_mm().min(remaining);
            pose = advance(pose, segment, step);
            remaining -= step;
            if remaining <= 0.0 {
                break;
            }
        }
        Ok(pose)
    }

    /// Exact analytic polyline sampled every `step_mm`, plus the exact
    /// endpoint when the step does not divide the total length.
    pub fn centerline(&self, step_mm: f64) -> Result<PlanarShape> {
        if !(step_mm.is_finite() && step_mm > 0.0) {
            return Err(Error::domain(format!(
                "centerline step must be finite and positive, got {step_mm} mm"
            )));
        }
        self.validate()?;
        let total = self.total_length_mm();
        let slack = position_slack(total);
        let mut positions = Vec::new();
        let mut k = 0usize;
        loop {
            let s = k as f64 * step_mm;
            if s > total + slack {
                break;
            }
            positions.push(s.min(total));
            k += 1;
        }
        if total - positions.last().expect("at least s=0") > slack {
            positions.push(total);
        }
        let points = positions
            .iter()
            .map(|&s| self.pose_at_mm(s))
            .collect::<Result<Vec<_>>>()?;
        PlanarShape::new(points, positions)
    }

    /// Ideal curvature profile seen by a sensing window whose distal end
    /// sits at `depth_mm` along the trajectory. The window holds
    /// `floor(sensing_length/pitch) + 1` gauges; gauges mapped to negative
    /// arc positions read zero curvature (still inside the rigid guide).
    pub fn curvature_at_depth(
        &self,
        depth_mm: f64,
        sensing_length_mm: f64,
        gauge_pitch_mm: f64,
    ) -> Result<CurvatureProfile> {
        if !(depth_mm.is_finite() && depth_mm >= 0.0) {
            return Err(Error::domain(format!(
                "depth must be finite and nonnegative, got {depth_mm} mm"
            )));
        }
        let total = self.total_length_mm();
        if depth_mm > total + position_slack(total) {
            return Err(Error::domain(format!(
                "depth {depth_mm} mm lies beyond the trajectory ({total} mm)"
            )));
        }
        let n = gauge_count(sensing_length_mm, gauge_pitch_mm)?;
        let mut samples = Vec::with_capacity(n);
        for j in 0..n {
            let s = depth_mm - (n - 1 - j) as f64 * gauge_pitch_mm;
            samples.push(if s < 0.0 {
                0.0
            } else {
                self.curvature_at_mm(s)?
            });
        }
        Ok(CurvatureProfile {
            gauge_pitch_mm,
            origin_offset_mm: 0.0,
            samples,
        })
    }
}

/// Gauges that fit in a window of the given length: `floor(len/pitch) + 1`,
/// with a one-part-in-1e9 guard so exact multiples stay exact.
pub fn gauge_count(sensing_length_mm: f64, gauge_pitch_mm: f64) -> Result<usize> {
    if !(sensing_length_mm.is_finite() && sensing_length_mm > 0.0) {
        return Err(Error::domain(format!(
            "sensing length must be finite and positive, got {sensing_length_mm} mm"
        )));
    }
    if !(gauge_pitch_mm.is_finite() && gauge_pitch_mm > 0.0) {
        return Err(Error::domain(format!(
            "gauge pitch must be finite and positive, got {gauge_pitch_mm} mm"
        )));
    }
    Ok((sensing_length_mm / gauge_pitch_mm + 1e-9).floor() as usize + 1)
}

fn position_slack(total_mm: f64) -> f64 {
    1e-9 * total_mm.max(1.0)
}

/// Advance a pose along the first `length` mm of a segment, closed form.
fn advance(pose: Pose2D, segment: &Segment, length: f64) -> Pose2D {
    if length == 0.0 {
        return pose;
    }
    match segment {
        Segment::Straight { .. } => Pose2D {
            x_mm: pose.x_mm + length * pose.theta_rad.cos(),
            y_mm: pose.y_mm + length * pose.theta_rad.sin(),
            theta_rad: pose.theta_rad,
        },
        Segment::Arc { radius_mm, .. } => {
            let theta = pose.theta_rad + length / radius_mm;
            Pose2D {
                x_mm: pose.x_mm + radius_mm * (theta.sin() - pose.theta_rad.sin()),
                y_mm: pose.y_mm + radius_mm * (pose.theta_rad.cos() - theta.cos()),
                theta_rad: theta,
            }
        }
    }
}

// ====================================================================
// Insertion schedule
// ====================================================================

/// Drilling protocol: advance in fixed increments at a fixed feed rate and
/// record a shape at every stop, with a final stop at full depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InsertionSchedule {
    pub increment_mm: f64,
    pub speed_mm_s: f64,
}

impl Default for InsertionSchedule {
    fn default() -> Self {
        InsertionSchedule {
            increment_mm: 10.0,
            speed_mm_s: 1.5,
        }
    }
}

impl InsertionSchedule {
    pub fn new(increment_mm: f64, speed_mm_s: f64) -> Result<Self> {
        if !(increment_mm.is_finite() && increment_mm > 0.0) {
            return Err(Error::domain(format!(
                "insertion increment must be finite and positive, got {increment_mm} mm"
            )));
        }
        if !(speed_mm_s.is_finite() && speed_mm_s > 0.0) {
            return Err(Error::domain(format!(
                "insertion speed must be finite and positive, got {speed_mm_s} mm/s"
            )));
        }
        Ok(InsertionSchedule {
            increment_mm,
            speed_mm_s,
        })
    }

    /// Strictly increasing depths ending exactly at `total_mm`.
    pub fn depths_mm(&self, total_mm: f64) -> Result<Vec<f64>> {
        if !(total_mm.is_finite() && total_mm > 0.0) {
            return Err(Error::domain(format!(
                "total length must be finite and positive, got {total_mm} mm"
            )));
        }
        let slack = position_slack(total_mm);
        let mut depths = Vec::new();
        let mut k = 1usize;
        loop {
            let d = k as f64 * self.increment_mm;
            if d >= total_mm - slack {
                break;
            }
            depths.push(d);
            k += 1;
        }
        depths.push(total_mm);
        Ok(depths)
    }

    /// Time to reach a depth at the feed rate, in seconds.
    pub fn time_at_depth_s(&self, depth_mm: f64) -> f64 {
        depth_mm / self.speed_mm_s
    }
}

// ====================================================================
// Tests
// ====================================================================

#[cfg(test)]
mod tests {
    use super::*;

    const EPSILON: f64 = 1e-9;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    fn j_shape_r50() -> TrajectorySpec {
        TrajectorySpec::preset("R50").unwrap()
    }

    // --- centerline ---

    #[test]
    fn straight_centerline_ends_exactly_at_length() {
        let spec =
            TrajectorySpec::new("line", vec![Segment::Straight { length_mm: 45.0 }]).unwrap();
        let line = spec.centerline(0.65).unwrap();
        let tip = line.tip();
        assert_close(tip.x_mm, 45.0, EPSILON);
        assert_close(tip.y_mm, 0.0, EPSILON);
        assert_close(line.end_arc_mm(), 45.0, EPSILON);
        for p in &line.points {
            assert_close(p.y_mm, 0.0, EPSILON);
            assert_close(p.theta_rad, 0.0, EPSILON);
        }
        // 0.65 does not divide 45: grid points plus the appended endpoint.
        assert_eq!(line.len(), 71);
    }

    #[test]
    fn arc_centerline_hits_the_analytic_endpoint() {
        let spec = TrajectorySpec::new(
            "arc",
            vec![Segment::Arc {
                length_mm: 50.0,
                radius_mm: 50.0,
            }],
        )
        .unwrap();
        let line = spec.centerline(0.65).unwrap();
        let tip = line.tip();
        assert_close(tip.x_mm, 42.073549240394825, EPSILON);
        assert_close(tip.y_mm, 22.984884706593014, EPSILON);
        assert_close(tip.theta_rad, 1.0, EPSILON);
    }

    #[test]
    fn j_shape_composes_straight_and_arc() {
        let line = j_shape_r50().centerline(0.5).unwrap();
        let tip = line.tip();
        assert_close(tip.x_mm, 57.073549240394825, EPSILON);
        assert_close(tip.y_mm, 22.984884706593014, EPSILON);
        assert_close(tip.theta_rad, 1.0, EPSILON);
    }

    #[test]
    fn negative_radius_mirrors_across_x() {
        let pos = TrajectorySpec::new(
            "arc+",
            vec![Segment::Arc {
                length_mm: 50.0,
                radius_mm: 50.0,
            }],
        )
        .unwrap();
        let neg = TrajectorySpec::new(
            "arc-",
            vec![Segment::Arc {
                length_mm: 50.0,
                radius_mm: -50.0,
            }],
        )
        .unwrap();
        let a = pos.centerline(1.0).unwrap();
        let b = neg.centerline(1.0).unwrap();
        for (pa, pb) in a.points.iter().zip(&b.points) {
            assert_close(pa.x_mm, pb.x_mm, EPSILON);
            assert_close(pa.y_mm, -pb.y_mm, EPSILON);
            assert_close(pa.theta_rad, -pb.theta_rad, EPSILON);
        }
    }

    #[test]
    fn centerline_span_matches_total_length() {
        let spec = j_shape_r50();
        let line = spec.centerline(0.65).unwrap();
        let total = spec.total_length_mm();
        assert!((line.end_arc_mm() - line.start_arc_mm() - total).abs() / total < 1e-12);
        // Chords of sampled arc points are slightly shorter than the arc:
        // deficit per step is (step/rho)^2/24, about 7e-6 relative here.
        let chord = line.chord_length_mm();
        assert!(chord <= total);
        assert!(total - chord < 1e-3);
    }

    #[test]
    fn tangent_is_continuous_at_joints() {
        let spec = j_shape_r50();
        let before = spec.pose_at_mm(15.0 - 1e-7).unwrap();
        let after = spec.pose_at_mm(15.0 + 1e-7).unwrap();
        assert_close(before.x_mm, after.x_mm, 1e-6);
        assert_close(before.y_mm, after.y_mm, 1e-6);
        assert_close(before.theta_rad, after.theta_rad, 1e-6);
    }

    #[test]
    fn pose_extends_straight_behind_the_entry() {
        let spec = j_shape_r50();
        let pose = spec.pose_at_mm(-7.5).unwrap();
        assert_close(pose.x_mm, -7.5, EPSILON);
        assert_close(pose.y_mm, 0.0, EPSILON);
        assert_close(pose.theta_rad, 0.0, EPSILON);
    }

    #[test]
    fn pose_beyond_total_is_a_domain_error() {
        let spec = j_shape_r50();
        assert!(matches!(spec.pose_at_mm(65.1), Err(Error::Domain(_))));
        assert!(spec.pose_at_mm(65.0).is_ok());
    }

    // --- curvature sampling ---

    #[test]
    fn mid_insertion_window_splits_straight_and_curved() {
        let spec = j_shape_r50();
        let profile = spec.curvature_at_depth(40.0, 45.0, 0.65).unwrap();
        assert_eq!(profile.samples.len(), 70);
        let curved = profile.samples.iter().filter(|&&k| k != 0.0).count();
        // Distal 25 mm of the window lies on the arc: gauges at s >= 15.
        assert_eq!(curved, 39);
        for &k in &profile.samples[31..] {
            assert_close(k, 1.0 / 50.0, EPSILON);
        }
        for &k in &profile.samples[..31] {
            assert_eq!(k, 0.0);
        }
    }

    #[test]
    fn full_insertion_window_is_fully_curved() {
        let spec = j_shape_r50();
        let profile = spec.curvature_at_depth(65.0, 45.0, 0.65).unwrap();
        for &k in &profile.samples {
            assert_close(k, 1.0 / 50.0, EPSILON);
        }
    }

    #[test]
    fn shallow_window_is_fully_straight() {
        let spec = j_shape_r50();
        let profile = spec.curvature_at_depth(10.0, 45.0, 0.65).unwrap();
        for &k in &profile.samples {
            assert_eq!(k, 0.0);
        }
    }

    #[test]
    fn curved_fraction_grows_monotonically_with_depth() {
        let spec = j_shape_r50();
        let mut previous = 0usize;
        let mut depth = 5.0;
        while depth <= 65.0 {
            let profile = spec.curvature_at_depth(depth, 45.0, 0.65).unwrap();
            let curved = profile.samples.iter().filter(|&&k| k != 0.0).count();
            assert!(curved >= previous, "curved gauges shrank at depth {depth}");
            previous = curved;
            depth += 5.0;
        }
    }

    #[test]
    fn depth_beyond_total_is_a_domain_error() {
        let spec = j_shape_r50();
        assert!(matches!(
            spec.curvature_at_depth(66.0, 45.0, 0.65),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gauge_counts_handle_exact_and_inexact_multiples() {
        assert_eq!(gauge_count(45.0, 0.65).unwrap(), 70);
        assert_eq!(gauge_count(50.0, 0.65).unwrap(), 77);
        assert_eq!(gauge_count(50.0, 0.325).unwrap(), 154);
        assert_eq!(gauge_count(50.0, 0.5).unwrap(), 101);
        assert_eq!(gauge_count(13.0, 0.65).unwrap(), 21);
        assert!(gauge_count(0.0, 0.65).is_err());
        assert!(gauge_count(45.0, 0.0).is_err());
    }

    // --- presets and schedule ---

    #[test]
    fn presets_cover_the_bench_configurations() {
        for label in PRESET_LABELS {
            let spec = TrajectorySpec::preset(label).unwrap();
            assert_eq!(spec.label, label);
            assert_close(spec.total_length_mm(), 65.0, EPSILON);
        }
        assert_eq!(
            TrajectorySpec::preset("R121").unwrap().arc_radius_mm(),
            Some(121.0)
        );
        assert_eq!(
            TrajectorySpec::preset("rinf").unwrap().arc_radius_mm(),
            None
        );
        assert!(TrajectorySpec::preset("R999").is_none());
    }

    #[test]
    fn schedule_ends_exactly_at_total_depth() {
        let schedule = InsertionSchedule::default();
        let depths = schedule.depths_mm(65.0).unwrap();
        assert_eq!(depths, vec![10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 65.0]);
        let depths = schedule.depths_mm(60.0).unwrap();
        assert_eq!(depths, vec![10.0, 20.0, 30.0, 40.0, 50.0, 60.0]);
        let depths = schedule.depths_mm(7.0).unwrap();
        assert_eq!(depths, vec![7.0]);
        for w in schedule.depths_mm(65.0).unwrap().windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn schedule_validates_parameters() {
        assert!(InsertionSchedule::new(0.0, 1.5).is_err());
        assert!(InsertionSchedule::new(10.0, 0.0).is_err());
        assert!(InsertionSchedule::new(10.0, -1.0).is_err());
        let schedule = InsertionSchedule::default();
        assert_close(schedule.time_at_depth_s(15.0), 10.0, EPSILON);
    }

    #[test]
    fn spec_validation_rejects_degenerate_segments() {
        assert!(TrajectorySpec::new("empty", vec![]).is_err());
        assert!(TrajectorySpec::new("bad", vec![Segment::Straight { length_mm: 0.0 }]).is_err());
        assert!(TrajectorySpec::new(
            "bad",
            vec![Segment::Arc {
                length_mm: 50.0,
                radius_mm: 0.0
            }]
        )
        .is_err());
        assert!(TrajectorySpec::new(
            "bad",
            vec![Segment::Arc {
                length_mm: f64::NAN,
                radius_mm: 50.0
            }]
        )
        .is_err());
    }

    #[test]
    fn trajectory_json_round_trips_with_kind_tags() {
        let spec = j_shape_r50();
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"kind\":\"straight\""));
        assert!(json.contains("\"kind\":\"arc\""));
        assert!(json.contains("\"radius_mm\""));
        let back: TrajectorySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
