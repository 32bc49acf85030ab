//! Forward simulator: trajectory to synthetic strain frames.
//!
//! # Pipeline
//!
//! ```text
//! trajectory --window--> curvature --invert calibration--> ideal strain
//!            --compliance (attenuation + ramps)--> --gaussian noise--> frame
//! ```
//!
//! The compliance model captures two bench observations. First, the sensing
//! assembly sits loosely in the instrument's channel and adopts a shallower
//! bend than the channel itself, so measured plateau strain is an
//! `attenuation` fraction of the ideal value (default 0.65, from measured
//! plateau-to-ideal ratios near 0.64-0.66). Second, the assembly cannot
//! follow a curvature step; each step discontinuity in the ideal profile is
//! replaced by a linear ramp (default 15 mm) centered on the transition.
//!
//! Every frame draws its noise from an independent generator seeded by
//! (series seed, frame index), so frames can be generated in parallel and
//! the output never depends on thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::calibration::{BendRadius, CalibrationModel};
use crate::error::{Error, Result};
use crate::reconstruction::{CurvatureProfile, StrainProfile};
use crate::trajectory::{InsertionSchedule, TrajectorySpec};

/// Acquisition rate of the interrogator in Hz.
pub const DEFAULT_FRAME_RATE_HZ: f64 = 31.25;

/// Default plateau attenuation of the compliance model.
pub const DEFAULT_ATTENUATION: f64 = 0.65;

/// Default transition ramp length in mm.
pub const DEFAULT_RAMP_LENGTH_MM: f64 = 15.0;

/// Default strain noise sigma in microstrain.
pub const DEFAULT_NOISE_SIGMA_UE: f64 = 20.0;

// ====================================================================
// Types
// ====================================================================

/// Mechanical coupling between instrument and sensing assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplianceModel {
    /// Plateau scale factor in (0, 1].
    pub attenuation: f64,
    /// Length of the linear ramp replacing each curvature step, in mm.
    /// Zero keeps steps sharp.
    pub ramp_length_mm: f64,
}

impl Default for ComplianceModel {
    fn default() -> Self {
        ComplianceModel {
            attenuation: DEFAULT_ATTENUATION,
            ramp_length_mm: DEFAULT_RAMP_LENGTH_MM,
        }
    }
}

impl ComplianceModel {
    /// Ideal coupling: no attenuation, no ramps.
    pub fn ideal() -> Self {
        ComplianceModel {
            attenuation: 1.0,
            ramp_length_mm: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.attenuation.is_finite() && self.attenuation > 0.0 && self.attenuation <= 1.0) {
            return Err(Error::domain(format!(
                "attenuation must lie in (0, 1], got {}",
                self.attenuation
            )));
        }
        if !(self.ramp_length_mm.is_finite() && self.ramp_length_mm >= 0.0) {
            return Err(Error::domain(format!(
                "ramp length must be finite and nonnegative, got {} mm",
                self.ramp_length_mm
            )));
        }
        Ok(())
    }
}

/// Additive i.i.d. Gaussian strain noise, seeded for reproducibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub sigma_ue: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma_ue: f64, seed: u64) -> Result<Self> {
        if !(sigma_ue.is_finite() && sigma_ue >= 0.0) {
            return Err(Error::domain(format!(
                "noise sigma must be finite and nonnegative, got {sigma_ue} microstrain"
            )));
        }
        Ok(NoiseModel { sigma_ue, seed })
    }

    /// Noise-free, for loop-closure checks.
    pub fn none() -> Self {
        NoiseModel {
            sigma_ue: 0.0,
            seed: 0,
        }
    }
}

/// One acquired frame: insertion depth plus its strain profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub depth_mm: f64,
    pub profile: StrainProfile,
}

/// An ordered series of frames at a fixed acquisition rate.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSeries {
    pub frames: Vec<Frame>,
    pub rate_hz: f64,
}

impl FrameSeries {
    pub fn new(frames: Vec<Frame>, rate_hz: f64) -> Result<Self> {
        let series = FrameSeries { frames, rate_hz };
        series.validate()?;
        Ok(series)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate_hz.is_finite() && self.rate_hz > 0.0) {
            return Err(Error::domain(format!(
                "frame rate must be finite and positive, got {} Hz",
                self.rate_hz
            )));
        }
        if self.frames.is_empty() {
            return Err(Error::InsufficientData { got: 0, need: 1 });
        }
        let first = &self.frames[0].profile;
        for (i, frame) in self.frames.iter().enumerate() {
            if frame.profile.gauge_pitch_mm != first.gauge_pitch_mm
                || frame.profile.samples.len() != first.samples.len()
                || frame.profile.origin_offset_mm != first.origin_offset_mm
            {
                return Err(Error::GridMismatch(format!(
                    "frame {i} does not share the series gauge grid"
                )));
            }
        }
        for w in self.frames.windows(2) {
            // Written so NaN fails the check too.
            let increasing = w[1].depth_mm > w[0].depth_mm;
            if !increasing {
                return Err(Error::domain(format!(
                    "frame depths must be strictly increasing, got {} then {} mm",
                    w[0].depth_mm, w[1].depth_mm
                )));
            }
        }
        Ok(())
    }
}

// ====================================================================
// Operations
// ====================================================================

/// Strain each gauge would read if the assembly followed the curvature
/// exactly: the calibration inverse per gauge, zero where curvature is zero.
pub fn ideal_strain(
    curvature: &CurvatureProfile,
    model: &CalibrationModel,
) -> Result<StrainProfile> {
    let mut samples = Vec::with_capacity(curvature.samples.len());
    for (i, &k) in curvature.samples.iter().enumerate() {
        if !k.is_finite() {
            return Err(Error::domain(format!(
                "non-finite curvature {k} at gauge {i}"
            )));
        }
        let bend = if k == 0.0 {
            BendRadius::Straight
        } else {
            BendRadius::Curved(1.0 / k)
        };
        samples.push(model.strain_from_radius(bend)?.strain_ue);
    }
    StrainProfile::new(
        curvature.gauge_pitch_mm,
        curvature.origin_offset_mm,
        samples,
        0.0,
    )
}

/// Scale a profile by the attenuation and replace every step discontinuity
/// with a linear ramp of `ramp_length_mm` centered on the transition
/// (transitions sit midway between the differing gauges). Plateaus away
/// from transitions are scaled but otherwise untouched; ramps reaching past
/// the profile ends are clipped.
pub fn apply_compliance(
    profile: &StrainProfile,
    compliance: &ComplianceModel,
) -> Result<StrainProfile> {
    compliance.validate()?;
    let scaled: Vec<f64> = profile
        .samples
        .iter()
        .map(|s| s * compliance.attenuation)
        .collect();
    let ramp = compliance.ramp_length_mm;
    if ramp == 0.0 || scaled.len() < 2 {
        return StrainProfile::new(
            profile.gauge_pitch_mm,
            profile.origin_offset_mm,
            scaled,
            profile.timestamp_s,
        );
    }

    // Transitions: (center position, value jump), in local gauge coordinates.
    let pitch = profile.gauge_pitch_mm;
    let transitions: Vec<(f64, f64)> = scaled
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] != w[0])
        .map(|(i, w)| ((i as f64 + 0.5) * pitch, w[1] - w[0]))
        .collect();

    let mut samples = Vec::with_capacity(scaled.len());
    for i in 0..scaled.len() {
        let p = i as f64 * pitch;
        let mut value = scaled[0];
        for &(center, jump) in &transitions {
            let t = ((p - center + ramp / 2.0) / ramp).clamp(0.0, 1.0);
            value += jump * t;
        }
        samples.push(value);
    }
    StrainProfile::new(
        profile.gauge_pitch_mm,
        profile.origin_offset_mm,
        samples,
        profile.timestamp_s,
    )
}

/// Counter-based per-frame seed so frame order and thread count never
/// change the stream (splitmix64 of seed xor a spaced frame counter).
fn frame_seed(base: u64, frame_index: usize) -> u64 {
    let mut z = base ^ (frame_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Simulate the full insertion protocol: one frame per scheduled depth,
/// each windowed at the depth, inverted through the calibration, passed
/// through the compliance model, and perturbed with seeded Gaussian noise.
/// Frame timestamps follow the feed rate (`depth / speed`).
pub fn simulate_series(
    spec: &TrajectorySpec,
    schedule: &InsertionSchedule,
    calibration: &CalibrationModel,
    compliance: &ComplianceModel,
    noise: &NoiseModel,
    sensing_length_mm: f64,
    gauge_pitch_mm: f64,
) -> Result<FrameSeries> {
    spec.validate()?;
    calibration.validate()?;
    compliance.validate()?;
    let depths = schedule.depths_mm(spec.total_length_mm())?;

    let frames = depths
        .par_iter()
        .enumerate()
        .map(|(index, &depth)| {
            let curvature = spec.curvature_at_depth(depth, sensing_length_mm, gauge_pitch_mm)?;
            let ideal = ideal_strain(&curvature, calibration)?;
            let mut profile = apply_compliance(&ideal, compliance)?;
            profile.timestamp_s = schedule.time_at_depth_s(depth);
            if noise.sigma_ue > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(frame_seed(noise.seed, index));
                let normal = Normal::new(0.0, noise.sigma_ue)
                    .map_err(|e| Error::domain(format!("invalid noise sigma: {e}")))?;
                for s in &mut profile.samples {
                    *s += normal.sample(&mut rng);
                }
            }
            Ok(Frame {
                depth_mm: depth,
                profile,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    FrameSeries::new(frames, DEFAULT_FRAME_RATE_HZ)
}

// ====================================================================
// Tests
// ====================================================================
