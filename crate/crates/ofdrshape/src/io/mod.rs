//! Persistence, replay, and plotting.

pub mod formats;
pub mod plots;
pub mod replay;

pub use formats::{
    fmt_sig, metadata_path_for, read_calibration_model, read_calibration_samples,
    read_frame_series, read_reports, read_shape, read_trajectory, write_calibration_model,
    write_calibration_samples, write_frame_series, write_reports, write_shape, write_trajectory,
    SeriesMetadata,
};
pub use plots::{shape_overlay_svg, strain_plot_svg, write_svg};
pub use replay::{replay, ReplayReport, REPLAY_BUFFER_FRAMES};

use crate::error::{Error, Result};
use crate::reconstruction::StrainProfile;
use crate::simulator::{Frame, FrameSeries};

/// Subtract a baseline (unloaded) profile from one frame. The grids must
/// match gauge for gauge.
pub fn tare_profile(profile: &StrainProfile, baseline: &StrainProfile) -> Result<StrainProfile> {
    if profile.gauge_pitch_mm != baseline.gauge_pitch_mm
        || profile.origin_offset_mm != baseline.origin_offset_mm
        || profile.samples.len() != baseline.samples.len()
    {
        return Err(Error::GridMismatch(format!(
            "baseline grid ({} gauges, pitch {}, origin {}) does not match frame grid \
             ({} gauges, pitch {}, origin {})",
            baseline.samples.len(),
            baseline.gauge_pitch_mm,
            baseline.origin_offset_mm,
            profile.samples.len(),
            profile.gauge_pitch_mm,
            profile.origin_offset_mm,
        )));
    }
    let samples = profile
        .samples
        .iter()
        .zip(&baseline.samples)
        .map(|(s, b)| s - b)
        .collect();
    StrainProfile::new(
        profile.gauge_pitch_mm,
        profile.origin_offset_mm,
        samples,
        profile.timestamp_s,
    )
}

/// Tare every frame of a series against the same baseline.
pub fn tare(series: &FrameSeries, baseline: &StrainProfile) -> Result<FrameSeries> {
    let frames = series
        .frames
        .iter()
        .map(|f| {
            Ok(Frame {
                depth_mm: f.depth_mm,
                profile: tare_profile(&f.profile, baseline)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FrameSeries::new(frames, series.rate_hz)
}
