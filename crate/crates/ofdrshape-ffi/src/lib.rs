//! C ABI over the shape-sensing core: opaque calibration handles, power-law
//! fitting, strain conversion, and per-frame shape reconstruction into
//! caller-owned buffers.
//!
//! Conventions:
//! - every function returns an [`OfdrStatus`]; outputs go through pointers
//! - handles from `ofdr_calibration_*` constructors are freed exactly once
//!   with [`ofdr_calibration_free`]
//! - arrays are `(pointer, length)` pairs allocated by the caller
//!
//! The generated header lands at `include/ofdrshape.h`.

use std::ffi::{c_char, CStr};
use std::path::Path;

use ofdrshape::calibration::{fit_power_law, BendRadius, CalibrationModel, PowerLaw};
use ofdrshape::error::Error;
use ofdrshape::io::formats;
use ofdrshape::reconstruction::{reconstruct_frame, Pose2D, StrainProfile};

/// Result of every C-ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OfdrStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A value was out of its domain (non-finite, wrong sign, bad grid).
    InvalidArgument = 2,
    /// Not enough samples for the requested operation.
    InsufficientData = 3,
    /// The fit is degenerate (all strains identical).
    RankDeficient = 4,
    /// The underlying file operation failed.
    IoError = 5,
    /// A file parsed but its content is malformed.
    FormatError = 6,
}

fn status_of(e: &Error) -> OfdrStatus {
    match e {
        Error::InsufficientData { .. } => OfdrStatus::InsufficientData,
        Error::RankDeficient(_) => OfdrStatus::RankDeficient,
        Error::Io(_) => OfdrStatus::IoError,
        Error::Format(_) => OfdrStatus::FormatError,
        _ => OfdrStatus::InvalidArgument,
    }
}

/// Opaque calibration model handle.
pub struct OfdrCalibration(CalibrationModel);

/// Library version as a static null-terminated string.
#[no_mangle]
pub extern "C" fn ofdr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// New handle holding the reference calibration (the model shipped with the
/// toolkit). Never fails. Free with `ofdr_calibration_free`.
#[no_mangle]
pub extern "C" fn ofdr_calibration_reference() -> *mut OfdrCalibration {
    Box::into_raw(Box::new(OfdrCalibration(CalibrationModel::reference())))
}

/// Build a calibration from raw power-law parameters.
///
/// `pos_*` applies to positive strain, `neg_*` to negative; radii come out
/// as `coefficient * strain^exponent` with strain in microstrain and radius
/// in mm. `dead_zone_ue` is the magnitude under which the fiber is treated
/// as straight.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn ofdr_calibration_new(
    pos_coefficient: f64,
    pos_exponent: f64,
    neg_coefficient: f64,
    neg_exponent: f64,
    dead_zone_ue: f64,
    out: *mut *mut OfdrCalibration,
) -> OfdrStatus {
    if out.is_null() {
        return OfdrStatus::NullArgument;
    }
    let model = CalibrationModel::new(
        PowerLaw::new(pos_coefficient, pos_exponent),
        PowerLaw::new(neg_coefficient, neg_exponent),
        dead_zone_ue,
    );
    match model {
        Ok(m) => {
            *out = Box::into_raw(Box::new(OfdrCalibration(m)));
            OfdrStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Load a calibration model from a JSON file.
///
/// # Safety
/// `path` must be a valid null-terminated string and `out` a valid handle
/// slot.
#[no_mangle]
pub unsafe extern "C" fn ofdr_calibration_load(
    path: *const c_char,
    out: *mut *mut OfdrCalibration,
) -> OfdrStatus {
    if path.is_null() || out.is_null() {
        return OfdrStatus::NullArgument;
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => s,
        Err(_) => return OfdrStatus::InvalidArgument,
    };
    match formats::read_calibration_model(Path::new(path)) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(OfdrCalibration(m)));
            OfdrStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Save a calibration model to a JSON file.
///
/// # Safety
/// `calibration` must be a live handle and `path` a valid null-terminated
/// string.
#[no_mangle]
pub unsafe extern "C" fn ofdr_calibration_save(
    calibration: *const OfdrCalibration,
    path: *const c_char,
) -> OfdrStatus {
    if calibration.is_null() || path.is_null() {
        return OfdrStatus::NullArgument;
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => s,
        Err(_) => return OfdrStatus::InvalidArgument,
    };
    match formats::write_calibration_model(Path::new(path), &(*calibration).0) {
        Ok(()) => OfdrStatus::Ok,
        Err(e) => status_of(&e),
    }
}

/// Release a handle. Null is a no-op; freeing twice is undefined.
///
/// # Safety
/// `calibration` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn ofdr_calibration_free(calibration: *mut OfdrCalibration) {
    if !calibration.is_null() {
        drop(Box::from_raw(calibration));
    }
}

/// Convert one strain reading to a signed bend radius.
///
/// Inside the dead zone `out_is_straight` is 1 and the radius is +infinity;
/// otherwise the radius carries the strain's sign.
///
/// # Safety
/// All pointers must be valid; `calibration` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ofdr_radius_from_strain(
    calibration: *const OfdrCalibration,
    strain_ue: f64,
    out_radius_mm: *mut f64,
    out_is_straight: *mut i32,
) -> OfdrStatus {
    if calibration.is_null() || out_radius_mm.is_null() || out_is_straight.is_null() {
        return OfdrStatus::NullArgument;
    }
    match (*calibration).0.radius_from_strain(strain_ue) {
        Ok(BendRadius::Straight) => {
            *out_radius_mm = f64::INFINITY;
            *out_is_straight = 1;
            OfdrStatus::Ok
        }
        Ok(BendRadius::Curved(r)) => {
            *out_radius_mm = r;
            *out_is_straight = 0;
            OfdrStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Convert a signed bend radius (infinite means straight) to strain.
///
/// `out_in_dead_zone` is 1 when the radius is too large to produce strain
/// above the dead zone, in which case the strain is 0.
///
/// # Safety
/// All pointers must be valid; `calibration` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ofdr_strain_from_radius(
    calibration: *const OfdrCalibration,
    radius_mm: f64,
    out_strain_ue: *mut f64,
    out_in_dead_zone: *mut i32,
) -> OfdrStatus {
    if calibration.is_null() || out_strain_ue.is_null() || out_in_dead_zone.is_null() {
        return OfdrStatus::NullArgument;
    }
    let bend = if radius_mm.is_infinite() {
        BendRadius::Straight
    } else {
        BendRadius::Curved(radius_mm)
    };
    match (*calibration).0.strain_from_radius(bend) {
        Ok(est) => {
            *out_strain_ue = est.strain_ue;
            *out_in_dead_zone = i32::from(est.in_dead_zone);
            OfdrStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Fit one power-law branch to paired (strain, radius) samples by least
/// squares in log-log space. Strains and radii must be positive and finite.
///
/// # Safety
/// `strain_ue` and `radius_mm` must point to `len` readable doubles;
/// `out_coefficient` and `out_exponent` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ofdr_fit_power_law(
    strain_ue: *const f64,
    radius_mm: *const f64,
    len: usize,
    out_coefficient: *mut f64,
    out_exponent: *mut f64,
) -> OfdrStatus {
    if strain_ue.is_null()
        || radius_mm.is_null()
        || out_coefficient.is_null()
        || out_exponent.is_null()
    {
        return OfdrStatus::NullArgument;
    }
    let strains = std::slice::from_raw_parts(strain_ue, len);
    let radii = std::slice::from_raw_parts(radius_mm, len);
    let samples: Vec<(f64, f64)> = strains.iter().copied().zip(radii.iter().copied()).collect();
    match fit_power_law(&samples) {
        Ok(law) => {
            *out_coefficient = law.coefficient;
            *out_exponent = law.exponent;
            OfdrStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Reconstruct a planar shape from one frame of strain samples.
///
/// The profile has `gauge_count` samples spaced `gauge_pitch_mm` apart, the
/// first at `origin_offset_mm` along the instrument. Gauges outside
/// `[0, sensing_length_mm]` are dropped (rigid section), the rest are
/// smoothed over `smoothing_window_mm`, converted to curvature, and
/// integrated from the start pose. On success `out_len` points inside the
/// output arrays; each point `i` gets position, heading, and arc length.
///
/// The caller allocates all four output arrays with at least `capacity`
/// elements; `capacity >= gauge_count` always suffices. If the reconstructed
/// shape does not fit, `out_len` receives the required size and the call
/// returns `InvalidArgument` without touching the arrays, so passing null
/// arrays with `capacity` 0 works as a pure size query.
///
/// # Safety
/// `strain_ue` must point to `gauge_count` readable doubles; the four output
/// arrays must each have `capacity` writable doubles (they are only
/// dereferenced when the shape fits); `out_len` and `calibration` must be
/// valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ofdr_reconstruct(
    calibration: *const OfdrCalibration,
    strain_ue: *const f64,
    gauge_count: usize,
    gauge_pitch_mm: f64,
    origin_offset_mm: f64,
    smoothing_window_mm: f64,
    sensing_length_mm: f64,
    start_x_mm: f64,
    start_y_mm: f64,
    start_theta_rad: f64,
    out_x_mm: *mut f64,
    out_y_mm: *mut f64,
    out_theta_rad: *mut f64,
    out_arc_mm: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> OfdrStatus {
    if calibration.is_null() || strain_ue.is_null() || out_len.is_null() {
        return OfdrStatus::NullArgument;
    }
    let samples = std::slice::from_raw_parts(strain_ue, gauge_count).to_vec();
    let profile = match StrainProfile::new(gauge_pitch_mm, origin_offset_mm, samples, 0.0) {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    let start = Pose2D {
        x_mm: start_x_mm,
        y_mm: start_y_mm,
        theta_rad: start_theta_rad,
    };
    let shape = match reconstruct_frame(
        &profile,
        &(*calibration).0,
        smoothing_window_mm,
        sensing_length_mm,
        start,
    ) {
        Ok(s) => s,
        Err(e) => return status_of(&e),
    };
    let needed = shape.len();
    *out_len = needed;
    if needed > capacity {
        return OfdrStatus::InvalidArgument;
    }
    if out_x_mm.is_null() || out_y_mm.is_null() || out_theta_rad.is_null() || out_arc_mm.is_null() {
        return OfdrStatus::NullArgument;
    }
    for (i, (point, &arc)) in shape.points.iter().zip(&shape.arc_positions_mm).enumerate() {
        *out_x_mm.add(i) = point.x_mm;
        *out_y_mm.add(i) = point.y_mm;
        *out_theta_rad.add(i) = point.theta_rad;
        *out_arc_mm.add(i) = arc;
    }
    OfdrStatus::Ok
}
