/* C interface for the ofdrshape fiber shape-sensing toolkit. */

#ifndef OFDRSHAPE_H
#define OFDRSHAPE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every C-ABI call.
typedef enum OfdrStatus {
  // Success.
  OFDR_STATUS_OK = 0,
  // A required pointer argument was null.
  OFDR_STATUS_NULL_ARGUMENT = 1,
  // A value was out of its domain (non-finite, wrong sign, bad grid).
  OFDR_STATUS_INVALID_ARGUMENT = 2,
  // Not enough samples for the requested operation.
  OFDR_STATUS_INSUFFICIENT_DATA = 3,
  // The fit is degenerate (all strains identical).
  OFDR_STATUS_RANK_DEFICIENT = 4,
  // The underlying file operation failed.
  OFDR_STATUS_IO_ERROR = 5,
  // A file parsed but its content is malformed.
  OFDR_STATUS_FORMAT_ERROR = 6,
} OfdrStatus;

// Opaque calibration model handle.
typedef struct OfdrCalibration OfdrCalibration;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static null-terminated string.
const char *ofdr_version(void);

// New handle holding the reference calibration (the model shipped with the
// toolkit). Never fails. Free with `ofdr_calibration_free`.
struct OfdrCalibration *ofdr_calibration_reference(void);

// Build a calibration from raw power-law parameters.
//
// `pos_*` applies to positive strain, `neg_*` to negative; radii come out
// as `coefficient * strain^exponent` with strain in microstrain and radius
// in mm. `dead_zone_ue` is the magnitude under which the fiber is treated
// as straight.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum OfdrStatus ofdr_calibration_new(double pos_coefficient,
                                     double pos_exponent,
                                     double neg_coefficient,
                                     double neg_exponent,
                                     double dead_zone_ue,
                                     struct OfdrCalibration **out);

// Load a calibration model from a JSON file.
//
// # Safety
// `path` must be a valid null-terminated string and `out` a valid handle
// slot.
enum OfdrStatus ofdr_calibration_load(const char *path, struct OfdrCalibration **out);

// Save a calibration model to a JSON file.
//
// # Safety
// `calibration` must be a live handle and `path` a valid null-terminated
// string.
enum OfdrStatus ofdr_calibration_save(const struct OfdrCalibration *calibration, const char *path);

// Release a handle. Null is a no-op; freeing twice is undefined.
//
// # Safety
// `calibration` must be null or a handle not freed before.
void ofdr_calibration_free(struct OfdrCalibration *calibration);

// Convert one strain reading to a signed bend radius.
//
// Inside the dead zone `out_is_straight` is 1 and the radius is +infinity;
// otherwise the radius carries the strain's sign.
//
// # Safety
// All pointers must be valid; `calibration` must be a live handle.
enum OfdrStatus ofdr_radius_from_strain(const struct OfdrCalibration *calibration,
                                        double strain_ue,
                                        double *out_radius_mm,
                                        int32_t *out_is_straight);

// Convert a signed bend radius (infinite means straight) to strain.
//
// `out_in_dead_zone` is 1 when the radius is too large to produce strain
// above the dead zone, in which case the strain is 0.
//
// # Safety
// All pointers must be valid; `calibration` must be a live handle.
enum OfdrStatus ofdr_strain_from_radius(const struct OfdrCalibration *calibration,
                                        double radius_mm,
                                        double *out_strain_ue,
                                        int32_t *out_in_dead_zone);

// Fit one power-law branch to paired (strain, radius) samples by least
// squares in log-log space. Strains and radii must be positive and finite.
//
// # Safety
// `strain_ue` and `radius_mm` must point to `len` readable doubles;
// `out_coefficient` and `out_exponent` must be valid.
enum OfdrStatus ofdr_fit_power_law(const double *strain_ue,
                                   const double *radius_mm,
                                   uintptr_t len,
                                   double *out_coefficient,
                                   double *out_exponent);

// Reconstruct a planar shape from one frame of strain samples.
//
// The profile has `gauge_count` samples spaced `gauge_pitch_mm` apart, the
// first at `origin_offset_mm` along the instrument. Gauges outside
// `[0, sensing_length_mm]` are dropped (rigid section), the rest are
// smoothed over `smoothing_window_mm`, converted to curvature, and
// integrated from the start pose. On success `out_len` points inside the
// output arrays; each point `i` gets position, heading, and arc length.
//
// The caller allocates all four output arrays with at least `capacity`
// elements; `capacity >= gauge_count` always suffices. If the reconstructed
// shape does not fit, `out_len` receives the required size and the call
// returns `InvalidArgument` without touching the arrays, so passing null
// arrays with `capacity` 0 works as a pure size query.
//
// # Safety
// `strain_ue` must point to `gauge_count` readable doubles; the four output
// arrays must each have `capacity` writable doubles (they are only
// dereferenced when the shape fits); `out_len` and `calibration` must be
// valid.
enum OfdrStatus ofdr_reconstruct(const struct OfdrCalibration *calibration,
                                 const double *strain_ue,
                                 uintptr_t gauge_count,
                                 double gauge_pitch_mm,
                                 double origin_offset_mm,
                                 double smoothing_window_mm,
                                 double sensing_length_mm,
                                 double start_x_mm,
                                 double start_y_mm,
                                 double start_theta_rad,
                                 double *out_x_mm,
                                 double *out_y_mm,
                                 double *out_theta_rad,
                                 double *out_arc_mm,
                                 uintptr_t capacity,
                                 uintptr_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OFDRSHAPE_H */
