//! Strain-to-radius calibration for the sensing fiber.
//!
//! # Overview
//!
//! A bench jig bends the sensing assembly into slots of known radius (35 mm
//! to 100 mm in 5 mm steps, both bending directions, three trials each) and
//! records the plateau strain for every slot. Bending radius follows a power
//! law in strain magnitude,
//!
//! ```text
//! rho = a * eps^b        rho in mm, eps in microstrain, a > 0, b < 0
//! ```
//!
//! with one branch per bending direction because the fiber sits off the
//! neutral axis asymmetrically. Fitting is ordinary least squares on the
//! log-log form `ln(rho) = ln(a) + b*ln(eps)`, which is linear in the
//! unknowns and needs no iteration.
//!
//! The power law diverges as strain approaches zero, so a dead zone
//! (default 10 microstrain) maps small readings to "straight" instead of an
//! enormous finite radius.
//!
//! # Example
//!
//! ```
//! use ofdrshape::calibration::{BendRadius, CalibrationModel};
//!
//! let model = CalibrationModel::reference();
//! match model.radius_from_strain(1000.0).unwrap() {
//!     BendRadius::Curved(r) => assert!((r - 163.42).abs() < 0.01),
//!     BendRadius::Straight => unreachable!(),
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dead-zone half-width in microstrain: readings at or below this magnitude
/// are reported as straight. Guards the power-law singularity at zero strain.
pub const DEFAULT_DEAD_ZONE_UE: f64 = 10.0;

// ====================================================================
// Types
// ====================================================================

/// One branch of the calibration: `rho = a * eps^b` for strain magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    /// Coefficient `a` in mm (radius at 1 microstrain).
    #[serde(rename = "a")]
    pub coefficient: f64,
    /// Exponent `b`, negative: more strain means a tighter bend.
    #[serde(rename = "b")]
    pub exponent: f64,
}

impl PowerLaw {
    pub fn new(coefficient: f64, exponent: f64) -> Self {
        PowerLaw {
            coefficient,
            exponent,
        }
    }

    /// Physical validity: positive coefficient, negative exponent.
    pub fn validate(&self) -> Result<()> {
        if !(self.coefficient.is_finite() && self.coefficient > 0.0) {
            return Err(Error::domain(format!(
                "power-law coefficient must be finite and positive, got {}",
                self.coefficient
            )));
        }
        if !(self.exponent.is_finite() && self.exponent < 0.0) {
            return Err(Error::domain(format!(
                "power-law exponent must be finite and negative, got {}",
                self.exponent
            )));
        }
        Ok(())
    }

    /// Radius in mm for a strain magnitude in microstrain. Caller guarantees
    /// `strain_ue > 0`; the power law is undefined otherwise.
    pub fn radius_mm(&self, strain_ue: f64) -> f64 {
        self.coefficient * strain_ue.powf(self.exponent)
    }

    /// Strain magnitude in microstrain for a radius magnitude in mm. Caller
    /// guarantees `radius_mm > 0`.
    pub fn strain_ue(&self, radius_mm: f64) -> f64 {
        (radius_mm / self.coefficient).powf(1.0 / self.exponent)
    }
}

/// Bending direction of a calibration sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Fiber on the outside of the bend: positive strain.
    Pos,
    /// Fiber on the inside of the bend: negative strain.
    Neg,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Pos => "pos",
            Direction::Neg => "neg",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pos" => Ok(Direction::Pos),
            "neg" => Ok(Direction::Neg),
            other => Err(Error::format(format!(
                "unknown bending direction {other:?}, expected \"pos\" or \"neg\""
            ))),
        }
    }
}

/// One jig measurement: slot radius, bending direction, plateau strain.
/// `radius_mm` is `f64::INFINITY` for the straight slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSample {
    pub radius_mm: f64,
    pub direction: Direction,
    pub strain_ue: f64,
    pub trial: u32,
}

/// Signed bending radius, with an explicit marker for straight sections so
/// callers never see the near-infinite radii the power law would produce
/// inside the dead zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BendRadius {
    Straight,
    /// Signed radius in mm: positive bends toward +y, negative toward -y.
    Curved(f64),
}

impl BendRadius {
    /// Signed curvature in 1/mm; exactly zero for straight.
    pub fn curvature_per_mm(&self) -> f64 {
        match self {
            BendRadius::Straight => 0.0,
            BendRadius::Curved(r) => 1.0 / r,
        }
    }

    pub fn is_straight(&self) -> bool {
        matches!(self, BendRadius::Straight)
    }
}

/// Result of mapping a radius back to strain. `in_dead_zone` marks readings
/// the instrument cannot distinguish from straight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainEstimate {
    pub strain_ue: f64,
    pub in_dead_zone: bool,
}

/// Full calibration: one power law per bending direction plus the dead zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationModel {
    pub positive: PowerLaw,
    pub negative: PowerLaw,
    #[serde(rename = "dead_zone_ue")]
    pub dead_zone_ue: f64,
}

impl CalibrationModel {
    pub fn new(positive: PowerLaw, negative: PowerLaw, dead_zone_ue: f64) -> Result<Self> {
        let model = CalibrationModel {
            positive,
            negative,
            dead_zone_ue,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.positive.validate()?;
        self.negative.validate()?;
        if !(self.dead_zone_ue.is_finite() && self.dead_zone_ue > 0.0) {
            return Err(Error::domain(format!(
                "dead zone must be finite and positive, got {} microstrain",
                self.dead_zone_ue
            )));
        }
        Ok(())
    }

    /// Factory calibration of the reference sensing assembly.
    pub fn reference() -> Self {
        CalibrationModel {
            positive: PowerLaw::new(284_000.0, -1.08),
            negative: PowerLaw::new(150_000.0, -0.999),
            dead_zone_ue: DEFAULT_DEAD_ZONE_UE,
        }
    }

    /// Signed radius for a signed strain reading. Readings inside the dead
    /// zone map to `Straight`; the sign of the strain picks the branch.
    pub fn radius_from_strain(&self, strain_ue: f64) -> Result<BendRadius> {
        if !strain_ue.is_finite() {
            return Err(Error::domain(format!(
                "strain reading must be finite, got {strain_ue}"
            )));
        }
        if strain_ue.abs() <= self.dead_zone_ue {
            return Ok(BendRadius::Straight);
        }
        let radius = if strain_ue > 0.0 {
            self.positive.radius_mm(strain_ue)
        } else {
            -self.negative.radius_mm(-strain_ue)
        };
        Ok(BendRadius::Curved(radius))
    }

    /// Signed strain for a bend. Straight markers and radii whose inverse
    /// strain falls inside the dead zone report zero strain with the
    /// `in_dead_zone` flag set.
    pub fn strain_from_radius(&self, bend: BendRadius) -> Result<StrainEstimate> {
        let radius = match bend {
            BendRadius::Straight => {
                return Ok(StrainEstimate {
                    strain_ue: 0.0,
                    in_dead_zone: true,
                })
            }
            BendRadius::Curved(r) => r,
        };
        if !radius.is_finite() || radius == 0.0 {
            return Err(Error::domain(format!(
                "bend radius must be finite and nonzero, got {radius} mm"
            )));
        }
        let magnitude = if radius > 0.0 {
            self.positive.strain_ue(radius)
        } else {
            self.negative.strain_ue(-radius)
        };
        if magnitude <= self.dead_zone_ue {
            return Ok(StrainEstimate {
                strain_ue: 0.0,
                in_dead_zone: true,
            });
        }
        Ok(StrainEstimate {
            strain_ue: magnitude.copysign(radius),
            in_dead_zone: false,
        })
    }
}

// ====================================================================
// Fitting
// ====================================================================

/// Least-squares power-law fit on `(strain magnitude, radius magnitude)`
/// pairs, both in positive units (microstrain, mm).
///
/// Solves `ln(rho) = ln(a) + b*ln(eps)` in closed form. Errors: fewer than
/// two samples, nonpositive strain or radius, or all strains identical
/// (the exponent is then unobservable).
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<PowerLaw> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData {
            got: samples.len(),
            need: 2,
        });
    }
    for (i, &(strain, radius)) in samples.iter().enumerate() {
        if !(strain.is_finite() && strain > 0.0) {
            return Err(Error::domain(format!(
                "sample {i}: strain must be finite and positive, got {strain}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::domain(format!(
                "sample {i}: radius must be finite and positive, got {radius}"
            )));
        }
    }

    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|&(e, _)| e.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, r)| r.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(Error::RankDeficient(
            "all strain magnitudes are identical, exponent is unobservable".into(),
        ));
    }

    let exponent = sxy / sxx;
    let coefficient = (y_mean - exponent * x_mean).exp();
    Ok(PowerLaw::new(coefficient, exponent))
}

/// Residual diagnostics of a fitted power law on a sample set.
#[derive(Debug, Clone)]
pub struct FitDiagnostics {
    /// Per-sample `ln(rho_i) - ln(a*eps_i^b)`.
    pub residuals_log: Vec<f64>,
    /// Per-sample `rho_i - a*eps_i^b` in mm.
    pub residuals_mm: Vec<f64>,
    pub rmse_log: f64,
    pub rmse_mm: f64,
    pub max_abs_mm: f64,
}

/// Evaluate a power law against samples (same validity rules as
/// [`fit_power_law`]) and report residual statistics.
pub fn fit_residuals(law: &PowerLaw, samples: &[(f64, f64)]) -> Result<FitDiagnostics> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData {
            got: samples.len(),
            need: 2,
        });
    }
    law.validate()?;
    let mut residuals_log = Vec::with_capacity(samples.len());
    let mut residuals_mm = Vec::with_capacity(samples.len());
    for (i, &(strain, radius)) in samples.iter().enumerate() {
        if !(strain.is_finite() && strain > 0.0) || !(radius.is_finite() && radius > 0.0) {
            return Err(Error::domain(format!(
                "sample {i}: strain and radius must be finite and positive, got ({strain}, {radius})"
            )));
        }
        let predicted = law.radius_mm(strain);
        residuals_log.push(radius.ln() - predicted.ln());
        residuals_mm.push(radius - predicted);
    }
    let n = samples.len() as f64;
    let rmse_log = (residuals_log.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
    let rmse_mm = (residuals_mm.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
    let max_abs_mm = residuals_mm.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(FitDiagnostics {
        residuals_log,
        residuals_mm,
        rmse_log,
        rmse_mm,
        max_abs_mm,
    })
}

/// Fit a full model from jig samples: positive and negative branches fitted
/// separately on strain/radius magnitudes. Straight-slot rows (infinite
/// radius) and rows inside the dead zone carry no power-law information and
/// are skipped; each branch still needs two usable samples.
pub fn fit_calibration_model(
    samples: &[CalibrationSample],
    dead_zone_ue: f64,
) -> Result<CalibrationModel> {
    if !(dead_zone_ue.is_finite() && dead_zone_ue > 0.0) {
        return Err(Error::domain(format!(
            "dead zone must be finite and positive, got {dead_zone_ue} microstrain"
        )));
    }
    let usable =
        |s: &&CalibrationSample| s.radius_mm.is_finite() && s.strain_ue.abs() > dead_zone_ue;
    let branch: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.direction == Direction::Pos)
        .filter(usable)
        .map(|s| (s.strain_ue.abs(), s.radius_mm.abs()))
        .collect();
    let positive = fit_power_law(&branch)?;
    let branch: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.direction == Direction::Neg)
        .filter(usable)
        .map(|s| (s.strain_ue.abs(), s.radius_mm.abs()))
        .collect();
    let negative = fit_power_law(&branch)?;
    CalibrationModel::new(positive, negative, dead_zone_ue)
}

// ====================================================================
// Tests
// ====================================================================

#[cfg(test)]
mod tests {
    use super::*;

    const EPSILON: f64 = 1e-9;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        let scale = expected.abs().max(1.0);
        assert!(
            (actual - expected).abs() <= tol * scale,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    /// The 14 jig slot radii in mm.
    fn jig_radii() -> Vec<f64> {
        (0..14).map(|i| 35.0 + 5.0 * i as f64).collect()
    }

    // --- fitting ---

    #[test]
    fn two_point_fit_passes_through_both_points() {
        let law = fit_power_law(&[(1000.0, 163.43), (3770.0, 39.0)]).unwrap();
        assert_close(law.coefficient, 283_391.688_323_075_6, EPSILON);
        assert_close(law.exponent, -1.0796851092809878, EPSILON);
        assert_close(law.radius_mm(1000.0), 163.43, EPSILON);
        assert_close(law.radius_mm(3770.0), 39.0, EPSILON);
    }

    #[test]
    fn exact_jig_samples_recover_reference_branch() {
        let reference = CalibrationModel::reference().positive;
        let samples: Vec<(f64, f64)> = jig_radii()
            .iter()
            .map(|&r| (reference.strain_ue(r), r))
            .collect();
        assert_eq!(samples.len(), 14);
        let law = fit_power_law(&samples).unwrap();
        assert_close(law.coefficient, 284_000.0, 1e-10);
        assert_close(law.exponent, -1.08, 1e-10);
    }

    #[test]
    fn fit_rejects_insufficient_data() {
        match fit_power_law(&[]) {
            Err(Error::InsufficientData { got: 0, need: 2 }) => {}
            other => panic!("expected insufficient data, got {other:?}"),
        }
        match fit_power_law(&[(1000.0, 163.0)]) {
            Err(Error::InsufficientData { got: 1, need: 2 }) => {}
            other => panic!("expected insufficient data, got {other:?}"),
        }
    }

    #[test]
    fn fit_rejects_nonpositive_values() {
        assert!(matches!(
            fit_power_law(&[(1000.0, 163.0), (-5.0, 40.0)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            fit_power_law(&[(1000.0, 163.0), (2000.0, 0.0)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            fit_power_law(&[(f64::NAN, 163.0), (2000.0, 80.0)]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn fit_rejects_identical_strains() {
        match fit_power_law(&[(1000.0, 163.0), (1000.0, 80.0), (1000.0, 40.0)]) {
            Err(Error::RankDeficient(_)) => {}
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    // --- radius from strain ---

    #[test]
    fn positive_strain_maps_to_positive_radius() {
        let model = CalibrationModel::reference();
        match model.radius_from_strain(1000.0).unwrap() {
            BendRadius::Curved(r) => assert_close(r, 163.42494220375257, EPSILON),
            BendRadius::Straight => panic!("expected curved"),
        }
    }

    #[test]
    fn negative_strain_maps_to_negative_radius() {
        let model = CalibrationModel::reference();
        match model.radius_from_strain(-1500.0).unwrap() {
            BendRadius::Curved(r) => assert_close(r, -100.73400272917276, EPSILON),
            BendRadius::Straight => panic!("expected curved"),
        }
    }

    #[test]
    fn dead_zone_reports_straight() {
        let model = CalibrationModel::reference();
        assert!(model.radius_from_strain(0.0).unwrap().is_straight());
        assert!(model.radius_from_strain(10.0).unwrap().is_straight());
        assert!(model.radius_from_strain(-10.0).unwrap().is_straight());
        assert!(!model.radius_from_strain(10.000001).unwrap().is_straight());
        assert!(!model.radius_from_strain(-10.000001).unwrap().is_straight());
    }

    #[test]
    fn non_finite_strain_is_a_domain_error() {
        let model = CalibrationModel::reference();
        assert!(matches!(
            model.radius_from_strain(f64::NAN),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            model.radius_from_strain(f64::INFINITY),
            Err(Error::Domain(_))
        ));
    }

    // --- strain from radius ---

    #[test]
    fn known_radii_invert_to_expected_strain() {
        let model = CalibrationModel::reference();
        let est = model.strain_from_radius(BendRadius::Curved(39.0)).unwrap();
        assert_close(est.strain_ue, 3_768.433_569_842_585, EPSILON);
        assert!(!est.in_dead_zone);
        let est = model.strain_from_radius(BendRadius::Curved(117.0)).unwrap();
        assert_close(est.strain_ue, 1362.6424816587302, EPSILON);
    }

    #[test]
    fn straight_marker_inverts_to_zero_strain() {
        let model = CalibrationModel::reference();
        let est = model.strain_from_radius(BendRadius::Straight).unwrap();
        assert_eq!(est.strain_ue, 0.0);
        assert!(est.in_dead_zone);
    }

    #[test]
    fn giant_radius_flags_dead_zone() {
        let model = CalibrationModel::reference();
        // 1e9 mm inverts to well under 10 microstrain on both branches.
        let est = model.strain_from_radius(BendRadius::Curved(1e9)).unwrap();
        assert_eq!(est.strain_ue, 0.0);
        assert!(est.in_dead_zone);
    }

    #[test]
    fn zero_or_non_finite_radius_is_a_domain_error() {
        let model = CalibrationModel::reference();
        for bad in [0.0, f64::NAN, f64::INFINITY, f64::NEG_INFINITY] {
            assert!(matches!(
                model.strain_from_radius(BendRadius::Curved(bad)),
                Err(Error::Domain(_))
            ));
        }
    }

    #[test]
    fn round_trip_is_identity_outside_the_dead_zone() {
        let model = CalibrationModel::reference();
        let mut strain = 10.001;
        while strain < 5000.0 {
            for signed in [strain, -strain] {
                let bend = model.radius_from_strain(signed).unwrap();
                let est = model.strain_from_radius(bend).unwrap();
                assert_close(est.strain_ue, signed, EPSILON);
                assert!(!est.in_dead_zone);
            }
            strain *= 1.37;
        }
    }

    #[test]
    fn radius_magnitude_decreases_with_strain_magnitude() {
        let model = CalibrationModel::reference();
        for sign in [1.0, -1.0] {
            let mut previous = f64::INFINITY;
            let mut strain = 11.0;
            while strain < 6000.0 {
                match model.radius_from_strain(sign * strain).unwrap() {
                    BendRadius::Curved(r) => {
                        assert!(r.abs() < previous, "radius must shrink as strain grows");
                        previous = r.abs();
                    }
                    BendRadius::Straight => panic!("unexpected straight"),
                }
                strain *= 1.11;
            }
        }
    }

    // --- residuals ---

    #[test]
    fn residuals_vanish_on_exact_samples() {
        let law = CalibrationModel::reference().positive;
        let samples: Vec<(f64, f64)> = jig_radii().iter().map(|&r| (law.strain_ue(r), r)).collect();
        let diag = fit_residuals(&law, &samples).unwrap();
        assert!(diag.rmse_mm < 1e-10);
        assert!(diag.rmse_log < 1e-12);
        assert!(diag.max_abs_mm < 1e-10);
    }

    #[test]
    fn uniform_one_percent_radius_offset_shows_in_rmse() {
        let law = CalibrationModel::reference().positive;
        let samples: Vec<(f64, f64)> = jig_radii()
            .iter()
            .map(|&r| (law.strain_ue(r), r * 1.01))
            .collect();
        let diag = fit_residuals(&law, &samples).unwrap();
        // 1% of the RMS jig radius, computed independently.
        assert_close(diag.rmse_mm, 0.704_450_140_180_268_5, EPSILON);
        // Loose sanity: close to 1% of the mean radius (67.5 mm).
        assert!((diag.rmse_mm - 0.675).abs() < 0.05);
        assert_close(diag.rmse_log, 0.01f64.ln_1p(), 1e-6);
    }

    #[test]
    fn residuals_reject_single_sample() {
        let law = CalibrationModel::reference().positive;
        assert!(matches!(
            fit_residuals(&law, &[(1000.0, 163.4)]),
            Err(Error::InsufficientData { got: 1, need: 2 })
        ));
    }

    // --- model-level fitting and validation ---

    #[test]
    fn jig_dataset_with_both_directions_fits_both_branches() {
        let reference = CalibrationModel::reference();
        let mut samples = Vec::new();
        for trial in 0..3 {
            for &r in &jig_radii() {
                samples.push(CalibrationSample {
                    radius_mm: r,
                    direction: Direction::Pos,
                    strain_ue: reference.positive.strain_ue(r),
                    trial,
                });
                samples.push(CalibrationSample {
                    radius_mm: r,
                    direction: Direction::Neg,
                    strain_ue: -reference.negative.strain_ue(r),
                    trial,
                });
            }
            // Straight-slot rows must be ignored by the fit.
            samples.push(CalibrationSample {
                radius_mm: f64::INFINITY,
                direction: Direction::Pos,
                strain_ue: 1.0,
                trial,
            });
        }
        let model = fit_calibration_model(&samples, DEFAULT_DEAD_ZONE_UE).unwrap();
        assert_close(model.positive.coefficient, 284_000.0, 1e-9);
        assert_close(model.positive.exponent, -1.08, 1e-9);
        assert_close(model.negative.coefficient, 150_000.0, 1e-9);
        assert_close(model.negative.exponent, -0.999, 1e-9);
    }

    #[test]
    fn model_validation_rejects_bad_parameters() {
        let good = PowerLaw::new(284_000.0, -1.08);
        assert!(CalibrationModel::new(PowerLaw::new(-1.0, -1.08), good, 10.0).is_err());
        assert!(CalibrationModel::new(PowerLaw::new(284_000.0, 0.5), good, 10.0).is_err());
        assert!(CalibrationModel::new(good, good, 0.0).is_err());
        assert!(CalibrationModel::new(good, good, -3.0).is_err());
        assert!(CalibrationModel::new(good, good, f64::NAN).is_err());
    }

    #[test]
    fn model_json_uses_the_documented_keys() {
        let model = CalibrationModel::reference();
        let json = serde_json::to_string(&model).unwrap();
        assert!(json.contains("\"positive\""));
        assert!(json.contains("\"negative\""));
        assert!(json.contains("\"dead_zone_ue\""));
        assert!(json.contains("\"a\""));
        assert!(json.contains("\"b\""));
        let back: CalibrationModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn direction_parses_and_prints() {
        assert_eq!(Direction::parse("pos").unwrap(), Direction::Pos);
        assert_eq!(Direction::parse("neg").unwrap(), Direction::Neg);
        assert_eq!(Direction::Pos.as_str(), "pos");
        assert!(Direction::parse("sideways").is_err());
    }
}
