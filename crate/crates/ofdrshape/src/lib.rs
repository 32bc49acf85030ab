//! Shape sensing for a thin flexible instrument from distributed fiber-optic
//! strain.
//!
//! A single-core fiber read out by OFDR reports strain every 0.65 mm along a
//! 45 mm sensing section. Because the fiber is bonded off-axis, bending
//! strain maps to bend radius through a calibrated power law, and signed
//! curvature integrates to a planar shape. The crate covers the full loop at
//! desk scale:
//!
//! - [`calibration`]: strain-to-radius power laws, fitting, dead zone
//! - [`reconstruction`]: smoothing, curvature, shape integration
//! - [`trajectory`]: planned paths (straight + arc presets), insertion
//!   schedules, ground-truth poses
//! - [`simulator`]: forward model producing synthetic frame series with
//!   compliance (the instrument not fully tracking the channel) and noise
//! - [`metrics`]: tip and shape errors, normalization, trial aggregation
//! - [`io`]: CSV/JSON formats, paced replay, SVG plots
//! - [`pipeline`]: registration onto a plan, scoring, demo bundle
//!
//! Everything is deterministic for a given seed, including parallel
//! simulation and plot output.
//!
//! ```
//! use ofdrshape::calibration::CalibrationModel;
//! use ofdrshape::pipeline::{evaluate_frames, reconstruct_series};
//! use ofdrshape::simulator::{simulate_series, ComplianceModel, NoiseModel};
//! use ofdrshape::trajectory::{InsertionSchedule, TrajectorySpec};
//!
//! let spec = TrajectorySpec::preset("R50").unwrap();
//! let model = CalibrationModel::reference();
//! let series = simulate_series(
//!     &spec,
//!     &InsertionSchedule::default(),
//!     &model,
//!     &ComplianceModel::ideal(),
//!     &NoiseModel::none(),
//!     45.0,
//!     0.65,
//! )
//! .unwrap();
//! let frames = reconstruct_series(&series, &model, 2.0, 45.0, Some(&spec)).unwrap();
//! let (_, report) = evaluate_frames(&frames, &spec, 45.0).unwrap();
//! assert!(report.tip_error_mm < 0.1);
//! ```

pub mod calibration;
pub mod error;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod reconstruction;
pub mod simulator;
pub mod trajectory;

pub use calibration::{CalibrationModel, PowerLaw};
pub use error::{Error, Result};
pub use metrics::EvaluationReport;
pub use reconstruction::{PlanarShape, Pose2D, StrainProfile};
pub use simulator::{Frame, FrameSeries};
pub use trajectory::TrajectorySpec;
