//! Driver distraction detection and recognition from recorded RGB-D
//! sessions.
//!
//! The crate is split along the processing chain:
//!
//! - [`session`]: on-disk session format and the synthetic session generator.
//! - [`arm`]: depth segmentation, contour tracing and arm-orientation features.
//! - [`eye`]: iris localization filter bank, gaze features and eye closure.
//! - [`face`]: gating of the ingested face-tracker stream.
//! - [`learners`]: decision trees, Real AdaBoost, RBF SVM and Gaussian HMMs.
//! - [`fusion`]: frame feature assembly, temporal smoothing and both classifier paths.
//! - [`eval`]: metrics, reports and leave-one-driver-out evaluation.
//! - [`pipeline`]: per-session feature extraction and model bundles tying it together.

pub mod arm;
pub mod error;
pub mod eval;
pub mod eye;
pub mod face;
pub mod fusion;
pub mod learners;
pub mod model_io;
pub mod pipeline;
pub mod session;

pub use error::{Error, Result};
pub use session::{DepthFrame, DistractionClass, FaceChannelRecord, Session};
