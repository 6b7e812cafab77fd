//! Session data: on-disk format, validation and the synthetic generator.

pub mod generator;
mod io;
pub mod pgm;
pub mod render;
mod types;

pub use generator::{
    arm_position_for, corpus_specs, generate_synthetic_session, random_eye_patch, DriverProfile, GeneratorSpec,
    LabeledEyePatch, SegmentDurations,
};
pub use io::{load_session, read_labels, save_session, write_labels, Manifest, FACE_HEADER};
pub use types::{
    CameraIntrinsics, DepthFrame, DistractionClass, FaceChannelRecord, Frame, GrayImage, Session,
};

/// Side length of the stored eye patches.
pub const EYE_PATCH_SIZE: usize = 60;

/// Nominal stream rate: 100 samples span about six seconds.
pub const NOMINAL_FRAME_RATE: f64 = 16.7;
