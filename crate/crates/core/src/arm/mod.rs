//! Arm position from depth: segmentation, contours in two views, per-segment
//! principal axes and a four-way pose classifier.

pub mod contour;
pub mod mask;
pub mod pca;
pub mod profile;

use serde::{Deserialize, Serialize};

pub use contour::{front_rim_filter, marching_squares, right_side_filter, ContourChain};
pub use mask::{remove_background, ForegroundMask};
pub use pca::segment_axes;
pub use profile::{profile_projection, ProfileView};

use crate::error::{Error, Result};
use crate::learners::{ova_train, BoostParams, FeatureMatrix, OneVsAllModel};
use crate::session::{CameraIntrinsics, DepthFrame};

pub const ARM_FEATURES: usize = 120;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArmPosition {
    Up = 0,
    Down = 1,
    Right = 2,
    Forward = 3,
}

impl ArmPosition {
    pub const ALL: [ArmPosition; 4] = [Self::Up, Self::Down, Self::Right, Self::Forward];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Up => "up",
            Self::Down => "down",
            Self::Right => "right",
            Self::Forward => "forward",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArmParams {
    pub threshold_mm: f64,
    pub n_segments: usize,
    pub profile_bin_mm: f64,
}

/// Image width the 5 mm profile bin refers to.
pub const NATIVE_WIDTH: usize = 640;

impl ArmParams {
    /// Scales the profile bin with image width, so depth bins keep the same
    /// size relative to the lateral pixel pitch as at native resolution.
    pub fn for_width(width: usize) -> Self {
        Self {
            profile_bin_mm: 5.0 * NATIVE_WIDTH as f64 / width.max(1) as f64,
            ..Self::default()
        }
    }
}

impl Default for ArmParams {
    fn default() -> Self {
        Self {
            threshold_mm: 80.0,
            n_segments: 20,
            profile_bin_mm: 5.0,
        }
    }
}

/// Frontal segment axes followed by profile segment axes, three components each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmFeatures {
    pub values: Vec<f64>,
    pub valid: bool,
}

impl ArmFeatures {
    pub fn invalid(n_segments: usize) -> Self {
        Self {
            values: vec![0.0; 6 * n_segments],
            valid: false,
        }
    }
}

/// Intermediate products of the arm pipeline, kept for inspection.
#[derive(Clone, Debug)]
pub struct ArmTrace {
    pub mask: ForegroundMask,
    pub frontal: ContourChain,
    pub frontal_kept: ContourChain,
    pub profile: ProfileView,
    pub profile_chain: ContourChain,
    pub profile_kept: ContourChain,
}

pub fn arm_trace(
    frame: &DepthFrame,
    background: &DepthFrame,
    intrinsics: CameraIntrinsics,
    params: &ArmParams,
) -> Result<ArmTrace> {
    let mask = remove_background(frame, background, params.threshold_mm)?;
    let (cx, _) = mask
        .centroid()
        .ok_or_else(|| Error::InvalidInput("no foreground after background removal".into()))?;
    let frontal = ContourChain::from_pixels(marching_squares(&mask)?, |(x, y)| {
        intrinsics.back_project(x as f64, y as f64, frame.get(x, y) as f64)
    });
    let frontal_kept = right_side_filter(&frontal, cx);

    let profile = profile_projection(frame, &mask, intrinsics, params.profile_bin_mm)?;
    let (bin_c, _) = profile
        .mask
        .centroid()
        .ok_or_else(|| Error::InvalidInput("empty profile view".into()))?;
    let profile_chain = ContourChain::from_pixels(marching_squares(&profile.mask)?, |(c, r)| profile.point(c, r));
    let profile_kept = front_rim_filter(&profile_chain, bin_c);
    Ok(ArmTrace {
        mask,
        frontal,
        frontal_kept,
        profile,
        profile_chain,
        profile_kept,
    })
}

fn features_from_trace(trace: &ArmTrace, n_segments: usize) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(6 * n_segments);
    for chain in [&trace.frontal_kept, &trace.profile_kept] {
        for axis in segment_axes(&chain.points3d, n_segments)? {
            values.extend_from_slice(&axis);
        }
    }
    Ok(values)
}

/// Never fails: any stage error yields the zero vector flagged invalid.
pub fn arm_features(
    frame: &DepthFrame,
    background: &DepthFrame,
    intrinsics: CameraIntrinsics,
    params: &ArmParams,
) -> ArmFeatures {
    match arm_trace(frame, background, intrinsics, params).and_then(|t| features_from_trace(&t, params.n_segments)) {
        Ok(values) => ArmFeatures { values, valid: true },
        Err(e) => {
            log::trace!("arm features unavailable: {e}");
            ArmFeatures::invalid(params.n_segments)
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmScores {
    pub up: f64,
    pub down: f64,
    pub right: f64,
    pub forward: f64,
}

impl ArmScores {
    pub fn as_array(&self) -> [f64; 4] {
        [self.up, self.down, self.right, self.forward]
    }

    pub fn argmax(&self) -> ArmPosition {
        let a = self.as_array();
        let mut best = 0;
        for k in 1..4 {
            if a[k] > a[best] {
                best = k;
            }
        }
        ArmPosition::ALL[best]
    }
}

/// Four class-vs-rest boosters over arm feature vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmClassifier {
    pub model: OneVsAllModel,
}

pub fn train_arm_classifier(
    dataset: &[(Vec<f64>, ArmPosition)],
    params: &BoostParams,
) -> Result<ArmClassifier> {
    if dataset.is_empty() {
        return Err(Error::Training("empty arm dataset".into()));
    }
    let x = FeatureMatrix::from_rows(&dataset.iter().map(|(v, _)| v.as_slice()).collect::<Vec<_>>());
    let y: Vec<usize> = dataset.iter().map(|(_, p)| p.index()).collect();
    Ok(ArmClassifier {
        model: ova_train(&x, &y, params)?,
    })
}

/// Raw ensemble scores; positions absent from training score 0.
pub fn arm_scores(features: &[f64], classifier: &ArmClassifier) -> ArmScores {
    let mut s = [0.0; 4];
    for (c, m) in classifier.model.classes.iter().zip(&classifier.model.models) {
        s[*c] = m.score(features);
    }
    ArmScores {
        up: s[0],
        down: s[1],
        right: s[2],
        forward: s[3],
    }
}
