use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arm::ArmScores;
use crate::error::Error;
use crate::eye::EyeFrameFeatures;
use crate::face::FaceFeatures;

pub const FRAME_FEATURES: usize = 17;

pub const FEATURE_NAMES: [&str; FRAME_FEATURES] = [
    "arm_up", "arm_down", "arm_right", "arm_forward", "gaze_xl", "gaze_yl", "gaze_xr", "gaze_yr",
    "closure_left", "closure_right", "pitch", "roll", "yaw", "au10", "au26_27", "au20", "au13_15",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrameFeatures {
    pub values: [f64; FRAME_FEATURES],
    pub arm_valid: bool,
    pub eye_valid: bool,
    pub face_valid: bool,
}

pub fn assemble_frame_features(
    arm: &ArmScores,
    arm_valid: bool,
    eye: &EyeFrameFeatures,
    face: &FaceFeatures,
) -> FrameFeatures {
    let mut values = [0.0; FRAME_FEATURES];
    values[0..4].copy_from_slice(&arm.as_array());
    values[4..8].copy_from_slice(&eye.gaze.as_array());
    values[8..10].copy_from_slice(&eye.closure);
    values[10..13].copy_from_slice(&face.head());
    values[13..17].copy_from_slice(&face.aus);
    FrameFeatures {
        values,
        arm_valid,
        eye_valid: eye.valid,
        face_valid: face.valid,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureGroup {
    Arm,
    Gaze,
    Closure,
    Head,
    Aus,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 5] = [Self::Arm, Self::Gaze, Self::Closure, Self::Head, Self::Aus];

    pub fn range(self) -> std::ops::Range<usize> {
        match self {
            Self::Arm => 0..4,
            Self::Gaze => 4..8,
            Self::Closure => 8..10,
            Self::Head => 10..13,
            Self::Aus => 13..17,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Arm => "arm",
            Self::Gaze => "gaze",
            Self::Closure => "closure",
            Self::Head => "head",
            Self::Aus => "aus",
        }
    }
}

/// Which feature groups enter fusion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSubset {
    pub groups: Vec<FeatureGroup>,
}

impl Default for FeatureSubset {
    fn default() -> Self {
        Self {
            groups: FeatureGroup::ALL.to_vec(),
        }
    }
}

impl FeatureSubset {
    /// Selected frame-feature indices in ascending order.
    pub fn indices(&self) -> Vec<usize> {
        FeatureGroup::ALL
            .iter()
            .filter(|g| self.groups.contains(g))
            .flat_map(|g| g.range())
            .collect()
    }

    pub fn select(&self, f: &FrameFeatures) -> Vec<f64> {
        self.indices().into_iter().map(|i| f.values[i]).collect()
    }
}

impl FromStr for FeatureSubset {
    type Err = Error;

    /// Comma-separated group names, e.g. `arm,gaze,head`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let mut groups = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let g = FeatureGroup::ALL
                .into_iter()
                .find(|g| g.name() == part)
                .ok_or_else(|| Error::InvalidInput(format!("unknown feature group '{part}'")))?;
            if !groups.contains(&g) {
                groups.push(g);
            }
        }
        if groups.is_empty() {
            return Err(Error::InvalidInput("feature subset is empty".into()));
        }
        Ok(Self { groups })
    }
}
