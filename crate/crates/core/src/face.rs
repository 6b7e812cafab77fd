//! Gating of the face-tracker stream: head angles and mouth action units.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::session::FaceChannelRecord;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FaceFeatures {
    pub pitch: f64,
    pub roll: f64,
    pub yaw: f64,
    /// AU10, AU26/27, AU20, AU13/15.
    pub aus: [f64; 4],
    pub valid: bool,
}

impl FaceFeatures {
    pub fn head(&self) -> [f64; 3] {
        [self.pitch, self.roll, self.yaw]
    }
}

/// Tracked records pass through; untracked ones repeat `previous` (or zeros
/// at stream start) flagged invalid.
pub fn face_features(record: &FaceChannelRecord, previous: Option<&FaceFeatures>) -> Result<FaceFeatures> {
    record.validate()?;
    if record.tracked {
        return Ok(FaceFeatures {
            pitch: record.pitch,
            roll: record.roll,
            yaw: record.yaw,
            aus: record.aus,
            valid: true,
        });
    }
    Ok(FaceFeatures {
        valid: false,
        ..previous.copied().unwrap_or_default()
    })
}

/// Applies [`face_features`] along a stream.
pub fn face_stream(records: &[FaceChannelRecord]) -> Result<Vec<FaceFeatures>> {
    let mut out: Vec<FaceFeatures> = Vec::with_capacity(records.len());
    for r in records {
        let f = face_features(r, out.last())?;
        out.push(f);
    }
    Ok(out)
}
