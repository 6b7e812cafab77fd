use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::session::FaceChannelRecord;

pub const GAZE_CLAMP: f64 = 2.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GazeFeatures {
    pub x_l: f64,
    pub y_l: f64,
    pub x_r: f64,
    pub y_r: f64,
}

impl GazeFeatures {
    pub fn as_array(&self) -> [f64; 4] {
        [self.x_l, self.y_l, self.x_r, self.y_r]
    }
}

/// Iris offset from the outer corner, divided by the corner distance.
pub fn eye_gaze(iris: (f64, f64), outer: (f64, f64), inner: (f64, f64)) -> Result<(f64, f64)> {
    let d = (outer.0 - inner.0).hypot(outer.1 - inner.1);
    if !(d > 1e-9) {
        return Err(Error::InvalidInput("eye corners coincide".into()));
    }
    let c = |v: f64| v.clamp(-GAZE_CLAMP, GAZE_CLAMP);
    Ok((c((iris.0 - outer.0) / d), c((iris.1 - outer.1) / d)))
}

pub fn gaze_features(left: (f64, f64), right: (f64, f64), face: &FaceChannelRecord) -> Result<GazeFeatures> {
    if !face.tracked {
        return Err(Error::InvalidInput("gaze needs a tracked face".into()));
    }
    let (x_l, y_l) = eye_gaze(left, face.left_outer(), face.left_inner())?;
    let (x_r, y_r) = eye_gaze(right, face.right_outer(), face.right_inner())?;
    Ok(GazeFeatures { x_l, y_l, x_r, y_r })
}

/// Maps a patch coordinate to the image. The patch is an axis-aligned
/// square centered between the corners whose side is the corner distance.
pub fn patch_to_image(p: (f64, f64), patch_size: usize, outer: (f64, f64), inner: (f64, f64)) -> (f64, f64) {
    let side = (outer.0 - inner.0).hypot(outer.1 - inner.1);
    let mid = (0.5 * (outer.0 + inner.0), 0.5 * (outer.1 + inner.1));
    let c = (patch_size as f64 - 1.0) / 2.0;
    let s = side / patch_size as f64;
    (mid.0 + (p.0 - c) * s, mid.1 + (p.1 - c) * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_cases_of_the_ratio() {
        let (o, i) = ((100.0, 50.0), (130.0, 50.0));
        assert_eq!(eye_gaze(o, o, i).unwrap(), (0.0, 0.0));
        assert_eq!(eye_gaze(i, o, i).unwrap(), (1.0, 0.0));
        assert_eq!(eye_gaze((115.0, 50.0), o, i).unwrap(), (0.5, 0.0));
        assert!(eye_gaze(o, o, o).is_err());
    }

    #[test]
    fn values_are_clamped() {
        let g = eye_gaze((1000.0, -1000.0), (0.0, 0.0), (1.0, 0.0)).unwrap();
        assert_eq!(g, (2.0, -2.0));
    }

    #[test]
    fn patch_center_maps_to_corner_midpoint() {
        let p = patch_to_image((29.5, 29.5), 60, (10.0, 20.0), (40.0, 20.0));
        assert_eq!(p, (25.0, 20.0));
    }
}
