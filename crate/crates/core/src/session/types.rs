use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five recognized driver states. Codes `0..=4` are stable on disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DistractionClass {
    PhoneCall,
    Drinking,
    TextMessage,
    ObjectDistraction,
    NormalDriving,
}

impl DistractionClass {
    pub const COUNT: usize = 5;

    pub const ALL: [DistractionClass; 5] = [
        DistractionClass::PhoneCall,
        DistractionClass::Drinking,
        DistractionClass::TextMessage,
        DistractionClass::ObjectDistraction,
        DistractionClass::NormalDriving,
    ];

    pub fn code(self) -> u8 {
        match self {
            DistractionClass::PhoneCall => 0,
            DistractionClass::Drinking => 1,
            DistractionClass::TextMessage => 2,
            DistractionClass::ObjectDistraction => 3,
            DistractionClass::NormalDriving => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn index(self) -> usize {
        self.code() as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            DistractionClass::PhoneCall => "phone_call",
            DistractionClass::Drinking => "drinking",
            DistractionClass::TextMessage => "text_message",
            DistractionClass::ObjectDistraction => "object_distraction",
            DistractionClass::NormalDriving => "normal_driving",
        }
    }
}

/// A depth raster in millimeters; `0` marks a pixel without a reading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthFrame {
    pub width: usize,
    pub height: usize,
    pub values: Vec<u16>,
}

impl DepthFrame {
    pub fn new(width: usize, height: usize, values: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Validation("depth frame dimensions must be positive".into()));
        }
        if values.len() != width * height {
            return Err(Error::Validation(format!(
                "depth frame has {} values, expected {}x{}",
                values.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, depth: u16) -> Self {
        Self {
            width,
            height,
            values: vec![depth; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, depth: u16) {
        self.values[y * self.width + x] = depth;
    }
}

/// An 8-bit grayscale raster (the stored eye patches).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::Validation(format!(
                "gray image buffer of {} bytes does not match {}x{}",
                pixels.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }
}

/// One row of the face-tracker stream.
///
/// When `tracked` is false every other field is meaningless; readers load
/// them as zeros.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct FaceChannelRecord {
    pub tracked: bool,
    pub pitch: f64,
    pub roll: f64,
    pub yaw: f64,
    /// AU10, AU26/27, AU20, AU13/15.
    pub aus: [f64; 4],
    /// Left outer, left inner, right outer, right inner corner as `(x, y)` pairs
    /// in color-frame pixels.
    pub eye_corners: [f64; 8],
}

impl FaceChannelRecord {
    pub fn untracked() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.tracked {
            return Ok(());
        }
        for (name, angle) in [("pitch", self.pitch), ("roll", self.roll), ("yaw", self.yaw)] {
            if !angle.is_finite() || !(-180.0..=180.0).contains(&angle) {
                return Err(Error::Validation(format!(
                    "{name} angle {angle} outside [-180, 180]"
                )));
            }
        }
        if self.aus.iter().chain(self.eye_corners.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite face-channel value".into()));
        }
        Ok(())
    }

    pub fn left_outer(&self) -> (f64, f64) {
        (self.eye_corners[0], self.eye_corners[1])
    }

    pub fn left_inner(&self) -> (f64, f64) {
        (self.eye_corners[2], self.eye_corners[3])
    }

    pub fn right_outer(&self) -> (f64, f64) {
        (self.eye_corners[4], self.eye_corners[5])
    }

    pub fn right_inner(&self) -> (f64, f64) {
        (self.eye_corners[6], self.eye_corners[7])
    }
}

/// Pinhole intrinsics of the depth camera.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub focal_length: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraIntrinsics {
    /// Kinect nominal focal length (571 px at 640x480) rescaled to `width`.
    pub fn kinect_scaled(width: usize, height: usize) -> Self {
        Self {
            focal_length: 571.0 * width as f64 / 640.0,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
        }
    }

    /// Back-projects pixel `(x, y)` at `depth` millimeters into camera space.
    #[inline]
    pub fn back_project(&self, x: f64, y: f64, depth: f64) -> [f64; 3] {
        [
            (x - self.cx) * depth / self.focal_length,
            (y - self.cy) * depth / self.focal_length,
            depth,
        ]
    }

    #[inline]
    pub fn project(&self, p: [f64; 3]) -> (f64, f64) {
        (
            self.focal_length * p[0] / p[2] + self.cx,
            self.focal_length * p[1] / p[2] + self.cy,
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub depth: DepthFrame,
    pub left_eye: GrayImage,
    pub right_eye: GrayImage,
    pub face: FaceChannelRecord,
    pub label: DistractionClass,
}

/// A recorded (or synthesized) driving session with aligned per-frame streams.
#[derive(Clone, Debug, PartialEq)]
pub struct Session {
    pub driver_id: String,
    pub frame_rate: f64,
    pub intrinsics: CameraIntrinsics,
    pub background: DepthFrame,
    pub frames: Vec<Frame>,
}

impl Session {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn labels(&self) -> Vec<DistractionClass> {
        self.frames.iter().map(|f| f.label).collect()
    }

    /// Checks every type invariant of the session.
    pub fn validate(&self) -> Result<()> {
        let (w, h) = (self.background.width, self.background.height);
        if w == 0 || h == 0 || self.background.values.len() != w * h {
            return Err(Error::Validation("background has invalid dimensions".into()));
        }
        if !(self.frame_rate.is_finite() && self.frame_rate > 0.0) {
            return Err(Error::Validation("frame rate must be positive".into()));
        }
        for (i, frame) in self.frames.iter().enumerate() {
            if frame.depth.width != w || frame.depth.height != h || frame.depth.values.len() != w * h {
                return Err(Error::Validation(format!(
                    "frame {i}: depth dimensions differ from background"
                )));
            }
            for eye in [&frame.left_eye, &frame.right_eye] {
                if eye.width != super::EYE_PATCH_SIZE || eye.height != super::EYE_PATCH_SIZE {
                    return Err(Error::Validation(format!(
                        "frame {i}: eye patch is {}x{}, expected {}x{}",
                        eye.width,
                        eye.height,
                        super::EYE_PATCH_SIZE,
                        super::EYE_PATCH_SIZE
                    )));
                }
            }
            frame
                .face
                .validate()
                .map_err(|e| Error::Validation(format!("frame {i}: {e}")))?;
        }
        Ok(())
    }
}
