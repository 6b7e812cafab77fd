use crate::error::{Error, Result};
use crate::session::{GrayImage, EYE_PATCH_SIZE};

/// Square grayscale eye crop, row-major, intensities nominally in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EyePatch {
    pub size: usize,
    pub pixels: Vec<f64>,
}

impl EyePatch {
    pub fn new(size: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != size * size {
            return Err(Error::InvalidInput(format!(
                "eye patch of side {size} needs {} pixels, got {}",
                size * size,
                pixels.len()
            )));
        }
        if pixels.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("eye patch has non-finite pixels".into()));
        }
        Ok(Self { size, pixels })
    }

    pub fn from_gray(image: &GrayImage) -> Result<Self> {
        if image.width != EYE_PATCH_SIZE || image.height != EYE_PATCH_SIZE {
            return Err(Error::InvalidInput(format!(
                "eye patch must be {EYE_PATCH_SIZE}x{EYE_PATCH_SIZE}, got {}x{}",
                image.width, image.height
            )));
        }
        Self::new(EYE_PATCH_SIZE, image.pixels.iter().map(|&p| p as f64 / 255.0).collect())
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.size,
            height: self.size,
            pixels: self
                .pixels
                .iter()
                .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
                .collect(),
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.size + x]
    }

    /// Edge-clamped access.
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> f64 {
        let n = self.size as i64 - 1;
        self.get(x.clamp(0, n) as usize, y.clamp(0, n) as usize)
    }
}

/// Rescales a map to `[0, 1]`; constant maps become all zeros.
pub fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(hi > lo) {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}
