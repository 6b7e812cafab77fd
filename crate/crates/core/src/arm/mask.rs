use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::session::DepthFrame;

/// Binary foreground image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForegroundMask {
    pub width: usize,
    pub height: usize,
    pub mask: Vec<bool>,
}

impl ForegroundMask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            mask: vec![false; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }

    /// Out-of-bounds reads are background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.mask[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.mask[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    /// Mean `(x, y)` of the foreground pixels.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    sx += x as f64;
                    sy += y as f64;
                    n += 1;
                }
            }
        }
        (n > 0).then(|| (sx / n as f64, sy / n as f64))
    }

    /// Keeps only the largest 8-connected component. Equal sizes resolve to
    /// the component found first in row-major order.
    pub fn keep_largest_component(&self) -> ForegroundMask {
        let (w, h) = (self.width, self.height);
        let mut label = vec![u32::MAX; w * h];
        let mut best: Option<(usize, u32)> = None;
        let mut queue = VecDeque::new();
        let mut next = 0u32;
        for start in 0..w * h {
            if !self.mask[start] || label[start] != u32::MAX {
                continue;
            }
            let id = next;
            next += 1;
            label[start] = id;
            queue.push_back(start);
            let mut size = 0usize;
            while let Some(i) = queue.pop_front() {
                size += 1;
                let (x, y) = ((i % w) as i64, (i / w) as i64);
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let (nx, ny) = (x + dx, y + dy);
                        if self.get_signed(nx, ny) {
                            let j = ny as usize * w + nx as usize;
                            if label[j] == u32::MAX {
                                label[j] = id;
                                queue.push_back(j);
                            }
                        }
                    }
                }
            }
            if best.is_none_or(|(s, _)| size > s) {
                best = Some((size, id));
            }
        }
        let mut out = ForegroundMask::empty(w, h);
        if let Some((_, id)) = best {
            for (o, &l) in out.mask.iter_mut().zip(&label) {
                *o = l == id;
            }
        }
        out
    }

    fn morph(&self, dilate: bool) -> ForegroundMask {
        let mut out = ForegroundMask::empty(self.width, self.height);
        for y in 0..self.height as i64 {
            for x in 0..self.width as i64 {
                let mut any = false;
                let mut all = true;
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let v = self.get_signed(x + dx, y + dy);
                        any |= v;
                        all &= v;
                    }
                }
                out.set(x as usize, y as usize, if dilate { any } else { all });
            }
        }
        out
    }

    /// 3x3 morphological closing (dilate, then erode).
    pub fn close3(&self) -> ForegroundMask {
        self.morph(true).morph(false)
    }
}

/// Segments the driver: a pixel is foreground when both depths are valid and
/// the frame is nearer than the background by more than `threshold_mm`. Only
/// the largest 8-connected blob survives.
pub fn remove_background(
    frame: &DepthFrame,
    background: &DepthFrame,
    threshold_mm: f64,
) -> Result<ForegroundMask> {
    if frame.width != background.width || frame.height != background.height {
        return Err(Error::InvalidInput(format!(
            "frame is {}x{} but background is {}x{}",
            frame.width, frame.height, background.width, background.height
        )));
    }
    let mask = frame
        .values
        .iter()
        .zip(&background.values)
        .map(|(&f, &b)| f != 0 && b != 0 && (b as f64 - f as f64) > threshold_mm)
        .collect();
    let raw = ForegroundMask {
        width: frame.width,
        height: frame.height,
        mask,
    };
    Ok(raw.keep_largest_component())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_frames_give_empty_mask() {
        let bg = DepthFrame::filled(16, 12, 2000);
        let m = remove_background(&bg, &bg, 80.0).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn near_block_is_segmented_exactly() {
        let bg = DepthFrame::filled(30, 30, 2000);
        let mut f = bg.clone();
        for y in 5..15 {
            for x in 8..18 {
                f.set(x, y, 1500);
            }
        }
        let m = remove_background(&f, &bg, 100.0).unwrap();
        for y in 0..30 {
            for x in 0..30 {
                assert_eq!(m.get(x, y), (8..18).contains(&x) && (5..15).contains(&y));
            }
        }
    }

    #[test]
    fn only_largest_blob_survives() {
        let bg = DepthFrame::filled(40, 40, 2000);
        let mut f = bg.clone();
        // 50 px blob
        for y in 2..7 {
            for x in 2..12 {
                f.set(x, y, 1000);
            }
        }
        // 7 px blob
        for x in 25..32 {
            f.set(x, 30, 1000);
        }
        let m = remove_background(&f, &bg, 80.0).unwrap();
        assert_eq!(m.count(), 50);
        assert!(!m.get(26, 30));
    }

    #[test]
    fn invalid_pixels_never_foreground() {
        let bg = DepthFrame::filled(8, 8, 2000);
        let mut f = DepthFrame::filled(8, 8, 1000);
        f.set(3, 3, 0);
        let m = remove_background(&f, &bg, 80.0).unwrap();
        assert!(!m.get(3, 3));
        assert_eq!(m.count(), 63);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = DepthFrame::filled(8, 8, 1);
        let b = DepthFrame::filled(8, 9, 1);
        assert!(remove_background(&a, &b, 80.0).is_err());
    }
}
