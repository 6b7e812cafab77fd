//! Profile view: the foreground projected onto the (image row, depth) plane.

use super::mask::ForegroundMask;
use crate::error::{Error, Result};
use crate::session::{CameraIntrinsics, DepthFrame};

/// Empty columns kept on both sides of the depth range so closing is not
/// clipped by the image border.
pub const PROFILE_PAD: usize = 2;

/// Binary profile image plus what is needed to lift its pixels back to 3D.
#[derive(Clone, Debug)]
pub struct ProfileView {
    /// Horizontal axis: depth bin (plus padding); vertical axis: image row.
    pub mask: ForegroundMask,
    pub min_depth: f64,
    pub bin_mm: f64,
    /// Mean camera-space X of the source pixels per profile cell.
    cell_x: Vec<Option<f64>>,
    /// Mean camera-space X per image row, for cells filled in by closing.
    row_x: Vec<Option<f64>>,
    intrinsics: CameraIntrinsics,
}

impl ProfileView {
    pub fn depth_of_column(&self, column: usize) -> f64 {
        self.min_depth + (column as f64 - PROFILE_PAD as f64 + 0.5) * self.bin_mm
    }

    /// 3D point (mm) for profile pixel `(column, row)`.
    pub fn point(&self, column: usize, row: usize) -> [f64; 3] {
        let z = self.depth_of_column(column);
        let y = (row as f64 - self.intrinsics.cy) * z / self.intrinsics.focal_length;
        let x = self.cell_x[row * self.mask.width + column]
            .or(self.row_x[row])
            .unwrap_or(0.0);
        [x, y, z]
    }
}

/// Renders foreground pixels into a profile image without cleanup.
fn render(
    frame: &DepthFrame,
    mask: &ForegroundMask,
    intrinsics: CameraIntrinsics,
    bin_mm: f64,
) -> Result<ProfileView> {
    if mask.width != frame.width || mask.height != frame.height {
        return Err(Error::InvalidInput("mask and frame dimensions differ".into()));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for (i, &m) in mask.mask.iter().enumerate() {
        if m {
            let d = frame.values[i] as f64;
            min = min.min(d);
            max = max.max(d);
        }
    }
    if !min.is_finite() {
        return Err(Error::InvalidInput("profile projection of an empty mask".into()));
    }
    let bins = ((max - min) / bin_mm).floor() as usize + 1;
    let width = bins + 2 * PROFILE_PAD;
    let height = frame.height;
    let mut out = ForegroundMask::empty(width, height);
    let mut sum_x = vec![(0.0f64, 0usize); width * height];
    let mut row_sum = vec![(0.0f64, 0usize); height];
    for y in 0..frame.height {
        for x in 0..frame.width {
            if !mask.get(x, y) {
                continue;
            }
            let d = frame.get(x, y) as f64;
            let col = ((d - min) / bin_mm).floor() as usize + PROFILE_PAD;
            out.set(col, y, true);
            let px = intrinsics.back_project(x as f64, y as f64, d)[0];
            let cell = &mut sum_x[y * width + col];
            cell.0 += px;
            cell.1 += 1;
            row_sum[y].0 += px;
            row_sum[y].1 += 1;
        }
    }
    let mean = |(s, n): (f64, usize)| (n > 0).then(|| s / n as f64);
    Ok(ProfileView {
        mask: out,
        min_depth: min,
        bin_mm,
        cell_x: sum_x.into_iter().map(mean).collect(),
        row_x: row_sum.into_iter().map(mean).collect(),
        intrinsics,
    })
}

/// Profile-view binary image: depth bins of `bin_mm` over the foreground
/// depth range, one 3x3 closing, largest component kept.
pub fn profile_projection(
    frame: &DepthFrame,
    mask: &ForegroundMask,
    intrinsics: CameraIntrinsics,
    bin_mm: f64,
) -> Result<ProfileView> {
    let mut view = render(frame, mask, intrinsics, bin_mm)?;
    view.mask = view.mask.close3().keep_largest_component();
    Ok(view)
}
