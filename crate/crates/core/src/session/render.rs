//! Rasterization helpers for the synthetic generator: a seated driver in a
//! depth frame and grayscale eye patches.

use super::types::{CameraIntrinsics, DepthFrame};
use super::EYE_PATCH_SIZE;

/// Far wall depth behind the seat (mm).
pub const INTERIOR_DEPTH: f64 = 2300.0;
/// Seat back depth (mm).
pub const SEAT_DEPTH: f64 = 1250.0;

/// Camera-space 3D point in millimeters (Y points down).
pub type Point3 = [f64; 3];

/// Floating-point depth buffer with min-compositing.
pub struct DepthCanvas {
    pub width: usize,
    pub height: usize,
    pub intrinsics: CameraIntrinsics,
    pub depth: Vec<f64>,
}

impl DepthCanvas {
    pub fn new(width: usize, height: usize, intrinsics: CameraIntrinsics, fill: f64) -> Self {
        Self {
            width,
            height,
            intrinsics,
            depth: vec![fill; width * height],
        }
    }

    #[inline]
    fn put(&mut self, x: usize, y: usize, z: f64) {
        let d = &mut self.depth[y * self.width + x];
        if z < *d {
            *d = z;
        }
    }

    /// Axis-aligned rectangle in the plane `z`, with a lateral curvature bulge.
    pub fn plane_rect(&mut self, x0: f64, x1: f64, y0: f64, y1: f64, z: f64, bulge: f64) {
        let k = self.intrinsics;
        let half = 0.5 * (x1 - x0);
        let mid = 0.5 * (x0 + x1);
        for py in 0..self.height {
            let y = (py as f64 + 0.5 - k.cy) * z / k.focal_length;
            if y < y0 || y > y1 {
                continue;
            }
            for px in 0..self.width {
                let x = (px as f64 + 0.5 - k.cx) * z / k.focal_length;
                if x < x0 || x > x1 {
                    continue;
                }
                let t = (x - mid) / half;
                self.put(px, py, z + bulge * t * t);
            }
        }
    }

    /// Torso: a plane with rounded top corners (shoulders).
    pub fn torso(&mut self, center_x: f64, top_y: f64, half_width: f64, z: f64) {
        let k = self.intrinsics;
        let round = 70.0;
        for py in 0..self.height {
            let y = (py as f64 + 0.5 - k.cy) * z / k.focal_length;
            if y < top_y {
                continue;
            }
            for px in 0..self.width {
                let x = (px as f64 + 0.5 - k.cx) * z / k.focal_length;
                let dx = (x - center_x).abs();
                if dx > half_width {
                    continue;
                }
                // round the shoulder corners
                let cy = top_y + round;
                let cx = half_width - round;
                if y < cy && dx > cx {
                    let (ex, ey) = (dx - cx, cy - y);
                    if ex * ex + ey * ey > round * round {
                        continue;
                    }
                }
                let t = dx / half_width;
                self.put(px, py, z + 60.0 * t * t);
            }
        }
    }

    pub fn sphere(&mut self, c: Point3, radius: f64) {
        if c[2] <= radius {
            return;
        }
        let k = self.intrinsics;
        let (u, v) = k.project(c);
        let rp = k.focal_length * radius / c[2];
        let x0 = (u - rp).floor().max(0.0) as i64;
        let x1 = (u + rp).ceil().min(self.width as f64 - 1.0) as i64;
        let y0 = (v - rp).floor().max(0.0) as i64;
        let y1 = (v + rp).ceil().min(self.height as f64 - 1.0) as i64;
        let scale = c[2] / k.focal_length;
        for py in y0..=y1 {
            for px in x0..=x1 {
                let dx = (px as f64 + 0.5 - u) * scale;
                let dy = (py as f64 + 0.5 - v) * scale;
                let d2 = dx * dx + dy * dy;
                if d2 <= radius * radius {
                    self.put(px as usize, py as usize, c[2] - (radius * radius - d2).sqrt());
                }
            }
        }
    }

    /// Capsule between `a` and `b`, radius interpolated from `ra` to `rb`.
    pub fn capsule(&mut self, a: Point3, b: Point3, ra: f64, rb: f64) {
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2) + (b[2] - a[2]).powi(2)).sqrt();
        let step = (ra.min(rb) / 3.0).max(1.0);
        let n = (len / step).ceil().max(1.0) as usize;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let p = [
                a[0] + t * (b[0] - a[0]),
                a[1] + t * (b[1] - a[1]),
                a[2] + t * (b[2] - a[2]),
            ];
            self.sphere(p, ra + t * (rb - ra));
        }
    }

    /// Quantizes to a depth frame; `far` values become invalid (0) only when
    /// above the sensor range.
    pub fn to_frame(&self) -> DepthFrame {
        let values = self
            .depth
            .iter()
            .map(|&d| d.round().clamp(0.0, 65535.0) as u16)
            .collect();
        DepthFrame {
            width: self.width,
            height: self.height,
            values,
        }
    }
}

/// Empty car interior with the driver seat, as seen by the depth camera.
pub fn seat_scene(width: usize, height: usize, intrinsics: CameraIntrinsics) -> DepthCanvas {
    let mut canvas = DepthCanvas::new(width, height, intrinsics, INTERIOR_DEPTH);
    // seat back and headrest
    canvas.plane_rect(-300.0, 300.0, -330.0, 1200.0, SEAT_DEPTH, 40.0);
    canvas.plane_rect(-140.0, 140.0, -520.0, -300.0, SEAT_DEPTH - 20.0, 20.0);
    canvas
}

/// Appearance of a synthetic eye patch (intensities in `[0, 1]`).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EyeAppearance {
    pub sclera: f64,
    pub skin: f64,
    pub iris: f64,
    pub iris_radius: f64,
}

impl Default for EyeAppearance {
    fn default() -> Self {
        Self {
            sclera: 0.82,
            skin: 0.6,
            iris: 0.2,
            iris_radius: 7.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EyeState {
    /// Iris visible, centered at patch coordinates `(x, y)`.
    Open { center: (f64, f64) },
    /// Closed lid rendered as a horizontal edge at `edge_row`.
    Closed { edge_row: f64 },
}

/// Renders a noise-free eye patch, row-major `EYE_PATCH_SIZE`².
pub fn eye_patch(app: &EyeAppearance, state: EyeState) -> Vec<f64> {
    let n = EYE_PATCH_SIZE;
    let c = (n as f64 - 1.0) / 2.0;
    let mut out = vec![0.0; n * n];
    for y in 0..n {
        for x in 0..n {
            let (fx, fy) = (x as f64, y as f64);
            let v = match state {
                EyeState::Open { center } => {
                    let ex = (fx - c) / 27.0;
                    let ey = (fy - c) / 18.0;
                    let opening = (1.0 - (ex * ex + ey * ey).sqrt()) * 18.0;
                    let base = app.skin + (app.sclera - app.skin) * (opening + 0.5).clamp(0.0, 1.0);
                    let d = ((fx - center.0).powi(2) + (fy - center.1).powi(2)).sqrt();
                    let cover = (app.iris_radius + 0.5 - d).clamp(0.0, 1.0);
                    base + (app.iris - base) * cover
                }
                EyeState::Closed { edge_row } => {
                    let t = (fy - edge_row + 0.5).clamp(0.0, 1.0);
                    let lid = app.skin * 0.55;
                    lid + (app.skin - lid) * t
                }
            };
            out[y * n + x] = v;
        }
    }
    out
}
