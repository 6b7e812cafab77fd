//! Circular Hough transform driven by gradient direction.

use super::patch::EyePatch;

/// Sobel gradients with edge clamping.
pub fn sobel(patch: &EyePatch) -> (Vec<f64>, Vec<f64>) {
    let n = patch.size;
    let mut gx = vec![0.0; n * n];
    let mut gy = vec![0.0; n * n];
    for y in 0..n as i64 {
        for x in 0..n as i64 {
            let p = |dx: i64, dy: i64| patch.get_clamped(x + dx, y + dy);
            let i = y as usize * n + x as usize;
            gx[i] = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            gy[i] = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
        }
    }
    (gx, gy)
}

/// Value at the given fraction of the sorted magnitudes.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    let k = ((v.len() - 1) as f64 * q).floor() as usize;
    *v.select_nth_unstable_by(k, f64::total_cmp).1
}

/// 3x3 box mean over in-bounds neighbours.
pub fn smooth3(values: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for y in 0..n {
        for x in 0..n {
            let (mut s, mut c) = (0.0, 0.0);
            for yy in y.saturating_sub(1)..=(y + 1).min(n - 1) {
                for xx in x.saturating_sub(1)..=(x + 1).min(n - 1) {
                    s += values[yy * n + xx];
                    c += 1.0;
                }
            }
            out[y * n + x] = s / c;
        }
    }
    out
}

/// Each edge pixel (gradient magnitude above the `edge_quantile` of the
/// patch, and nonzero) votes with its magnitude on both sides along its
/// gradient at every radius. The response is the per-pixel maximum over radii, 3x3 smoothed.
pub fn hough_response(patch: &EyePatch, radii: &[usize], edge_quantile: f64) -> Vec<f64> {
    let n = patch.size;
    let (gx, gy) = sobel(patch);
    let mag: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect();
    let thr = percentile(&mag, edge_quantile);
    let mut acc = vec![vec![0.0; n * n]; radii.len()];
    for y in 0..n {
        for x in 0..n {
            let i = y * n + x;
            let m = mag[i];
            if !(m > thr) || m <= 0.0 {
                continue;
            }
            let (ux, uy) = (gx[i] / m, gy[i] / m);
            for (k, &r) in radii.iter().enumerate() {
                for sign in [-1.0, 1.0] {
                    let cx = (x as f64 + sign * r as f64 * ux).round();
                    let cy = (y as f64 + sign * r as f64 * uy).round();
                    if cx >= 0.0 && cy >= 0.0 && (cx as usize) < n && (cy as usize) < n {
                        acc[k][cy as usize * n + cx as usize] += m;
                    }
                }
            }
        }
    }
    let best: Vec<f64> = (0..n * n)
        .map(|i| acc.iter().map(|a| a[i]).fold(0.0, f64::max))
        .collect();
    smooth3(&best, n)
}
