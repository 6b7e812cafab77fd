//! Principal axes of contour segments.

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and the matching unit eigenvectors (columns).
pub fn symmetric_eigen3(m: [[f64; 3]; 3]) -> ([f64; 3], [Vec3; 3]) {
    let mut a = m;
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let scale = a.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return ([0.0; 3], [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    }
    for _sweep in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off <= 1e-12 * scale * 1e-3 {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q].abs() <= f64::MIN_POSITIVE {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // A <- J^T A J
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let vals = [a[0][0], a[1][1], a[2][2]];
    let vecs = [
        [v[0][0], v[1][0], v[2][0]],
        [v[0][1], v[1][1], v[2][1]],
        [v[0][2], v[1][2], v[2][2]],
    ];
    (vals, vecs)
}

/// Flips `v` so its first largest-magnitude component is positive.
pub fn sign_normalize(v: Vec3) -> Vec3 {
    let mut k = 0;
    for i in 1..3 {
        if v[i].abs() > v[k].abs() {
            k = i;
        }
    }
    if v[k] < 0.0 {
        [-v[0], -v[1], -v[2]]
    } else {
        v
    }
}

fn normalize(v: Vec3) -> Vec3 {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn lex_greater(a: &Vec3, b: &Vec3) -> bool {
    for i in 0..3 {
        if a[i] != b[i] {
            return a[i] > b[i];
        }
    }
    false
}

/// Main axis of a point cloud: unit eigenvector of the population covariance
/// with the largest eigenvalue, sign-normalized. Degenerate clouds yield the
/// zero vector. Near-equal leading eigenvalues resolve to the
/// lexicographically largest normalized eigenvector.
pub fn principal_axis(points: &[Vec3]) -> Vec3 {
    if points.is_empty() {
        return [0.0; 3];
    }
    let n = points.len() as f64;
    let mut mean = [0.0; 3];
    for p in points {
        for k in 0..3 {
            mean[k] += p[k];
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    let mut cov = [[0.0; 3]; 3];
    for p in points {
        let d = [p[0] - mean[0], p[1] - mean[1], p[2] - mean[2]];
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += d[i] * d[j];
            }
        }
    }
    for row in cov.iter_mut() {
        for c in row.iter_mut() {
            *c /= n;
        }
    }
    let trace = cov[0][0] + cov[1][1] + cov[2][2];
    if trace <= 1e-12 {
        return [0.0; 3];
    }
    let (vals, vecs) = symmetric_eigen3(cov);
    let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * top.abs().max(1e-300);
    let mut best: Option<Vec3> = None;
    for i in 0..3 {
        if top - vals[i] <= tol {
            let cand = sign_normalize(normalize(vecs[i]));
            if best.is_none_or(|b| lex_greater(&cand, &b)) {
                best = Some(cand);
            }
        }
    }
    best.unwrap()
}

/// Run lengths for splitting `len` items into `parts` consecutive runs; the
/// remainder goes to the first runs.
pub fn split_sizes(len: usize, parts: usize) -> Vec<usize> {
    let base = len / parts;
    let extra = len % parts;
    (0..parts).map(|i| base + usize::from(i < extra)).collect()
}

/// Main axis of each of `n_segments` equal consecutive runs of `points`.
pub fn segment_axes(points: &[Vec3], n_segments: usize) -> Result<Vec<Vec3>> {
    if n_segments == 0 {
        return Err(Error::InvalidInput("segment count must be positive".into()));
    }
    if points.len() < n_segments {
        return Err(Error::InvalidInput(format!(
            "chain of {} points is shorter than {} segments",
            points.len(),
            n_segments
        )));
    }
    let mut out = Vec::with_capacity(n_segments);
    let mut start = 0;
    for size in split_sizes(points.len(), n_segments) {
        out.push(principal_axis(&points[start..start + size]));
        start += size;
    }
    Ok(out)
}
