//! Iris/neighbourhood separability from disk and half-annulus means.

use super::patch::EyePatch;

/// Fixed-point scale for the prefix sums, so constant patches give exactly
/// equal means.
const SCALE: f64 = (1u64 << 40) as f64;
pub const MIN_INNER_MEAN: f64 = 1e-6;

/// `S = (C2 - C1) / C1 + (C3 - C1) / C1` at every pixel. `C1` is the mean
/// over the disk of radius `r1`; `C2` and `C3` are means over the left and
/// right halves (`dx < 0`, `dx > 0`) of the annulus `r1 < d <= r23`. Only
/// in-bounds pixels are averaged; an empty half contributes nothing, and
/// `S = 0` wherever `C1 < 1e-6`.
pub fn separability_response(patch: &EyePatch, r1: usize, r23: usize) -> Vec<f64> {
    let n = patch.size;
    // sums stay below 2^40 * n^2, well inside i64 for any realistic patch
    let mut prefix = vec![0i64; n * (n + 1)];
    for y in 0..n {
        for x in 0..n {
            let q = (patch.get(x, y) * SCALE).round() as i64;
            prefix[y * (n + 1) + x + 1] = prefix[y * (n + 1) + x] + q;
        }
    }
    let half = |r: usize, dy: i64| -> Option<i64> {
        let r2 = (r * r) as i64;
        (dy * dy <= r2).then(|| ((r2 - dy * dy) as f64).sqrt().floor() as i64)
    };
    let r23i = r23 as i64;
    // per row offset: (outer half-width, inner half-width)
    let widths: Vec<(i64, Option<i64>)> = (-r23i..=r23i)
        .map(|dy| (half(r23, dy).unwrap_or(-1), half(r1, dy)))
        .collect();
    let last = n as i64 - 1;
    let span = |y: usize, a: i64, b: i64| -> (i64, i64) {
        let a = a.max(0);
        let b = b.min(last);
        if a > b {
            return (0, 0);
        }
        let row = y * (n + 1);
        (prefix[row + b as usize + 1] - prefix[row + a as usize], b - a + 1)
    };
    let mut out = vec![0.0; n * n];
    // [s1, n1, s2, n2, s3, n3] per center of the current row
    let mut acc = vec![[0i64; 6]; n];
    for cy in 0..n as i64 {
        acc.iter_mut().for_each(|a| *a = [0; 6]);
        for (k, &(outer, inner)) in widths.iter().enumerate() {
            let y = cy + k as i64 - r23i;
            if y < 0 || y > last {
                continue;
            }
            let y = y as usize;
            // disk covers |dx| <= inner; halves start beyond it (or at |dx| = 1)
            let gap = inner.map_or(1, |h| h + 1);
            let row = &prefix[y * (n + 1)..(y + 1) * (n + 1)];
            let reach = outer.max(inner.unwrap_or(0));
            for (cx, a) in acc.iter_mut().enumerate() {
                let cx = cx as i64;
                if cx >= reach && cx + reach <= last {
                    // masks fully inside the row
                    let at = |x: i64| row[x as usize];
                    if let Some(h) = inner {
                        a[0] += at(cx + h + 1) - at(cx - h);
                        a[1] += 2 * h + 1;
                    }
                    if outer >= gap {
                        a[2] += at(cx - gap + 1) - at(cx - outer);
                        a[4] += at(cx + outer + 1) - at(cx + gap);
                        a[3] += outer - gap + 1;
                        a[5] += outer - gap + 1;
                    }
                    continue;
                }
                if let Some(h) = inner {
                    let (s, c) = span(y, cx - h, cx + h);
                    a[0] += s;
                    a[1] += c;
                }
                if outer >= gap {
                    let (s, c) = span(y, cx - outer, cx - gap);
                    a[2] += s;
                    a[3] += c;
                    let (s, c) = span(y, cx + gap, cx + outer);
                    a[4] += s;
                    a[5] += c;
                }
            }
        }
        let mean = |s: i64, c: i64| s as f64 / SCALE / c as f64;
        for (cx, a) in acc.iter().enumerate() {
            let [s1, n1, s2, n2, s3, n3] = *a;
            let c1 = mean(s1, n1);
            if n1 == 0 || c1 < MIN_INNER_MEAN {
                continue;
            }
            let mut v = 0.0;
            if n2 > 0 {
                v += (mean(s2, n2) - c1) / c1;
            }
            if n3 > 0 {
                v += (mean(s3, n3) - c1) / c1;
            }
            out[cy as usize * n + cx] = v;
        }
    }
    out
}
