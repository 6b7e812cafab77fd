use crate::error::{Error, Result};

/// Inclusive window bounds around `t`: `window / 2` back and the rest
/// forward, truncated to `[0, n)`.
pub fn window_bounds(t: usize, n: usize, window: usize) -> (usize, usize) {
    let back = window / 2;
    let forward = window.saturating_sub(1) - back;
    (t.saturating_sub(back), (t + forward).min(n - 1))
}

fn median_sorted(v: &[f64]) -> f64 {
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn population_std(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}

/// Running median followed by running population standard deviation of
/// every column, over a centered window.
pub fn smooth_features<R: AsRef<[f64]>>(rows: &[R], window: usize) -> Result<Vec<Vec<f64>>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidInput("smoothing an empty sequence".into()));
    }
    if window == 0 {
        return Err(Error::InvalidInput("smoothing window must be positive".into()));
    }
    let k = rows[0].as_ref().len();
    let mut out = vec![vec![0.0; 2 * k]; n];
    let mut sorted: Vec<f64> = Vec::with_capacity(window);
    for j in 0..k {
        sorted.clear();
        let (mut lo, mut hi) = (0usize, 0usize);
        // window is [lo, hi) in terms of inserted rows
        for t in 0..n {
            let (a, b) = window_bounds(t, n, window);
            while hi <= b {
                let v = rows[hi].as_ref()[j];
                let pos = sorted.partition_point(|x| x.total_cmp(&v).is_lt());
                sorted.insert(pos, v);
                hi += 1;
            }
            while lo < a {
                let v = rows[lo].as_ref()[j];
                let pos = sorted.partition_point(|x| x.total_cmp(&v).is_lt());
                sorted.remove(pos);
                lo += 1;
            }
            out[t][j] = median_sorted(&sorted);
            out[t][k + j] = population_std(&sorted);
        }
    }
    Ok(out)
}

/// Appends first (and optionally second) backward differences of every column.
pub fn append_deltas(rows: &mut [Vec<f64>], order: usize) {
    if order == 0 || rows.is_empty() {
        return;
    }
    let k = rows[0].len();
    let diff = |rows: &[Vec<f64>], from: usize| -> Vec<Vec<f64>> {
        (0..rows.len())
            .map(|t| {
                (from..from + k)
                    .map(|j| if t == 0 { 0.0 } else { rows[t][j] - rows[t - 1][j] })
                    .collect()
            })
            .collect()
    };
    let d1 = diff(rows, 0);
    for (r, d) in rows.iter_mut().zip(&d1) {
        r.extend_from_slice(d);
    }
    if order >= 2 {
        let d2 = diff(rows, k);
        for (r, d) in rows.iter_mut().zip(&d2) {
            r.extend_from_slice(d);
        }
    }
}

/// Most frequent label in the centered window; ties keep the frame's own label.
pub fn mode_filter(labels: &[usize], window: usize) -> Vec<usize> {
    let n = labels.len();
    if n == 0 || window == 0 {
        return labels.to_vec();
    }
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; k];
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let (a, b) = window_bounds(t, n, window);
        while hi <= b {
            counts[labels[hi]] += 1;
            hi += 1;
        }
        while lo < a {
            counts[labels[lo]] -= 1;
            lo += 1;
        }
        let max = *counts.iter().max().unwrap();
        let winners = counts.iter().filter(|&&c| c == max).count();
        out.push(if winners > 1 {
            labels[t]
        } else {
            counts.iter().position(|&c| c == max).unwrap()
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn oracle(rows: &[Vec<f64>], window: usize) -> Vec<Vec<f64>> {
        let n = rows.len() as i64;
        let k = rows[0].len();
        (0..n)
            .map(|t| {
                let lo = (t - (window / 2) as i64).max(0);
                let hi = (t + (window - 1 - window / 2) as i64).min(n - 1);
                let mut r = vec![0.0; 2 * k];
                for j in 0..k {
                    let mut v: Vec<f64> = (lo..=hi).map(|i| rows[i as usize][j]).collect();
                    let m = v.iter().sum::<f64>() / v.len() as f64;
                    r[k + j] = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt();
                    v.sort_by(f64::total_cmp);
                    let h = v.len() / 2;
                    r[j] = if v.len() % 2 == 1 { v[h] } else { (v[h - 1] + v[h]) / 2.0 };
                }
                r
            })
            .collect()
    }

    fn mode_oracle(labels: &[usize], window: usize) -> Vec<usize> {
        let n = labels.len() as i64;
        (0..n)
            .map(|t| {
                let lo = (t - (window / 2) as i64).max(0);
                let hi = (t + (window - 1 - window / 2) as i64).min(n - 1);
                let mut counts = std::collections::BTreeMap::new();
                for i in lo..=hi {
                    *counts.entry(labels[i as usize]).or_insert(0) += 1;
                }
                let max = *counts.values().max().unwrap();
                let top: Vec<usize> = counts.iter().filter(|(_, &c)| c == max).map(|(&l, _)| l).collect();
                if top.len() == 1 {
                    top[0]
                } else {
                    labels[t as usize]
                }
            })
            .collect()
    }

    #[test]
    fn window_is_fifty_back_and_fortynine_forward() {
        assert_eq!(window_bounds(100, 1000, 100), (50, 149));
        assert_eq!(window_bounds(3, 10, 100), (0, 9));
    }

    #[test]
    fn constant_sequence() {
        let rows = vec![vec![2.5, -1.0]; 300];
        for r in smooth_features(&rows, 100).unwrap() {
            assert_eq!(r, vec![2.5, -1.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn spike_is_removed_by_median() {
        let mut rows = vec![vec![1.0]; 200];
        rows[120][0] = 50.0;
        let out = smooth_features(&rows, 100).unwrap();
        assert!(out.iter().all(|r| r[0] == 1.0));
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let rows: Vec<Vec<f64>> = (0..500).map(|_| (0..3).map(|_| rng.random_range(-100.0..100.0)).collect()).collect();
        for w in [100, 7, 1] {
            let fast = smooth_features(&rows, w).unwrap();
            let slow = oracle(&rows, w);
            for (a, b) in fast.iter().flatten().zip(slow.iter().flatten()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn empty_input_errors() {
        assert!(smooth_features::<Vec<f64>>(&[], 100).is_err());
    }

    #[test]
    fn mode_filter_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let n = rng.random_range(1..300);
            let k = rng.random_range(1..6);
            let mut labels = Vec::with_capacity(n);
            let mut cur = rng.random_range(0..k);
            for _ in 0..n {
                if rng.random_bool(0.05) {
                    cur = rng.random_range(0..k);
                }
                labels.push(if rng.random_bool(0.1) { rng.random_range(0..k) } else { cur });
            }
            let w = [100, 9, 4][rng.random_range(0..3)];
            assert_eq!(mode_filter(&labels, w), mode_oracle(&labels, w));
        }
    }

    #[test]
    fn mode_filter_removes_single_flip() {
        let mut labels = vec![2; 300];
        labels[150] = 4;
        assert_eq!(mode_filter(&labels, 100), vec![2; 300]);
        assert_eq!(mode_filter(&[1; 50], 100), vec![1; 50]);
    }

    #[test]
    fn deltas_extend_columns() {
        let mut rows = vec![vec![1.0], vec![3.0], vec![6.0]];
        append_deltas(&mut rows, 2);
        assert_eq!(rows, vec![vec![1.0, 0.0, 0.0], vec![3.0, 2.0, 2.0], vec![6.0, 3.0, 1.0]]);
    }
}
