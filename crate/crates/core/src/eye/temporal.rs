use std::collections::VecDeque;

use super::locate::IrisEstimate;

/// Per-eye spatio-temporal check against the most recent accepted center.
#[derive(Clone, Debug)]
pub struct TemporalConsistency {
    pub max_jump: f64,
    pub history_len: usize,
    history: VecDeque<IrisEstimate>,
}

impl Default for TemporalConsistency {
    fn default() -> Self {
        Self::new(15.0, 3)
    }
}

fn dist(a: (usize, usize), b: (usize, usize)) -> f64 {
    (a.0 as f64 - b.0 as f64).hypot(a.1 as f64 - b.1 as f64)
}

/// Applies the rule against an explicit history (oldest first).
pub fn temporal_consistency(history: &[IrisEstimate], current: &IrisEstimate, max_jump: f64) -> IrisEstimate {
    let Some(prev) = history.iter().rev().find(|e| e.valid) else {
        return current.clone();
    };
    if dist(current.center, prev.center) <= max_jump {
        return current.clone();
    }
    let nearest = current
        .peaks
        .iter()
        .map(|&p| (p, dist(p, prev.center)))
        .filter(|&(_, d)| d <= max_jump)
        .min_by(|a, b| a.1.total_cmp(&b.1));
    let mut out = current.clone();
    match nearest {
        Some((p, _)) => out.center = p,
        None => out.valid = false,
    }
    out
}

impl TemporalConsistency {
    pub fn new(max_jump: f64, history_len: usize) -> Self {
        Self {
            max_jump,
            history_len,
            history: VecDeque::with_capacity(history_len + 1),
        }
    }

    pub fn update(&mut self, current: &IrisEstimate) -> IrisEstimate {
        let out = temporal_consistency(self.history.make_contiguous(), current, self.max_jump);
        if self.history_len > 0 {
            if self.history.len() == self.history_len {
                self.history.pop_front();
            }
            self.history.push_back(out.clone());
        }
        out
    }

    pub fn reset(&mut self) {
        self.history.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(c: (usize, usize), peaks: [(usize, usize); 3]) -> IrisEstimate {
        IrisEstimate {
            center: c,
            combined_score: 1.0,
            peaks,
            valid: true,
        }
    }

    #[test]
    fn empty_history_keeps_current() {
        let e = est((55, 10), [(1, 1); 3]);
        assert_eq!(temporal_consistency(&[], &e, 15.0), e);
    }

    #[test]
    fn small_moves_are_kept() {
        let prev = est((30, 30), [(30, 30); 3]);
        let e = est((31, 30), [(0, 0); 3]);
        assert_eq!(temporal_consistency(&[prev], &e, 15.0).center, (31, 30));
    }

    #[test]
    fn jump_snaps_to_nearby_peak() {
        let prev = est((30, 30), [(30, 30); 3]);
        let e = est((55, 10), [(31, 29), (55, 10), (2, 50)]);
        let out = temporal_consistency(&[prev], &e, 15.0);
        assert_eq!(out.center, (31, 29));
        assert!(out.valid);
    }

    #[test]
    fn jump_without_peak_is_invalid() {
        let prev = est((30, 30), [(30, 30); 3]);
        let e = est((55, 10), [(55, 10), (56, 12), (5, 55)]);
        let out = temporal_consistency(&[prev], &e, 15.0);
        assert_eq!(out.center, (55, 10));
        assert!(!out.valid);
    }

    #[test]
    fn invalid_streak_releases_the_lock() {
        let mut t = TemporalConsistency::new(15.0, 3);
        t.update(&est((10, 10), [(10, 10); 3]));
        let far = est((50, 50), [(50, 50); 3]);
        for _ in 0..3 {
            assert!(!t.update(&far).valid);
        }
        assert!(t.update(&far).valid);
    }
}
