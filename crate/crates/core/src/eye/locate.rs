use serde::{Deserialize, Serialize};

use super::gabor::GaborFilter;
use super::hough::hough_response;
use super::patch::{min_max_normalize, EyePatch};
use super::separability::separability_response;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterBankParams {
    pub hough_radii: Vec<usize>,
    pub hough_edge_quantile: f64,
    pub gabor_frequency: f64,
    pub gabor_sigma: f64,
    pub gabor_support: usize,
    pub mask_r1: usize,
    pub mask_r23: usize,
}

impl Default for FilterBankParams {
    fn default() -> Self {
        Self {
            hough_radii: vec![6, 7, 8, 9],
            hough_edge_quantile: 0.7,
            gabor_frequency: 0.0884,
            gabor_sigma: 4.5,
            gabor_support: 31,
            mask_r1: 6,
            mask_r23: 15,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrisEstimate {
    pub center: (usize, usize),
    pub combined_score: f64,
    /// Argmax of the Hough, Gabor and separability responses.
    pub peaks: [(usize, usize); 3],
    pub valid: bool,
}

/// Intensity range the patch is mapped to before filtering. Keeping the
/// darkest pixel off zero keeps the separability ratio defined on the iris.
const NORMALIZED_FLOOR: f64 = 0.1;
/// Grid the normalized intensities are snapped to, so affinely related
/// patches filter identically.
const QUANTUM: f64 = (1u64 << 20) as f64;

fn first_argmax(v: &[f64], n: usize) -> ((usize, usize), f64) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    ((best % n, best / n), v[best])
}

/// The three filter responses plus their normalized sum.
#[derive(Clone, Debug)]
pub struct FilterResponses {
    pub hough: Vec<f64>,
    pub gabor: Vec<f64>,
    pub separability: Vec<f64>,
    pub combined: Vec<f64>,
}

pub struct FilterBank {
    pub params: FilterBankParams,
    gabor: GaborFilter,
    size: usize,
}

impl FilterBank {
    pub fn new(size: usize, params: FilterBankParams) -> Self {
        let gabor = GaborFilter::new(size, params.gabor_support, params.gabor_frequency, params.gabor_sigma);
        Self { params, gabor, size }
    }

    /// Min-max normalizes the patch into `[0.1, 1]` on a fixed grid.
    pub fn normalize(&self, patch: &EyePatch) -> EyePatch {
        let unit = min_max_normalize(&patch.pixels);
        let pixels = unit
            .into_iter()
            .map(|v| ((NORMALIZED_FLOOR + (1.0 - NORMALIZED_FLOOR) * v) * QUANTUM).round() / QUANTUM)
            .collect();
        EyePatch {
            size: patch.size,
            pixels,
        }
    }

    pub fn responses(&self, patch: &EyePatch) -> FilterResponses {
        let p = self.normalize(patch);
        let hough = hough_response(&p, &self.params.hough_radii, self.params.hough_edge_quantile);
        let gabor = self.gabor.response(&p);
        let separability = separability_response(&p, self.params.mask_r1, self.params.mask_r23);
        let (h, g, s) = (
            min_max_normalize(&hough),
            min_max_normalize(&gabor),
            min_max_normalize(&separability),
        );
        let combined = (0..h.len()).map(|i| h[i] + g[i] + s[i]).collect();
        FilterResponses {
            hough,
            gabor,
            separability,
            combined,
        }
    }

    pub fn locate(&self, patch: &EyePatch) -> IrisEstimate {
        assert_eq!(patch.size, self.size, "patch size differs from filter bank");
        let r = self.responses(patch);
        let n = self.size;
        let (center, combined_score) = first_argmax(&r.combined, n);
        IrisEstimate {
            center,
            combined_score,
            peaks: [
                first_argmax(&r.hough, n).0,
                first_argmax(&r.gabor, n).0,
                first_argmax(&r.separability, n).0,
            ],
            valid: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::random_eye_patch;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_patch_defaults_to_origin() {
        let bank = FilterBank::new(60, FilterBankParams::default());
        let e = bank.locate(&EyePatch::new(60, vec![0.5; 3600]).unwrap());
        assert_eq!(e.center, (0, 0));
        assert_eq!(e.combined_score, 0.0);
        assert!(e.valid);
    }

    #[test]
    fn open_eyes_are_localized() {
        let bank = FilterBank::new(60, FilterBankParams::default());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut hits = 0;
        for _ in 0..40 {
            let s = random_eye_patch(&mut rng, true, 0.05);
            let (cx, cy) = s.center.unwrap();
            let e = bank.locate(&EyePatch::new(60, s.pixels).unwrap());
            if (e.center.0 as f64 - cx).hypot(e.center.1 as f64 - cy) <= 2.0 {
                hits += 1;
            }
        }
        assert!(hits >= 38, "{hits}/40");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn argmax_survives_affine_rescaling(seed in 0u64..10_000, a in 0.05f64..20.0, b in -5.0f64..5.0) {
            let bank = FilterBank::new(60, FilterBankParams::default());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_eye_patch(&mut rng, seed % 3 != 0, 0.05);
            let p = EyePatch::new(60, s.pixels.clone()).unwrap();
            let q = EyePatch::new(60, s.pixels.iter().map(|v| a * v + b).collect()).unwrap();
            prop_assert_eq!(bank.locate(&p).center, bank.locate(&q).center);
        }
    }
}
