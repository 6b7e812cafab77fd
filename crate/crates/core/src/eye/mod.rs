//! Eye behaviour: iris localization from three filter responses, temporal
//! checks, gaze ratios and open/closed scoring.

pub mod gabor;
pub mod gaze;
pub mod hough;
pub mod locate;
pub mod patch;
pub mod separability;
pub mod temporal;
pub mod template;

pub use gaze::{gaze_features, patch_to_image, GazeFeatures};
pub use locate::{FilterBank, FilterBankParams, FilterResponses, IrisEstimate};
pub use patch::EyePatch;
pub use separability::separability_response;
pub use temporal::{temporal_consistency, TemporalConsistency};
pub use template::{eye_closure_score, iris_template, train_closure_svm, TEMPLATE_SIZE};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::learners::{RbfSvmModel, SvmParams};
use crate::session::{random_eye_patch, FaceChannelRecord, EYE_PATCH_SIZE};

/// Gaze and closure output for one frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EyeFrameFeatures {
    pub gaze: GazeFeatures,
    /// Left, right.
    pub closure: [f64; 2],
    /// Left and right iris centers in patch coordinates.
    pub iris: [(usize, usize); 2],
    pub valid: bool,
}

/// Stateful per-session eye processing. While the face is untracked the
/// last valid output is repeated with `valid = false`.
pub struct EyeBehavior<'a> {
    bank: &'a FilterBank,
    svm: Option<&'a RbfSvmModel>,
    left: TemporalConsistency,
    right: TemporalConsistency,
    last: EyeFrameFeatures,
}

impl<'a> EyeBehavior<'a> {
    pub fn new(bank: &'a FilterBank, svm: Option<&'a RbfSvmModel>) -> Self {
        Self {
            bank,
            svm,
            left: TemporalConsistency::default(),
            right: TemporalConsistency::default(),
            last: EyeFrameFeatures::default(),
        }
    }

    pub fn process(&mut self, left: &EyePatch, right: &EyePatch, face: &FaceChannelRecord) -> EyeFrameFeatures {
        if !face.tracked {
            return EyeFrameFeatures {
                valid: false,
                ..self.last
            };
        }
        let el = self.left.update(&self.bank.locate(left));
        let er = self.right.update(&self.bank.locate(right));
        let to_f = |c: (usize, usize)| (c.0 as f64, c.1 as f64);
        let il = patch_to_image(to_f(el.center), left.size, face.left_outer(), face.left_inner());
        let ir = patch_to_image(to_f(er.center), right.size, face.right_outer(), face.right_inner());
        let Ok(gaze) = gaze_features(il, ir, face) else {
            return EyeFrameFeatures {
                valid: false,
                ..self.last
            };
        };
        let closure = match self.svm {
            Some(m) => [
                eye_closure_score(&iris_template(left, el.center), m),
                eye_closure_score(&iris_template(right, er.center), m),
            ],
            None => [0.0; 2],
        };
        let out = EyeFrameFeatures {
            gaze,
            closure,
            iris: [el.center, er.center],
            valid: el.valid && er.valid,
        };
        self.last = EyeFrameFeatures { valid: true, ..out };
        out
    }
}

/// Labelled templates from synthetic patches, centered where the filter
/// bank puts the iris (as at inference time).
pub fn synthetic_closure_templates(bank: &FilterBank, n_open: usize, n_closed: usize, seed: u64) -> Vec<(Vec<f64>, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_open + n_closed);
    let paired = 2 * n_open.min(n_closed);
    for k in 0..n_open + n_closed {
        let open = if k < paired { k % 2 == 0 } else { n_open > n_closed };
        let s = random_eye_patch(&mut rng, open, 0.05);
        let p = EyePatch {
            size: EYE_PATCH_SIZE,
            pixels: s.pixels,
        };
        let e = bank.locate(&p);
        out.push((iris_template(&p, e.center), open));
    }
    out
}

/// Closure classifier trained on a synthetic bank.
pub fn train_synthetic_closure_svm(bank: &FilterBank, per_class: usize, seed: u64) -> Result<RbfSvmModel> {
    train_closure_svm(&synthetic_closure_templates(bank, per_class, per_class, seed), &SvmParams::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_scores_separate_open_and_closed() {
        let bank = FilterBank::new(60, FilterBankParams::default());
        let svm = train_synthetic_closure_svm(&bank, 150, 1).unwrap();
        let test = synthetic_closure_templates(&bank, 50, 50, 99);
        let correct = test.iter().filter(|(t, o)| (eye_closure_score(t, &svm) > 0.0) == *o).count();
        assert!(correct >= 95, "{correct}/100");
        let (t, _) = &test[0];
        assert_eq!(eye_closure_score(t, &svm), eye_closure_score(t, &svm));
    }

    #[test]
    fn template_bank_is_balanced() {
        let bank = FilterBank::new(60, FilterBankParams::default());
        let t = synthetic_closure_templates(&bank, 7, 3, 2);
        assert_eq!(t.iter().filter(|(_, o)| *o).count(), 7);
        assert_eq!(t.len(), 10);
    }

    #[test]
    fn untracked_frames_repeat_last_output() {
        let bank = FilterBank::new(60, FilterBankParams::default());
        let mut eb = EyeBehavior::new(&bank, None);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = EyePatch::new(60, random_eye_patch(&mut rng, true, 0.02).pixels).unwrap();
        let mut face = FaceChannelRecord {
            tracked: true,
            eye_corners: [200.0, 100.0, 228.0, 100.0, 300.0, 100.0, 272.0, 100.0],
            ..FaceChannelRecord::untracked()
        };
        let a = eb.process(&p, &p, &face);
        face.tracked = false;
        let b = eb.process(&p, &p, &face);
        assert!(!b.valid);
        assert_eq!(a.gaze, b.gaze);
    }
}
