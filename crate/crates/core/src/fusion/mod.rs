//! Frame-level fusion: the 17-value frame vector, running median/std
//! smoothing, and two classifiers (boosting + mode filter, per-class HMMs).

pub mod features;
pub mod smooth;

pub use features::{assemble_frame_features, FeatureGroup, FeatureSubset, FrameFeatures, FEATURE_NAMES, FRAME_FEATURES};
pub use smooth::{append_deltas, mode_filter, smooth_features, window_bounds};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::hmm::{viterbi_score, LogTables};
use crate::learners::{hmm_baum_welch, ova_train, BoostParams, FeatureMatrix, GaussianHmm, HmmParams, OneVsAllModel};
use crate::session::DistractionClass;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionParams {
    pub window: usize,
    pub subset: FeatureSubset,
    /// 0 = none, 1 = first differences, 2 = first and second.
    pub delta_order: usize,
    pub boost: BoostParams,
    /// Boosting trains on every `train_stride`-th frame.
    pub train_stride: usize,
    pub hmm: HmmParams,
}

impl Default for FusionParams {
    fn default() -> Self {
        Self {
            window: 100,
            subset: FeatureSubset::default(),
            delta_order: 0,
            boost: BoostParams::default(),
            train_stride: 12,
            hmm: HmmParams::default(),
        }
    }
}

/// Smoothed observations for one session alongside its frame labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSequence {
    pub observations: Vec<Vec<f64>>,
    pub labels: Vec<DistractionClass>,
}

/// Subset selection, smoothing and optional deltas.
pub fn observations(frames: &[FrameFeatures], params: &FusionParams) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Vec<f64>> = frames.iter().map(|f| params.subset.select(f)).collect();
    let mut obs = smooth_features(&rows, params.window)?;
    append_deltas(&mut obs, params.delta_order);
    Ok(obs)
}

pub fn train_fusion_adaboost(sessions: &[LabeledSequence], params: &FusionParams) -> Result<OneVsAllModel> {
    let width = sessions
        .iter()
        .find_map(|s| s.observations.first().map(Vec::len))
        .ok_or_else(|| Error::Training("no training frames".into()))?;
    let mut x = FeatureMatrix::with_columns(width);
    let mut y = Vec::new();
    let stride = params.train_stride.max(1);
    for s in sessions {
        for t in (0..s.observations.len()).step_by(stride) {
            x.push_row(&s.observations[t]);
            y.push(s.labels[t].index());
        }
    }
    for c in DistractionClass::ALL {
        if !y.contains(&c.index()) {
            log::warn!("class {} absent from boosting data; training without it", c.name());
        }
    }
    ova_train(&x, &y, &params.boost)
}

fn class_of(code: usize) -> DistractionClass {
    DistractionClass::ALL[code]
}

/// Per-frame argmax then mode filter.
pub fn classify_frames_adaboost(model: &OneVsAllModel, observations: &[Vec<f64>], window: usize) -> Vec<DistractionClass> {
    let raw: Vec<usize> = observations.iter().map(|o| model.classify(o).0).collect();
    mode_filter(&raw, window).into_iter().map(class_of).collect()
}

/// Per-column z-scoring with statistics from training data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit<'a>(rows: impl Iterator<Item = &'a Vec<f64>>) -> Result<Self> {
        let mut n = 0usize;
        let mut sum: Vec<f64> = Vec::new();
        let mut sq: Vec<f64> = Vec::new();
        for r in rows {
            if sum.is_empty() {
                sum = vec![0.0; r.len()];
                sq = vec![0.0; r.len()];
            }
            for (j, v) in r.iter().enumerate() {
                sum[j] += v;
                sq[j] += v * v;
            }
            n += 1;
        }
        if n == 0 {
            return Err(Error::Training("cannot fit a scaler on zero rows".into()));
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / n as f64).collect();
        let std = sq
            .iter()
            .zip(&mean)
            .map(|(s, m)| {
                let sd = (s / n as f64 - m * m).max(0.0).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

/// One HMM per class over z-scored observations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HmmFusion {
    pub scaler: Standardizer,
    /// Indexed by class code.
    pub models: Vec<GaussianHmm>,
}

/// Maximal runs of each class become that class's training sequences.
pub fn train_fusion_hmms(sessions: &[LabeledSequence], params: &FusionParams) -> Result<HmmFusion> {
    let scaler = Standardizer::fit(sessions.iter().flat_map(|s| s.observations.iter()))?;
    let mut runs: Vec<Vec<Vec<Vec<f64>>>> = vec![Vec::new(); DistractionClass::COUNT];
    for s in sessions {
        let mut start = 0;
        for t in 1..=s.labels.len() {
            if t == s.labels.len() || s.labels[t] != s.labels[start] {
                let seq: Vec<Vec<f64>> = s.observations[start..t].iter().map(|o| scaler.apply(o)).collect();
                runs[s.labels[start].index()].push(seq);
                start = t;
            }
        }
    }
    let mut models = Vec::with_capacity(DistractionClass::COUNT);
    for c in DistractionClass::ALL {
        let seqs = &runs[c.index()];
        let frames: usize = seqs.iter().map(Vec::len).sum();
        if frames < 10 * params.hmm.n_states {
            return Err(Error::Training(format!(
                "class {} has {frames} training frames; {} needed",
                c.name(),
                10 * params.hmm.n_states
            )));
        }
        models.push(hmm_baum_welch(seqs, &params.hmm)?);
    }
    Ok(HmmFusion { scaler, models })
}

/// Length-normalized windowed Viterbi scores per class code, `[t][class]`.
pub fn hmm_window_scores(fusion: &HmmFusion, observations: &[Vec<f64>], window: usize) -> Vec<Vec<f64>> {
    let n = observations.len();
    let z: Vec<Vec<f64>> = observations.iter().map(|o| fusion.scaler.apply(o)).collect();
    let per_model: Vec<(LogTables, Vec<Vec<f64>>)> = fusion
        .models
        .iter()
        .map(|m| (m.log_tables(), m.emissions(&z)))
        .collect();
    (0..n)
        .map(|t| {
            let (a, b) = window_bounds(t, n, window);
            let len = (b - a + 1) as f64;
            per_model
                .iter()
                .map(|(tables, em)| viterbi_score(tables, &em[a..=b]) / len)
                .collect()
        })
        .collect()
}

/// Per-frame argmax of windowed scores; ties go to the smallest class code.
pub fn classify_frames_hmm(fusion: &HmmFusion, observations: &[Vec<f64>], window: usize) -> Vec<DistractionClass> {
    hmm_window_scores(fusion, observations, window)
        .into_iter()
        .map(|s| {
            let mut best = 0;
            for k in 1..s.len() {
                if s[k] > s[best] {
                    best = k;
                }
            }
            class_of(best)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    /// Segments whose 2-d features sit at class-specific means.
    fn toy_sessions(seed: u64, n_sessions: usize) -> Vec<LabeledSequence> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.6).unwrap();
        (0..n_sessions)
            .map(|s| {
                let mut obs = Vec::new();
                let mut labels = Vec::new();
                for seg in 0..10 {
                    let c = DistractionClass::ALL[(seg + s) % 5];
                    let k = c.index() as f64;
                    for _ in 0..150 {
                        obs.push(vec![k + noise.sample(&mut rng), (k * 1.3).sin() * 2.0 + noise.sample(&mut rng)]);
                        labels.push(c);
                    }
                }
                LabeledSequence { observations: obs, labels }
            })
            .collect()
    }

    fn smoothed(s: &LabeledSequence, w: usize) -> LabeledSequence {
        LabeledSequence {
            observations: smooth_features(&s.observations, w).unwrap(),
            labels: s.labels.clone(),
        }
    }

    fn accuracy(pred: &[DistractionClass], truth: &[DistractionClass]) -> f64 {
        pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
    }

    #[test]
    fn boosting_path_fits_training_drivers() {
        let sessions: Vec<_> = toy_sessions(1, 2).iter().map(|s| smoothed(s, 20)).collect();
        let params = FusionParams { boost: BoostParams { rounds: 40, ..Default::default() }, ..Default::default() };
        let model = train_fusion_adaboost(&sessions, &params).unwrap();
        for s in &sessions {
            let pred = classify_frames_adaboost(&model, &s.observations, 20);
            assert!(accuracy(&pred, &s.labels) >= 0.9);
        }
        assert_eq!(model, train_fusion_adaboost(&sessions, &params).unwrap());
    }

    #[test]
    fn hmm_path_recognizes_held_out_session() {
        let sessions: Vec<_> = toy_sessions(2, 3).iter().map(|s| smoothed(s, 20)).collect();
        let params = FusionParams { hmm: HmmParams { n_states: 3, ..Default::default() }, ..Default::default() };
        let fusion = train_fusion_hmms(&sessions[..2], &params).unwrap();
        let pred = classify_frames_hmm(&fusion, &sessions[2].observations, 100);
        assert_eq!(pred.len(), sessions[2].labels.len());
        assert!(accuracy(&pred, &sessions[2].labels) >= 0.8);
    }

    #[test]
    fn missing_class_is_an_hmm_error() {
        let mut s = toy_sessions(3, 1);
        let seq = &mut s[0];
        for (l, o) in seq.labels.iter_mut().zip(&mut seq.observations) {
            if *l == DistractionClass::Drinking {
                *l = DistractionClass::PhoneCall;
                o[0] = 0.0;
            }
        }
        let err = train_fusion_hmms(&s, &FusionParams::default()).unwrap_err();
        assert!(err.to_string().contains("drinking"));
    }

    #[test]
    fn identical_models_tie_to_smallest_code() {
        let sessions = toy_sessions(4, 2);
        let params = FusionParams { hmm: HmmParams { n_states: 2, ..Default::default() }, ..Default::default() };
        let mut fusion = train_fusion_hmms(&sessions, &params).unwrap();
        let m = fusion.models[3].clone();
        fusion.models = vec![m; 5];
        let pred = classify_frames_hmm(&fusion, &sessions[0].observations[..50], 100);
        assert!(pred.iter().all(|&c| c == DistractionClass::PhoneCall));
    }

    #[test]
    fn windowed_scores_are_shift_equivariant() {
        let sessions = toy_sessions(5, 2);
        let params = FusionParams { hmm: HmmParams { n_states: 2, ..Default::default() }, ..Default::default() };
        let fusion = train_fusion_hmms(&sessions, &params).unwrap();
        let obs = &sessions[0].observations;
        let a = classify_frames_hmm(&fusion, &obs[..800], 100);
        let b = classify_frames_hmm(&fusion, &obs[37..837], 100);
        for t in 50 + 37..750 {
            assert_eq!(a[t], b[t - 37]);
        }
    }
}
