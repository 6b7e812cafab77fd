//! Per-session measurement and the trained model bundle.
//!
//! Measurements (arm feature vectors, eye and face features) do not depend
//! on any trained fusion model, so they are computed once per session; arm
//! scores, smoothing and both classifiers are applied on top by a
//! [`ModelBundle`].

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arm::{arm_features, arm_scores, train_arm_classifier, ArmClassifier, ArmFeatures, ArmParams, ArmScores};
use crate::error::{Error, Result};
use crate::eye::{synthetic_closure_templates, train_closure_svm, EyeBehavior, EyeFrameFeatures, EyePatch, FilterBank, FilterBankParams};
use crate::face::{face_features, FaceFeatures};
use crate::fusion::{
    assemble_frame_features, classify_frames_adaboost, classify_frames_hmm, observations, train_fusion_adaboost,
    train_fusion_hmms, FrameFeatures, FusionParams, HmmFusion, LabeledSequence,
};
use crate::learners::{BoostParams, OneVsAllModel, RbfSvmModel, SvmParams};
use crate::session::{arm_position_for, DistractionClass, Session, EYE_PATCH_SIZE};

/// Which fusion classifier(s) to train and run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierPath {
    AdaBoost,
    Hmm,
    Both,
}

impl ClassifierPath {
    pub fn adaboost(self) -> bool {
        matches!(self, Self::AdaBoost | Self::Both)
    }

    pub fn hmm(self) -> bool {
        matches!(self, Self::Hmm | Self::Both)
    }
}

impl FromStr for ClassifierPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaboost" => Ok(Self::AdaBoost),
            "hmm" => Ok(Self::Hmm),
            "both" => Ok(Self::Both),
            other => Err(Error::InvalidInput(format!("unknown classifier path '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// `None` scales the profile bin to the session's frame width.
    pub arm: Option<ArmParams>,
    pub filter_bank: FilterBankParams,
    pub arm_boost: BoostParams,
    /// Arm classifier trains on every n-th valid frame.
    pub arm_train_stride: usize,
    /// Training drivers are split into this many groups; fusion models see
    /// arm scores from classifiers that did not train on the frame's driver.
    /// Values below 2 use in-sample scores.
    pub arm_cross_fit: usize,
    /// Total synthetic templates for the closure SVM (half open, half closed).
    pub closure_templates: usize,
    pub svm: SvmParams,
    pub fusion: FusionParams,
    pub path: ClassifierPath,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            arm: None,
            filter_bank: FilterBankParams::default(),
            arm_boost: BoostParams::default(),
            arm_train_stride: 24,
            arm_cross_fit: 2,
            closure_templates: 2000,
            svm: SvmParams::default(),
            fusion: FusionParams::default(),
            path: ClassifierPath::Both,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let f = &self.fusion;
        let bad = |m: &str| Err(Error::InvalidInput(m.into()));
        if f.window == 0 {
            return bad("window must be at least 1");
        }
        if f.hmm.n_states == 0 {
            return bad("hmm states must be at least 1");
        }
        if f.boost.rounds == 0 || self.arm_boost.rounds == 0 {
            return bad("boosting rounds must be at least 1");
        }
        if f.delta_order > 2 {
            return bad("delta order must be 0, 1 or 2");
        }
        if f.subset.groups.is_empty() {
            return bad("feature subset is empty");
        }
        if self.closure_templates < 2 {
            return bad("closure SVM needs at least 2 templates");
        }
        Ok(())
    }

    pub fn arm_params(&self, width: usize) -> ArmParams {
        self.arm.clone().unwrap_or_else(|| ArmParams::for_width(width))
    }

    pub fn filter_bank(&self) -> FilterBank {
        FilterBank::new(EYE_PATCH_SIZE, self.filter_bank.clone())
    }
}

/// Closure SVM on synthetic templates. Depends only on the config, so it
/// is shared by every fold.
pub fn train_closure_model(config: &PipelineConfig) -> Result<RbfSvmModel> {
    let bank = config.filter_bank();
    let half = config.closure_templates / 2;
    let templates = synthetic_closure_templates(&bank, half, config.closure_templates - half, config.seed ^ 0xC105_E0);
    train_closure_svm(&templates, &config.svm)
}

/// Model-independent per-frame measurements of one session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionMeasurements {
    pub driver_id: String,
    pub arm: Vec<ArmFeatures>,
    pub eye: Vec<EyeFrameFeatures>,
    pub face: Vec<FaceFeatures>,
    pub labels: Vec<DistractionClass>,
}

impl SessionMeasurements {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

pub fn measure_session(session: &Session, config: &PipelineConfig, closure: &RbfSvmModel) -> Result<SessionMeasurements> {
    let arm_params = config.arm_params(session.background.width);
    let bank = config.filter_bank();
    let mut eye = EyeBehavior::new(&bank, Some(closure));
    let mut out = SessionMeasurements {
        driver_id: session.driver_id.clone(),
        arm: Vec::with_capacity(session.len()),
        eye: Vec::with_capacity(session.len()),
        face: Vec::with_capacity(session.len()),
        labels: session.labels(),
    };
    for frame in &session.frames {
        out.arm.push(arm_features(&frame.depth, &session.background, session.intrinsics, &arm_params));
        let left = EyePatch::from_gray(&frame.left_eye)?;
        let right = EyePatch::from_gray(&frame.right_eye)?;
        out.eye.push(eye.process(&left, &right, &frame.face));
        let f = face_features(&frame.face, out.face.last())?;
        out.face.push(f);
    }
    Ok(out)
}

/// Everything needed to classify a measured session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub config: PipelineConfig,
    pub arm: ArmClassifier,
    pub closure: RbfSvmModel,
    pub adaboost: Option<OneVsAllModel>,
    pub hmm: Option<HmmFusion>,
}

/// Per-frame labels from each trained path.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Predictions {
    pub adaboost: Option<Vec<DistractionClass>>,
    pub hmm: Option<Vec<DistractionClass>>,
}

fn arm_dataset(sessions: &[&SessionMeasurements], stride: usize) -> Vec<(Vec<f64>, crate::arm::ArmPosition)> {
    let mut out = Vec::new();
    let mut k = 0usize;
    for s in sessions {
        for (a, &label) in s.arm.iter().zip(&s.labels) {
            if !a.valid {
                continue;
            }
            if k % stride.max(1) == 0 {
                out.push((a.values.clone(), arm_position_for(label)));
            }
            k += 1;
        }
    }
    out
}

/// Arm scores hold their last valid value across invalid frames.
pub fn frame_features_with(arm: &ArmClassifier, m: &SessionMeasurements) -> Vec<FrameFeatures> {
    let mut last = ArmScores::default();
    (0..m.len())
        .map(|t| {
            if m.arm[t].valid {
                last = arm_scores(&m.arm[t].values, arm);
            }
            assemble_frame_features(&last, m.arm[t].valid, &m.eye[t], &m.face[t])
        })
        .collect()
}

/// Frame features for fusion training. With cross-fitting, each driver's
/// arm scores come from a classifier trained on the other driver groups;
/// otherwise `full` scores everything.
fn cross_fit_features(
    sessions: &[&SessionMeasurements],
    full: &ArmClassifier,
    config: &PipelineConfig,
) -> Result<Vec<Vec<FrameFeatures>>> {
    let mut drivers: Vec<&str> = sessions.iter().map(|s| s.driver_id.as_str()).collect();
    drivers.sort_unstable();
    drivers.dedup();
    let groups = config.arm_cross_fit.min(drivers.len());
    if groups < 2 {
        return Ok(sessions.iter().map(|s| frame_features_with(full, s)).collect());
    }
    let group_of = |s: &SessionMeasurements| drivers.binary_search(&s.driver_id.as_str()).unwrap_or(0) % groups;
    let mut out: Vec<Vec<FrameFeatures>> = vec![Vec::new(); sessions.len()];
    for g in 0..groups {
        let rest: Vec<&SessionMeasurements> = sessions.iter().copied().filter(|s| group_of(s) != g).collect();
        let dataset = arm_dataset(&rest, config.arm_train_stride);
        log::info!("cross-fit arm classifier {}/{groups} on {} frames", g + 1, dataset.len());
        let arm = train_arm_classifier(&dataset, &config.arm_boost)?;
        for (i, s) in sessions.iter().enumerate() {
            if group_of(s) == g {
                out[i] = frame_features_with(&arm, s);
            }
        }
    }
    Ok(out)
}

impl ModelBundle {
    pub fn train(sessions: &[&SessionMeasurements], closure: RbfSvmModel, config: &PipelineConfig) -> Result<Self> {
        config.validate()?;
        let dataset = arm_dataset(sessions, config.arm_train_stride);
        log::info!("training arm classifier on {} frames", dataset.len());
        let arm = train_arm_classifier(&dataset, &config.arm_boost)?;
        let mut bundle = ModelBundle {
            config: config.clone(),
            arm,
            closure,
            adaboost: None,
            hmm: None,
        };
        let sequences = cross_fit_features(sessions, &bundle.arm, config)?
            .into_iter()
            .zip(sessions)
            .map(|(features, s)| {
                Ok(LabeledSequence {
                    observations: observations(&features, &config.fusion)?,
                    labels: s.labels.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if config.path.adaboost() {
            log::info!("training fusion boosting");
            bundle.adaboost = Some(train_fusion_adaboost(&sequences, &config.fusion)?);
        }
        if config.path.hmm() {
            log::info!("training fusion HMMs");
            bundle.hmm = Some(train_fusion_hmms(&sequences, &config.fusion)?);
        }
        Ok(bundle)
    }

    pub fn frame_features(&self, m: &SessionMeasurements) -> Vec<FrameFeatures> {
        frame_features_with(&self.arm, m)
    }

    pub fn observations(&self, m: &SessionMeasurements) -> Result<Vec<Vec<f64>>> {
        observations(&self.frame_features(m), &self.config.fusion)
    }

    pub fn predict(&self, m: &SessionMeasurements) -> Result<Predictions> {
        let obs = self.observations(m)?;
        let w = self.config.fusion.window;
        Ok(Predictions {
            adaboost: self.adaboost.as_ref().map(|model| classify_frames_adaboost(model, &obs, w)),
            hmm: self.hmm.as_ref().map(|h| classify_frames_hmm(h, &obs, w)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::{generate_synthetic_session, GeneratorSpec};

    fn fast_config() -> PipelineConfig {
        let mut c = PipelineConfig {
            arm_boost: BoostParams { rounds: 30, ..Default::default() },
            closure_templates: 200,
            ..Default::default()
        };
        c.fusion.boost.rounds = 30;
        c.fusion.hmm.n_states = 3;
        c
    }

    #[test]
    fn path_names_parse() {
        assert_eq!("hmm".parse::<ClassifierPath>().unwrap(), ClassifierPath::Hmm);
        assert!("svm".parse::<ClassifierPath>().is_err());
        assert!(ClassifierPath::Both.adaboost() && ClassifierPath::Both.hmm());
    }

    #[test]
    fn invalid_overrides_are_rejected() {
        let mut c = PipelineConfig::default();
        c.fusion.window = 0;
        assert!(c.validate().is_err());
        let mut c = PipelineConfig::default();
        c.fusion.delta_order = 3;
        assert!(c.validate().is_err());
    }

    #[test]
    fn trained_bundle_fits_its_own_session() {
        let config = fast_config();
        let spec = GeneratorSpec { frames: 1500, ..GeneratorSpec::for_driver(0, 3) };
        let session = generate_synthetic_session(&spec, 11).unwrap();
        let closure = train_closure_model(&config).unwrap();
        let m = measure_session(&session, &config, &closure).unwrap();
        assert_eq!(m.len(), 1500);
        assert!(m.arm.iter().filter(|a| a.valid).count() > 1400);
        let bundle = ModelBundle::train(&[&m], closure, &config).unwrap();
        let features = bundle.frame_features(&m);
        assert_eq!(features.len(), 1500);
        let p = bundle.predict(&m).unwrap();
        for pred in [p.adaboost.unwrap(), p.hmm.unwrap()] {
            let acc = pred.iter().zip(&m.labels).filter(|(a, b)| a == b).count() as f64 / 1500.0;
            assert!(acc > 0.8, "accuracy {acc}");
        }
    }
}
