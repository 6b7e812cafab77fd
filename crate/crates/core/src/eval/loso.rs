use std::collections::BTreeSet;

use super::metrics::ConfusionMatrix;
use super::report::{DriverResult, EvaluationReport, PathReport};
use crate::error::{Error, Result};
use crate::learners::RbfSvmModel;
use crate::pipeline::{measure_session, train_closure_model, ModelBundle, PipelineConfig, SessionMeasurements};
use crate::session::Session;

/// Sorted distinct driver ids.
pub fn drivers_of(sessions: &[SessionMeasurements]) -> Vec<String> {
    sessions
        .iter()
        .map(|s| s.driver_id.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Confusion matrices `(adaboost, hmm)` of a trained bundle over sessions.
pub fn evaluate_bundle(
    bundle: &ModelBundle,
    sessions: &[&SessionMeasurements],
) -> Result<(Option<ConfusionMatrix>, Option<ConfusionMatrix>)> {
    let mut ada: Option<ConfusionMatrix> = None;
    let mut hmm: Option<ConfusionMatrix> = None;
    for s in sessions {
        let p = bundle.predict(s)?;
        for (acc, pred) in [(&mut ada, p.adaboost), (&mut hmm, p.hmm)] {
            if let Some(pred) = pred {
                let cm = ConfusionMatrix::from_labels(&s.labels, &pred)?;
                match acc {
                    Some(a) => a.add(&cm),
                    None => *acc = Some(cm),
                }
            }
        }
    }
    Ok((ada, hmm))
}

/// Each driver in turn is held out; models train on all other drivers.
pub fn loso_cross_validation(
    sessions: &[SessionMeasurements],
    closure: &RbfSvmModel,
    config: &PipelineConfig,
) -> Result<EvaluationReport> {
    let drivers = drivers_of(sessions);
    if drivers.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "leave-one-driver-out needs at least 2 drivers, found {}",
            drivers.len()
        )));
    }
    let mut ada_rows = Vec::new();
    let mut hmm_rows = Vec::new();
    for (i, held_out) in drivers.iter().enumerate() {
        log::info!("fold {}/{}: holding out {held_out}", i + 1, drivers.len());
        let (test, train): (Vec<&SessionMeasurements>, Vec<&SessionMeasurements>) =
            sessions.iter().partition(|s| &s.driver_id == held_out);
        let bundle = ModelBundle::train(&train, closure.clone(), config)?;
        let (ada, hmm) = evaluate_bundle(&bundle, &test)?;
        if let Some(cm) = ada {
            ada_rows.push(DriverResult::from_confusion(held_out.clone(), cm)?);
        }
        if let Some(cm) = hmm {
            hmm_rows.push(DriverResult::from_confusion(held_out.clone(), cm)?);
        }
    }
    let mut paths = Vec::new();
    if config.path.adaboost() {
        paths.push(PathReport::new("adaboost", ada_rows));
    }
    if config.path.hmm() {
        paths.push(PathReport::new("hmm", hmm_rows));
    }
    Ok(EvaluationReport { paths })
}

/// Measures raw sessions (training the shared closure SVM) and runs
/// [`loso_cross_validation`].
pub fn loso_from_sessions(sessions: &[Session], config: &PipelineConfig) -> Result<EvaluationReport> {
    config.validate()?;
    let closure = train_closure_model(config)?;
    let measured = sessions
        .iter()
        .map(|s| measure_session(s, config, &closure))
        .collect::<Result<Vec<_>>>()?;
    loso_cross_validation(&measured, &closure, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arm::ArmFeatures;
    use crate::eye::EyeFrameFeatures;
    use crate::face::FaceFeatures;
    use crate::session::DistractionClass;

    fn fake(driver: &str) -> SessionMeasurements {
        SessionMeasurements {
            driver_id: driver.into(),
            arm: vec![ArmFeatures::invalid(20)],
            eye: vec![EyeFrameFeatures::default()],
            face: vec![FaceFeatures::default()],
            labels: vec![DistractionClass::NormalDriving],
        }
    }

    #[test]
    fn one_driver_is_rejected() {
        let closure = RbfSvmModel {
            sigma: 13.0,
            c: 1.0,
            bias: 0.0,
            support_vectors: vec![],
            coefficients: vec![],
        };
        let err = loso_cross_validation(&[fake("a"), fake("a")], &closure, &PipelineConfig::default()).unwrap_err();
        assert!(err.to_string().contains("at least 2 drivers"));
    }

    #[test]
    fn drivers_are_sorted_and_distinct() {
        assert_eq!(drivers_of(&[fake("b"), fake("a"), fake("b")]), vec!["a", "b"]);
    }
}
