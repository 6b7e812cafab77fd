use distraction_core::eval::{evaluate_bundle, loso_cross_validation, EvaluationReport};
use distraction_core::model_io::{load_model, save_model};
use distraction_core::pipeline::{measure_session, train_closure_model, ModelBundle, PipelineConfig, SessionMeasurements};
use distraction_core::session::{generate_synthetic_session, load_session, save_session, GeneratorSpec};

fn small_config() -> PipelineConfig {
    let mut c = PipelineConfig {
        closure_templates: 300,
        ..Default::default()
    };
    c.arm_boost.rounds = 60;
    c.fusion.boost.rounds = 60;
    c.fusion.hmm.n_states = 4;
    c
}

#[test]
fn session_survives_disk_round_trip() {
    let spec = GeneratorSpec { frames: 40, ..GeneratorSpec::for_driver(2, 9) };
    let original = generate_synthetic_session(&spec, 4).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_session(&original, dir.path()).unwrap();
    let loaded = load_session(dir.path()).unwrap();
    assert_eq!(loaded.driver_id, original.driver_id);
    assert_eq!(loaded.background, original.background);
    assert_eq!(loaded.labels(), original.labels());
    for (a, b) in loaded.frames.iter().zip(&original.frames) {
        assert_eq!(a.depth, b.depth);
        assert_eq!(a.left_eye, b.left_eye);
        assert_eq!(a.right_eye, b.right_eye);
    }
    let config = small_config();
    let closure = train_closure_model(&config).unwrap();
    assert_eq!(
        measure_session(&loaded, &config, &closure).unwrap(),
        measure_session(&original, &config, &closure).unwrap()
    );
}

fn accuracy(cm: &Option<distraction_core::eval::ConfusionMatrix>) -> f64 {
    cm.as_ref().unwrap().accuracy().unwrap()
}

/// Two drivers sharing one profile and the same session seeds: holding the
/// twin out scores exactly like testing the training driver on those sessions.
#[test]
fn identical_drivers_generalize_like_the_same_driver() {
    let config = small_config();
    let closure = train_closure_model(&config).unwrap();
    let base = GeneratorSpec { frames: 1500, ..GeneratorSpec::for_driver(0, 21) };
    let twin = GeneratorSpec { driver_id: "driver01".into(), ..base.clone() };
    let measure = |spec: &GeneratorSpec, seed: u64| {
        measure_session(&generate_synthetic_session(spec, seed).unwrap(), &config, &closure).unwrap()
    };
    let corpus = vec![measure(&base, 1), measure(&base, 2), measure(&twin, 5), measure(&twin, 6)];
    let fresh = [measure(&base, 5), measure(&base, 6)];

    let report = loso_cross_validation(&corpus, &closure, &config).unwrap();
    let train: Vec<&SessionMeasurements> = corpus[..2].iter().collect();
    let bundle = ModelBundle::train(&train, closure.clone(), &config).unwrap();
    let (ada, hmm) = evaluate_bundle(&bundle, &fresh.iter().collect::<Vec<_>>()).unwrap();
    for (path, same) in [("adaboost", accuracy(&ada)), ("hmm", accuracy(&hmm))] {
        let held_out = report.path(path).unwrap().drivers.iter().find(|d| d.driver_id == "driver01").unwrap();
        assert!(
            (held_out.accuracy - same).abs() <= 1e-12,
            "{path}: held out {} vs same driver {same}",
            held_out.accuracy
        );
    }
}

#[test]
fn saved_bundle_predicts_identically_and_report_round_trips() {
    let config = small_config();
    let closure = train_closure_model(&config).unwrap();
    let sessions: Vec<SessionMeasurements> = [(0, 31), (1, 32)]
        .iter()
        .map(|&(d, seed)| {
            let spec = GeneratorSpec { frames: 800, ..GeneratorSpec::for_driver(d, seed) };
            measure_session(&generate_synthetic_session(&spec, seed).unwrap(), &config, &closure).unwrap()
        })
        .collect();
    let bundle = ModelBundle::train(&sessions.iter().collect::<Vec<_>>(), closure.clone(), &config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bundle.json");
    save_model(&path, "bundle", &bundle).unwrap();
    let loaded: ModelBundle = load_model(&path, "bundle").unwrap();
    assert_eq!(loaded.predict(&sessions[1]).unwrap(), bundle.predict(&sessions[1]).unwrap());

    let report = loso_cross_validation(&sessions, &closure, &config).unwrap();
    let back = EvaluationReport::from_json(&report.to_json().unwrap()).unwrap();
    assert_eq!(back, report);
    for p in &back.paths {
        assert_eq!(p.recompute().unwrap(), *p);
        let mean = p.drivers.iter().map(|d| d.accuracy).sum::<f64>() / p.drivers.len() as f64;
        assert!((p.average.accuracy - mean).abs() <= 1e-12);
    }
}

