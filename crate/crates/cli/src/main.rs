use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use distraction_core::eval::{evaluate_bundle, loso_cross_validation, DriverResult, EvaluationReport, PathReport};
use distraction_core::fusion::{FeatureSubset, FEATURE_NAMES};
use distraction_core::model_io::{load_model, save_model};
use distraction_core::pipeline::{
    measure_session, train_closure_model, ClassifierPath, ModelBundle, PipelineConfig, SessionMeasurements,
};
use distraction_core::session::{corpus_specs, generate_synthetic_session, load_session, save_session, write_labels};
use distraction_core::{Error, Session};

const BUNDLE_KIND: &str = "bundle";

#[derive(Parser)]
#[command(name = "distraction", version, about = "Driver distraction detection on RGB-D sessions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write synthetic sessions, one directory per driver and session.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 6)]
        drivers: usize,
        #[arg(long, default_value_t = 4)]
        sessions: usize,
        #[arg(long, default_value_t = 3000)]
        frames: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Per-frame 17-value features and their smoothed form as CSV.
    Extract {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a model bundle on sessions.
    Train {
        #[arg(long = "sessions", required = true, num_args = 1..)]
        sessions: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Evaluation report: leave-one-driver-out, or a trained bundle on given sessions.
    Evaluate {
        #[arg(long = "sessions", required = true, num_args = 1..)]
        sessions: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        loso: bool,
        #[arg(long, conflicts_with = "loso", required_unless_present = "loso")]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Predicted labels per path, `labels.csv` for the preferred one, and a
    /// truth/prediction timeline.
    Predict {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-frame debug dump: iris centers, validity flags, smoothed features.
    Inspect {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// JSON pipeline configuration; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long = "hmm-states")]
    hmm_states: Option<usize>,
    /// Boosting rounds for both the arm and the fusion classifiers.
    #[arg(long)]
    rounds: Option<usize>,
    /// Comma-separated groups from arm,gaze,closure,head,aus.
    #[arg(long)]
    features: Option<String>,
    /// adaboost, hmm or both.
    #[arg(long)]
    path: Option<String>,
    #[arg(long)]
    deltas: Option<usize>,
}

enum Failure {
    Data(String),
    Training(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Training(_) => Failure::Training(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn build_config(o: &Overrides, seed: u64) -> CliResult<PipelineConfig> {
    let mut c = match &o.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Io { path: p.clone(), source: e })?;
            serde_json::from_str(&text).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?
        }
        None => PipelineConfig::default(),
    };
    c.seed = seed;
    if let Some(w) = o.window {
        c.fusion.window = w;
    }
    if let Some(n) = o.hmm_states {
        c.fusion.hmm.n_states = n;
    }
    if let Some(r) = o.rounds {
        c.fusion.boost.rounds = r;
        c.arm_boost.rounds = r;
    }
    if let Some(f) = &o.features {
        c.fusion.subset = f.parse::<FeatureSubset>()?;
    }
    if let Some(p) = &o.path {
        c.path = p.parse::<ClassifierPath>()?;
    }
    if let Some(d) = o.deltas {
        c.fusion.delta_order = d;
    }
    c.validate()?;
    Ok(c)
}

/// A directory holding `manifest.json` is a session; otherwise its
/// immediate subdirectories that are sessions are taken in name order.
fn expand_sessions(paths: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.join("manifest.json").is_file() {
            out.push(p.clone());
            continue;
        }
        let entries = fs::read_dir(p).map_err(|e| Error::Io { path: p.clone(), source: e })?;
        let mut found: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|d| d.join("manifest.json").is_file())
            .collect();
        if found.is_empty() {
            return Err(Failure::Data(format!("{}: manifest missing", p.display())));
        }
        found.sort();
        out.extend(found);
    }
    Ok(out)
}

fn load_all(paths: &[PathBuf]) -> CliResult<Vec<Session>> {
    expand_sessions(paths)?
        .iter()
        .map(|p| {
            log::info!("loading {}", p.display());
            load_session(p).map_err(Failure::from)
        })
        .collect()
}

fn measure_all(sessions: &[Session], config: &PipelineConfig, closure: &distraction_core::learners::RbfSvmModel) -> CliResult<Vec<SessionMeasurements>> {
    sessions
        .iter()
        .map(|s| measure_session(s, config, closure).map_err(Failure::from))
        .collect()
}

fn write_file(path: &Path, body: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::Io { path: parent.into(), source: e })?;
    }
    fs::write(path, body).map_err(|e| Error::Io { path: path.into(), source: e }.into())
}

fn csv_string(header: &[String], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let bad = |e: csv::Error| Failure::Data(e.to_string());
    w.write_record(header).map_err(bad)?;
    for r in rows {
        w.write_record(r).map_err(bad)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Data(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Data(e.to_string()))
}

fn smoothed_header(config: &PipelineConfig) -> Vec<String> {
    let names: Vec<&str> = config.fusion.subset.indices().into_iter().map(|i| FEATURE_NAMES[i]).collect();
    let mut h: Vec<String> = names.iter().map(|n| format!("median_{n}")).collect();
    h.extend(names.iter().map(|n| format!("std_{n}")));
    let base = h.clone();
    for order in 1..=config.fusion.delta_order {
        h.extend(base.iter().map(|n| format!("d{order}_{n}")));
    }
    h
}

fn rows_with_index(values: &[Vec<f64>]) -> Vec<Vec<String>> {
    values
        .iter()
        .enumerate()
        .map(|(t, r)| std::iter::once(t.to_string()).chain(r.iter().map(|v| v.to_string())).collect())
        .collect()
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate { out, drivers, sessions, frames, seed } => {
            if drivers == 0 || sessions == 0 {
                return Err(Failure::Data("need at least one driver and one session".into()));
            }
            let mut per_driver = vec![0usize; drivers];
            for (spec, session_seed) in corpus_specs(drivers, sessions, frames, seed) {
                let d: usize = spec.driver_id.trim_start_matches("driver").parse().unwrap_or(0);
                let dir = out.join(format!("{}_s{:02}", spec.driver_id, per_driver[d]));
                per_driver[d] += 1;
                log::info!("generating {}", dir.display());
                save_session(&generate_synthetic_session(&spec, session_seed)?, &dir)?;
            }
        }
        Command::Extract { session, model, out } => {
            let bundle: ModelBundle = load_model(&model, BUNDLE_KIND)?;
            let s = load_session(&session)?;
            let m = measure_session(&s, &bundle.config, &bundle.closure)?;
            let frames = bundle.frame_features(&m);
            let mut header = vec!["frame_id".to_string()];
            header.extend(FEATURE_NAMES.iter().map(|n| n.to_string()));
            header.extend(["arm_valid", "eye_valid", "face_valid"].map(String::from));
            let rows: Vec<Vec<String>> = frames
                .iter()
                .enumerate()
                .map(|(t, f)| {
                    let mut r = vec![t.to_string()];
                    r.extend(f.values.iter().map(|v| v.to_string()));
                    r.extend([f.arm_valid, f.eye_valid, f.face_valid].map(|b| u8::from(b).to_string()));
                    r
                })
                .collect();
            write_file(&out.join("frames.csv"), &csv_string(&header, &rows)?)?;
            let obs = bundle.observations(&m)?;
            let mut header = vec!["frame_id".to_string()];
            header.extend(smoothed_header(&bundle.config));
            write_file(&out.join("smoothed.csv"), &csv_string(&header, &rows_with_index(&obs))?)?;
        }
        Command::Train { sessions, out, seed, overrides } => {
            let config = build_config(&overrides, seed)?;
            let sessions = load_all(&sessions)?;
            let closure = train_closure_model(&config)?;
            let measured = measure_all(&sessions, &config, &closure)?;
            let refs: Vec<&SessionMeasurements> = measured.iter().collect();
            let bundle = ModelBundle::train(&refs, closure, &config)?;
            save_model(&out, BUNDLE_KIND, &bundle)?;
        }
        Command::Evaluate { sessions, out, loso, model, seed, overrides } => {
            let sessions = load_all(&sessions)?;
            let report = if loso {
                let config = build_config(&overrides, seed)?;
                let closure = train_closure_model(&config)?;
                let measured = measure_all(&sessions, &config, &closure)?;
                loso_cross_validation(&measured, &closure, &config)?
            } else {
                let path = model.expect("clap requires --model without --loso");
                let bundle: ModelBundle = load_model(&path, BUNDLE_KIND)?;
                let measured = measure_all(&sessions, &bundle.config, &bundle.closure)?;
                report_for_bundle(&bundle, &measured)?
            };
            report.write_dir(&out)?;
            for p in &report.paths {
                println!(
                    "{}: 5-class {:.4}, 2-class {:.4} over {} drivers",
                    p.path,
                    p.average.accuracy,
                    p.average.binary_accuracy,
                    p.drivers.len()
                );
            }
        }
        Command::Predict { session, model, out } => {
            let bundle: ModelBundle = load_model(&model, BUNDLE_KIND)?;
            let s = load_session(&session)?;
            let m = measure_session(&s, &bundle.config, &bundle.closure)?;
            let p = bundle.predict(&m)?;
            fs::create_dir_all(&out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
            let mut header = vec!["frame_id".to_string(), "truth".to_string()];
            let mut columns = Vec::new();
            for (name, labels) in [("adaboost", &p.adaboost), ("hmm", &p.hmm)] {
                if let Some(l) = labels {
                    write_labels(&out.join(format!("labels_{name}.csv")), l)?;
                    header.push(name.to_string());
                    columns.push(l.clone());
                }
            }
            // labels.csv carries the boosting path when it was trained
            if let Some(first) = columns.first() {
                write_labels(&out.join("labels.csv"), first)?;
            }
            let rows: Vec<Vec<String>> = (0..m.len())
                .map(|t| {
                    let mut r = vec![t.to_string(), m.labels[t].code().to_string()];
                    r.extend(columns.iter().map(|c| c[t].code().to_string()));
                    r
                })
                .collect();
            write_file(&out.join("timeline.csv"), &csv_string(&header, &rows)?)?;
        }
        Command::Inspect { session, out, model } => {
            let s = load_session(&session)?;
            let (config, closure, bundle) = match model {
                Some(p) => {
                    let b: ModelBundle = load_model(&p, BUNDLE_KIND)?;
                    (b.config.clone(), b.closure.clone(), Some(b))
                }
                None => {
                    let c = PipelineConfig::default();
                    let closure = train_closure_model(&c)?;
                    (c, closure, None)
                }
            };
            let m = measure_session(&s, &config, &closure)?;
            let mut header: Vec<String> = [
                "frame_id", "iris_lx", "iris_ly", "iris_rx", "iris_ry", "eye_valid", "arm_valid", "face_valid",
            ]
            .map(String::from)
            .to_vec();
            let smoothed = match &bundle {
                Some(b) => {
                    header.extend(smoothed_header(&b.config));
                    Some(b.observations(&m)?)
                }
                None => None,
            };
            let rows: Vec<Vec<String>> = (0..m.len())
                .map(|t| {
                    let e = &m.eye[t];
                    let mut r = vec![
                        t.to_string(),
                        e.iris[0].0.to_string(),
                        e.iris[0].1.to_string(),
                        e.iris[1].0.to_string(),
                        e.iris[1].1.to_string(),
                        u8::from(e.valid).to_string(),
                        u8::from(m.arm[t].valid).to_string(),
                        u8::from(m.face[t].valid).to_string(),
                    ];
                    if let Some(sm) = &smoothed {
                        r.extend(sm[t].iter().map(|v| v.to_string()));
                    }
                    r
                })
                .collect();
            write_file(&out, &csv_string(&header, &rows)?)?;
        }
    }
    Ok(())
}

/// Per-driver rows of a fixed bundle over the given sessions.
fn report_for_bundle(bundle: &ModelBundle, measured: &[SessionMeasurements]) -> CliResult<EvaluationReport> {
    let drivers = distraction_core::eval::drivers_of(measured);
    let mut ada = Vec::new();
    let mut hmm = Vec::new();
    for d in &drivers {
        let mine: Vec<&SessionMeasurements> = measured.iter().filter(|s| &s.driver_id == d).collect();
        let (a, h) = evaluate_bundle(bundle, &mine)?;
        if let Some(cm) = a {
            ada.push(DriverResult::from_confusion(d.clone(), cm)?);
        }
        if let Some(cm) = h {
            hmm.push(DriverResult::from_confusion(d.clone(), cm)?);
        }
    }
    let mut paths = Vec::new();
    if bundle.adaboost.is_some() {
        paths.push(PathReport::new("adaboost", ada));
    }
    if bundle.hmm.is_some() {
        paths.push(PathReport::new("hmm", hmm));
    }
    Ok(EvaluationReport { paths })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(m)) => {
            eprintln!("error: data: {}", m.replace('\n', " "));
            ExitCode::from(3)
        }
        Err(Failure::Training(m)) => {
            eprintln!("error: training: {}", m.replace('\n', " "));
            ExitCode::from(4)
        }
    }
}
