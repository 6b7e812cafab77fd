//! JSON envelope for trained artifacts.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "distraction-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    kind: String,
    model: T,
}

pub fn to_json<T: Serialize>(kind: &str, model: &T) -> Result<String> {
    let env = Envelope {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        kind: kind.into(),
        model,
    };
    serde_json::to_string(&env).map_err(|e| Error::InvalidInput(format!("cannot serialize {kind}: {e}")))
}

pub fn from_json<T: DeserializeOwned>(kind: &str, text: &str, source: &str) -> Result<T> {
    let env: Envelope<serde_json::Value> =
        serde_json::from_str(text).map_err(|e| Error::format(source, e.to_string()))?;
    if env.format != MODEL_FORMAT {
        return Err(Error::format(source, format!("not a model file (format '{}')", env.format)));
    }
    if env.version != MODEL_VERSION {
        return Err(Error::format(source, format!("unsupported model version {}", env.version)));
    }
    if env.kind != kind {
        return Err(Error::format(source, format!("expected a {kind} model, found {}", env.kind)));
    }
    serde_json::from_value(env.model).map_err(|e| Error::format(source, e.to_string()))
}

pub fn save_model<T: Serialize>(path: &Path, kind: &str, model: &T) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, to_json(kind, model)?).map_err(|e| Error::io(path, e))
}

pub fn load_model<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(kind, &text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{train_real_adaboost, BoostParams, FeatureMatrix, RealAdaBoostModel};

    #[test]
    fn boosted_model_round_trips_bit_exactly() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64 * 0.37).sin(), i as f64 / 7.0]).collect();
        let labels: Vec<f64> = rows.iter().map(|r| if r[0] > 0.1 { 1.0 } else { -1.0 }).collect();
        let x = FeatureMatrix::from_rows(&rows);
        let model = train_real_adaboost(&x, &labels, &BoostParams { rounds: 5, ..Default::default() }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        save_model(&p, "adaboost", &model).unwrap();
        let back: RealAdaBoostModel = load_model(&p, "adaboost").unwrap();
        assert_eq!(back, model);
        for r in &rows {
            assert_eq!(back.score(r).to_bits(), model.score(r).to_bits());
        }
    }

    #[test]
    fn wrong_kind_or_format_is_rejected() {
        let text = to_json("svm", &vec![1.0, 2.0]).unwrap();
        assert!(from_json::<Vec<f64>>("hmm", &text, "x").is_err());
        assert!(from_json::<Vec<f64>>("svm", "{\"a\":1}", "x").is_err());
        assert_eq!(from_json::<Vec<f64>>("svm", &text, "x").unwrap(), vec![1.0, 2.0]);
    }
}
