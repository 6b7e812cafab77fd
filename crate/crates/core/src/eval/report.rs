use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metrics::{per_class_metrics, ClassMetrics, ConfusionMatrix};
use crate::error::{Error, Result};
use crate::session::DistractionClass;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriverResult {
    pub driver_id: String,
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub binary_accuracy: f64,
    /// Indexed by class code.
    pub per_class: Vec<ClassMetrics>,
}

impl DriverResult {
    pub fn from_confusion(driver_id: impl Into<String>, confusion: ConfusionMatrix) -> Result<Self> {
        let driver_id = driver_id.into();
        let accuracy = confusion
            .accuracy()
            .ok_or_else(|| Error::InvalidInput(format!("no evaluated frames for {driver_id}")))?;
        let binary_accuracy = confusion.collapse_binary().accuracy().unwrap_or(accuracy);
        let per_class = (0..confusion.k()).map(|k| per_class_metrics(&confusion, k)).collect();
        Ok(Self {
            driver_id,
            confusion,
            accuracy,
            binary_accuracy,
            per_class,
        })
    }
}

/// Unweighted means over drivers; a per-class metric averages only the
/// drivers where it is defined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageRow {
    pub accuracy: f64,
    pub binary_accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
}

fn mean_present(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (mut s, mut n) = (0.0, 0usize);
    for v in values.flatten() {
        s += v;
        n += 1;
    }
    (n > 0).then(|| s / n as f64)
}

impl AverageRow {
    pub fn of(drivers: &[DriverResult]) -> Self {
        let n = drivers.len() as f64;
        let k = drivers.first().map_or(0, |d| d.per_class.len());
        let per_class = (0..k)
            .map(|c| {
                let mut a = [None; 6];
                for (m, slot) in a.iter_mut().enumerate() {
                    *slot = mean_present(drivers.iter().map(|d| d.per_class[c].as_array()[m]));
                }
                ClassMetrics::from_array(a)
            })
            .collect();
        Self {
            accuracy: drivers.iter().map(|d| d.accuracy).sum::<f64>() / n,
            binary_accuracy: drivers.iter().map(|d| d.binary_accuracy).sum::<f64>() / n,
            per_class,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub path: String,
    pub drivers: Vec<DriverResult>,
    pub average: AverageRow,
}

impl PathReport {
    pub fn new(path: impl Into<String>, drivers: Vec<DriverResult>) -> Self {
        let average = AverageRow::of(&drivers);
        Self {
            path: path.into(),
            drivers,
            average,
        }
    }

    /// Rebuilds every metric from the stored confusion matrices.
    pub fn recompute(&self) -> Result<Self> {
        let drivers = self
            .drivers
            .iter()
            .map(|d| DriverResult::from_confusion(d.driver_id.clone(), d.confusion.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(self.path.clone(), drivers))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub paths: Vec<PathReport>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl EvaluationReport {
    pub fn path(&self, name: &str) -> Option<&PathReport> {
        self.paths.iter().find(|p| p.path == name)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidInput(format!("report serialization: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::format("report.json", e.to_string()))
    }

    /// One row per driver and path, then the average rows.
    pub fn overall_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::InvalidInput(e.to_string());
        w.write_record(["driver", "path", "accuracy_5class", "accuracy_2class", "frames"]).map_err(err)?;
        for p in &self.paths {
            for d in &p.drivers {
                w.write_record([
                    d.driver_id.clone(),
                    p.path.clone(),
                    d.accuracy.to_string(),
                    d.binary_accuracy.to_string(),
                    d.confusion.total().to_string(),
                ])
                .map_err(err)?;
            }
        }
        for p in &self.paths {
            w.write_record([
                "average".to_string(),
                p.path.clone(),
                p.average.accuracy.to_string(),
                p.average.binary_accuracy.to_string(),
                String::new(),
            ])
            .map_err(err)?;
        }
        finish(w)
    }

    /// One row per (driver or average, path, class); undefined metrics are empty.
    pub fn per_class_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::InvalidInput(e.to_string());
        let mut header = vec!["driver", "path", "class"];
        header.extend(ClassMetrics::NAMES);
        w.write_record(&header).map_err(err)?;
        for p in &self.paths {
            let rows = p
                .drivers
                .iter()
                .map(|d| (d.driver_id.as_str(), &d.per_class))
                .chain(std::iter::once(("average", &p.average.per_class)));
            for (driver, metrics) in rows {
                for (k, m) in metrics.iter().enumerate() {
                    let mut rec = vec![driver.to_string(), p.path.clone(), DistractionClass::ALL[k].name().to_string()];
                    rec.extend(m.as_array().into_iter().map(cell));
                    w.write_record(&rec).map_err(err)?;
                }
            }
        }
        finish(w)
    }

    /// Writes `report.json`, `overall.csv` and `per_class.csv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, body) in [
            ("report.json", self.to_json()?),
            ("overall.csv", self.overall_csv()?),
            ("per_class.csv", self.per_class_csv()?),
        ] {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_driver(rng: &mut ChaCha8Rng, id: &str) -> DriverResult {
        let truth: Vec<usize> = (0..300).map(|_| rng.random_range(0..4)).collect();
        let pred: Vec<usize> = truth
            .iter()
            .map(|&t| if rng.random_bool(0.8) { t } else { rng.random_range(0..5) })
            .collect();
        DriverResult::from_confusion(id, ConfusionMatrix::from_indices(5, &truth, &pred).unwrap()).unwrap()
    }

    fn report() -> EvaluationReport {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let drivers: Vec<_> = (0..6).map(|i| random_driver(&mut rng, &format!("d{i}"))).collect();
        EvaluationReport {
            paths: vec![PathReport::new("adaboost", drivers)],
        }
    }

    #[test]
    fn averages_are_driver_means() {
        let r = report();
        let p = &r.paths[0];
        let mean = p.drivers.iter().map(|d| d.accuracy).sum::<f64>() / 6.0;
        assert!((p.average.accuracy - mean).abs() < 1e-12);
        // class 4 never appears in truth: recall undefined for every driver
        assert_eq!(p.average.per_class[4].recall, None);
        assert!(p.average.per_class[4].specificity.is_some());
    }

    #[test]
    fn json_round_trip_recomputes_exactly() {
        let r = report();
        let back = EvaluationReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.paths[0].recompute().unwrap(), r.paths[0]);
    }

    #[test]
    fn csv_layouts() {
        let r = report();
        let overall = r.overall_csv().unwrap();
        assert_eq!(overall.lines().count(), 1 + 6 + 1);
        assert!(overall.lines().last().unwrap().starts_with("average,adaboost,"));
        let per_class = r.per_class_csv().unwrap();
        assert_eq!(per_class.lines().count(), 1 + 7 * 5);
        let row = per_class.lines().find(|l| l.starts_with("d0,adaboost,normal_driving,")).unwrap();
        assert_eq!(row.split(',').nth(4), Some(""));
    }

    #[test]
    fn write_dir_emits_three_files() {
        let dir = tempfile::tempdir().unwrap();
        report().write_dir(dir.path()).unwrap();
        for f in ["report.json", "overall.csv", "per_class.csv"] {
            assert!(dir.path().join(f).is_file());
        }
    }
}
