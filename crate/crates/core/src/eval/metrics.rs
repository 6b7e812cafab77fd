use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::session::DistractionClass;

/// Rows are ground truth, columns are predictions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(k: usize) -> Self {
        Self { counts: vec![vec![0; k]; k] }
    }

    pub fn from_indices(k: usize, truth: &[usize], pred: &[usize]) -> Result<Self> {
        if truth.len() != pred.len() {
            return Err(Error::InvalidInput(format!(
                "{} truth labels but {} predictions",
                truth.len(),
                pred.len()
            )));
        }
        let mut cm = Self::new(k);
        for (&t, &p) in truth.iter().zip(pred) {
            if t >= k || p >= k {
                return Err(Error::InvalidInput(format!("label out of range for {k} classes")));
            }
            cm.counts[t][p] += 1;
        }
        Ok(cm)
    }

    pub fn from_labels(truth: &[DistractionClass], pred: &[DistractionClass]) -> Result<Self> {
        let t: Vec<usize> = truth.iter().map(|c| c.index()).collect();
        let p: Vec<usize> = pred.iter().map(|c| c.index()).collect();
        Self::from_indices(DistractionClass::COUNT, &t, &p)
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.k()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> Option<f64> {
        let n = self.total();
        (n > 0).then(|| self.correct() as f64 / n as f64)
    }

    pub fn add(&mut self, other: &ConfusionMatrix) {
        for (r, o) in self.counts.iter_mut().zip(&other.counts) {
            for (a, b) in r.iter_mut().zip(o) {
                *a += b;
            }
        }
    }

    /// Distraction (codes 0..4) versus normal driving, as a 2x2 matrix with
    /// index 0 = distracted and 1 = normal.
    pub fn collapse_binary(&self) -> ConfusionMatrix {
        let normal = DistractionClass::NormalDriving.index();
        let side = |i: usize| usize::from(i == normal);
        let mut out = Self::new(2);
        for (t, row) in self.counts.iter().enumerate() {
            for (p, &c) in row.iter().enumerate() {
                out.counts[side(t)][side(p)] += c;
            }
        }
        out
    }

    /// One-vs-rest counts `(tp, fp, fn, tn)` for class `k`.
    pub fn one_vs_rest(&self, k: usize) -> (u64, u64, u64, u64) {
        let tp = self.counts[k][k];
        let fn_: u64 = self.counts[k].iter().sum::<u64>() - tp;
        let fp: u64 = self.counts.iter().map(|r| r[k]).sum::<u64>() - tp;
        let tn = self.total() - tp - fn_ - fp;
        (tp, fp, fn_, tn)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinaryLabel {
    Distracted,
    Normal,
}

pub fn binary_collapse(labels: &[DistractionClass]) -> Vec<BinaryLabel> {
    labels
        .iter()
        .map(|&c| {
            if c == DistractionClass::NormalDriving {
                BinaryLabel::Normal
            } else {
                BinaryLabel::Distracted
            }
        })
        .collect()
}

/// Correct decisions over total frames.
pub fn total_average_accuracy<T: PartialEq>(pred: &[T], truth: &[T]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::InvalidInput(format!(
            "{} predictions but {} truth labels",
            pred.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InvalidInput("accuracy of an empty sequence".into()));
    }
    let correct = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(correct as f64 / truth.len() as f64)
}

/// One-vs-rest metrics; `None` where a denominator is zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub accuracy: Option<f64>,
    pub recall: Option<f64>,
    pub specificity: Option<f64>,
    pub precision: Option<f64>,
    pub f_measure: Option<f64>,
    pub g_means: Option<f64>,
}

impl ClassMetrics {
    pub const NAMES: [&'static str; 6] = ["accuracy", "recall", "specificity", "precision", "f_measure", "g_means"];

    pub fn as_array(&self) -> [Option<f64>; 6] {
        [self.accuracy, self.recall, self.specificity, self.precision, self.f_measure, self.g_means]
    }

    pub fn from_array(a: [Option<f64>; 6]) -> Self {
        Self {
            accuracy: a[0],
            recall: a[1],
            specificity: a[2],
            precision: a[3],
            f_measure: a[4],
            g_means: a[5],
        }
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn per_class_metrics(cm: &ConfusionMatrix, k: usize) -> ClassMetrics {
    let (tp, fp, fn_, tn) = cm.one_vs_rest(k);
    let recall = ratio(tp, tp + fn_);
    let specificity = ratio(tn, tn + fp);
    let precision = ratio(tp, tp + fp);
    let f_measure = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    let g_means = match (recall, specificity) {
        (Some(r), Some(s)) => Some((r * s).sqrt()),
        _ => None,
    };
    ClassMetrics {
        accuracy: ratio(tp + tn, cm.total()),
        recall,
        specificity,
        precision,
        f_measure,
        g_means,
    }
}
