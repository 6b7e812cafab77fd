//! Real AdaBoost over depth-limited trees with leaf log-odds confidences.

use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use super::tree::{DecisionTree, TreeNode, TreeTrainer};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoostParams {
    pub rounds: usize,
    pub max_depth: usize,
    /// Leaf smoothing. `None` uses `1 / (2N)`.
    pub epsilon: Option<f64>,
}

impl Default for BoostParams {
    fn default() -> Self {
        Self {
            rounds: 300,
            max_depth: 4,
            epsilon: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostRound {
    pub tree: DecisionTree,
    /// Confidence per node index; zero at split nodes.
    pub confidence: Vec<f64>,
}

impl BoostRound {
    #[inline]
    pub fn score(&self, x: &[f64]) -> f64 {
        self.confidence[self.tree.leaf_index(x)]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealAdaBoostModel {
    pub epsilon: f64,
    pub rounds: Vec<BoostRound>,
}

/// Per-round diagnostics from training.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoostTrace {
    /// Mean exponential loss `exp(-y F(x))` after each round.
    pub loss: Vec<f64>,
    /// Fraction of misclassified training samples after each round.
    pub error: Vec<f64>,
}

impl RealAdaBoostModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.rounds.iter().map(|r| r.score(x)).sum()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        if self.score(x) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn n_rounds(&self) -> usize {
        self.rounds.len()
    }
}

fn check_binary(labels: &[f64]) -> Result<()> {
    let pos = labels.iter().filter(|&&y| y > 0.0).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::Training("boosting needs both positive and negative samples".into()));
    }
    Ok(())
}

pub fn train_real_adaboost(x: &FeatureMatrix, labels: &[f64], params: &BoostParams) -> Result<RealAdaBoostModel> {
    let trainer = TreeTrainer::new(x);
    train_with_trainer(&trainer, labels, params).map(|(m, _)| m)
}

/// Trains on a shared [`TreeTrainer`] and returns the per-round trace.
pub fn train_with_trainer(
    trainer: &TreeTrainer<'_>,
    labels: &[f64],
    params: &BoostParams,
) -> Result<(RealAdaBoostModel, BoostTrace)> {
    let n = trainer.matrix().n_rows();
    if n == 0 {
        return Err(Error::Training("boosting on an empty sample set".into()));
    }
    if labels.len() != n {
        return Err(Error::InvalidInput("label count differs from sample count".into()));
    }
    check_binary(labels)?;
    let eps = params.epsilon.unwrap_or(1.0 / (2.0 * n as f64));
    let prepared = trainer.prepare(labels)?;
    let mut w = vec![1.0 / n as f64; n];
    let mut margin = vec![0.0; n];
    let mut loss_scale = 1.0;
    let mut rounds = Vec::with_capacity(params.rounds);
    let mut trace = BoostTrace::default();

    for _ in 0..params.rounds {
        let (tree, leaf_of) = trainer.fit_prepared(&prepared, &w, params.max_depth)?;
        if tree.is_single_leaf() && !rounds.is_empty() {
            break;
        }
        let confidence: Vec<f64> = tree
            .nodes
            .iter()
            .map(|node| match *node {
                TreeNode::Leaf { positive, negative } => 0.5 * ((positive + eps) / (negative + eps)).ln(),
                TreeNode::Split { .. } => 0.0,
            })
            .collect();
        let mut z = 0.0;
        let mut wrong = 0usize;
        for i in 0..n {
            let h = confidence[leaf_of[i]];
            let y = if labels[i] > 0.0 { 1.0 } else { -1.0 };
            margin[i] += y * h;
            w[i] *= (-y * h).exp();
            z += w[i];
            if margin[i] <= 0.0 && !(margin[i] == 0.0 && y > 0.0) {
                wrong += 1;
            }
        }
        w.iter_mut().for_each(|wi| *wi /= z);
        loss_scale *= z;
        trace.loss.push(loss_scale);
        trace.error.push(wrong as f64 / n as f64);
        let single = tree.is_single_leaf();
        rounds.push(BoostRound { tree, confidence });
        if single {
            break;
        }
    }
    Ok((RealAdaBoostModel { epsilon: eps, rounds }, trace))
}

/// One binary booster per class, trained class-vs-rest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneVsAllModel {
    /// Sorted ascending; `models[k]` scores `classes[k]`.
    pub classes: Vec<usize>,
    pub models: Vec<RealAdaBoostModel>,
}

impl OneVsAllModel {
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.models.iter().map(|m| m.score(x)).collect()
    }

    /// Highest-scoring class; ties go to the smallest class code.
    pub fn classify(&self, x: &[f64]) -> (usize, Vec<f64>) {
        let scores = self.scores(x);
        let mut best = 0;
        for k in 1..scores.len() {
            if scores[k] > scores[best] {
                best = k;
            }
        }
        (self.classes[best], scores)
    }
}

pub fn ova_train(x: &FeatureMatrix, labels: &[usize], params: &BoostParams) -> Result<OneVsAllModel> {
    if labels.len() != x.n_rows() {
        return Err(Error::InvalidInput("label count differs from sample count".into()));
    }
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Training(format!(
            "one-vs-all needs at least 2 classes, found {}",
            classes.len()
        )));
    }
    let trainer = TreeTrainer::new(x);
    let mut models = Vec::with_capacity(classes.len());
    for &c in &classes {
        let y: Vec<f64> = labels.iter().map(|&l| if l == c { 1.0 } else { -1.0 }).collect();
        let (m, _) = train_with_trainer(&trainer, &y, params)?;
        log::debug!("class {c}: {} rounds", m.n_rounds());
        models.push(m);
    }
    Ok(OneVsAllModel { classes, models })
}
