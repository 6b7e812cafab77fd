//! Depth-limited binary decision trees grown by weighted information gain.

use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    /// Samples with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// Weighted class masses of the training samples reaching the leaf.
    Leaf { positive: f64, negative: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    /// Node 0 is the root.
    pub nodes: Vec<TreeNode>,
}

impl DecisionTree {
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
                TreeNode::Leaf { .. } => return i,
            }
        }
    }

    /// `+1` when the reached leaf holds at least as much positive mass.
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(x)] {
            TreeNode::Leaf { positive, negative } if positive >= negative => 1.0,
            _ => -1.0,
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &DecisionTree, i: usize) -> usize {
            match t.nodes[i] {
                TreeNode::Split { left, right, .. } => 1 + walk(t, left).max(walk(t, right)),
                TreeNode::Leaf { .. } => 0,
            }
        }
        walk(self, 0)
    }

    pub fn is_single_leaf(&self) -> bool {
        matches!(self.nodes[0], TreeNode::Leaf { .. })
    }
}

/// `w ln w` with the `0 ln 0 = 0` convention.
#[inline]
fn xlnx(w: f64) -> f64 {
    if w > 0.0 {
        w * w.ln()
    } else {
        0.0
    }
}

/// Unnormalized entropy mass `W * H(p)` of a node with class masses `(p, n)`.
#[inline]
fn entropy_mass(p: f64, n: f64) -> f64 {
    xlnx(p + n) - xlnx(p) - xlnx(n)
}

/// Lower bound on `entropy_mass(p, n)`: binary entropy in nats is at least
/// `4 ln 2 p (1 - p)`. Shrunk slightly so rounding never prunes a winner.
#[inline]
fn gini_bound(p: f64, n: f64) -> f64 {
    let w = p + n;
    if w > 0.0 {
        4.0 * std::f64::consts::LN_2 * p * n / w * (1.0 - 1e-9)
    } else {
        0.0
    }
}

/// Tighter bound from collision entropy `-ln(p^2 + (1-p)^2)`.
#[inline]
fn collision_bound(p: f64, n: f64) -> f64 {
    let w = p + n;
    if w > 0.0 {
        -w * ((p * p + n * n) / (w * w)).ln() * (1.0 - 1e-9)
    } else {
        0.0
    }
}

const NO_SLOT: u32 = u32::MAX;
const MIN_GAIN: f64 = 1e-12;

/// Grows trees on a fixed sample matrix. Per-feature sort orders are
/// computed once and reused across boosting rounds and one-vs-all models.
pub struct TreeTrainer<'a> {
    x: &'a FeatureMatrix,
    order: Vec<Vec<u32>>,
    values: Vec<Vec<f64>>,
}

/// A label vector prepared for repeated fitting on one [`TreeTrainer`].
pub struct PreparedLabels {
    positive: Vec<bool>,
    /// Per feature and sorted position: the sample's group of equal feature
    /// values carries a single label.
    pure: Vec<Vec<bool>>,
}

impl PreparedLabels {
    pub fn len(&self) -> usize {
        self.positive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty()
    }
}

#[derive(Clone, Copy)]
struct Slot {
    node: usize,
    depth: usize,
    pos: f64,
    neg: f64,
}

#[derive(Clone, Copy, Default)]
struct Scan {
    pos: f64,
    neg: f64,
    last: f64,
    seen: bool,
    /// Label of the previous value group when that group is pure.
    last_label: Option<bool>,
}

#[derive(Clone, Copy)]
struct Sample {
    slot: u32,
    positive: bool,
    weight: f64,
}

impl<'a> TreeTrainer<'a> {
    pub fn new(x: &'a FeatureMatrix) -> Self {
        let order: Vec<Vec<u32>> = (0..x.n_cols())
            .map(|f| {
                let mut idx: Vec<u32> = (0..x.n_rows() as u32).collect();
                idx.sort_by(|&a, &b| {
                    x.get(a as usize, f)
                        .total_cmp(&x.get(b as usize, f))
                        .then(a.cmp(&b))
                });
                idx
            })
            .collect();
        let values = order
            .iter()
            .enumerate()
            .map(|(f, o)| o.iter().map(|&i| x.get(i as usize, f)).collect())
            .collect();
        Self { x, order, values }
    }

    pub fn matrix(&self) -> &FeatureMatrix {
        self.x
    }

    pub fn prepare(&self, labels: &[f64]) -> Result<PreparedLabels> {
        if labels.len() != self.x.n_rows() {
            return Err(Error::InvalidInput("label count differs from sample count".into()));
        }
        let positive: Vec<bool> = labels.iter().map(|&y| y > 0.0).collect();
        let pure = self
            .order
            .iter()
            .zip(&self.values)
            .map(|(order, vals)| {
                let mut flags = vec![true; order.len()];
                let mut start = 0;
                while start < order.len() {
                    let mut end = start + 1;
                    let mut pure = true;
                    while end < order.len() && vals[end] == vals[start] {
                        pure &= positive[order[end] as usize] == positive[order[start] as usize];
                        end += 1;
                    }
                    if !pure {
                        flags[start..end].iter_mut().for_each(|f| *f = false);
                    }
                    start = end;
                }
                flags
            })
            .collect();
        Ok(PreparedLabels { positive, pure })
    }

    /// Fits a tree; also returns the leaf reached by every training sample.
    pub fn fit(&self, labels: &[f64], weights: &[f64], max_depth: usize) -> Result<(DecisionTree, Vec<usize>)> {
        let prepared = self.prepare(labels)?;
        self.fit_prepared(&prepared, weights, max_depth)
    }

    pub fn fit_prepared(
        &self,
        labels: &PreparedLabels,
        weights: &[f64],
        max_depth: usize,
    ) -> Result<(DecisionTree, Vec<usize>)> {
        let n = self.x.n_rows();
        if n == 0 {
            return Err(Error::InvalidInput("decision tree on an empty sample set".into()));
        }
        if labels.len() != n || weights.len() != n {
            return Err(Error::InvalidInput("labels/weights length differs from samples".into()));
        }
        let total_w: f64 = weights.iter().sum();
        if !(total_w > 0.0) || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidInput("weights must be nonnegative with a positive sum".into()));
        }

        let mut samples: Vec<Sample> = (0..n)
            .map(|i| Sample {
                slot: 0,
                positive: labels.positive[i],
                weight: weights[i],
            })
            .collect();
        let (mut p0, mut n0) = (0.0, 0.0);
        for s in &samples {
            if s.positive {
                p0 += s.weight;
            } else {
                n0 += s.weight;
            }
        }
        let mut nodes = vec![TreeNode::Leaf {
            positive: p0,
            negative: n0,
        }];
        let mut leaf_of = vec![0usize; n];
        let mut slots = vec![Slot {
            node: 0,
            depth: 0,
            pos: p0,
            neg: n0,
        }];

        while !slots.is_empty() {
            let active: Vec<bool> = slots
                .iter()
                .map(|s| s.depth < max_depth && s.pos > 0.0 && s.neg > 0.0)
                .collect();
            // best (cost, feature, threshold) per slot; lower cost = higher gain
            let mut best: Vec<Option<(f64, usize, f64)>> = vec![None; slots.len()];
            if active.iter().any(|&a| a) {
                let mut scan = vec![Scan::default(); slots.len()];
                for f in 0..self.order.len() {
                    scan.iter_mut().for_each(|s| *s = Scan::default());
                    let (order, vals, pure_f) = (&self.order[f], &self.values[f], &labels.pure[f]);
                    for k in 0..order.len() {
                        let smp = samples[order[k] as usize];
                        if smp.slot == NO_SLOT || !active[smp.slot as usize] {
                            continue;
                        }
                        let s = smp.slot as usize;
                        let v = vals[k];
                        let st = &mut scan[s];
                        if st.seen && v != st.last {
                            let this_label = pure_f[k].then_some(smp.positive);
                            let boundary = match (st.last_label, this_label) {
                                (Some(a), Some(b)) => a != b,
                                _ => true,
                            };
                            if boundary {
                                let slot = &slots[s];
                                let (lp, ln) = (st.pos, st.neg);
                                let (rp, rn) = ((slot.pos - lp).max(0.0), (slot.neg - ln).max(0.0));
                                let hopeless = best[s].is_some_and(|(c, _, _)| {
                                    gini_bound(lp, ln) + gini_bound(rp, rn) >= c
                                        || collision_bound(lp, ln) + collision_bound(rp, rn) >= c
                                });
                                if !hopeless {
                                    let cost = entropy_mass(lp, ln) + entropy_mass(rp, rn);
                                    if best[s].is_none_or(|(c, _, _)| cost < c) {
                                        let mut t = 0.5 * (st.last + v);
                                        if t >= v {
                                            t = st.last;
                                        }
                                        best[s] = Some((cost, f, t));
                                    }
                                }
                            }
                            st.last_label = pure_f[k].then_some(smp.positive);
                        } else if !st.seen {
                            st.last_label = pure_f[k].then_some(smp.positive);
                        }
                        st.seen = true;
                        st.last = v;
                        if smp.positive {
                            st.pos += smp.weight;
                        } else {
                            st.neg += smp.weight;
                        }
                    }
                }
            }

            // expand slots whose best split has positive gain
            let mut next = Vec::new();
            let mut remap: Vec<Option<(u32, u32, usize, f64)>> = vec![None; slots.len()];
            for (s, slot) in slots.iter().enumerate() {
                let Some((cost, feature, threshold)) = best[s] else { continue };
                let w = slot.pos + slot.neg;
                let gain = (entropy_mass(slot.pos, slot.neg) - cost) / w;
                if !(gain > MIN_GAIN) {
                    continue;
                }
                let left = nodes.len();
                nodes.push(TreeNode::Leaf { positive: 0.0, negative: 0.0 });
                nodes.push(TreeNode::Leaf { positive: 0.0, negative: 0.0 });
                nodes[slot.node] = TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right: left + 1,
                };
                let l = next.len() as u32;
                next.push(Slot { node: left, depth: slot.depth + 1, pos: 0.0, neg: 0.0 });
                next.push(Slot { node: left + 1, depth: slot.depth + 1, pos: 0.0, neg: 0.0 });
                remap[s] = Some((l, l + 1, feature, threshold));
            }
            for (i, smp) in samples.iter_mut().enumerate() {
                if smp.slot == NO_SLOT {
                    continue;
                }
                match remap[smp.slot as usize] {
                    Some((l, r, f, t)) => {
                        let c = if self.x.get(i, f) <= t { l } else { r };
                        smp.slot = c;
                        let slot = &mut next[c as usize];
                        if smp.positive {
                            slot.pos += smp.weight;
                        } else {
                            slot.neg += smp.weight;
                        }
                        leaf_of[i] = slot.node;
                    }
                    None => smp.slot = NO_SLOT,
                }
            }
            for slot in &next {
                nodes[slot.node] = TreeNode::Leaf {
                    positive: slot.pos,
                    negative: slot.neg,
                };
            }
            slots = next;
        }
        Ok((DecisionTree { nodes }, leaf_of))
    }
}

/// Fits one tree with labels in `{+1, -1}` and nonnegative weights.
pub fn train_tree(x: &FeatureMatrix, labels: &[f64], weights: &[f64], max_depth: usize) -> Result<DecisionTree> {
    TreeTrainer::new(x).fit(labels, weights, max_depth).map(|(t, _)| t)
}
