//! RBF-kernel support vector machine trained with SMO.

use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub c: f64,
    pub sigma: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            sigma: 13.0,
            tolerance: 1e-3,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbfSvmModel {
    pub sigma: f64,
    pub c: f64,
    pub support_vectors: Vec<Vec<f64>>,
    /// Signed dual coefficients `alpha_i * y_i`.
    pub coefficients: Vec<f64>,
    pub bias: f64,
}

#[inline]
pub fn rbf_kernel(a: &[f64], b: &[f64], sigma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-d2 / (2.0 * sigma * sigma)).exp()
}

impl RbfSvmModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, c)| c * rbf_kernel(sv, x, self.sigma))
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        if self.decision(x) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Full training result, including duals for every sample.
#[derive(Clone, Debug)]
pub struct SmoSolution {
    pub model: RbfSvmModel,
    pub alpha: Vec<f64>,
    pub iterations: usize,
}

impl SmoSolution {
    /// Largest violation of the KKT conditions measured on margins `y f(x)`.
    pub fn kkt_residual(&self, x: &FeatureMatrix, labels: &[f64]) -> f64 {
        let c = self.model.c;
        let mut worst: f64 = 0.0;
        for (i, row) in x.rows().enumerate() {
            let m = labels[i] * self.model.decision(row);
            let a = self.alpha[i];
            let v = if a <= 1e-12 {
                (1.0 - m).max(0.0)
            } else if a >= c - 1e-12 {
                (m - 1.0).max(0.0)
            } else {
                (m - 1.0).abs()
            };
            worst = worst.max(v);
        }
        worst
    }
}

pub fn smo_train(x: &FeatureMatrix, labels: &[f64], params: &SvmParams) -> Result<RbfSvmModel> {
    smo_solve(x, labels, params).map(|s| s.model)
}

pub fn smo_solve(x: &FeatureMatrix, labels: &[f64], params: &SvmParams) -> Result<SmoSolution> {
    let n = x.n_rows();
    if labels.len() != n {
        return Err(Error::InvalidInput("label count differs from sample count".into()));
    }
    let pos = labels.iter().filter(|&&y| y > 0.0).count();
    if pos == 0 || pos == n {
        return Err(Error::Training("svm needs samples of both classes".into()));
    }
    let y: Vec<f64> = labels.iter().map(|&l| if l > 0.0 { 1.0 } else { -1.0 }).collect();
    let c = params.c;
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        k[i * n + i] = 1.0;
        for j in 0..i {
            let v = rbf_kernel(x.row(i), x.row(j), params.sigma);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    let q = |i: usize, j: usize| y[i] * y[j] * k[i * n + j];

    let mut alpha = vec![0.0; n];
    // gradient of 1/2 a'Qa - e'a
    let mut grad = vec![-1.0; n];
    let in_up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);
    let mut iterations = 0;
    loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            if in_up(alpha[t], y[t]) && -y[t] * grad[t] > gmax {
                gmax = -y[t] * grad[t];
                i_sel = t;
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j_sel = usize::MAX;
        let mut best_obj = f64::INFINITY;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let v = -y[t] * grad[t];
            gmin = gmin.min(v);
            if i_sel != usize::MAX {
                let b = gmax - v;
                if b > 0.0 {
                    let a = (2.0 - 2.0 * k[i_sel * n + t]).max(1e-12);
                    let obj = -(b * b) / a;
                    if obj < best_obj {
                        best_obj = obj;
                        j_sel = t;
                    }
                }
            }
        }
        if gmax - gmin < params.tolerance || j_sel == usize::MAX || iterations >= params.max_iterations {
            break;
        }
        iterations += 1;
        let (i, j) = (i_sel, j_sel);
        let (ai_old, aj_old) = (alpha[i], alpha[j]);
        let quad = (q(i, i) + q(j, j) - 2.0 * y[i] * y[j] * q(i, j)).max(1e-12);
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - ai_old, alpha[j] - aj_old);
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }

    // bias from free vectors, else the midpoint of the feasible interval
    let (mut sum, mut count) = (0.0, 0usize);
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] > 0.0 && alpha[t] < c {
            sum += yg;
            count += 1;
        } else if (alpha[t] >= c && y[t] < 0.0) || (alpha[t] <= 0.0 && y[t] > 0.0) {
            ub = ub.min(yg);
        } else {
            lb = lb.max(yg);
        }
    }
    let rho = if count > 0 { sum / count as f64 } else { 0.5 * (ub + lb) };
    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for t in 0..n {
        if alpha[t] > 0.0 {
            support_vectors.push(x.row(t).to_vec());
            coefficients.push(alpha[t] * y[t]);
        }
    }
    Ok(SmoSolution {
        model: RbfSvmModel {
            sigma: params.sigma,
            c,
            support_vectors,
            coefficients,
            bias: -rho,
        },
        alpha,
        iterations,
    })
}
