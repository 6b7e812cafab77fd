//! Hidden Markov models with diagonal Gaussian emissions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const VARIANCE_FLOOR: f64 = 1e-6;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HmmParams {
    pub n_states: usize,
    pub max_iterations: usize,
    /// Stop once the per-frame log-likelihood gain drops below this.
    pub tolerance: f64,
}

impl Default for HmmParams {
    fn default() -> Self {
        Self {
            n_states: 10,
            max_iterations: 100,
            tolerance: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianHmm {
    pub initial: Vec<f64>,
    /// Row-major `n_states x n_states`.
    pub transition: Vec<Vec<f64>>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingTrace {
    /// Total log-likelihood of the data before each re-estimation step,
    /// followed by the value under the final parameters.
    pub log_likelihood: Vec<f64>,
}

impl GaussianHmm {
    pub fn n_states(&self) -> usize {
        self.initial.len()
    }

    pub fn dim(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    pub fn log_emission(&self, state: usize, x: &[f64]) -> f64 {
        let (m, v) = (&self.means[state], &self.variances[state]);
        let mut acc = 0.0;
        for d in 0..x.len() {
            let diff = x[d] - m[d];
            acc += LN_2PI + v[d].ln() + diff * diff / v[d];
        }
        -0.5 * acc
    }

    fn check(&self, seq: &[Vec<f64>]) -> Result<()> {
        if seq.is_empty() {
            return Err(Error::InvalidInput("empty observation sequence".into()));
        }
        if seq.iter().any(|o| o.len() != self.dim()) {
            return Err(Error::InvalidInput(format!(
                "observation width differs from model dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Log-likelihood via the scaled forward recursion.
    pub fn log_likelihood(&self, seq: &[Vec<f64>]) -> Result<f64> {
        self.check(seq)?;
        Ok(forward_backward(self, &self.emissions(seq), false).log_likelihood)
    }

    /// Most probable state path and its joint log-probability.
    pub fn viterbi(&self, seq: &[Vec<f64>]) -> Result<(Vec<usize>, f64)> {
        self.check(seq)?;
        let tables = self.log_tables();
        let log_b = self.emissions(seq);
        Ok(viterbi_decode(&tables, &log_b))
    }

    pub fn log_tables(&self) -> LogTables {
        let n = self.n_states();
        let mut transition = Vec::with_capacity(n * n);
        for row in &self.transition {
            transition.extend(row.iter().map(|p| p.ln()));
        }
        LogTables {
            initial: self.initial.iter().map(|p| p.ln()).collect(),
            transition,
        }
    }

    /// Per-frame log emission densities, `[t][state]`.
    pub fn emissions(&self, seq: &[Vec<f64>]) -> Vec<Vec<f64>> {
        seq.iter()
            .map(|o| (0..self.n_states()).map(|s| self.log_emission(s, o)).collect())
            .collect()
    }
}

/// Log initial and transition probabilities (`transition` row-major).
#[derive(Clone, Debug)]
pub struct LogTables {
    pub initial: Vec<f64>,
    pub transition: Vec<f64>,
}

/// Max-product recursion over precomputed log emissions.
pub fn viterbi_decode<R: AsRef<[f64]>>(tables: &LogTables, log_b: &[R]) -> (Vec<usize>, f64) {
    let s_n = tables.initial.len();
    let mut delta: Vec<f64> = (0..s_n).map(|s| tables.initial[s] + log_b[0].as_ref()[s]).collect();
    let mut next = vec![0.0; s_n];
    let mut back = vec![0usize; log_b.len() * s_n];
    for t in 1..log_b.len() {
        let b = log_b[t].as_ref();
        for j in 0..s_n {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for i in 0..s_n {
                let v = delta[i] + tables.transition[i * s_n + j];
                if v > best {
                    best = v;
                    arg = i;
                }
            }
            next[j] = best + b[j];
            back[t * s_n + j] = arg;
        }
        std::mem::swap(&mut delta, &mut next);
    }
    let mut last = 0;
    for s in 1..s_n {
        if delta[s] > delta[last] {
            last = s;
        }
    }
    let score = delta[last];
    let mut path = vec![last; log_b.len()];
    for t in (1..log_b.len()).rev() {
        path[t - 1] = back[t * s_n + path[t]];
    }
    (path, score)
}

/// Best-path log-probability only.
pub fn viterbi_score<R: AsRef<[f64]>>(tables: &LogTables, log_b: &[R]) -> f64 {
    let s_n = tables.initial.len();
    let mut delta: Vec<f64> = (0..s_n).map(|s| tables.initial[s] + log_b[0].as_ref()[s]).collect();
    let mut next = vec![0.0; s_n];
    for row in &log_b[1..] {
        let b = row.as_ref();
        for j in 0..s_n {
            let mut best = f64::NEG_INFINITY;
            for i in 0..s_n {
                best = best.max(delta[i] + tables.transition[i * s_n + j]);
            }
            next[j] = best + b[j];
        }
        std::mem::swap(&mut delta, &mut next);
    }
    delta.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

struct Posteriors {
    log_likelihood: f64,
    gamma: Vec<Vec<f64>>,
    xi_sum: Vec<Vec<f64>>,
}

/// Scaled forward-backward. Emission log-densities are shifted per frame
/// by their maximum so the scaled recursion never underflows.
fn forward_backward(m: &GaussianHmm, log_b: &[Vec<f64>], posteriors: bool) -> Posteriors {
    let s_n = m.n_states();
    let t_n = log_b.len();
    let mut shift = vec![0.0; t_n];
    let b: Vec<Vec<f64>> = log_b
        .iter()
        .enumerate()
        .map(|(t, row)| {
            let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            shift[t] = mx;
            row.iter().map(|v| (v - mx).exp()).collect()
        })
        .collect();
    let mut alpha = vec![vec![0.0; s_n]; t_n];
    let mut scale = vec![0.0; t_n];
    for s in 0..s_n {
        alpha[0][s] = m.initial[s] * b[0][s];
    }
    scale[0] = alpha[0].iter().sum();
    alpha[0].iter_mut().for_each(|a| *a /= scale[0]);
    for t in 1..t_n {
        for j in 0..s_n {
            let mut acc = 0.0;
            for i in 0..s_n {
                acc += alpha[t - 1][i] * m.transition[i][j];
            }
            alpha[t][j] = acc * b[t][j];
        }
        scale[t] = alpha[t].iter().sum();
        let c = scale[t];
        alpha[t].iter_mut().for_each(|a| *a /= c);
    }
    let log_likelihood: f64 = scale.iter().map(|c| c.ln()).sum::<f64>() + shift.iter().sum::<f64>();
    if !posteriors {
        return Posteriors {
            log_likelihood,
            gamma: Vec::new(),
            xi_sum: Vec::new(),
        };
    }
    let mut beta = vec![vec![1.0; s_n]; t_n];
    let mut xi_sum = vec![vec![0.0; s_n]; s_n];
    for t in (0..t_n.saturating_sub(1)).rev() {
        let mut wb = vec![0.0; s_n];
        for j in 0..s_n {
            wb[j] = b[t + 1][j] * beta[t + 1][j];
        }
        for i in 0..s_n {
            let mut acc = 0.0;
            for j in 0..s_n {
                let v = m.transition[i][j] * wb[j];
                acc += v;
                xi_sum[i][j] += alpha[t][i] * v / scale[t + 1];
            }
            beta[t][i] = acc / scale[t + 1];
        }
    }
    let gamma = (0..t_n)
        .map(|t| {
            let row: Vec<f64> = (0..s_n).map(|s| alpha[t][s] * beta[t][s]).collect();
            let z: f64 = row.iter().sum();
            row.into_iter().map(|g| g / z).collect()
        })
        .collect();
    Posteriors {
        log_likelihood,
        gamma,
        xi_sum,
    }
}

fn initial_transition(n: usize) -> Vec<Vec<f64>> {
    if n == 1 {
        return vec![vec![1.0]];
    }
    (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            let others = n - 1;
            let spread = if i + 1 < n { 0.1 } else { 0.2 };
            for (j, r) in row.iter_mut().enumerate() {
                if j != i {
                    *r = spread / others as f64;
                }
            }
            row[i] = 0.8;
            if i + 1 < n {
                row[i + 1] += 0.1;
            }
            row
        })
        .collect()
}

fn initial_model(seqs: &[Vec<Vec<f64>>], n: usize, dim: usize) -> GaussianHmm {
    let mut sum = vec![vec![0.0; dim]; n];
    let mut sq = vec![vec![0.0; dim]; n];
    let mut count = vec![0usize; n];
    for seq in seqs {
        let len = seq.len();
        for (t, o) in seq.iter().enumerate() {
            let s = (t * n / len).min(n - 1);
            count[s] += 1;
            for d in 0..dim {
                sum[s][d] += o[d];
                sq[s][d] += o[d] * o[d];
            }
        }
    }
    let total = count.iter().sum::<usize>() as f64;
    let global_mean: Vec<f64> = (0..dim).map(|d| sum.iter().map(|s| s[d]).sum::<f64>() / total).collect();
    let global_var: Vec<f64> = (0..dim)
        .map(|d| (sq.iter().map(|s| s[d]).sum::<f64>() / total - global_mean[d].powi(2)).max(VARIANCE_FLOOR))
        .collect();
    let mut means = Vec::with_capacity(n);
    let mut variances = Vec::with_capacity(n);
    for s in 0..n {
        if count[s] == 0 {
            means.push(global_mean.clone());
            variances.push(global_var.clone());
            continue;
        }
        let c = count[s] as f64;
        let m: Vec<f64> = sum[s].iter().map(|v| v / c).collect();
        let v: Vec<f64> = (0..dim).map(|d| (sq[s][d] / c - m[d] * m[d]).max(VARIANCE_FLOOR)).collect();
        means.push(m);
        variances.push(v);
    }
    GaussianHmm {
        initial: vec![1.0 / n as f64; n],
        transition: initial_transition(n),
        means,
        variances,
    }
}

pub fn hmm_baum_welch(seqs: &[Vec<Vec<f64>>], params: &HmmParams) -> Result<GaussianHmm> {
    hmm_baum_welch_traced(seqs, params).map(|(m, _)| m)
}

/// Baum-Welch re-estimation of transitions and emissions. The initial
/// distribution stays uniform.
pub fn hmm_baum_welch_traced(seqs: &[Vec<Vec<f64>>], params: &HmmParams) -> Result<(GaussianHmm, TrainingTrace)> {
    let n = params.n_states;
    if n == 0 {
        return Err(Error::InvalidInput("hmm needs at least one state".into()));
    }
    let seqs: Vec<Vec<Vec<f64>>> = seqs.iter().filter(|s| !s.is_empty()).cloned().collect();
    let frames: usize = seqs.iter().map(Vec::len).sum();
    if frames < 10 * n {
        return Err(Error::Training(format!(
            "hmm with {n} states needs at least {} frames, got {frames}",
            10 * n
        )));
    }
    let dim = seqs[0][0].len();
    if seqs.iter().flatten().any(|o| o.len() != dim) {
        return Err(Error::InvalidInput("observation widths differ".into()));
    }
    let mut model = initial_model(&seqs, n, dim);
    let mut trace = TrainingTrace::default();
    let mut prev: Option<f64> = None;
    for _iter in 0..params.max_iterations {
        let mut total_ll = 0.0;
        let mut trans = vec![vec![0.0; n]; n];
        let mut occ = vec![0.0; n];
        let mut sum = vec![vec![0.0; dim]; n];
        let mut sq = vec![vec![0.0; dim]; n];
        for seq in &seqs {
            let p = forward_backward(&model, &model.emissions(seq), true);
            total_ll += p.log_likelihood;
            for i in 0..n {
                for j in 0..n {
                    trans[i][j] += p.xi_sum[i][j];
                }
            }
            for (t, o) in seq.iter().enumerate() {
                for s in 0..n {
                    let g = p.gamma[t][s];
                    if g == 0.0 {
                        continue;
                    }
                    occ[s] += g;
                    for d in 0..dim {
                        sum[s][d] += g * o[d];
                        sq[s][d] += g * o[d] * o[d];
                    }
                }
            }
        }
        trace.log_likelihood.push(total_ll);
        if let Some(p) = prev {
            if (total_ll - p) / (frames as f64) < params.tolerance {
                return Ok((model, trace));
            }
        }
        prev = Some(total_ll);
        for i in 0..n {
            let row_sum: f64 = trans[i].iter().sum();
            if row_sum > 0.0 {
                for j in 0..n {
                    model.transition[i][j] = trans[i][j] / row_sum;
                }
            }
            if occ[i] > 1e-300 {
                for d in 0..dim {
                    let m = sum[i][d] / occ[i];
                    model.means[i][d] = m;
                    model.variances[i][d] = (sq[i][d] / occ[i] - m * m).max(VARIANCE_FLOOR);
                }
            }
        }
    }
    let final_ll: f64 = seqs
        .iter()
        .map(|s| forward_backward(&model, &model.emissions(s), false).log_likelihood)
        .sum();
    trace.log_likelihood.push(final_ll);
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn random_model(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> GaussianHmm {
        let norm = |v: Vec<f64>| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect::<Vec<_>>()
        };
        GaussianHmm {
            initial: norm((0..n).map(|_| rng.random_range(0.1..1.0)).collect()),
            transition: (0..n).map(|_| norm((0..n).map(|_| rng.random_range(0.1..1.0)).collect())).collect(),
            means: (0..n).map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()).collect(),
            variances: (0..n).map(|_| (0..dim).map(|_| rng.random_range(0.3..2.0)).collect()).collect(),
        }
    }

    /// Exhaustive path enumeration.
    fn brute_force(m: &GaussianHmm, seq: &[Vec<f64>]) -> (Vec<usize>, f64, f64) {
        let n = m.n_states();
        let t_n = seq.len();
        let mut best = (vec![], f64::NEG_INFINITY);
        let mut total = 0.0;
        for code in 0..n.pow(t_n as u32) {
            let mut c = code;
            let path: Vec<usize> = (0..t_n)
                .map(|_| {
                    let s = c % n;
                    c /= n;
                    s
                })
                .collect();
            let mut lp = m.initial[path[0]].ln() + m.log_emission(path[0], &seq[0]);
            for t in 1..t_n {
                lp += m.transition[path[t - 1]][path[t]].ln() + m.log_emission(path[t], &seq[t]);
            }
            total += lp.exp();
            if lp > best.1 {
                best = (path, lp);
            }
        }
        (best.0, best.1, total.ln())
    }

    #[test]
    fn viterbi_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let n = rng.random_range(1..=3);
            let len = rng.random_range(1..=8);
            let m = random_model(&mut rng, n, 2);
            let seq: Vec<Vec<f64>> = (0..len).map(|_| vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]).collect();
            let (path, ll) = m.viterbi(&seq).unwrap();
            let (bp, bll, _) = brute_force(&m, &seq);
            assert!((ll - bll).abs() < 1e-9);
            assert_eq!(path, bp);
            let score = viterbi_score(&m.log_tables(), &m.emissions(&seq));
            assert!((score - ll).abs() < 1e-12);
        }
    }

    #[test]
    fn single_frame_viterbi_is_argmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_model(&mut rng, 3, 1);
        let o = vec![vec![0.7]];
        let (path, _) = m.viterbi(&o).unwrap();
        let expected = (0..3)
            .max_by(|&a, &b| {
                let f = |s: usize| m.initial[s].ln() + m.log_emission(s, &o[0]);
                f(a).total_cmp(&f(b))
            })
            .unwrap();
        assert_eq!(path, vec![expected]);
    }

    #[test]
    fn scaled_likelihood_matches_naive_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let m = random_model(&mut rng, 2, 1);
            let len = rng.random_range(1..=12);
            let seq: Vec<Vec<f64>> = (0..len).map(|_| vec![rng.random_range(-2.0..2.0)]).collect();
            let (_, _, naive) = brute_force(&m, &seq);
            assert!((m.log_likelihood(&seq).unwrap() - naive).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_sequence_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_model(&mut rng, 2, 1);
        assert!(m.viterbi(&[]).is_err());
    }

    #[test]
    fn initial_transitions_are_stochastic() {
        for n in 1..12 {
            for row in initial_transition(n) {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn too_few_frames_errors() {
        let seq = vec![vec![vec![0.0]; 50]];
        assert!(hmm_baum_welch(&seq, &HmmParams::default()).is_err());
    }

    #[test]
    fn constant_observations_hit_variance_floor() {
        let seq = vec![vec![vec![2.5, -1.0]; 300]];
        let m = hmm_baum_welch(&seq, &HmmParams::default()).unwrap();
        assert!(m.variances.iter().flatten().all(|&v| v == VARIANCE_FLOOR));
        assert!(m.log_likelihood(&seq[0]).unwrap().is_finite());
    }

    pub(crate) fn sample_two_state(seed: u64, len: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let means = [-2.0, 3.0];
        let stay = [0.95, 0.9];
        let mut s = 0usize;
        (0..len)
            .map(|_| {
                let v = Normal::new(means[s], 1.0).unwrap().sample(&mut rng);
                if !rng.random_bool(stay[s]) {
                    s = 1 - s;
                }
                vec![v]
            })
            .collect()
    }

    #[test]
    fn recovers_two_state_means() {
        let seq = sample_two_state(21, 5000);
        let p = HmmParams { n_states: 2, ..Default::default() };
        let (m, trace) = hmm_baum_welch_traced(&[seq], &p).unwrap();
        let mut mu: Vec<f64> = m.means.iter().map(|v| v[0]).collect();
        mu.sort_by(f64::total_cmp);
        assert!((mu[0] + 2.0).abs() < 0.1 && (mu[1] - 3.0).abs() < 0.1, "{mu:?}");
        for w in trace.log_likelihood.windows(2) {
            assert!(w[1] - w[0] >= -1e-8);
        }
    }
}
