//! Ground-truth data for benchmarks.
//!
//! A chain with uniform initial distribution and the symmetric exit-probability
//! transition matrix is sampled first, then every observation is drawn from
//! `N(state + 1, sigma^2)`.
//!
//! Randomness comes from ChaCha8 seeded with `seed` via `seed_from_u64`, with
//! `replication_id` selecting the ChaCha stream. Each replication is therefore
//! an independent, platform-independent stream under a shared seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::decode::Segmentation;
use crate::error::{QatsError, Result};
use crate::model::{exit_probability, uniform_transition, ChainParams, GaussianEmission, HmmModel};
use crate::scores::LogDensities;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub m: usize,
    /// Expected number of segments.
    pub s: usize,
    pub sigma: f64,
    pub seed: u64,
    #[serde(default)]
    pub replication_id: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(QatsError::InvalidParameter(format!("n must be at least 2, got {}", self.n)));
        }
        if self.m < 2 {
            return Err(QatsError::TooFewStates(self.m));
        }
        if self.s < 1 {
            return Err(QatsError::InvalidParameter("s must be at least 1".into()));
        }
        if self.s > self.n {
            return Err(QatsError::InvalidParameter(format!(
                "s exceeds n ({} > {})",
                self.s, self.n
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(QatsError::InvalidParameter(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    pub fn exit_probability(&self) -> Result<f64> {
        exit_probability(self.n, self.s)
    }

    /// The model the data are generated from: uniform start, symmetric chain, means `1..=m`.
    pub fn model(&self) -> Result<HmmModel> {
        self.validate()?;
        let pi = vec![1.0 / self.m as f64; self.m];
        let trans = uniform_transition(self.m, self.n, self.s)?;
        HmmModel::new(&pi, &trans, GaussianEmission::integer_means(self.m, self.sigma)?)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.replication_id);
        rng
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimOutput {
    /// Hidden states, 0-based.
    pub x_true: Vec<usize>,
    pub y: Vec<f64>,
    /// Number of maximal constant runs of `x_true`.
    pub true_segments: usize,
}

/// Draws `n` states from the chain, then one Gaussian observation per state.
pub fn simulate_hmm(config: &SimConfig) -> Result<SimOutput> {
    let model = config.model()?;
    let mut rng = config.rng();
    Ok(sample(&model, config.n, &mut rng))
}

/// Samples a state sequence and observations from any Gaussian-emission model.
pub fn sample<R: Rng>(model: &HmmModel, n: usize, rng: &mut R) -> SimOutput {
    let x_true = sample_states(model.chain(), n, rng);
    let e = model.emission();
    let y = x_true
        .iter()
        .map(|&x| {
            let z: f64 = rng.sample(StandardNormal);
            e.means()[x] + e.sigma() * z
        })
        .collect();
    let true_segments = Segmentation::from_path(&x_true).s();
    SimOutput { x_true, y, true_segments }
}

/// Inductive categorical sampling: `x_1 ~ pi`, `x_k ~ p(x_{k-1}, .)`.
pub fn sample_states<R: Rng>(chain: &ChainParams, n: usize, rng: &mut R) -> Vec<usize> {
    let pi = chain.initial_probabilities();
    let trans = chain.transition_probabilities();
    let mut x = Vec::with_capacity(n);
    if n == 0 {
        return x;
    }
    x.push(categorical(&pi, rng));
    for k in 1..n {
        let prev = x[k - 1];
        x.push(categorical(&trans[prev], rng));
    }
    x
}

fn categorical<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // u landed in the rounding gap above the last partial sum
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// `g[i][k] = -log(2 pi sigma^2) / 2 - (y_k - mean_i)^2 / (2 sigma^2)`.
pub fn gaussian_log_densities(y: &[f64], means: &[f64], sigma: f64) -> Result<LogDensities> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(QatsError::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let e = GaussianEmission::new(means.to_vec(), sigma)?;
    let m = means.len();
    let mut data = Vec::with_capacity(m * y.len());
    for &obs in y {
        data.extend((0..m).map(|i| crate::model::EmissionModel::log_density(&e, i, obs)));
    }
    LogDensities::from_time_major(m, y.len(), data)
}
