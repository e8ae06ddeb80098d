//! Hidden Markov model parameters.
//!
//! Probabilities are validated once and stored as natural logarithms. A zero
//! probability becomes `f64::NEG_INFINITY` so that impossible transitions can
//! never win a maximization against a feasible candidate.
//!
//! States are `0..m` inside the library. Files and the CLI print them as `1..=m`.

use crate::error::{QatsError, Result};

/// Tolerance on the row sums of user-supplied probability vectors.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Maps a hidden state and an observation to `log f_state(y)`.
///
/// Implementations must return a finite value for every state and every
/// observation they are asked about; the score builders reject anything else.
pub trait EmissionModel: Send + Sync {
    fn n_states(&self) -> usize;

    fn log_density(&self, state: usize, y: f64) -> f64;
}

/// Normal emissions with one mean per state and a shared standard deviation.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianEmission {
    means: Vec<f64>,
    sigma: f64,
    log_norm: f64,
    inv_two_var: f64,
}

impl GaussianEmission {
    pub fn new(means: Vec<f64>, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(QatsError::InvalidParameter(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        if means.iter().any(|m| !m.is_finite()) {
            return Err(QatsError::InvalidParameter("emission means must be finite".into()));
        }
        Ok(Self {
            means,
            sigma,
            log_norm: -0.5 * (2.0 * std::f64::consts::PI * sigma * sigma).ln(),
            inv_two_var: 0.5 / (sigma * sigma),
        })
    }

    /// State `i` (0-based) gets mean `i + 1`, the simulation setting.
    pub fn integer_means(m: usize, sigma: f64) -> Result<Self> {
        Self::new((1..=m).map(|i| i as f64).collect(), sigma)
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl EmissionModel for GaussianEmission {
    fn n_states(&self) -> usize {
        self.means.len()
    }

    #[inline]
    fn log_density(&self, state: usize, y: f64) -> f64 {
        let d = y - self.means[state];
        self.log_norm - d * d * self.inv_two_var
    }
}

/// Log-initial vector and log-transition matrix of a homogeneous Markov chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainParams {
    m: usize,
    log_pi: Vec<f64>,
    /// Row-major, `log_trans[i * m + j] = log p_ij`.
    log_trans: Vec<f64>,
}

impl ChainParams {
    /// Validates `pi` and the rows of `trans` and stores their componentwise logs.
    pub fn from_probabilities(pi: &[f64], trans: &[Vec<f64>]) -> Result<Self> {
        let m = pi.len();
        if m < 2 {
            return Err(QatsError::TooFewStates(m));
        }
        if trans.len() != m {
            return Err(QatsError::DimensionMismatch(format!(
                "initial vector has {m} entries but transition matrix has {} rows",
                trans.len()
            )));
        }
        check_probability_vector(pi, "initial distribution")?;
        for (i, row) in trans.iter().enumerate() {
            if row.len() != m {
                return Err(QatsError::DimensionMismatch(format!(
                    "transition row {} has {} entries, expected {m}",
                    i + 1,
                    row.len()
                )));
            }
            check_probability_vector(row, &format!("transition row {}", i + 1))?;
        }
        Ok(Self {
            m,
            log_pi: pi.iter().map(|p| p.ln()).collect(),
            log_trans: trans.iter().flat_map(|row| row.iter().map(|p| p.ln())).collect(),
        })
    }

    /// Builds directly from logs. Rows are checked after exponentiation.
    pub fn from_logs(log_pi: Vec<f64>, log_trans: Vec<Vec<f64>>) -> Result<Self> {
        let pi: Vec<f64> = log_pi.iter().map(|v| v.exp()).collect();
        let trans: Vec<Vec<f64>> = log_trans
            .iter()
            .map(|row| row.iter().map(|v| v.exp()).collect())
            .collect();
        Self::from_probabilities(&pi, &trans)?;
        let m = log_pi.len();
        Ok(Self { m, log_pi, log_trans: log_trans.into_iter().flatten().collect() })
    }

    #[inline]
    pub fn n_states(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn log_initial(&self, i: usize) -> f64 {
        self.log_pi[i]
    }

    #[inline]
    pub fn log_transition(&self, from: usize, to: usize) -> f64 {
        self.log_trans[from * self.m + to]
    }

    pub fn log_initial_vec(&self) -> &[f64] {
        &self.log_pi
    }

    /// Row-major view of the log-transition matrix.
    pub fn log_transition_flat(&self) -> &[f64] {
        &self.log_trans
    }

    pub fn initial_probabilities(&self) -> Vec<f64> {
        self.log_pi.iter().map(|v| v.exp()).collect()
    }

    pub fn transition_probabilities(&self) -> Vec<Vec<f64>> {
        self.log_trans.chunks(self.m).map(|row| row.iter().map(|v| v.exp()).collect()).collect()
    }
}

fn check_probability_vector(v: &[f64], what: &str) -> Result<()> {
    let sum: f64 = v.iter().sum();
    let entries_ok = v.iter().all(|p| (0.0..=1.0).contains(p));
    if !entries_ok || sum.is_nan() || (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(QatsError::NotStochastic { what: what.to_string(), sum });
    }
    Ok(())
}

/// A hidden Markov model: chain parameters plus an emission provider.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct HmmModel<E = GaussianEmission> {
    chain: ChainParams,
    emission: E,
}

impl<E: EmissionModel> HmmModel<E> {
    /// Validates dimensions and stochasticity, then stores the logs of `pi` and `trans`.
    pub fn new(pi: &[f64], trans: &[Vec<f64>], emission: E) -> Result<Self> {
        let chain = ChainParams::from_probabilities(pi, trans)?;
        Self::from_chain(chain, emission)
    }

    pub fn from_chain(chain: ChainParams, emission: E) -> Result<Self> {
        if emission.n_states() != chain.n_states() {
            return Err(QatsError::DimensionMismatch(format!(
                "chain has {} states but emission model has {}",
                chain.n_states(),
                emission.n_states()
            )));
        }
        Ok(Self { chain, emission })
    }

    pub fn n_states(&self) -> usize {
        self.chain.n_states()
    }

    pub fn chain(&self) -> &ChainParams {
        &self.chain
    }

    pub fn emission(&self) -> &E {
        &self.emission
    }
}

/// Exit probability `(s - 1) / (n - 1)` of a chain of length `n` with `s` expected segments.
pub fn exit_probability(n: usize, s: usize) -> Result<f64> {
    if n < 2 {
        return Err(QatsError::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    if s == 0 {
        return Err(QatsError::InvalidParameter("s must be at least 1".into()));
    }
    if s > n {
        return Err(QatsError::InvalidParameter(format!("s exceeds n ({s} > {n})")));
    }
    Ok((s - 1) as f64 / (n - 1) as f64)
}

/// Symmetric transition matrix with exit probability `p(n, s)`.
///
/// The diagonal is `1 - p` and every off-diagonal entry is `p / (m - 1)`.
pub fn uniform_transition(m: usize, n: usize, s: usize) -> Result<Vec<Vec<f64>>> {
    if m < 2 {
        return Err(QatsError::TooFewStates(m));
    }
    let p = exit_probability(n, s)?;
    let off = p / (m - 1) as f64;
    Ok((0..m)
        .map(|i| (0..m).map(|j| if i == j { 1.0 - p } else { off }).collect())
        .collect())
}

/// Expected number of constant runs of a length-`n` chain with exit probability `p`.
pub fn expected_segments(n: usize, p: f64) -> f64 {
    1.0 + (n.saturating_sub(1)) as f64 * p
}
