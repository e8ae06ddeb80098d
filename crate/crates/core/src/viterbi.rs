//! Viterbi decoding and exhaustive reference decoders.

use crate::error::{QatsError, Result};
use crate::model::ChainParams;
use crate::scores::LogDensities;

/// Scratch buffers whose size depends on `n`, reusable across decodes.
#[derive(Clone, Debug, Default)]
pub struct ViterbiWorkspace {
    rho: Vec<f64>,
    rho_next: Vec<f64>,
    back: Vec<u32>,
}

impl ViterbiWorkspace {
    /// Allocates and touches all buffers for `m` states and `n` observations.
    pub fn with_capacity(m: usize, n: usize) -> Self {
        Self {
            rho: vec![0.0; m],
            rho_next: vec![0.0; m],
            back: std::iter::repeat_n(0, m * n.saturating_sub(1)).collect(),
        }
    }
}

/// A decoded path and its complete log-likelihood.
///
/// `log_lik == -inf` means every path is impossible under the model; the path
/// then just follows the argmax bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct ViterbiPath {
    pub path: Vec<usize>,
    pub log_lik: f64,
}

pub fn viterbi_decode(chain: &ChainParams, g: &LogDensities) -> Result<ViterbiPath> {
    let mut ws = ViterbiWorkspace::default();
    viterbi_decode_with(chain, g, &mut ws)
}

/// Viterbi decoding with caller-provided scratch space. Ties go to the smaller state.
pub fn viterbi_decode_with(
    chain: &ChainParams,
    g: &LogDensities,
    ws: &mut ViterbiWorkspace,
) -> Result<ViterbiPath> {
    let mut path = Vec::new();
    let log_lik = viterbi_decode_into(chain, g, ws, &mut path)?;
    Ok(ViterbiPath { path, log_lik })
}

/// Writes the Viterbi path into `path` and returns its log-likelihood.
pub fn viterbi_decode_into(
    chain: &ChainParams,
    g: &LogDensities,
    ws: &mut ViterbiWorkspace,
    path: &mut Vec<usize>,
) -> Result<f64> {
    let m = chain.n_states();
    if g.n_states() != m {
        return Err(QatsError::DimensionMismatch(format!(
            "chain has {m} states but log-density matrix has {}",
            g.n_states()
        )));
    }
    let n = g.len();
    let q = chain.log_transition_flat();

    ws.rho.clear();
    ws.rho.extend(chain.log_initial_vec().iter().zip(g.column(0)).map(|(p, e)| p + e));
    ws.rho_next.clear();
    ws.rho_next.resize(m, 0.0);
    let need = m * n.saturating_sub(1);
    if ws.back.len() < need {
        ws.back.resize(need, 0);
    }

    for t in 1..n {
        let col = g.column(t);
        let back = &mut ws.back[(t - 1) * m..t * m];
        for i in 0..m {
            let mut best = ws.rho[0] + q[i];
            let mut arg = 0u32;
            for j in 1..m {
                let v = ws.rho[j] + q[j * m + i];
                if v > best {
                    best = v;
                    arg = j as u32;
                }
            }
            back[i] = arg;
            ws.rho_next[i] = best + col[i];
        }
        std::mem::swap(&mut ws.rho, &mut ws.rho_next);
    }

    let (mut last, mut log_lik) = (0, ws.rho[0]);
    for (i, &v) in ws.rho.iter().enumerate().skip(1) {
        if v > log_lik {
            last = i;
            log_lik = v;
        }
    }
    path.clear();
    path.resize(n, 0);
    path[n - 1] = last;
    for t in (0..n - 1).rev() {
        path[t] = ws.back[t * m + path[t + 1]] as usize;
    }
    Ok(log_lik)
}

/// Complete log-likelihood of `path` under the chain and the observed log-densities.
pub fn complete_log_lik(chain: &ChainParams, g: &LogDensities, path: &[usize]) -> Result<f64> {
    if path.len() != g.len() {
        return Err(QatsError::DimensionMismatch(format!(
            "path has length {} but there are {} observations",
            path.len(),
            g.len()
        )));
    }
    if let Some(&s) = path.iter().find(|&&s| s >= chain.n_states()) {
        return Err(QatsError::OutOfBounds(format!("state {} not in 1..={}", s + 1, chain.n_states())));
    }
    Ok(path_score(chain, g, path))
}

fn path_score(chain: &ChainParams, g: &LogDensities, path: &[usize]) -> f64 {
    let mut total = chain.log_initial(path[0]) + g.get(path[0], 0);
    for t in 1..path.len() {
        total += chain.log_transition(path[t - 1], path[t]) + g.get(path[t], t);
    }
    total
}

/// Largest instance [`brute_force_map`] accepts, in number of paths.
pub const BRUTE_FORCE_LIMIT: usize = 1_000_000;

/// Exhaustive maximizer of the complete likelihood.
///
/// Paths are enumerated in lexicographic order and only a strictly better
/// score replaces the incumbent, so ties resolve to the smallest path.
pub fn brute_force_map(chain: &ChainParams, g: &LogDensities) -> Result<(Vec<usize>, f64)> {
    let (m, n) = (chain.n_states(), g.len());
    let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(m).filter(|&t| t <= BRUTE_FORCE_LIMIT));
    if total.is_none() {
        return Err(QatsError::InstanceTooLarge { states: m, len: n });
    }
    if g.n_states() != m {
        return Err(QatsError::DimensionMismatch("state counts differ".into()));
    }
    let mut path = vec![0; n];
    let mut best = (path.clone(), path_score(chain, g, &path));
    loop {
        // odometer increment, last position fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            path[pos] += 1;
            if path[pos] < m {
                break;
            }
            path[pos] = 0;
        }
        let v = path_score(chain, g, &path);
        if v > best.1 {
            best = (path.clone(), v);
        }
    }
}
