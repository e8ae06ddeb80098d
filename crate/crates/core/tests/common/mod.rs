//! Instance generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use qats::{ChainParams, CumScores, GaussianEmission, HmmModel, LogDensities};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random probability vector with entries bounded away from zero.
pub fn random_simplex<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

/// Random Gaussian model: random stochastic `pi` and rows, means `1..=m`, random sigma.
pub fn random_model<R: Rng>(rng: &mut R, m: usize) -> HmmModel {
    let pi = random_simplex(rng, m);
    let trans: Vec<Vec<f64>> = (0..m).map(|_| random_simplex(rng, m)).collect();
    let sigma = rng.random_range(0.3..2.0);
    HmmModel::new(&pi, &trans, GaussianEmission::integer_means(m, sigma).unwrap()).unwrap()
}

/// Random model in which some initial and off-diagonal transition
/// probabilities are exactly zero; the diagonal stays positive.
pub fn random_sparse_model<R: Rng>(rng: &mut R, m: usize) -> HmmModel {
    let mut pi = vec![0.0; m];
    let live = rng.random_range(1..=m);
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    for &i in &order[..live] {
        pi[i] = rng.random_range(0.1..1.0);
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);

    let trans: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = (0..m)
                .map(|j| {
                    if i == j {
                        rng.random_range(0.2..1.0)
                    } else if rng.random_bool(0.5) {
                        0.0
                    } else {
                        rng.random_range(0.01..0.3)
                    }
                })
                .collect();
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= total);
            row
        })
        .collect();
    let sigma = rng.random_range(0.3..1.5);
    HmmModel::new(&pi, &trans, GaussianEmission::integer_means(m, sigma).unwrap()).unwrap()
}

/// Observations drawn around random means; not necessarily from the model.
pub fn random_observations<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.random_range(0.5..m as f64 + 0.5) + 0.5 * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Two-state instance where each observation equals its hidden state exactly:
/// states `0`/`1` are observed as `1.0`/`2.0`, the chain is symmetric with
/// switching probability `eps` and the emissions are `N(i, sigma^2)`.
pub struct IdealInstance {
    pub model: HmmModel,
    pub scores: CumScores,
    pub x_true: Vec<usize>,
    /// 1-based first positions of every segment after the first.
    pub changes: Vec<usize>,
}

pub fn ideal_instance(n: usize, changes: &[usize], first_state: usize, eps: f64, sigma: f64) -> IdealInstance {
    let mut x = vec![first_state; n];
    let mut state = first_state;
    let mut next = changes.iter().peekable();
    for (k, slot) in x.iter_mut().enumerate() {
        if next.peek().is_some_and(|&&c| c == k + 1) {
            next.next();
            state = 1 - state;
        }
        *slot = state;
    }
    let y: Vec<f64> = x.iter().map(|&s| (s + 1) as f64).collect();
    let model = HmmModel::new(
        &[0.5, 0.5],
        &[vec![1.0 - eps, eps], vec![eps, 1.0 - eps]],
        GaussianEmission::integer_means(2, sigma).unwrap(),
    )
    .unwrap();
    let scores = CumScores::build(&model, &y).unwrap();
    IdealInstance { model, scores, x_true: x, changes: changes.to_vec() }
}

/// Ideal instance with `n_changes` distinct random change points in `3..=n`.
pub fn random_ideal<R: Rng>(rng: &mut R, n: usize, n_changes: usize) -> IdealInstance {
    let mut pos: Vec<usize> = (3..=n).collect();
    pos.shuffle(rng);
    let mut changes: Vec<usize> = pos[..n_changes].to_vec();
    changes.sort_unstable();
    let eps = rng.random_range(0.001..0.45);
    let sigma = rng.random_range(0.1..1.0);
    ideal_instance(n, &changes, rng.random_range(0..2), eps, sigma)
}

/// Direct sum of the log-likelihood of `path` on positions `l..=r`
/// (`path[0]` is the state at `l`), given the preceding state.
pub fn direct_local_log_lik(
    chain: &ChainParams,
    g: &LogDensities,
    l: usize,
    path: &[usize],
    x0: Option<usize>,
) -> f64 {
    let mut total = match x0 {
        Some(prev) if l > 1 => chain.log_transition(prev, path[0]),
        _ => chain.log_initial(path[0]),
    };
    for (j, &s) in path.iter().enumerate() {
        if j > 0 {
            total += chain.log_transition(path[j - 1], s);
        }
        total += g.get(s, l - 1 + j);
    }
    total
}

/// Piecewise-constant path on `l..=r` with the given change points and states.
pub fn pieces(l: usize, r: usize, cuts: &[usize], states: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(r - l + 1);
    for k in l..=r {
        let piece = cuts.iter().filter(|&&c| c <= k).count();
        out.push(states[piece]);
    }
    out
}

/// `(score, states)` maximizing the direct sum over all admissible state
/// tuples for fixed change points; lexicographically smallest on ties.
pub fn brute_best(
    chain: &ChainParams,
    g: &LogDensities,
    l: usize,
    r: usize,
    cuts: &[usize],
    x0: Option<usize>,
) -> (f64, Vec<usize>) {
    let m = chain.n_states();
    let len = cuts.len() + 1;
    let mut states = vec![0; len];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        if states.windows(2).all(|w| w[0] != w[1]) {
            let v = direct_local_log_lik(chain, g, l, &pieces(l, r, cuts, &states), x0);
            if best.as_ref().is_none_or(|b| v > b.0) {
                best = Some((v, states.clone()));
            }
        }
        let mut pos = len;
        loop {
            if pos == 0 {
                return best.expect("m >= 2 admits a tuple of distinct neighbours");
            }
            pos -= 1;
            states[pos] += 1;
            if states[pos] < m {
                break;
            }
            states[pos] = 0;
        }
    }
}

/// Largest three-piece score over all `l < k1 < k2 <= r`, first maximizer in row-major order.
pub fn full_scan_h3(scores: &CumScores, l: usize, r: usize, x0: Option<usize>) -> (usize, usize, f64) {
    let mut best = (0, 0, f64::NEG_INFINITY);
    for k1 in l + 1..r {
        for k2 in k1 + 1..=r {
            let v = scores.h3(l, r, k1, k2, x0).unwrap().score;
            if v > best.2 {
                best = (k1, k2, v);
            }
        }
    }
    best
}

/// Weak local maxima of `values` (index offset `first`): no neighbour is larger.
pub fn local_maxima(values: &[f64], first: usize) -> Vec<usize> {
    (0..values.len())
        .filter(|&i| {
            let left = i == 0 || values[i - 1] <= values[i];
            let right = i + 1 == values.len() || values[i + 1] <= values[i];
            left && right
        })
        .map(|i| i + first)
        .collect()
}
