//! Path distances, quantiles and the paired QATS/Viterbi benchmark.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::decode::qats_decode_into;
use crate::error::{QatsError, Result};
use crate::scores::{CumScores, LogDensities};
use crate::search::SearchParams;
use crate::simulate::{simulate_hmm, SimConfig};
use crate::viterbi::{viterbi_decode_into, ViterbiWorkspace};

/// `d_0` is the mismatch rate; for `w > 0`, `(mean |a - b|^w)^(1/w)`.
pub fn distance(x_hat: &[usize], x_true: &[usize], w: f64) -> Result<f64> {
    if x_hat.len() != x_true.len() {
        return Err(QatsError::DimensionMismatch(format!(
            "paths have lengths {} and {}",
            x_hat.len(),
            x_true.len()
        )));
    }
    if !(w >= 0.0 && w.is_finite()) {
        return Err(QatsError::InvalidParameter(format!("w must be a finite non-negative number, got {w}")));
    }
    if x_hat.is_empty() {
        return Ok(0.0);
    }
    let n = x_hat.len() as f64;
    let pairs = x_hat.iter().zip(x_true);
    if w == 0.0 {
        return Ok(pairs.filter(|(a, b)| a != b).count() as f64 / n);
    }
    let sum: f64 = pairs.map(|(&a, &b)| (a as f64 - b as f64).abs().powf(w)).sum();
    Ok((sum / n).powf(1.0 / w))
}

/// Nearest-rank quantiles: the `ceil(beta * N)`-th smallest sample (at least the first).
pub fn quantiles(samples: &[f64], betas: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(QatsError::InvalidParameter("cannot take quantiles of an empty sample".into()));
    }
    if let Some(b) = betas.iter().find(|b| !(0.0..=1.0).contains(*b)) {
        return Err(QatsError::InvalidParameter(format!("quantile level {b} outside [0, 1]")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Ok(betas
        .iter()
        .map(|&b| {
            let rank = ((b * n as f64).ceil() as usize).clamp(1, n);
            sorted[rank - 1]
        })
        .collect())
}

pub fn median(samples: &[f64]) -> Result<f64> {
    Ok(quantiles(samples, &[0.5])?[0])
}

/// One paired replication.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub config: SimConfig,
    pub t_qats: Duration,
    pub t_viterbi: Duration,
    pub d0_qats: f64,
    pub d0_viterbi: f64,
    pub d2_qats: f64,
    pub d2_viterbi: f64,
    pub s_hat_qats: usize,
    pub true_segments: usize,
    pub loop_iterations: usize,
    pub probes_h3: usize,
}

impl BenchRecord {
    pub fn time_ratio(&self) -> f64 {
        self.t_viterbi.as_secs_f64() / self.t_qats.as_secs_f64()
    }
}

/// Simulates one data set, prepares both score matrices and all buffers
/// outside the timed regions, then times QATS (including path assembly) and
/// Viterbi (including backtracking).
pub fn bench_pair(config: &SimConfig, params: &SearchParams) -> Result<BenchRecord> {
    let model = config.model()?;
    let data = simulate_hmm(config)?;
    let g = LogDensities::from_model(&model, &data.y)?;
    let cum = CumScores::from_log_densities(model.chain(), &g)?;
    let mut ws = ViterbiWorkspace::with_capacity(config.m, config.n);
    // written once so that neither decoder pays for first-touch page faults
    let mut qats_path = vec![usize::MAX; config.n];
    let mut vit_path = vec![usize::MAX; config.n];

    let t0 = Instant::now();
    let qats = qats_decode_into(&cum, params, &mut qats_path)?;
    let t_qats = t0.elapsed();

    let t0 = Instant::now();
    viterbi_decode_into(model.chain(), &g, &mut ws, &mut vit_path)?;
    let t_viterbi = t0.elapsed();

    Ok(BenchRecord {
        config: *config,
        t_qats,
        t_viterbi,
        d0_qats: distance(&qats_path, &data.x_true, 0.0)?,
        d0_viterbi: distance(&vit_path, &data.x_true, 0.0)?,
        d2_qats: distance(&qats_path, &data.x_true, 2.0)?,
        d2_viterbi: distance(&vit_path, &data.x_true, 2.0)?,
        s_hat_qats: qats.s(),
        true_segments: data.true_segments,
        loop_iterations: qats.loop_iterations,
        probes_h3: qats.probes_h3,
    })
}

/// Quantile levels reported in benchmark summaries.
pub const SUMMARY_BETAS: [f64; 3] = [0.1, 0.5, 0.9];

/// Per-metric quantiles for one configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub metric: &'static str,
    pub q: [f64; 3],
}

/// Summaries of times, time ratio and errors (and their QATS-minus-Viterbi differences).
pub fn summarize(records: &[BenchRecord]) -> Result<Vec<SummaryRow>> {
    type Getter = fn(&BenchRecord) -> f64;
    let metrics: [(&'static str, Getter); 10] = [
        ("t_qats_ms", |r| r.t_qats.as_secs_f64() * 1e3),
        ("t_viterbi_ms", |r| r.t_viterbi.as_secs_f64() * 1e3),
        ("time_ratio", |r| r.time_ratio()),
        ("d0_qats", |r| r.d0_qats),
        ("d0_viterbi", |r| r.d0_viterbi),
        ("d0_diff", |r| r.d0_qats - r.d0_viterbi),
        ("d2_qats", |r| r.d2_qats),
        ("d2_viterbi", |r| r.d2_viterbi),
        ("d2_diff", |r| r.d2_qats - r.d2_viterbi),
        ("s_hat_qats", |r| r.s_hat_qats as f64),
    ];
    metrics
        .iter()
        .map(|&(metric, get)| {
            let values: Vec<f64> = records.iter().map(get).collect();
            let q = quantiles(&values, &SUMMARY_BETAS)?;
            Ok(SummaryRow { metric, q: [q[0], q[1], q[2]] })
        })
        .collect()
}
