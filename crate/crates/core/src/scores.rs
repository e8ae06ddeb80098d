//! Prefix sums of emission log-densities and O(1) local log-likelihoods.
//!
//! Positions in this module are 1-based and segments `l..=r` are inclusive, so
//! `log_lik_1(1, n, i, None)` scores the constant path `i` over the whole
//! sequence. States are 0-based.
//!
//! With `G[i][k] = sum_{t<=k} log f_i(y_t)` and `G[i][0] = 0`, any path made of
//! at most three constant pieces is scored from a handful of entries of `G`
//! plus the relevant transition terms, independently of the segment length.

use std::sync::Arc;

use crate::error::{QatsError, Result};
use crate::model::{ChainParams, EmissionModel, HmmModel};

/// Dense `m x n` matrix of per-observation log-densities `log f_i(y_t)`.
///
/// Stored time-major so that all states of one observation are contiguous.
/// Indices here are 0-based in both state and time.
#[derive(Clone, Debug, PartialEq)]
pub struct LogDensities {
    m: usize,
    n: usize,
    data: Vec<f64>,
}

impl LogDensities {
    pub fn from_model<E: EmissionModel>(model: &HmmModel<E>, y: &[f64]) -> Result<Self> {
        let m = model.n_states();
        let e = model.emission();
        let mut data = Vec::with_capacity(m * y.len());
        for (t, &obs) in y.iter().enumerate() {
            for i in 0..m {
                let v = e.log_density(i, obs);
                if !v.is_finite() {
                    return Err(QatsError::NonFiniteEmission { state: i + 1, position: t + 1 });
                }
                data.push(v);
            }
        }
        Self::from_time_major(m, y.len(), data)
    }

    /// `data[t * m + i]` holds `log f_i(y_t)`.
    pub fn from_time_major(m: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(QatsError::InvalidParameter("observation sequence is empty".into()));
        }
        if data.len() != m * n {
            return Err(QatsError::DimensionMismatch(format!(
                "expected {} log-densities for m={m}, n={n}, got {}",
                m * n,
                data.len()
            )));
        }
        if let Some(idx) = data.iter().position(|v| !v.is_finite()) {
            return Err(QatsError::NonFiniteEmission { state: idx % m + 1, position: idx / m + 1 });
        }
        Ok(Self { m, n, data })
    }

    pub fn n_states(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, state: usize, t: usize) -> f64 {
        self.data[t * self.m + state]
    }

    /// All states at 0-based time `t`.
    #[inline]
    pub fn column(&self, t: usize) -> &[f64] {
        &self.data[t * self.m..(t + 1) * self.m]
    }
}

/// Best state tuple for a fixed split and its log-local likelihood.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoredStates {
    states: [usize; 3],
    len: usize,
    pub score: f64,
}

impl ScoredStates {
    pub fn states(&self) -> &[usize] {
        &self.states[..self.len]
    }
}

/// Which argument of the three-segment score varies along a slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum H3Slice {
    /// First change point varies over `l+1..=k2-1`, second fixed at `k2`.
    Horizontal { k2: usize },
    /// Second change point varies over `k1+1..=r`, first fixed at `k1`.
    Vertical { k1: usize },
}

/// Linear tilt that makes a score agree at both ends of its domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tilt {
    base: usize,
    slope: f64,
}

impl Tilt {
    pub const NONE: Tilt = Tilt { base: 0, slope: 0.0 };

    /// Tilt through `(lo, h_lo)` and `(hi, h_hi)`. Degenerate or infinite inputs give no tilt.
    pub fn between(lo: usize, h_lo: f64, hi: usize, h_hi: f64) -> Tilt {
        if hi <= lo {
            return Tilt::NONE;
        }
        let slope = (h_hi - h_lo) / (hi - lo) as f64;
        if slope.is_finite() {
            Tilt { base: lo, slope }
        } else {
            Tilt::NONE
        }
    }

    #[inline]
    pub fn apply(&self, k: usize, h: f64) -> f64 {
        if self.slope == 0.0 {
            h
        } else {
            h - self.slope * (k as f64 - self.base as f64)
        }
    }
}

/// Cumulative log-density matrix together with the chain it is scored under.
#[derive(Clone, Debug)]
pub struct CumScores {
    m: usize,
    n: usize,
    /// Time-major with a leading zero column: `cum[k * m + i] = G[i][k]`, `k in 0..=n`.
    cum: Vec<f64>,
    chain: Arc<ChainParams>,
}

#[inline(always)]
fn stay(q_ii: f64, count: usize) -> f64 {
    // -inf * 0 would be NaN; a segment of length one has no self-transition.
    if count == 0 {
        0.0
    } else {
        q_ii * count as f64
    }
}

impl CumScores {
    /// Single left-to-right pass over `y`.
    pub fn build<E: EmissionModel>(model: &HmmModel<E>, y: &[f64]) -> Result<Self> {
        let m = model.n_states();
        let n = y.len();
        if n == 0 {
            return Err(QatsError::InvalidParameter("observation sequence is empty".into()));
        }
        let e = model.emission();
        let mut cum = vec![0.0; (n + 1) * m];
        for (t, &obs) in y.iter().enumerate() {
            let (prev, next) = cum[t * m..(t + 2) * m].split_at_mut(m);
            for i in 0..m {
                let v = e.log_density(i, obs);
                if !v.is_finite() {
                    return Err(QatsError::NonFiniteEmission { state: i + 1, position: t + 1 });
                }
                next[i] = prev[i] + v;
            }
        }
        Ok(Self { m, n, cum, chain: Arc::new(model.chain().clone()) })
    }

    pub fn from_log_densities(chain: &ChainParams, g: &LogDensities) -> Result<Self> {
        let m = chain.n_states();
        if g.n_states() != m {
            return Err(QatsError::DimensionMismatch(format!(
                "chain has {m} states but log-density matrix has {}",
                g.n_states()
            )));
        }
        let n = g.len();
        let mut cum = vec![0.0; (n + 1) * m];
        for t in 0..n {
            let col = g.column(t);
            for i in 0..m {
                cum[(t + 1) * m + i] = cum[t * m + i] + col[i];
            }
        }
        Ok(Self { m, n, cum, chain: Arc::new(chain.clone()) })
    }

    /// From state-major prefix rows, `rows[i * n + (k - 1)] = G[i][k]`.
    pub fn from_prefix_rows(chain: &ChainParams, n: usize, rows: &[f64]) -> Result<Self> {
        let m = chain.n_states();
        if n == 0 {
            return Err(QatsError::InvalidParameter("observation sequence is empty".into()));
        }
        if rows.len() != m * n {
            return Err(QatsError::DimensionMismatch(format!(
                "expected {} prefix sums for m={m}, n={n}, got {}",
                m * n,
                rows.len()
            )));
        }
        if let Some(idx) = rows.iter().position(|v| !v.is_finite()) {
            return Err(QatsError::NonFiniteEmission { state: idx / n + 1, position: idx % n + 1 });
        }
        let mut cum = vec![0.0; (n + 1) * m];
        for i in 0..m {
            for k in 1..=n {
                cum[k * m + i] = rows[i * n + k - 1];
            }
        }
        Ok(Self { m, n, cum, chain: Arc::new(chain.clone()) })
    }

    /// State-major copy of `G` without the zero column, the on-disk layout.
    pub fn prefix_rows(&self) -> Vec<f64> {
        let mut rows = Vec::with_capacity(self.m * self.n);
        for i in 0..self.m {
            rows.extend((1..=self.n).map(|k| self.cum[k * self.m + i]));
        }
        rows
    }

    /// Recovers per-observation log-densities by differencing.
    pub fn log_densities(&self) -> LogDensities {
        let m = self.m;
        let data = (1..=self.n)
            .flat_map(|k| (0..m).map(move |i| (k, i)))
            .map(|(k, i)| self.cum[k * m + i] - self.cum[(k - 1) * m + i])
            .collect();
        LogDensities { m, n: self.n, data }
    }

    pub fn n_states(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn chain(&self) -> &ChainParams {
        &self.chain
    }

    /// `G[state][k]` for `k in 0..=n`.
    #[inline(always)]
    pub fn prefix(&self, state: usize, k: usize) -> f64 {
        self.cum[k * self.m + state]
    }

    #[inline(always)]
    fn q(&self, from: usize, to: usize) -> f64 {
        self.chain.log_transition(from, to)
    }

    /// Sum of `log f_i(y_t)` over `a..=b`.
    #[inline(always)]
    fn span(&self, i: usize, a: usize, b: usize) -> f64 {
        self.prefix(i, b) - self.prefix(i, a - 1)
    }

    #[inline(always)]
    fn entry(&self, l: usize, x0: Option<usize>, i: usize) -> f64 {
        match x0 {
            Some(prev) if l > 1 => self.q(prev, i),
            _ => self.chain.log_initial(i),
        }
    }

    #[inline(always)]
    pub(crate) fn ll1(&self, l: usize, r: usize, i: usize, x0: Option<usize>) -> f64 {
        self.span(i, l, r) + self.entry(l, x0, i) + stay(self.q(i, i), r - l)
    }

    #[inline(always)]
    pub(crate) fn ll2(&self, l: usize, k: usize, r: usize, s: [usize; 2], x0: Option<usize>) -> f64 {
        let [a, b] = s;
        self.span(a, l, k - 1)
            + self.span(b, k, r)
            + self.entry(l, x0, a)
            + stay(self.q(a, a), k - l - 1)
            + self.q(a, b)
            + stay(self.q(b, b), r - k)
    }

    #[inline(always)]
    pub(crate) fn ll3(
        &self,
        l: usize,
        k1: usize,
        k2: usize,
        r: usize,
        s: [usize; 3],
        x0: Option<usize>,
    ) -> f64 {
        let [a, b, c] = s;
        self.span(a, l, k1 - 1)
            + self.span(b, k1, k2 - 1)
            + self.span(c, k2, r)
            + self.entry(l, x0, a)
            + stay(self.q(a, a), k1 - l - 1)
            + self.q(a, b)
            + stay(self.q(b, b), k2 - k1 - 1)
            + self.q(b, c)
            + stay(self.q(c, c), r - k2)
    }

    /// Best constant state on `l..=r`, smallest index on ties.
    #[inline]
    pub(crate) fn best1(&self, l: usize, r: usize, x0: Option<usize>) -> (f64, usize) {
        let mut best = (self.ll1(l, r, 0, x0), 0);
        for i in 1..self.m {
            let v = self.ll1(l, r, i, x0);
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    }

    /// Best pair of distinct states jumping at `k`, lexicographically smallest on ties.
    #[inline]
    pub(crate) fn best2(&self, l: usize, k: usize, r: usize, x0: Option<usize>) -> (f64, [usize; 2]) {
        let mut best = (f64::NAN, [0, 1]);
        for a in 0..self.m {
            for b in (0..self.m).filter(|&b| b != a) {
                let v = self.ll2(l, k, r, [a, b], x0);
                if best.0.is_nan() || v > best.0 {
                    best = (v, [a, b]);
                }
            }
        }
        best
    }

    /// Best triple with `a != b != c` jumping at `k1` and `k2`, lexicographically smallest on ties.
    #[inline]
    pub(crate) fn best3(
        &self,
        l: usize,
        k1: usize,
        k2: usize,
        r: usize,
        x0: Option<usize>,
    ) -> (f64, [usize; 3]) {
        let mut best = (f64::NAN, [0, 1, 0]);
        for a in 0..self.m {
            for b in (0..self.m).filter(|&b| b != a) {
                for c in (0..self.m).filter(|&c| c != b) {
                    let v = self.ll3(l, k1, k2, r, [a, b, c], x0);
                    if best.0.is_nan() || v > best.0 {
                        best = (v, [a, b, c]);
                    }
                }
            }
        }
        best
    }

    fn check_segment(&self, l: usize, r: usize, x0: Option<usize>) -> Result<()> {
        if l < 1 || l > r || r > self.n {
            return Err(QatsError::OutOfBounds(format!(
                "segment {l}..={r} is not within 1..={}",
                self.n
            )));
        }
        match x0 {
            None if l > 1 => Err(QatsError::InvalidParameter(format!(
                "segment starting at {l} needs the preceding state"
            ))),
            Some(s) if s >= self.m => {
                Err(QatsError::OutOfBounds(format!("previous state {} not in 1..={}", s + 1, self.m)))
            }
            _ => Ok(()),
        }
    }

    fn check_states(&self, states: &[usize]) -> Result<()> {
        match states.iter().find(|&&s| s >= self.m) {
            Some(s) => {
                Err(QatsError::OutOfBounds(format!("state {} not in 1..={}", s + 1, self.m)))
            }
            None => Ok(()),
        }
    }

    fn check_split(&self, l: usize, k: usize, r: usize) -> Result<()> {
        if !(l < k && k <= r) {
            return Err(QatsError::OutOfBounds(format!("split {k} not in {}..={r}", l + 1)));
        }
        Ok(())
    }

    fn check_splits(&self, l: usize, k1: usize, k2: usize, r: usize) -> Result<()> {
        if !(l < k1 && k1 < k2 && k2 <= r) {
            return Err(QatsError::OutOfBounds(format!(
                "splits ({k1}, {k2}) do not satisfy {l} < k1 < k2 <= {r}"
            )));
        }
        Ok(())
    }

    /// Log-likelihood of the constant path `i` on `l..=r` given the preceding state.
    pub fn log_lik_1(&self, l: usize, r: usize, i: usize, x0: Option<usize>) -> Result<f64> {
        self.check_segment(l, r, x0)?;
        self.check_states(&[i])?;
        Ok(self.ll1(l, r, i, x0))
    }

    /// Log-likelihood of the path that is `i1` on `l..k` and `i2` on `k..=r`.
    pub fn log_lik_2(
        &self,
        l: usize,
        k: usize,
        r: usize,
        i1: usize,
        i2: usize,
        x0: Option<usize>,
    ) -> Result<f64> {
        self.check_segment(l, r, x0)?;
        self.check_split(l, k, r)?;
        self.check_states(&[i1, i2])?;
        Ok(self.ll2(l, k, r, [i1, i2], x0))
    }

    #[allow(clippy::too_many_arguments)]
    pub fn log_lik_3(
        &self,
        l: usize,
        k1: usize,
        k2: usize,
        r: usize,
        states: [usize; 3],
        x0: Option<usize>,
    ) -> Result<f64> {
        self.check_segment(l, r, x0)?;
        self.check_splits(l, k1, k2, r)?;
        self.check_states(&states)?;
        Ok(self.ll3(l, k1, k2, r, states, x0))
    }

    /// Best constant path on `l..=r`.
    pub fn h1(&self, l: usize, r: usize, x0: Option<usize>) -> Result<ScoredStates> {
        self.check_segment(l, r, x0)?;
        let (score, i) = self.best1(l, r, x0);
        Ok(ScoredStates { states: [i, 0, 0], len: 1, score })
    }

    /// Best two-piece path on `l..=r` with its change at `k`.
    pub fn h2(&self, l: usize, r: usize, k: usize, x0: Option<usize>) -> Result<ScoredStates> {
        self.check_segment(l, r, x0)?;
        self.check_split(l, k, r)?;
        let (score, [a, b]) = self.best2(l, k, r, x0);
        Ok(ScoredStates { states: [a, b, 0], len: 2, score })
    }

    /// Best three-piece path on `l..=r` with changes at `k1` and `k2`.
    pub fn h3(
        &self,
        l: usize,
        r: usize,
        k1: usize,
        k2: usize,
        x0: Option<usize>,
    ) -> Result<ScoredStates> {
        self.check_segment(l, r, x0)?;
        self.check_splits(l, k1, k2, r)?;
        let (score, states) = self.best3(l, k1, k2, r, x0);
        Ok(ScoredStates { states, len: 3, score })
    }

    pub(crate) fn tilt2(&self, l: usize, r: usize, x0: Option<usize>) -> Tilt {
        if r < l + 2 {
            return Tilt::NONE;
        }
        Tilt::between(l + 1, self.best2(l, l + 1, r, x0).0, r, self.best2(l, r, r, x0).0)
    }

    pub(crate) fn tilt3(&self, l: usize, r: usize, slice: H3Slice, x0: Option<usize>) -> Tilt {
        match slice {
            H3Slice::Horizontal { k2 } => {
                if k2 < l + 3 {
                    return Tilt::NONE;
                }
                let lo = self.best3(l, l + 1, k2, r, x0).0;
                let hi = self.best3(l, k2 - 1, k2, r, x0).0;
                Tilt::between(l + 1, lo, k2 - 1, hi)
            }
            H3Slice::Vertical { k1 } => {
                if r < k1 + 2 {
                    return Tilt::NONE;
                }
                let lo = self.best3(l, k1, k1 + 1, r, x0).0;
                let hi = self.best3(l, k1, r, r, x0).0;
                Tilt::between(k1 + 1, lo, r, hi)
            }
        }
    }

    /// Two-piece score tilted so its values at `l+1` and `r` coincide.
    ///
    /// Falls back to the plain score when `r - l - 1 == 0`.
    pub fn h2_rotated(&self, l: usize, r: usize, k: usize, x0: Option<usize>) -> Result<f64> {
        let h = self.h2(l, r, k, x0)?.score;
        Ok(self.tilt2(l, r, x0).apply(k, h))
    }

    /// Three-piece score along one slice, tilted so its two endpoint values coincide.
    ///
    /// Falls back to the plain score on slices with fewer than two points.
    pub fn h3_rotated_slice(
        &self,
        l: usize,
        r: usize,
        slice: H3Slice,
        k: usize,
        x0: Option<usize>,
    ) -> Result<f64> {
        let (k1, k2) = match slice {
            H3Slice::Horizontal { k2 } => (k, k2),
            H3Slice::Vertical { k1 } => (k1, k),
        };
        let h = self.h3(l, r, k1, k2, x0)?.score;
        Ok(self.tilt3(l, r, slice, x0).apply(k, h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GaussianEmission;

    fn example() -> CumScores {
        let model = HmmModel::new(
            &[0.5, 0.5],
            &[vec![2.0 / 3.0, 1.0 / 3.0], vec![1.0 / 3.0, 2.0 / 3.0]],
            GaussianEmission::new(vec![1.0, 2.0], 2.0).unwrap(),
        )
        .unwrap();
        CumScores::build(&model, &[1.0, 4.0, -1.0, 1.0]).unwrap()
    }

    fn theta() -> f64 {
        let theta_g = -(8.0 * std::f64::consts::PI).ln() / 2.0;
        -(2f64.ln()) - 3.0 * 3f64.ln() + 4.0 * theta_g
    }

    #[test]
    fn worked_example_prefix_sums() {
        let g = example();
        let theta_g = -(8.0 * std::f64::consts::PI).ln() / 2.0;
        let s1 = [0.0, 9.0, 4.0, 0.0];
        let s2 = [1.0, 4.0, 9.0, 1.0];
        let (mut c1, mut c2) = (0.0, 0.0);
        for k in 1..=4 {
            c1 += theta_g - s1[k - 1] / 8.0;
            c2 += theta_g - s2[k - 1] / 8.0;
            assert!((g.prefix(0, k) - c1).abs() < 1e-12);
            assert!((g.prefix(1, k) - c2).abs() < 1e-12);
        }
        assert!((g.prefix(0, 4) - (4.0 * theta_g - 13.0 / 8.0)).abs() < 1e-12);
        assert!((g.prefix(1, 4) - (4.0 * theta_g - 15.0 / 8.0)).abs() < 1e-12);
    }

    #[test]
    fn worked_example_local_scores() {
        let g = example();
        let ln2 = 2f64.ln();
        let t = theta();
        assert!((g.log_lik_1(1, 4, 0, None).unwrap() - (t - 13.0 / 8.0 + 3.0 * ln2)).abs() < 1e-12);
        assert!((g.log_lik_2(1, 3, 4, 1, 0, None).unwrap() - (t - 9.0 / 8.0 + 2.0 * ln2)).abs() < 1e-12);
        // residuals (0, 9, 9, 1) / 8
        assert!((g.log_lik_2(1, 3, 4, 0, 1, None).unwrap() - (t - 19.0 / 8.0 + 2.0 * ln2)).abs() < 1e-12);
        assert!((g.log_lik_3(1, 2, 3, 4, [0, 1, 0], None).unwrap() - (t - 1.0 + ln2)).abs() < 1e-12);
        assert!((g.log_lik_3(1, 2, 3, 4, [1, 0, 1], None).unwrap() - (t - 20.0 / 8.0 + ln2)).abs() < 1e-12);

        let h1 = g.h1(1, 4, None).unwrap();
        assert_eq!(h1.states(), &[0]);
        let h2 = g.h2(1, 4, 3, None).unwrap();
        assert_eq!(h2.states(), &[1, 0]);
        assert!((h2.score - (t - 9.0 / 8.0 + 2.0 * ln2)).abs() < 1e-12);
        let h3 = g.h3(1, 4, 2, 3, None).unwrap();
        assert_eq!(h3.states(), &[0, 1, 0]);
        assert!((h3.score - (t - 1.0 + ln2)).abs() < 1e-12);
    }

    #[test]
    fn single_observation() {
        let g = example();
        let theta_g = -(8.0 * std::f64::consts::PI).ln() / 2.0;
        let v = g.log_lik_1(1, 1, 1, None).unwrap();
        assert!((v - (-(2f64.ln()) + theta_g - 1.0 / 8.0)).abs() < 1e-12);
    }

    #[test]
    fn impossible_initial_state_never_wins() {
        let model = HmmModel::new(
            &[1.0, 0.0],
            &[vec![0.9, 0.1], vec![0.1, 0.9]],
            GaussianEmission::new(vec![1.0, 2.0], 1.0).unwrap(),
        )
        .unwrap();
        // Data strongly favour state 2, but it cannot start the chain.
        let g = CumScores::build(&model, &[2.0; 10]).unwrap();
        let h = g.h1(1, 10, None).unwrap();
        assert_eq!(h.states(), &[0]);
        assert_eq!(g.log_lik_1(1, 10, 1, None).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn absorbing_state_has_no_nan() {
        // State 1 can never stay, so a constant run longer than one is impossible,
        // while a single observation is fine.
        let model = HmmModel::new(
            &[0.5, 0.5],
            &[vec![0.0, 1.0], vec![0.0, 1.0]],
            GaussianEmission::new(vec![1.0, 2.0], 1.0).unwrap(),
        )
        .unwrap();
        let g = CumScores::build(&model, &[1.0, 1.0, 1.0]).unwrap();
        assert!(g.log_lik_1(1, 1, 0, None).unwrap().is_finite());
        assert_eq!(g.log_lik_1(1, 3, 0, None).unwrap(), f64::NEG_INFINITY);
        assert_eq!(g.log_lik_1(2, 3, 0, Some(1)).unwrap(), f64::NEG_INFINITY);
        let h = g.h1(2, 3, Some(0)).unwrap();
        assert_eq!(h.states(), &[1]);
        assert!(h.score.is_finite());
    }

    #[test]
    fn all_exits_impossible_gives_neg_infinity() {
        let model = HmmModel::new(
            &[0.5, 0.5],
            &[vec![0.0, 1.0], vec![0.0, 1.0]],
            GaussianEmission::new(vec![1.0, 2.0], 1.0).unwrap(),
        )
        .unwrap();
        let g = CumScores::build(&model, &[1.0; 5]).unwrap();
        // From state 2 only state 2 is reachable, and it may stay: finite.
        assert!(g.h1(2, 5, Some(1)).unwrap().score.is_finite());
        // State 1 is unreachable from anything, so constant path 1 is -inf.
        assert_eq!(g.log_lik_1(2, 5, 0, Some(1)).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn argument_errors() {
        let g = example();
        assert!(g.log_lik_1(2, 4, 0, None).is_err());
        assert!(g.log_lik_1(0, 4, 0, None).is_err());
        assert!(g.log_lik_1(1, 5, 0, None).is_err());
        assert!(g.log_lik_1(3, 2, 0, Some(0)).is_err());
        assert!(g.log_lik_1(1, 4, 2, None).is_err());
        assert!(g.log_lik_2(1, 1, 4, 0, 1, None).is_err());
        assert!(g.h2(1, 4, 5, None).is_err());
        assert!(g.h3(1, 4, 3, 3, None).is_err());
        assert!(g.h3(1, 4, 1, 3, None).is_err());
    }

    #[test]
    fn emission_must_be_finite() {
        struct Broken;
        impl EmissionModel for Broken {
            fn n_states(&self) -> usize {
                2
            }
            fn log_density(&self, state: usize, y: f64) -> f64 {
                if state == 1 && y > 0.0 {
                    f64::NEG_INFINITY
                } else {
                    0.0
                }
            }
        }
        let model = HmmModel::new(&[0.5, 0.5], &[vec![0.5, 0.5], vec![0.5, 0.5]], Broken).unwrap();
        let err = CumScores::build(&model, &[-1.0, 1.0]).unwrap_err();
        assert!(matches!(err, QatsError::NonFiniteEmission { state: 2, position: 2 }));
        assert!(LogDensities::from_model(&model, &[-1.0, 1.0]).is_err());
    }

    #[test]
    fn rotation_zero_at_left_end_and_equalizes_ends() {
        let model = HmmModel::new(
            &[0.3, 0.7],
            &[vec![0.8, 0.2], vec![0.4, 0.6]],
            GaussianEmission::new(vec![1.0, 2.0], 0.7).unwrap(),
        )
        .unwrap();
        let y: Vec<f64> = (0..30).map(|t| 1.0 + ((t * 7) % 5) as f64 / 4.0).collect();
        let g = CumScores::build(&model, &y).unwrap();
        let (l, r) = (4, 25);
        let x0 = Some(1);
        let h_lo = g.h2(l, r, l + 1, x0).unwrap().score;
        let h_hi = g.h2(l, r, r, x0).unwrap().score;
        assert_eq!(g.h2_rotated(l, r, l + 1, x0).unwrap(), h_lo);
        let rot_hi = g.h2_rotated(l, r, r, x0).unwrap();
        assert!((rot_hi - h_lo).abs() < 1e-9);
        // Direct evaluation of the tilted display at an interior point.
        let k = 13;
        let direct = g.h2(l, r, k, x0).unwrap().score
            - (h_hi - h_lo) * (k - l - 1) as f64 / (r - l - 1) as f64;
        assert!((g.h2_rotated(l, r, k, x0).unwrap() - direct).abs() < 1e-9);

        let k2 = 20;
        let slice = H3Slice::Horizontal { k2 };
        let a = g.h3(l, r, l + 1, k2, x0).unwrap().score;
        let b = g.h3(l, r, k2 - 1, k2, x0).unwrap().score;
        let direct = g.h3(l, r, 9, k2, x0).unwrap().score
            - (b - a) * (9 - l - 1) as f64 / (k2 - l - 2) as f64;
        assert!((g.h3_rotated_slice(l, r, slice, 9, x0).unwrap() - direct).abs() < 1e-9);

        let k1 = 8;
        let slice = H3Slice::Vertical { k1 };
        let a = g.h3(l, r, k1, k1 + 1, x0).unwrap().score;
        let b = g.h3(l, r, k1, r, x0).unwrap().score;
        let direct = g.h3(l, r, k1, 17, x0).unwrap().score
            - (b - a) * (17 - k1 - 1) as f64 / (r - k1 - 1) as f64;
        assert!((g.h3_rotated_slice(l, r, slice, 17, x0).unwrap() - direct).abs() < 1e-9);
    }

    #[test]
    fn rotation_degenerate_domain_falls_back() {
        let g = example();
        // r - l - 1 == 0: the single admissible split is returned unchanged.
        assert_eq!(g.h2_rotated(3, 4, 4, Some(0)).unwrap(), g.h2(3, 4, 4, Some(0)).unwrap().score);
    }

    #[test]
    fn cache_layout_roundtrip() {
        let g = example();
        let rows = g.prefix_rows();
        let back = CumScores::from_prefix_rows(g.chain(), g.len(), &rows).unwrap();
        assert_eq!(back.cum, g.cum);
        let dens = g.log_densities();
        let again = CumScores::from_log_densities(g.chain(), &dens).unwrap();
        for (a, b) in again.cum.iter().zip(&g.cum) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
