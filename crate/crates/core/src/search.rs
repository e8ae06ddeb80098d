//! Approximate maximizers of the two- and three-piece score landscapes.
//!
//! [`optimistic_search`] brackets a one-dimensional local maximum with
//! `O(log(R - L))` probes. [`osh2`] applies it to the two-piece score,
//! [`sosh3`] alternates it between the two coordinates of the three-piece
//! score starting from one seed, and [`osh3`] runs several evenly spaced seeds.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{QatsError, Result};
use crate::scores::{CumScores, H3Slice, Tilt};

/// Tuning parameters shared by all searches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Step ratio of the optimistic search, in `(0, 1)`.
    pub nu: f64,
    /// Brackets narrower than this are swept exhaustively. Must exceed 1.
    pub d_o: usize,
    /// Cap on horizontal/vertical alternations per seed. Must exceed 1.
    pub v_o: usize,
    pub n_seeds: usize,
    /// Search tilted scores whose endpoint values coincide.
    #[serde(default)]
    pub rotated: bool,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self { nu: 0.5, d_o: 3, v_o: 20, n_seeds: 3, rotated: false }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(QatsError::InvalidParameter(format!("nu must lie in (0, 1), got {}", self.nu)));
        }
        if self.d_o < 2 {
            return Err(QatsError::InvalidParameter(format!("d_o must exceed 1, got {}", self.d_o)));
        }
        if self.v_o < 2 {
            return Err(QatsError::InvalidParameter(format!("v_o must exceed 1, got {}", self.v_o)));
        }
        if self.n_seeds < 1 {
            return Err(QatsError::InvalidParameter("n_seeds must be at least 1".into()));
        }
        Ok(())
    }
}

/// Result of a one-dimensional search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalMax1D {
    pub k: usize,
    pub h: f64,
    /// Distinct evaluations of the objective made by this search.
    pub probes: usize,
    /// Bracket `(L, R)` that was swept exhaustively at the end.
    pub bracket: (usize, usize),
}

/// Result of a two-dimensional search over `l < k1 < k2 <= r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalMax2D {
    pub k1: usize,
    pub k2: usize,
    pub h: f64,
    /// Distinct evaluations of the three-piece score.
    pub probes: usize,
    /// Horizontal/vertical passes performed (summed over seeds for [`osh3`]).
    pub alternations: usize,
}

/// `floor((L + nu R) / (1 + nu))`, the probe used when no start is given.
pub fn default_probe(lo: usize, hi: usize, nu: f64) -> usize {
    let m = ((lo as f64 + nu * hi as f64) / (1.0 + nu)).floor() as usize;
    m.clamp(lo, hi)
}

/// Optimistic search for a local maximum of `h` on `lo..=hi`.
///
/// `start` is the first anchor; `None` selects [`default_probe`]. The anchor
/// only moves on a strict improvement, and the residual bracket is swept with
/// the first maximizer kept on ties.
pub fn optimistic_search<F>(
    lo: usize,
    hi: usize,
    start: Option<usize>,
    h: F,
    params: &SearchParams,
) -> Result<LocalMax1D>
where
    F: FnMut(usize) -> f64,
{
    params.validate()?;
    if lo > hi {
        return Err(QatsError::EmptyDomain { lo, hi });
    }
    if let Some(s) = start {
        if !(lo..=hi).contains(&s) {
            return Err(QatsError::OutOfBounds(format!("start {s} outside {lo}..={hi}")));
        }
    }
    Ok(os(lo, hi, start, h, params.nu, params.d_o))
}

/// Unchecked core of [`optimistic_search`]; `lo <= hi` and `start` in range.
pub(crate) fn os<F>(lo: usize, hi: usize, start: Option<usize>, mut h: F, nu: f64, d_o: usize) -> LocalMax1D
where
    F: FnMut(usize) -> f64,
{
    // Values already seen in this call. H is deterministic, so re-probing an
    // index (the anchor, or a rejected probe that became a bracket end) is
    // answered from here.
    let mut seen: Vec<(usize, f64)> = Vec::with_capacity(64);
    let mut probe = |k: usize, seen: &mut Vec<(usize, f64)>| -> f64 {
        if let Some(&(_, v)) = seen.iter().rev().find(|(j, _)| *j == k) {
            return v;
        }
        let v = h(k);
        seen.push((k, v));
        v
    };

    let (mut l, mut r) = (lo, hi);
    let mut m = start.unwrap_or_else(|| default_probe(lo, hi, nu));
    while r - l >= d_o {
        let hm = probe(m, &mut seen);
        if r - m > m - l {
            // Here r - m >= 2, so r - 1 > m and clamping keeps w strictly inside.
            let w = ((r as f64 - nu * (r - m) as f64).ceil() as usize).min(r - 1);
            if probe(w, &mut seen) > hm {
                l = m;
                m = w;
            } else {
                r = w;
            }
        } else {
            let w = (l as f64 + nu * (m - l) as f64).ceil() as usize;
            if probe(w, &mut seen) > hm {
                r = m;
                m = w;
            } else {
                l = w;
            }
        }
    }

    let mut best = (l, probe(l, &mut seen));
    for k in l + 1..=r {
        let v = probe(k, &mut seen);
        if v > best.1 {
            best = (k, v);
        }
    }
    LocalMax1D { k: best.0, h: best.1, probes: seen.len(), bracket: (l, r) }
}

/// Optimistic search of the two-piece score over `k in l+1..=r`.
pub fn osh2(
    scores: &CumScores,
    l: usize,
    r: usize,
    x0: Option<usize>,
    params: &SearchParams,
) -> Result<LocalMax1D> {
    params.validate()?;
    check_segment(scores, l, r, x0, 1)?;
    Ok(osh2_unchecked(scores, l, r, x0, params))
}

pub(crate) fn osh2_unchecked(
    scores: &CumScores,
    l: usize,
    r: usize,
    x0: Option<usize>,
    params: &SearchParams,
) -> LocalMax1D {
    if !params.rotated {
        return os(l + 1, r, None, |k| scores.best2(l, k, r, x0).0, params.nu, params.d_o);
    }
    let tilt = scores.tilt2(l, r, x0);
    let mut res = os(
        l + 1,
        r,
        None,
        |k| tilt.apply(k, scores.best2(l, k, r, x0).0),
        params.nu,
        params.d_o,
    );
    res.h = scores.best2(l, res.k, r, x0).0;
    res.probes += if r >= l + 2 { 3 } else { 1 };
    res
}

#[derive(Default)]
struct PairHasher(u64);

impl Hasher for PairHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }

    fn write_usize(&mut self, i: usize) {
        self.write_u64(i as u64);
    }

    fn write_u64(&mut self, i: u64) {
        self.0 = (self.0.rotate_left(5) ^ i).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
    }
}

type Memo = HashMap<(usize, usize), f64, BuildHasherDefault<PairHasher>>;

/// Memoized three-piece score for one seeded search.
struct H3Probe<'a> {
    scores: &'a CumScores,
    l: usize,
    r: usize,
    x0: Option<usize>,
    memo: Memo,
}

impl H3Probe<'_> {
    fn eval(&mut self, k1: usize, k2: usize) -> f64 {
        let (scores, l, r, x0) = (self.scores, self.l, self.r, self.x0);
        *self.memo.entry((k1, k2)).or_insert_with(|| scores.best3(l, k1, k2, r, x0).0)
    }

    fn tilt(&mut self, slice: H3Slice) -> Tilt {
        let (l, r) = (self.l, self.r);
        match slice {
            H3Slice::Horizontal { k2 } if k2 >= l + 3 => {
                let lo = self.eval(l + 1, k2);
                let hi = self.eval(k2 - 1, k2);
                Tilt::between(l + 1, lo, k2 - 1, hi)
            }
            H3Slice::Vertical { k1 } if r >= k1 + 2 => {
                let lo = self.eval(k1, k1 + 1);
                let hi = self.eval(k1, r);
                Tilt::between(k1 + 1, lo, r, hi)
            }
            _ => Tilt::NONE,
        }
    }
}

/// Seeded alternating search of the three-piece score.
///
/// Starts from `(l + 1, seed)` and alternates a horizontal pass (first change
/// point varies) and a vertical pass (second varies) while the score strictly
/// improves, for at most `v_o - 1` passes after the first. Whenever a pass
/// lands on the diagonal `k2 = k1 + 1`, the diagonal itself is searched.
pub fn sosh3(
    scores: &CumScores,
    l: usize,
    r: usize,
    x0: Option<usize>,
    params: &SearchParams,
    seed: usize,
) -> Result<LocalMax2D> {
    params.validate()?;
    check_segment(scores, l, r, x0, 2)?;
    if !(l + 2..=r).contains(&seed) {
        return Err(QatsError::OutOfBounds(format!("seed {seed} outside {}..={r}", l + 2)));
    }
    Ok(sosh3_unchecked(scores, l, r, x0, params, seed))
}

pub(crate) fn sosh3_unchecked(
    scores: &CumScores,
    l: usize,
    r: usize,
    x0: Option<usize>,
    params: &SearchParams,
    seed: usize,
) -> LocalMax2D {
    let (nu, d_o) = (params.nu, params.d_o);
    let mut probe = H3Probe { scores, l, r, x0, memo: Memo::default() };

    let (mut k1, mut k2) = (l + 1, seed);
    let (mut h_old, mut h_new) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut horizontal = true;
    let mut v = 1;
    let mut h = f64::NEG_INFINITY;
    while (h_old < h_new && v < params.v_o) || v == 1 {
        h_old = h_new;
        if horizontal {
            // The first pass uses the default anchor; later ones resume from k1.
            let start = if v == 1 { None } else { Some(k1) };
            let tilt = if params.rotated { probe.tilt(H3Slice::Horizontal { k2 }) } else { Tilt::NONE };
            let fixed = k2;
            let res = os(l + 1, k2 - 1, start, |k| tilt.apply(k, probe.eval(k, fixed)), nu, d_o);
            k1 = res.k;
            h = res.h;
        } else {
            let tilt = if params.rotated { probe.tilt(H3Slice::Vertical { k1 }) } else { Tilt::NONE };
            let fixed = k1;
            let res = os(k1 + 1, r, Some(k2), |k| tilt.apply(k, probe.eval(fixed, k)), nu, d_o);
            k2 = res.k;
            h = res.h;
        }
        if params.rotated {
            h = probe.eval(k1, k2);
        }
        if k1 + 1 == k2 {
            let res = os(l + 1, r - 1, Some(k1), |k| probe.eval(k, k + 1), nu, d_o);
            k1 = res.k;
            k2 = k1 + 1;
            h = res.h;
        }
        h_new = h;
        horizontal = !horizontal;
        v += 1;
    }
    LocalMax2D { k1, k2, h, probes: probe.memo.len(), alternations: v - 1 }
}

/// Evenly spaced seeds `l + 2 + floor(i (r - l - 1) / (n_seeds + 1))`, `i = 1..=n_seeds`.
///
/// `n_seeds` is clamped to `r - l - 1`.
pub fn seed_positions(l: usize, r: usize, n_seeds: usize) -> Vec<usize> {
    let width = r.saturating_sub(l + 1);
    let count = n_seeds.min(width);
    (1..=count).map(|i| l + 2 + i * width / (count + 1)).collect()
}

/// Best of [`sosh3`] over evenly spaced seeds; earlier seeds win ties.
pub fn osh3(
    scores: &CumScores,
    l: usize,
    r: usize,
    x0: Option<usize>,
    params: &SearchParams,
) -> Result<LocalMax2D> {
    params.validate()?;
    check_segment(scores, l, r, x0, 2)?;
    Ok(osh3_unchecked(scores, l, r, x0, params))
}

pub(crate) fn osh3_unchecked(
    scores: &CumScores,
    l: usize,
    r: usize,
    x0: Option<usize>,
    params: &SearchParams,
) -> LocalMax2D {
    let mut best: Option<LocalMax2D> = None;
    let (mut probes, mut alternations) = (0, 0);
    for seed in seed_positions(l, r, params.n_seeds) {
        let res = sosh3_unchecked(scores, l, r, x0, params, seed);
        probes += res.probes;
        alternations += res.alternations;
        if best.is_none_or(|b| res.h > b.h) {
            best = Some(res);
        }
    }
    let best = best.expect("r - l >= 2 yields at least one seed");
    LocalMax2D { probes, alternations, ..best }
}

fn check_segment(
    scores: &CumScores,
    l: usize,
    r: usize,
    x0: Option<usize>,
    min_width: usize,
) -> Result<()> {
    if l < 1 || r > scores.len() || r < l + min_width {
        return Err(QatsError::OutOfBounds(format!(
            "segment {l}..={r} must lie in 1..={} with r - l >= {min_width}",
            scores.len()
        )));
    }
    if l > 1 && x0.is_none() {
        return Err(QatsError::InvalidParameter(format!(
            "segment starting at {l} needs the preceding state"
        )));
    }
    if x0.is_some_and(|s| s >= scores.n_states()) {
        return Err(QatsError::OutOfBounds("previous state out of range".into()));
    }
    Ok(())
}
