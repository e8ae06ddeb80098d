//! Quick adaptive ternary segmentation.
//!
//! The decoder keeps an ordered list of segments covering `1..=n`. The
//! segment under investigation is compared against its best approximate
//! two- and three-piece refinements; a refinement replaces it in place,
//! otherwise its state is confirmed and the cursor moves on. Segments left
//! of the cursor are final, so the preceding state handed to each probe is
//! always the confirmed state of the previous segment.

use std::time::{Duration, Instant};

use crate::error::{QatsError, Result};
use crate::scores::CumScores;
use crate::search::{osh2_unchecked, osh3_unchecked, SearchParams};

/// Contiguous segments `(l, r)` (1-based, inclusive) with one state each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmentation {
    pub segments: Vec<(usize, usize)>,
    pub states: Vec<usize>,
}

impl Segmentation {
    pub fn new(segments: Vec<(usize, usize)>, states: Vec<usize>) -> Result<Self> {
        let seg = Self { segments, states };
        seg.validate()?;
        Ok(seg)
    }

    pub fn s(&self) -> usize {
        self.segments.len()
    }

    /// Total length covered.
    pub fn len(&self) -> usize {
        self.segments.last().map_or(0, |&(_, r)| r)
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    fn validate(&self) -> Result<()> {
        if self.segments.is_empty() || self.segments.len() != self.states.len() {
            return Err(QatsError::DimensionMismatch(format!(
                "{} segments but {} states",
                self.segments.len(),
                self.states.len()
            )));
        }
        let mut expected = 1;
        for &(l, r) in &self.segments {
            if l != expected || r < l {
                return Err(QatsError::InvalidParameter(format!(
                    "segment {l}..={r} breaks contiguity (expected start {expected})"
                )));
            }
            expected = r + 1;
        }
        Ok(())
    }

    /// Maximal constant runs of `path` as a segmentation.
    pub fn from_path(path: &[usize]) -> Self {
        let mut segments = Vec::new();
        let mut states = Vec::new();
        let mut start = 0;
        for k in 1..=path.len() {
            if k == path.len() || path[k] != path[start] {
                segments.push((start + 1, k));
                states.push(path[start]);
                start = k;
            }
        }
        Self { segments, states }
    }

    /// Same path with equal-state neighbours merged into single segments.
    pub fn merged(&self) -> Self {
        let mut segments: Vec<(usize, usize)> = Vec::with_capacity(self.segments.len());
        let mut states: Vec<usize> = Vec::with_capacity(self.states.len());
        for (&(l, r), &z) in self.segments.iter().zip(&self.states) {
            match (segments.last_mut(), states.last()) {
                (Some(last), Some(&prev)) if prev == z => last.1 = r,
                _ => {
                    segments.push((l, r));
                    states.push(z);
                }
            }
        }
        Self { segments, states }
    }
}

/// Expands a segmentation into a length-`n` state vector.
pub fn build_path(seg: &Segmentation) -> Vec<usize> {
    let mut path = Vec::with_capacity(seg.len());
    fill_path(seg, &mut path);
    path
}

/// [`build_path`] into an existing buffer, reusing its allocation.
pub fn fill_path(seg: &Segmentation, path: &mut Vec<usize>) {
    path.clear();
    path.reserve(seg.len());
    for (&(l, r), &z) in seg.segments.iter().zip(&seg.states) {
        path.resize(path.len() + (r - l + 1), z);
    }
}

/// Decoded path plus counters from one run.
#[derive(Clone, Debug)]
pub struct DecodeResult {
    pub path: Vec<usize>,
    pub segmentation: Segmentation,
    pub loop_iterations: usize,
    pub probes_h2: usize,
    pub probes_h3: usize,
    /// Loop plus path assembly; excludes building the score matrix.
    pub wall_time: Duration,
}

impl DecodeResult {
    pub fn s(&self) -> usize {
        self.segmentation.s()
    }
}

/// Everything in a [`DecodeResult`] except the path.
#[derive(Clone, Debug)]
pub struct DecodeSummary {
    pub segmentation: Segmentation,
    pub loop_iterations: usize,
    pub probes_h2: usize,
    pub probes_h3: usize,
    pub wall_time: Duration,
}

impl DecodeSummary {
    pub fn s(&self) -> usize {
        self.segmentation.s()
    }
}

/// Runs ternary segmentation over the whole sequence.
pub fn qats_decode(scores: &CumScores, params: &SearchParams) -> Result<DecodeResult> {
    let mut path = Vec::new();
    let sum = qats_decode_into(scores, params, &mut path)?;
    Ok(DecodeResult {
        path,
        segmentation: sum.segmentation,
        loop_iterations: sum.loop_iterations,
        probes_h2: sum.probes_h2,
        probes_h3: sum.probes_h3,
        wall_time: sum.wall_time,
    })
}

/// [`qats_decode`] writing the path into `path`, so that a preallocated
/// buffer can be reused across decodes.
pub fn qats_decode_into(
    scores: &CumScores,
    params: &SearchParams,
    path: &mut Vec<usize>,
) -> Result<DecodeSummary> {
    params.validate()?;
    let start = Instant::now();
    let n = scores.len();

    let mut segments: Vec<(usize, usize)> = vec![(1, n)];
    let mut states: Vec<usize> = vec![0];
    let mut u = 0;
    let mut loop_iterations = 0;
    let (mut probes_h2, mut probes_h3) = (0, 0);

    while u < segments.len() {
        loop_iterations += 1;
        let (l, r) = segments[u];
        let x0 = if u > 0 { Some(states[u - 1]) } else { None };

        let (h1, z1) = scores.best1(l, r, x0);
        let mut h2 = f64::NEG_INFINITY;
        let mut h3 = f64::NEG_INFINITY;
        let mut split2 = None;
        let mut split3 = None;
        if r > l {
            let res = osh2_unchecked(scores, l, r, x0, params);
            debug_assert!(l < res.k && res.k <= r);
            let (score, pair) = scores.best2(l, res.k, r, x0);
            probes_h2 += res.probes + 1;
            h2 = score;
            split2 = Some((res.k, pair));
            if r - l >= 2 {
                let res = osh3_unchecked(scores, l, r, x0, params);
                debug_assert!(l < res.k1 && res.k1 < res.k2 && res.k2 <= r);
                let (score, triple) = scores.best3(l, res.k1, res.k2, r, x0);
                probes_h3 += res.probes;
                h3 = score;
                split3 = Some((res.k1, res.k2, triple));
            }
        }

        // Ties go to the simpler path so that every split is a strict gain.
        if h3 > h1 && h3 > h2 {
            let (k1, k2, [a, b, c]) = split3.expect("h3 finite only when searched");
            segments.splice(u..=u, [(l, k1 - 1), (k1, k2 - 1), (k2, r)]);
            states.splice(u..=u, [a, b, c]);
        } else if h2 > h1 {
            let (k, [a, b]) = split2.expect("h2 finite only when searched");
            segments.splice(u..=u, [(l, k - 1), (k, r)]);
            states.splice(u..=u, [a, b]);
        } else {
            if h1 == f64::NEG_INFINITY {
                return Err(QatsError::Infeasible { ell: l, r });
            }
            states[u] = z1;
            u += 1;
        }
    }
    debug_assert!(loop_iterations < 2 * segments.len());

    let segmentation = Segmentation { segments, states };
    fill_path(&segmentation, path);
    Ok(DecodeSummary {
        segmentation,
        loop_iterations,
        probes_h2,
        probes_h3,
        wall_time: start.elapsed(),
    })
}
