//! Quick adaptive ternary segmentation (QATS) for hidden Markov models.
//!
//! QATS decodes a hidden state path by recursively splitting segments into
//! at most three constant pieces, using prefix sums of the per-state
//! log-densities so that every local likelihood costs `O(1)`. On paths with
//! few changes it runs in polylogarithmic time per segment, against the
//! `O(m^2 n)` of Viterbi, which is included as a baseline.
//!
//! ```
//! use qats::{qats_decode, CumScores, GaussianEmission, HmmModel, SearchParams};
//!
//! let model = HmmModel::new(
//!     &[0.5, 0.5],
//!     &[vec![0.99, 0.01], vec![0.01, 0.99]],
//!     GaussianEmission::new(vec![1.0, 2.0], 0.1).unwrap(),
//! )
//! .unwrap();
//! let y: Vec<f64> = (0..100).map(|k| if k < 60 { 1.0 } else { 2.0 }).collect();
//! let scores = CumScores::build(&model, &y).unwrap();
//! let res = qats_decode(&scores, &SearchParams::default()).unwrap();
//! assert_eq!(res.segmentation.segments, vec![(1, 60), (61, 100)]);
//! ```

pub mod decode;
pub mod error;
pub mod io;
pub mod metrics;
pub mod model;
pub mod scores;
pub mod search;
pub mod simulate;
pub mod viterbi;

pub use decode::{build_path, qats_decode, DecodeResult, Segmentation};
pub use error::{QatsError, Result};
pub use model::{ChainParams, EmissionModel, GaussianEmission, HmmModel};
pub use scores::{CumScores, LogDensities, ScoredStates};
pub use search::{osh2, osh3, sosh3, SearchParams};
pub use simulate::{simulate_hmm, SimConfig, SimOutput};
pub use viterbi::{viterbi_decode, ViterbiPath};
