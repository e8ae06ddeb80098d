//! File formats.
//!
//! All text formats are UTF-8 with LF line endings. States are written 1-based.
//!
//! * model JSON: `{"m", "pi", "trans", "emission": {"type": "gaussian", "means", "sigma"}}`
//! * data CSV: a `y` column, optionally `k` and `x_true`
//! * path CSV `(k, x_hat)`, segmentation CSV `(ell, r, state)`
//! * score cache: magic `QATSG1`, `m` and `n` as little-endian `u64`, then
//!   `m` rows of `n` little-endian `f64` prefix sums

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::decode::{DecodeResult, Segmentation};
use crate::error::{QatsError, Result};
use crate::metrics::{BenchRecord, SummaryRow};
use crate::model::{ChainParams, GaussianEmission, HmmModel};
use crate::scores::CumScores;
use crate::simulate::SimOutput;

pub const CACHE_MAGIC: &[u8; 6] = b"QATSG1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum EmissionSpec {
    Gaussian { means: Vec<f64>, sigma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub m: usize,
    pub pi: Vec<f64>,
    pub trans: Vec<Vec<f64>>,
    pub emission: EmissionSpec,
}

impl ModelFile {
    pub fn into_model(self) -> Result<HmmModel> {
        if self.pi.len() != self.m {
            return Err(QatsError::DimensionMismatch(format!(
                "m = {} but pi has {} entries",
                self.m,
                self.pi.len()
            )));
        }
        let EmissionSpec::Gaussian { means, sigma } = self.emission;
        HmmModel::new(&self.pi, &self.trans, GaussianEmission::new(means, sigma)?)
    }

    pub fn from_model(model: &HmmModel) -> Self {
        let c = model.chain();
        Self {
            m: c.n_states(),
            pi: c.initial_probabilities(),
            trans: c.transition_probabilities(),
            emission: EmissionSpec::Gaussian {
                means: model.emission().means().to_vec(),
                sigma: model.emission().sigma(),
            },
        }
    }
}

pub fn read_model<R: Read>(reader: R) -> Result<HmmModel> {
    let file: ModelFile = serde_json::from_reader(reader)?;
    file.into_model()
}

pub fn write_model<W: Write>(mut writer: W, model: &HmmModel) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, &ModelFile::from_model(model))?;
    writer.write_all(b"\n")?;
    Ok(())
}

/// Observations, plus the hidden states when the file carries them (0-based).
#[derive(Clone, Debug, PartialEq)]
pub struct DataFile {
    pub y: Vec<f64>,
    pub x_true: Option<Vec<usize>>,
}

pub fn read_data<R: Read>(reader: R) -> Result<DataFile> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let y_col = col("y").ok_or_else(|| QatsError::Parse("data file has no `y` column".into()))?;
    let x_col = col("x_true");

    let mut y = Vec::new();
    let mut x = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        let field = |c: usize| rec.get(c).ok_or_else(|| QatsError::Parse(format!("line {line}: missing field")));
        let v: f64 = field(y_col)?
            .parse()
            .map_err(|e| QatsError::Parse(format!("line {line}: bad y value: {e}")))?;
        y.push(v);
        if let Some(c) = x_col {
            let s: usize = field(c)?
                .parse()
                .map_err(|e| QatsError::Parse(format!("line {line}: bad x_true value: {e}")))?;
            if s == 0 {
                return Err(QatsError::Parse(format!("line {line}: states are numbered from 1")));
            }
            x.push(s - 1);
        }
    }
    if y.is_empty() {
        return Err(QatsError::Parse("data file has no observations".into()));
    }
    Ok(DataFile { y, x_true: x_col.map(|_| x) })
}

pub fn write_simulation<W: Write>(writer: W, out: &SimOutput) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["k", "x_true", "y"])?;
    for (k, (&x, &y)) in out.x_true.iter().zip(&out.y).enumerate() {
        w.write_record([(k + 1).to_string(), (x + 1).to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_path<W: Write>(writer: W, path: &[usize]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["k", "x_hat"])?;
    for (k, &x) in path.iter().enumerate() {
        w.write_record([(k + 1).to_string(), (x + 1).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_path<R: Read>(reader: R) -> Result<Vec<usize>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let c = headers
        .iter()
        .position(|h| h == "x_hat")
        .ok_or_else(|| QatsError::Parse("path file has no `x_hat` column".into()))?;
    let mut path = Vec::new();
    for rec in rdr.records() {
        let s: usize = rec?
            .get(c)
            .and_then(|v| v.parse().ok())
            .filter(|&s| s > 0)
            .ok_or_else(|| QatsError::Parse("bad x_hat value".into()))?;
        path.push(s - 1);
    }
    Ok(path)
}

pub fn write_segmentation<W: Write>(writer: W, seg: &Segmentation) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["ell", "r", "state"])?;
    for (&(l, r), &z) in seg.segments.iter().zip(&seg.states) {
        w.write_record([l.to_string(), r.to_string(), (z + 1).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub s: usize,
    pub loop_iterations: usize,
    pub probes_h2: usize,
    pub probes_h3: usize,
    pub wall_ms: f64,
}

impl From<&DecodeResult> for Diagnostics {
    fn from(r: &DecodeResult) -> Self {
        Self {
            s: r.s(),
            loop_iterations: r.loop_iterations,
            probes_h2: r.probes_h2,
            probes_h3: r.probes_h3,
            wall_ms: r.wall_time.as_secs_f64() * 1e3,
        }
    }
}

pub fn write_cache<W: Write>(mut writer: W, scores: &CumScores) -> Result<()> {
    writer.write_all(CACHE_MAGIC)?;
    writer.write_all(&(scores.n_states() as u64).to_le_bytes())?;
    writer.write_all(&(scores.len() as u64).to_le_bytes())?;
    let rows = scores.prefix_rows();
    let mut buf = Vec::with_capacity(rows.len() * 8);
    for v in rows {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    writer.write_all(&buf)?;
    writer.flush()?;
    Ok(())
}

/// Header of a score cache: `(m, n)`.
pub fn read_cache_header<R: Read>(reader: &mut R) -> Result<(usize, usize)> {
    let mut magic = [0u8; 6];
    reader.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(QatsError::Parse("not a score cache (bad magic)".into()));
    }
    let mut word = [0u8; 8];
    reader.read_exact(&mut word)?;
    let m = u64::from_le_bytes(word) as usize;
    reader.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    Ok((m, n))
}

pub fn read_cache<R: Read>(mut reader: R, chain: &ChainParams) -> Result<CumScores> {
    let (m, n) = read_cache_header(&mut reader)?;
    if m != chain.n_states() {
        return Err(QatsError::DimensionMismatch(format!(
            "cache has {m} states but the model has {}",
            chain.n_states()
        )));
    }
    let len = m
        .checked_mul(n)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| QatsError::Parse("cache dimensions overflow".into()))?;
    let mut bytes = vec![0u8; len];
    reader.read_exact(&mut bytes)?;
    let rows: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    CumScores::from_prefix_rows(chain, n, &rows)
}

pub const BENCH_HEADER: [&str; 13] = [
    "n", "m", "s", "sigma", "seed", "rep", "t_qats_ms", "t_viterbi_ms", "d0_q", "d0_v", "d2_q", "d2_v",
    "s_hat",
];

pub fn write_bench_records<W: Write>(writer: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(BENCH_HEADER)?;
    for r in records {
        let c = &r.config;
        w.write_record([
            c.n.to_string(),
            c.m.to_string(),
            c.s.to_string(),
            c.sigma.to_string(),
            c.seed.to_string(),
            c.replication_id.to_string(),
            (r.t_qats.as_secs_f64() * 1e3).to_string(),
            (r.t_viterbi.as_secs_f64() * 1e3).to_string(),
            r.d0_qats.to_string(),
            r.d0_viterbi.to_string(),
            r.d2_qats.to_string(),
            r.d2_viterbi.to_string(),
            r.s_hat_qats.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One configuration's summary rows.
pub struct SummaryBlock<'a> {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub sigma: f64,
    pub reps: usize,
    pub rows: &'a [SummaryRow],
}

pub fn write_summary<W: Write>(writer: W, blocks: &[SummaryBlock<'_>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["n", "m", "s", "sigma", "reps", "metric", "q10", "q50", "q90"])?;
    for b in blocks {
        for row in b.rows {
            w.write_record([
                b.n.to_string(),
                b.m.to_string(),
                b.s.to_string(),
                b.sigma.to_string(),
                b.reps.to_string(),
                row.metric.to_string(),
                row.q[0].to_string(),
                row.q[1].to_string(),
                row.q[2].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
