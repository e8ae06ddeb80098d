//! `qats`: simulate HMM data, decode it with QATS or Viterbi, and benchmark the two.

mod bench;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qats::io::{read_cache, read_cache_header, read_data, read_model, write_cache, write_path, write_segmentation, write_simulation};
use qats::metrics::distance;
use qats::viterbi::{complete_log_lik, viterbi_decode};
use qats::{qats_decode, CumScores, HmmModel, QatsError, SearchParams, SimConfig};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "qats", version, about = "Quick adaptive ternary segmentation for hidden Markov models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a state path and Gaussian observations; writes CSV (k, x_true, y)
    Simulate(SimulateArgs),
    /// Decode observations with QATS, Viterbi or both
    Decode(DecodeArgs),
    /// Time QATS against Viterbi over a grid of simulated configurations
    Bench(bench::BenchArgs),
    /// Build or inspect a binary cache of cumulative log-densities
    #[command(subcommand)]
    Cache(CacheCommand),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Sequence length
    #[arg(long)]
    n: usize,
    /// Number of states
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Expected number of segments
    #[arg(long)]
    s: usize,
    /// Observation noise standard deviation
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// RNG seed (QATS_SEED overrides)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replication index, selecting an independent RNG stream
    #[arg(long, default_value_t = 0)]
    rep: u64,
    /// Output CSV (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the generating model as JSON
    #[arg(long)]
    model_out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Qats,
    Viterbi,
    Both,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    /// Model JSON
    #[arg(long)]
    model: PathBuf,
    /// Data CSV with a `y` column (and optionally `x_true`)
    #[arg(long, required_unless_present = "cache", conflicts_with = "cache")]
    data: Option<PathBuf>,
    /// Score cache built with `qats cache build`, instead of --data
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Algo::Qats)]
    algo: Algo,
    /// Path CSV (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Diagnostics JSON (stderr if omitted)
    #[arg(long)]
    diagnostics: Option<PathBuf>,
    /// Segment table CSV `ell,r,state` of the QATS path (the Viterbi path with --algo viterbi)
    #[arg(long)]
    segments: Option<PathBuf>,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args, Debug, Clone)]
pub(crate) struct SearchArgs {
    /// Optimistic search step fraction, in (0, 1)
    #[arg(long, default_value_t = 0.5)]
    nu: f64,
    /// Bracket width below which optimistic search sweeps exhaustively
    #[arg(long = "d-o", default_value_t = 3)]
    d_o: usize,
    /// Maximum number of alternating passes per seeded 2D search
    #[arg(long = "v-o", default_value_t = 20)]
    v_o: usize,
    /// Number of seeds for the 2D search
    #[arg(long = "n-seeds", default_value_t = 3)]
    n_seeds: usize,
    /// Search rotated scores (linear trend between the domain ends removed)
    #[arg(long)]
    rotated: bool,
}

impl SearchArgs {
    pub(crate) fn params(&self) -> Result<SearchParams, CliError> {
        let p = SearchParams {
            nu: self.nu,
            d_o: self.d_o,
            v_o: self.v_o,
            n_seeds: self.n_seeds,
            rotated: self.rotated,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Subcommand, Debug)]
enum CacheCommand {
    /// Compute the cumulative log-densities of a data file under a model
    Build {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the dimensions of a cache file
    Info {
        #[arg(long)]
        cache: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
pub(crate) enum CliError {
    #[error(transparent)]
    Qats(#[from] QatsError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Input { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Qats(e) if e.is_validation() => 2,
            CliError::Usage(_) | CliError::Input { .. } => 2,
            _ => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Decode(args) => run_decode(args),
        Command::Bench(args) => bench::run_bench(args),
        Command::Cache(cmd) => run_cache(cmd),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// `--seed`, unless QATS_SEED is set.
pub(crate) fn effective_seed(flag: u64) -> Result<u64, CliError> {
    match std::env::var("QATS_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("QATS_SEED must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(flag),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| CliError::Input { path: path.to_owned(), source })
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Output { path: path.to_owned(), source })
}

/// A file if given, otherwise the fallback stream.
pub(crate) fn sink(path: Option<&Path>, fallback: Box<dyn Write>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => fallback,
    })
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let config = SimConfig {
        n: args.n,
        m: args.m,
        s: args.s,
        sigma: args.sigma,
        seed: effective_seed(args.seed)?,
        replication_id: args.rep,
    };
    let out = qats::simulate_hmm(&config)?;
    write_simulation(sink(args.out.as_deref(), Box::new(io::stdout().lock()))?, &out)?;
    if let Some(p) = args.model_out {
        qats::io::write_model(create(&p)?, &config.model()?)?;
    }
    Ok(())
}

fn load_model(path: &Path) -> Result<HmmModel, CliError> {
    Ok(read_model(open(path)?)?)
}

fn run_decode(args: DecodeArgs) -> Result<(), CliError> {
    let params = args.search.params()?;
    let model = load_model(&args.model)?;
    let (scores, truth) = match (&args.data, &args.cache) {
        (Some(data), None) => {
            let d = read_data(open(data)?)?;
            (CumScores::build(&model, &d.y)?, d.x_true)
        }
        (None, Some(cache)) => (read_cache(open(cache)?, model.chain())?, None),
        _ => return Err(CliError::Usage("give exactly one of --data and --cache".into())),
    };
    let g = scores.log_densities();
    let chain = model.chain();

    let mut diag = serde_json::Map::new();
    let mut columns: Vec<(&str, Vec<usize>)> = Vec::new();

    if matches!(args.algo, Algo::Qats | Algo::Both) {
        let res = qats_decode(&scores, &params)?;
        let d = qats::io::Diagnostics::from(&res);
        let mut v = serde_json::to_value(&d).map_err(QatsError::from)?;
        v["log_lik"] = json_f64(complete_log_lik(chain, &g, &res.path)?);
        diag.insert("qats".into(), v);
        columns.push(("qats", res.path));
    }
    if matches!(args.algo, Algo::Viterbi | Algo::Both) {
        let start = std::time::Instant::now();
        let vit = viterbi_decode(chain, &g)?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        diag.insert(
            "viterbi".into(),
            json!({ "s": qats::Segmentation::from_path(&vit.path).s(), "log_lik": json_f64(vit.log_lik), "wall_ms": wall_ms }),
        );
        columns.push(("viterbi", vit.path));
    }
    if let Some(truth) = &truth {
        let mut dist = serde_json::Map::new();
        for (name, path) in &columns {
            dist.insert(format!("d0_{name}"), json!(distance(path, truth, 0.0)?));
            dist.insert(format!("d2_{name}"), json!(distance(path, truth, 2.0)?));
        }
        diag.insert("distances".into(), dist.into());
    }

    if let Some(path) = &args.segments {
        let seg = qats::Segmentation::from_path(&columns[0].1);
        write_segmentation(create(path)?, &seg)?;
    }
    let out = sink(args.out.as_deref(), Box::new(io::stdout().lock()))?;
    if let [(_, path)] = columns.as_slice() {
        write_path(out, path)?;
    } else {
        write_paths(out, &columns)?;
    }
    let mut d = sink(args.diagnostics.as_deref(), Box::new(io::stderr().lock()))?;
    serde_json::to_writer_pretty(&mut d, &diag).map_err(QatsError::from)?;
    writeln!(d)?;
    d.flush()?;
    Ok(())
}

/// `-inf` is not valid JSON; it is written as null.
fn json_f64(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

/// Side-by-side paths, columns `k, x_<name>...`, states 1-based.
fn write_paths(mut out: Box<dyn Write>, columns: &[(&str, Vec<usize>)]) -> Result<(), CliError> {
    let header: Vec<String> = std::iter::once("k".to_string())
        .chain(columns.iter().map(|(name, _)| format!("x_{name}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    let n = columns[0].1.len();
    for k in 0..n {
        write!(out, "{}", k + 1)?;
        for (_, path) in columns {
            write!(out, ",{}", path[k] + 1)?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn run_cache(cmd: CacheCommand) -> Result<(), CliError> {
    match cmd {
        CacheCommand::Build { model, data, out } => {
            let model = load_model(&model)?;
            let d = read_data(open(&data)?)?;
            let scores = CumScores::build(&model, &d.y)?;
            write_cache(create(&out)?, &scores)?;
        }
        CacheCommand::Info { cache } => {
            let (m, n) = read_cache_header(&mut open(&cache)?)?;
            println!("states: {m}\nlength: {n}");
        }
    }
    Ok(())
}
