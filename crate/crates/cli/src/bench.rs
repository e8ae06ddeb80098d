use std::io;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qats::io::{write_bench_records, write_summary, SummaryBlock};
use qats::metrics::{bench_pair, summarize, BenchRecord};
use qats::SimConfig;
use rayon::prelude::*;

use crate::{effective_seed, sink, CliError, SearchArgs};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum Preset {
    /// n = 10^4 + 1, m in {2, 3}, s in {2, 6, 11}, sigma in {0.1, 1.0}, 50 reps
    Small,
    /// n = 10^6 + 1, m = 2, s = 11, sigma = 1.0, 20 reps
    Headline,
}

struct Grid {
    n: Vec<usize>,
    m: Vec<usize>,
    s: Vec<usize>,
    sigma: Vec<f64>,
    reps: usize,
}

impl Preset {
    fn grid(self) -> Grid {
        match self {
            Preset::Small => Grid {
                n: vec![10_001],
                m: vec![2, 3],
                s: vec![2, 6, 11],
                sigma: vec![0.1, 1.0],
                reps: 50,
            },
            Preset::Headline => Grid {
                n: vec![1_000_001],
                m: vec![2],
                s: vec![11],
                sigma: vec![1.0],
                reps: 20,
            },
        }
    }
}

#[derive(Args, Debug)]
pub(crate) struct BenchArgs {
    /// Named grid; the list flags below override its dimensions
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Sequence lengths (comma separated)
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// State counts
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    /// Expected segment counts
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<usize>>,
    /// Noise levels
    #[arg(long, value_delimiter = ',')]
    sigma: Option<Vec<f64>>,
    /// Replications per configuration
    #[arg(long)]
    reps: Option<usize>,
    /// RNG seed shared by all replications (QATS_SEED overrides)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    jobs: Option<usize>,
    /// Per-replication records CSV
    #[arg(long)]
    out: Option<PathBuf>,
    /// Quantile summary CSV (stdout if omitted)
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    search: SearchArgs,
}

fn pick<T>(flag: Option<Vec<T>>, preset: Option<Vec<T>>, name: &str) -> Result<Vec<T>, CliError> {
    flag.or(preset)
        .filter(|v| !v.is_empty())
        .ok_or_else(|| CliError::Usage(format!("--{name} is required without --preset")))
}

pub(crate) fn run_bench(args: BenchArgs) -> Result<(), CliError> {
    let params = args.search.params()?;
    let seed = effective_seed(args.seed)?;
    let base = args.preset.map(Preset::grid);
    let grid = Grid {
        n: pick(args.n, base.as_ref().map(|g| g.n.clone()), "n")?,
        m: pick(args.m, base.as_ref().map(|g| g.m.clone()), "m")?,
        s: pick(args.s, base.as_ref().map(|g| g.s.clone()), "s")?,
        sigma: pick(args.sigma, base.as_ref().map(|g| g.sigma.clone()), "sigma")?,
        reps: args.reps.or(base.as_ref().map(|g| g.reps)).unwrap_or(1),
    };
    if grid.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }

    let mut configs = Vec::new();
    for &n in &grid.n {
        for &m in &grid.m {
            for &s in &grid.s {
                for &sigma in &grid.sigma {
                    let c = SimConfig { n, m, s, sigma, seed, replication_id: 0 };
                    c.validate()?;
                    configs.push(c);
                }
            }
        }
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = args.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;

    let reps = grid.reps as u64;
    let records: Vec<Vec<BenchRecord>> = pool.install(|| {
        configs
            .par_iter()
            .map(|c| {
                // warm-up on a stream no replication uses, discarded
                bench_pair(&SimConfig { replication_id: reps, ..*c }, &params)?;
                (0..reps)
                    .map(|rep| bench_pair(&SimConfig { replication_id: rep, ..*c }, &params))
                    .collect::<qats::Result<Vec<_>>>()
            })
            .collect::<qats::Result<Vec<_>>>()
    })?;

    if let Some(p) = &args.out {
        write_bench_records(crate::create(p)?, &records.concat())?;
    }
    let rows = records.iter().map(|r| summarize(r)).collect::<qats::Result<Vec<_>>>()?;
    let blocks: Vec<SummaryBlock<'_>> = configs
        .iter()
        .zip(&rows)
        .map(|(c, rows)| SummaryBlock { n: c.n, m: c.m, s: c.s, sigma: c.sigma, reps: grid.reps, rows })
        .collect();
    write_summary(sink(args.summary.as_deref(), Box::new(io::stdout().lock()))?, &blocks)?;
    Ok(())
}
