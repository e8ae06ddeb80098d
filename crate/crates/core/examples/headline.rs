//! Times QATS against Viterbi at a single benchmark setting.
//!
//! `cargo run --release --example headline -- [n] [s] [reps]`

use qats::metrics::{bench_pair, median};
use qats::{SearchParams, SimConfig};

fn main() -> qats::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let n = args.first().copied().unwrap_or(1_000_001);
    let s = args.get(1).copied().unwrap_or(11);
    let reps = args.get(2).copied().unwrap_or(10);
    let params = SearchParams::default();
    let base = SimConfig { n, m: 2, s, sigma: 1.0, seed: 2024, replication_id: 0 };
    bench_pair(&base, &params)?;

    let mut ratios = Vec::new();
    let mut tq = Vec::new();
    let mut tv = Vec::new();
    let mut dd = Vec::new();
    for rep in 1..=reps as u64 {
        let r = bench_pair(&SimConfig { replication_id: rep, ..base }, &params)?;
        ratios.push(r.time_ratio());
        tq.push(r.t_qats.as_secs_f64() * 1e3);
        tv.push(r.t_viterbi.as_secs_f64() * 1e3);
        dd.push(r.d0_qats - r.d0_viterbi);
    }
    println!(
        "n={n} s={s} reps={reps}: median t_qats={:.3}ms t_viterbi={:.3}ms ratio={:.1} d0_diff={:.5}",
        median(&tq)?,
        median(&tv)?,
        median(&ratios)?,
        median(&dd)?
    );
    Ok(())
}
