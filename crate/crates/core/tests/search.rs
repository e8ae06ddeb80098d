//! Approximate searches against full scans on ideal two-state data.

mod common;

use common::*;
use qats::search::{optimistic_search, seed_positions};
use qats::{osh2, osh3, sosh3, SearchParams};
use rand::Rng;

fn params() -> SearchParams {
    SearchParams::default()
}

#[test]
fn single_change_is_found_by_the_two_piece_search() {
    let mut rng = rng(10);
    for _ in 0..100 {
        let n = rng.random_range(10..=2000);
        let kappa = rng.random_range(3..=n);
        let inst = ideal_instance(n, &[kappa], rng.random_range(0..2), 0.05, 0.3);
        let res = osh2(&inst.scores, 1, n, None, &params()).unwrap();
        assert_eq!(res.k, kappa, "n = {n}");

        let full: Vec<f64> = (2..=n).map(|k| inst.scores.h2(1, n, k, None).unwrap().score).collect();
        let best = full.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(res.h, best);
    }
}

#[test]
fn two_piece_search_on_adjacent_positions() {
    let inst = ideal_instance(5, &[3], 0, 0.1, 0.5);
    let res = osh2(&inst.scores, 4, 5, Some(1), &params()).unwrap();
    assert_eq!(res.k, 5);
    assert_eq!(res.probes, 1);
}

#[test]
fn two_piece_search_finds_a_neighbourhood_maximum_on_noisy_data() {
    let mut rng = rng(11);
    for _ in 0..100 {
        let model = random_model(&mut rng, 3);
        let y = random_observations(&mut rng, 61, 3);
        let scores = qats::CumScores::build(&model, &y).unwrap();
        let res = osh2(&scores, 1, 61, None, &params()).unwrap();
        let h = |k: usize| scores.h2(1, 61, k, None).unwrap().score;
        let (lo, hi) = res.bracket;
        if res.k > lo {
            assert!(res.h >= h(res.k - 1));
        }
        if res.k < hi {
            assert!(res.h >= h(res.k + 1));
        }
    }
}

/// Positions where a three-piece local maximum may sit on ideal data: the
/// boundary pairs `(l+1, r)`, `(l+1, kappa)`, `(kappa, r)`, the diagonal, and
/// change-point pairs `(kappa_a, kappa_b)` with `a < b` and `a + b` odd.
fn admissible_h3_location(k1: usize, k2: usize, n: usize, changes: &[usize]) -> bool {
    let is_change = |k: usize| changes.contains(&k);
    let pair_ok = match (changes.iter().position(|&c| c == k1), changes.iter().position(|&c| c == k2)) {
        (Some(a), Some(b)) => a < b && (a + b) % 2 == 1,
        _ => false,
    };
    (k1 == 2 && (k2 == n || is_change(k2))) || (is_change(k1) && k2 == n) || k2 == k1 + 1 || pair_ok
}

// A diagonal move followed by a non-improving pass ends the alternation
// without re-checking the other direction, so the end point need not be a
// two-dimensional local maximum; its location is still constrained.
#[test]
fn every_seed_stops_at_an_admissible_location() {
    let mut rng = rng(12);
    for _ in 0..60 {
        let n = rng.random_range(20..=300);
        let n_changes = rng.random_range(1..=4);
        let inst = random_ideal(&mut rng, n, n_changes);
        for seed in seed_positions(1, n, 5) {
            let res = sosh3(&inst.scores, 1, n, None, &params(), seed).unwrap();
            assert!(res.alternations < params().v_o);
            assert!(
                admissible_h3_location(res.k1, res.k2, n, &inst.changes),
                "({}, {}) with changes {:?}, n = {n}",
                res.k1,
                res.k2,
                inst.changes
            );
        }
    }
}

#[test]
fn seed_inside_the_middle_segment_finds_both_changes() {
    // With the midpoint seed inside the middle segment and the last piece
    // dominated by the outer state, both one-dimensional slices are unimodal.
    let mut rng = rng(13);
    for _ in 0..60 {
        let n = rng.random_range(30..=300);
        let mid = seed_positions(1, n, 3)[1];
        let k1 = rng.random_range(n / 5..n / 2 - 1);
        let k2 = rng.random_range(mid + 1..7 * n / 10);
        let inst = ideal_instance(n, &[k1, k2], rng.random_range(0..2), rng.random_range(0.01..0.4), 0.3);
        let (f1, f2, fh) = full_scan_h3(&inst.scores, 1, n, None);
        assert_eq!((f1, f2), (k1, k2));
        let res = sosh3(&inst.scores, 1, n, None, &params(), mid).unwrap();
        assert_eq!((res.k1, res.k2), (k1, k2), "n = {n}");
        let res = osh3(&inst.scores, 1, n, None, &params()).unwrap();
        assert_eq!((res.k1, res.k2, res.h), (k1, k2, fh));
    }
}

#[test]
fn single_seed_search_equals_seeded_search_at_midpoint() {
    let inst = ideal_instance(200, &[50, 140], 1, 0.05, 0.4);
    let p = SearchParams { n_seeds: 1, ..params() };
    let seeds = seed_positions(1, 200, 1);
    assert_eq!(seeds, vec![1 + 2 + 199 / 2]);
    let a = osh3(&inst.scores, 1, 200, None, &p).unwrap();
    let b = sosh3(&inst.scores, 1, 200, None, &p, seeds[0]).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seeded_search_terminates_on_constant_data() {
    let inst = ideal_instance(500, &[], 0, 0.01, 0.5);
    for v_o in [2, 5, 20] {
        let p = SearchParams { v_o, ..params() };
        for seed in [3, 100, 499, 500] {
            let res = sosh3(&inst.scores, 1, 500, None, &p, seed).unwrap();
            assert!(res.alternations <= v_o);
            assert!(1 < res.k1 && res.k1 < res.k2 && res.k2 <= 500);
        }
    }
}

#[test]
fn alternation_cap_is_respected() {
    let mut rng = rng(14);
    let p = SearchParams { v_o: 2, ..params() };
    for _ in 0..50 {
        let model = random_model(&mut rng, 2);
        let y = random_observations(&mut rng, 120, 2);
        let scores = qats::CumScores::build(&model, &y).unwrap();
        let seed = rng.random_range(3..=120);
        let res = sosh3(&scores, 1, 120, None, &p, seed).unwrap();
        assert!(res.alternations <= 2);
    }
}

#[test]
fn seeded_search_returns_its_best_visited_point() {
    let mut rng = rng(15);
    for _ in 0..50 {
        let model = random_model(&mut rng, 3);
        let y = random_observations(&mut rng, 90, 3);
        let scores = qats::CumScores::build(&model, &y).unwrap();
        let x0 = Some(rng.random_range(0..3));
        let res = osh3(&scores, 11, 90, x0, &params()).unwrap();
        assert_eq!(res.h, scores.h3(11, 90, res.k1, res.k2, x0).unwrap().score);
    }
}

#[test]
fn rotated_searches_report_unrotated_scores() {
    let mut rng = rng(16);
    let p = SearchParams { rotated: true, ..params() };
    for _ in 0..30 {
        let n = rng.random_range(50..=400);
        let inst = random_ideal(&mut rng, n, 2);
        let res = osh2(&inst.scores, 1, n, None, &p).unwrap();
        assert_eq!(res.h, inst.scores.h2(1, n, res.k, None).unwrap().score);
        let res = osh3(&inst.scores, 1, n, None, &p).unwrap();
        assert_eq!(res.h, inst.scores.h3(1, n, res.k1, res.k2, None).unwrap().score);
    }
}

#[test]
fn probe_budget_grows_logarithmically() {
    for width in [10usize, 100, 1_000, 10_000, 100_000, 1_000_000] {
        let mut count = 0;
        let res = optimistic_search(1, width, None, |k| { count += 1; -((k as f64) - 0.37 * width as f64).abs() }, &params())
            .unwrap();
        let budget = 4.0 * (width as f64).log2() + 3.0;
        assert!((res.probes as f64) <= budget, "{} probes for width {width}", res.probes);
        assert!(count >= res.probes);
    }
}
