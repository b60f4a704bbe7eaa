mod common;

use std::f64::consts::E;

use common::random_stream;
use stream_maxcov::framework::{lambda, run_guessing, subsampled_view, Algorithm, GuessingConfig, LadderKind};
use stream_maxcov::hashing::{independence_degree, Subsampler, DEFAULT_MAX_DEGREE};
use stream_maxcov::offline::{brute_force_opt, DEFAULT_ORACLE_CAP};

const K: usize = 3;
const EPS: f64 = 0.3;
const M: usize = 20;

fn lambda_here() -> f64 {
    lambda(LadderKind::Pow2, 1.0, EPS, K, M)
}

/// Instances with `n ≥ λ/ε²`, so subsampling is active on every large guess.
fn instance(seed: u64) -> (stream_maxcov::setstream::SetStream, u64) {
    let n = (lambda_here() / (EPS * EPS)).ceil() as u64 + 50;
    let stream = random_stream(n, M, 40, 300, seed);
    let opt = brute_force_opt(&stream, K, DEFAULT_ORACLE_CAP).unwrap().exact_coverage;
    (stream, opt)
}

#[test]
fn correct_guess_survives() {
    let mut checked = 0;
    let mut survived = 0;
    for seed in 0..100u64 {
        let (stream, opt) = instance(1000 + seed);
        let config = GuessingConfig { seed, ..GuessingConfig::new(K, EPS) };
        let run = run_guessing(&stream, &Algorithm::SinglePass, &config).unwrap();
        for report in run.instances.iter().filter(|r| r.guess >= opt as f64 / 2.0 && r.guess <= opt as f64) {
            checked += 1;
            survived += usize::from(!report.terminated);
        }
    }
    assert!(checked >= 100, "only {checked} correct guesses seen");
    assert!(survived as f64 >= 0.95 * checked as f64, "{survived}/{checked} survived");
}

#[test]
fn subsampled_optimum_concentrates() {
    let lam = lambda_here();
    let degree = independence_degree(lam, DEFAULT_MAX_DEGREE);
    let good = (0..100u64)
        .filter(|&seed| {
            let (stream, opt) = instance(2000 + seed);
            let p = (lam / opt as f64).min(1.0);
            let sampler = Subsampler::build(degree, stream.universe_size(), p, seed).unwrap();
            let view = subsampled_view(&stream, &sampler).unwrap();
            let sub_opt = brute_force_opt(&view, K, DEFAULT_ORACLE_CAP).unwrap().exact_coverage as f64;
            let target = p * opt as f64;
            (sub_opt - target).abs() <= EPS * target
        })
        .count();
    assert!(good >= 90, "{good}/100 within (1 ± ε)·p·OPT");
}

#[test]
fn end_to_end_ratios_without_a_known_optimum() {
    let cases: [(Algorithm, f64); 4] = [
        (Algorithm::SinglePass, 1.0 - 1.0 / E - EPS),
        (Algorithm::MultiPass, 1.0 - 1.0 / E - EPS),
        (Algorithm::Half, 0.5 - EPS),
        (Algorithm::Boosted { b: 4.0 / EPS }, 1.0 - EPS),
    ];
    let mut successes = [0usize; 4];
    for seed in 0..50u64 {
        let (stream, opt) = instance(3000 + seed);
        let config = GuessingConfig { seed, ..GuessingConfig::new(K, EPS) };
        for (i, (algorithm, ratio)) in cases.iter().enumerate() {
            let run = run_guessing(&stream, algorithm, &config).unwrap();
            assert_eq!(stream.coverage_of(&run.solution.chosen), run.solution.exact_coverage);
            successes[i] += usize::from(run.solution.exact_coverage as f64 >= ratio * opt as f64);
        }
    }
    for ((algorithm, _), wins) in cases.iter().zip(successes) {
        assert!(wins >= 45, "{algorithm:?}: {wins}/50");
    }
}

#[test]
fn ledger_passes_match_stream_traversals() {
    let (stream, _) = instance(4000);
    for algorithm in [Algorithm::SinglePass, Algorithm::MultiPass, Algorithm::Half] {
        let before = stream.passes_consumed();
        let run = run_guessing(&stream, &algorithm, &GuessingConfig::new(K, EPS)).unwrap();
        assert_eq!(run.solution.ledger.passes(), stream.passes_consumed() - before, "{algorithm:?}");
    }
}
