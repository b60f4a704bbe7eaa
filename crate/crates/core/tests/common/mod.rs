#![allow(dead_code)]

use proptest::collection::{btree_set, vec};
use proptest::prelude::*;

use stream_maxcov::setstream::{SetRecord, SetStream};

/// Sets over `0..n` with IDs `1..=m` in stream order.
pub fn stream_of(n: u64, sets: Vec<Vec<u64>>) -> SetStream {
    let records = sets.into_iter().zip(1..).map(|(s, id)| SetRecord::new(id, s)).collect();
    SetStream::new(records, Some(n)).unwrap()
}

fn raw_sets(max_n: u64, max_m: usize, max_size: usize) -> impl Strategy<Value = (u64, Vec<Vec<u64>>)> {
    (4..=max_n).prop_flat_map(move |n| {
        let size = max_size.min(n as usize);
        (Just(n), vec(btree_set(0..n, 1..=size).prop_map(|s| s.into_iter().collect()), 1..=max_m))
    })
}

/// A plain instance with `m ≤ 20`, `n ≤ 60`, and `k ≤ 4`.
pub fn small_instance() -> impl Strategy<Value = (SetStream, usize)> {
    (raw_sets(60, 20, 15), 1usize..=4).prop_map(|((n, sets), k)| (stream_of(n, sets), k))
}

/// Grouped instance with per-group quotas summing to at most 4.
pub fn grouped_instance() -> impl Strategy<Value = (SetStream, Vec<usize>)> {
    (raw_sets(60, 20, 15), 1usize..=3).prop_flat_map(|((n, sets), groups)| {
        let m = sets.len();
        (Just(n), Just(sets), vec(0..groups, m), vec(0usize..=2, groups))
            .prop_filter("quotas sum to 1..=4", |(_, _, _, q)| (1..=4).contains(&q.iter().sum::<usize>()))
            .prop_map(|(n, sets, assignment, quotas)| {
                let records = sets
                    .into_iter()
                    .zip(assignment)
                    .zip(1..)
                    .map(|((s, g), id)| SetRecord::new(id, s).with_group(g))
                    .collect();
                (SetStream::new(records, Some(n)).unwrap(), quotas)
            })
    })
}

/// Budgeted instance with `m ≤ 14` and costs in cents up to the budget.
pub fn budgeted_instance() -> impl Strategy<Value = (SetStream, f64)> {
    (raw_sets(60, 14, 15), 1u32..=20).prop_flat_map(|((n, sets), budget)| {
        let m = sets.len();
        let budget = budget as f64;
        let max_cents = (budget * 100.0) as u32;
        (Just(n), Just(sets), vec(0..=max_cents, m)).prop_map(move |(n, sets, cents)| {
            let records = sets
                .into_iter()
                .zip(cents)
                .zip(1..)
                .map(|((s, c), id)| SetRecord::new(id, s).with_cost(c as f64 / 100.0))
                .collect();
            (SetStream::new(records, Some(n)).unwrap(), budget)
        })
    })
}

/// Guesses spread across `[opt, factor·opt]`, both ends included.
pub fn window(opt: u64, factor: f64) -> Vec<f64> {
    let opt = opt.max(1) as f64;
    [1.0, 0.5 * (1.0 + factor), factor].iter().map(|f| f * opt).collect()
}

/// Uniformly random simple `d`-regular graph edges via the configuration model.
pub fn regular_edges(nodes: usize, degree: usize, seed: u64) -> Vec<Vec<u64>> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<u64> = (0..nodes as u64).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    loop {
        points.shuffle(&mut rng);
        let mut edges: Vec<(u64, u64)> = points.chunks(2).map(|p| (p[0].min(p[1]), p[0].max(p[1]))).collect();
        edges.sort_unstable();
        if edges.iter().all(|(a, b)| a != b) && edges.windows(2).all(|w| w[0] != w[1]) {
            return edges.into_iter().map(|(a, b)| vec![a, b]).collect();
        }
    }
}

/// `m` seeded random sets over `0..n` with sizes uniform in `[min, max]`.
pub fn random_stream(n: u64, m: usize, min: usize, max: usize, seed: u64) -> SetStream {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let sets = (0..m)
        .map(|_| {
            let size = rng.gen_range(min..=max);
            let mut s: Vec<u64> =
                rand::seq::index::sample(&mut rng, n as usize, size).into_iter().map(|e| e as u64).collect();
            s.sort_unstable();
            s
        })
        .collect();
    stream_of(n, sets)
}
