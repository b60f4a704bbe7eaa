//! Seeded synthetic datasets. Set IDs run `1..=m` in stream order and
//! elements are drawn from `0..n`.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stream_maxcov::setstream::{EdgeUpdate, SetRecord, SetStream};
use stream_maxcov::{Error, Result};

fn invalid(message: impl Into<String>) -> Error {
    Error::InvalidParameter(message.into())
}

fn random_elements(rng: &mut ChaCha8Rng, n: u64, size: usize) -> Vec<u64> {
    let mut elements: Vec<u64> = sample(rng, n as usize, size).into_iter().map(|e| e as u64).collect();
    elements.sort_unstable();
    elements
}

fn check_sizes(n: u64, min_size: usize, max_size: usize) -> Result<()> {
    if min_size > max_size || max_size as u64 > n {
        return Err(invalid(format!("need min-size ≤ max-size ≤ n, got {min_size}, {max_size}, {n}")));
    }
    Ok(())
}

fn random_records(n: u64, m: usize, min_size: usize, max_size: usize, rng: &mut ChaCha8Rng) -> Vec<SetRecord> {
    (1..=m as u64)
        .map(|id| {
            let size = rng.gen_range(min_size..=max_size);
            SetRecord::new(id, random_elements(rng, n, size))
        })
        .collect()
}

/// `m` sets with sizes uniform in `[min_size, max_size]`.
pub fn random_sets(n: u64, m: usize, min_size: usize, max_size: usize, seed: u64) -> Result<SetStream> {
    check_sizes(n, min_size, max_size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SetStream::new(random_records(n, m, min_size, max_size, &mut rng), Some(n))
}

/// `k` disjoint sets partitioning `0..n`, hidden among `m - k` random sets of
/// size at most `n/(2k)`, in random order. `OPT = n` by construction.
pub fn planted_cover(n: u64, m: usize, k: usize, seed: u64) -> Result<SetStream> {
    if k == 0 || k > m || k as u64 > n {
        return Err(invalid(format!("planted cover needs 1 ≤ k ≤ min(m, n), got k={k} m={m} n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut universe: Vec<u64> = (0..n).collect();
    universe.shuffle(&mut rng);
    let mut blocks: Vec<Vec<u64>> = Vec::with_capacity(m);
    let (base, extra) = (n as usize / k, n as usize % k);
    let mut start = 0;
    for i in 0..k {
        let len = base + usize::from(i < extra);
        let mut block = universe[start..start + len].to_vec();
        block.sort_unstable();
        blocks.push(block);
        start += len;
    }
    let max_noise = (n as usize / (2 * k)).max(1);
    for _ in k..m {
        let size = rng.gen_range(1..=max_noise);
        blocks.push(random_elements(&mut rng, n, size));
    }
    blocks.shuffle(&mut rng);
    let records = blocks.into_iter().zip(1..).map(|(elements, id)| SetRecord::new(id, elements)).collect();
    SetStream::new(records, Some(n))
}

/// Random sets carrying costs uniform in `[0, budget]`, rounded to cents.
pub fn budgeted(n: u64, m: usize, min_size: usize, max_size: usize, budget: f64, seed: u64) -> Result<SetStream> {
    check_sizes(n, min_size, max_size)?;
    if !(budget >= 0.0 && budget.is_finite()) {
        return Err(invalid(format!("budget {budget} must be finite and non-negative")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = random_records(n, m, min_size, max_size, &mut rng)
        .into_iter()
        .map(|r| {
            let cost = (rng.gen_range(0.0..=budget) * 100.0).round() / 100.0;
            r.with_cost(cost.min(budget))
        })
        .collect();
    SetStream::new(records, Some(n))
}

/// Random sets, each assigned to one of `groups` groups uniformly.
pub fn grouped(n: u64, m: usize, min_size: usize, max_size: usize, groups: usize, seed: u64) -> Result<SetStream> {
    check_sizes(n, min_size, max_size)?;
    if groups == 0 {
        return Err(invalid("need at least one group"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = random_records(n, m, min_size, max_size, &mut rng)
        .into_iter()
        .map(|r| {
            let g = rng.gen_range(0..groups);
            r.with_group(g)
        })
        .collect();
    SetStream::new(records, Some(n))
}

/// A uniformly paired `degree`-regular simple graph on `0..nodes`, as an
/// insert-only update stream (configuration model with rejection).
pub fn regular_graph(nodes: usize, degree: usize, seed: u64) -> Result<Vec<EdgeUpdate>> {
    if degree >= nodes || (nodes * degree) % 2 == 1 {
        return Err(invalid(format!("no simple {degree}-regular graph on {nodes} nodes")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<u64> = (0..nodes as u64).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    for _ in 0..100_000 {
        points.shuffle(&mut rng);
        let mut edges: Vec<(u64, u64)> =
            points.chunks(2).map(|p| (p[0].min(p[1]), p[0].max(p[1]))).collect();
        if edges.iter().any(|(a, b)| a == b) {
            continue;
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        edges.shuffle(&mut rng);
        return Ok(edges.into_iter().map(|(a, b)| EdgeUpdate::insert(vec![a, b])).collect());
    }
    Err(invalid(format!("failed to draw a simple {degree}-regular graph on {nodes} nodes")))
}
