//! Maximum `k`-vertex coverage on hypergraphs.
//!
//! Adding one apex node to every hyperedge turns coverage into a cut: for any
//! `S` without the apex, `cover_G(S) = δ_{G'}(S)`. Any cut sparsifier of `G'`
//! therefore preserves every coverage value, and the problem can be solved on
//! the sparsifier. For near-regular graphs a few uniformly random `k`-subsets
//! already do well.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::offline::{binomial, check_cap, Solution};
use crate::setstream::{Hyperedge, Hypergraph, NodeId};

/// Trials constant `c₁` in `⌈c₁·ln N⌉`.
pub const NEAR_REGULAR_TRIALS_CONSTANT: f64 = 7.0;
/// Density target `ρ` of the reference sparsifier.
pub const DEFAULT_DENSITY: f64 = 8.0;

/// `graph` with a fresh apex node (one past the largest node) added to every
/// hyperedge. Returns the new graph and the apex.
pub fn augment_with_apex(graph: &Hypergraph) -> Result<(Hypergraph, NodeId)> {
    let apex = graph.nodes().last().map_or(0, |&v| v + 1);
    let edges = graph
        .edges()
        .iter()
        .map(|e| {
            let mut nodes = e.nodes.clone();
            nodes.push(apex);
            Hyperedge { nodes, weight: e.weight }
        })
        .collect();
    let graph = Hypergraph::new(graph.nodes().iter().copied().chain([apex]), edges)?;
    Ok((graph, apex))
}

/// Total weight of hyperedges with nodes both inside and outside `s`.
pub fn cut_value(graph: &Hypergraph, s: &HashSet<NodeId>) -> f64 {
    graph
        .edges()
        .iter()
        .filter(|e| {
            let inside = e.nodes.iter().filter(|v| s.contains(v)).count();
            inside > 0 && inside < e.nodes.len()
        })
        .map(|e| e.weight)
        .sum()
}

/// Total weight of hyperedges touching `s`.
pub fn cover_value(graph: &Hypergraph, s: &HashSet<NodeId>) -> f64 {
    graph.edges().iter().filter(|e| e.nodes.iter().any(|v| s.contains(v))).map(|e| e.weight).sum()
}

/// Number of hyperedges touching `s`.
pub fn cover_count(graph: &Hypergraph, s: &HashSet<NodeId>) -> u64 {
    graph.edges().iter().filter(|e| e.nodes.iter().any(|v| s.contains(v))).count() as u64
}

/// `Σ_y max(0, |y ∩ s| − 1)`: how far the degree sum of `s` overcounts its cover.
pub fn overlap_excess(graph: &Hypergraph, s: &HashSet<NodeId>) -> u64 {
    graph
        .edges()
        .iter()
        .map(|e| e.nodes.iter().filter(|v| s.contains(v)).count().saturating_sub(1) as u64)
        .sum()
}

pub trait Sparsifier {
    fn sparsify(&self, graph: &Hypergraph) -> Result<Hypergraph>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct IdentitySparsifier;

impl Sparsifier for IdentitySparsifier {
    fn sparsify(&self, graph: &Hypergraph) -> Result<Hypergraph> {
        Ok(graph.clone())
    }
}

/// Keeps each hyperedge independently with probability
/// `q = min(1, ρ·ε⁻²·ln N / N)` and reweights kept edges by `1/q`.
#[derive(Clone, Copy, Debug)]
pub struct UniformSampler {
    pub epsilon: f64,
    pub density: f64,
    pub seed: u64,
}

impl UniformSampler {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        UniformSampler { epsilon, density: DEFAULT_DENSITY, seed }
    }

    pub fn keep_probability(&self, nodes: usize) -> f64 {
        if nodes <= 1 {
            return 1.0;
        }
        let n = nodes as f64;
        (self.density * n.ln() / (self.epsilon * self.epsilon * n)).min(1.0)
    }
}

impl Sparsifier for UniformSampler {
    fn sparsify(&self, graph: &Hypergraph) -> Result<Hypergraph> {
        let q = self.keep_probability(graph.node_count());
        if q >= 1.0 {
            return Ok(graph.clone());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let edges = graph
            .edges()
            .iter()
            .filter(|_| rng.gen_bool(q))
            .map(|e| Hyperedge { nodes: e.nodes.clone(), weight: e.weight / q })
            .collect();
        Hypergraph::new(graph.nodes().iter().copied(), edges)
    }
}

/// The reference uniform sparsifier with the default density.
pub fn sparsify_reference(graph: &Hypergraph, epsilon: f64, seed: u64) -> Result<Hypergraph> {
    UniformSampler::new(epsilon, seed).sparsify(graph)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparsifierCheck {
    pub exhaustive: bool,
    pub cuts_checked: usize,
    pub violations: usize,
    /// Largest `|δ_H(S)/δ_G(S) − 1|` seen.
    pub worst_deviation: f64,
}

impl SparsifierCheck {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `(1−ε)δ_G(S) ≤ δ_H(S) ≤ (1+ε)δ_G(S)` for every `S` with
/// `δ_G(S) > 0`: all subsets when `N ≤ 16`, otherwise `sample_size` random
/// subsets plus every singleton.
pub fn verify_sparsifier(
    g: &Hypergraph,
    h: &Hypergraph,
    epsilon: f64,
    sample_size: usize,
    seed: u64,
) -> Result<SparsifierCheck> {
    if g.nodes() != h.nodes() {
        return Err(Error::Domain("sparsifier node set differs from the graph's".into()));
    }
    let nodes = g.nodes();
    let n = nodes.len();
    let mut check = SparsifierCheck { exhaustive: n <= 16, cuts_checked: 0, violations: 0, worst_deviation: 0.0 };
    let mut test = |s: &HashSet<NodeId>| {
        let dg = cut_value(g, s);
        if dg <= 0.0 {
            return;
        }
        let dh = cut_value(h, s);
        check.cuts_checked += 1;
        check.worst_deviation = check.worst_deviation.max((dh / dg - 1.0).abs());
        if dh < (1.0 - epsilon) * dg || dh > (1.0 + epsilon) * dg {
            check.violations += 1;
        }
    };
    if n <= 16 {
        for mask in 1u32..(1 << n) {
            let s = nodes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
            test(&s);
        }
    } else {
        for &v in nodes {
            test(&HashSet::from([v]));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..sample_size {
            let s = nodes.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            test(&s);
        }
    }
    Ok(check)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStrategy {
    Exhaustive { cap: u64 },
    Greedy,
}

/// Sparsifies the apex-augmented graph and maximizes `δ_H(S)` over
/// `k`-subsets of the original nodes. `estimated_coverage` is the value on
/// `H`; `exact_coverage` is recomputed on `graph`.
pub fn solve_on_sparsifier(
    graph: &Hypergraph,
    k: usize,
    sparsifier: &dyn Sparsifier,
    strategy: SolveStrategy,
) -> Result<Solution> {
    let (augmented, apex) = augment_with_apex(graph)?;
    let h = sparsifier.sparsify(&augmented)?;
    let candidates: Vec<NodeId> = graph.nodes().to_vec();
    let choose = k.min(candidates.len());
    let index = WeightedIncidence::new(&h, &candidates, apex);
    let (picked, value) = match strategy {
        SolveStrategy::Exhaustive { cap } => {
            check_cap(binomial(candidates.len(), choose), cap)?;
            index.exhaustive(choose)
        }
        SolveStrategy::Greedy => index.lazy_greedy(choose),
    };
    let mut chosen: Vec<NodeId> = picked.iter().map(|&i| candidates[i]).collect();
    chosen.sort_unstable();
    let set: HashSet<NodeId> = chosen.iter().copied().collect();
    Ok(Solution {
        exact_coverage: cover_count(graph, &set),
        estimated_coverage: Some(value),
        chosen,
        ..Default::default()
    })
}

/// Best of `trials` uniform `k`-subsets by exact cover (ties to the smaller
/// node list). Falls back to sparsify-and-solve with `ε/2` for each half when
/// `N < 4kd/ε` (`d` the maximum degree), where the sampling bound does not apply.
pub fn near_regular_sample(
    graph: &Hypergraph,
    k: usize,
    epsilon: f64,
    trials: Option<usize>,
    seed: u64,
    cap: u64,
) -> Result<Solution> {
    let n = graph.node_count();
    if k >= n {
        let all: HashSet<NodeId> = graph.nodes().iter().copied().collect();
        return Ok(Solution {
            chosen: graph.nodes().to_vec(),
            exact_coverage: cover_count(graph, &all),
            ..Default::default()
        });
    }
    let max_degree = graph.degrees().values().copied().max().unwrap_or(0);
    if (n as f64) < 4.0 * (k * max_degree) as f64 / epsilon {
        let sparsifier = UniformSampler::new(epsilon / 2.0, seed);
        let strategy = if binomial(n, k) <= cap as u128 {
            SolveStrategy::Exhaustive { cap }
        } else {
            SolveStrategy::Greedy
        };
        return solve_on_sparsifier(graph, k, &sparsifier, strategy);
    }
    let trials = trials.unwrap_or_else(|| (NEAR_REGULAR_TRIALS_CONSTANT * (n as f64).ln()).ceil() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(u64, Vec<NodeId>)> = None;
    for _ in 0..trials {
        let mut s: Vec<NodeId> = sample(&mut rng, n, k).into_iter().map(|i| graph.nodes()[i]).collect();
        s.sort_unstable();
        let cover = cover_count(graph, &s.iter().copied().collect());
        let better = match &best {
            None => true,
            Some((c, ids)) => cover > *c || cover == *c && s < *ids,
        };
        if better {
            best = Some((cover, s));
        }
    }
    let (exact_coverage, chosen) = best.expect("at least one trial");
    Ok(Solution { chosen, exact_coverage, ..Default::default() })
}

/// Per-candidate weighted edge lists of a sparsifier, ignoring the apex.
struct WeightedIncidence {
    weights: Vec<f64>,
    incident: Vec<Vec<usize>>,
}

impl WeightedIncidence {
    fn new(h: &Hypergraph, candidates: &[NodeId], apex: NodeId) -> Self {
        let position: HashMap<NodeId, usize> = candidates.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut incident = vec![Vec::new(); candidates.len()];
        for (e, edge) in h.edges().iter().enumerate() {
            for v in edge.nodes.iter().filter(|&&v| v != apex) {
                incident[position[v]].push(e);
            }
        }
        WeightedIncidence { weights: h.edges().iter().map(|e| e.weight).collect(), incident }
    }

    /// Weight of edges touching `picked`, summed in edge order.
    fn value(&self, picked: &[usize], mark: &mut [bool]) -> f64 {
        let mut touched: Vec<usize> = Vec::new();
        for &i in picked {
            for &e in &self.incident[i] {
                if !mark[e] {
                    mark[e] = true;
                    touched.push(e);
                }
            }
        }
        touched.sort_unstable();
        let total = touched.iter().map(|&e| self.weights[e]).sum();
        for e in touched {
            mark[e] = false;
        }
        total
    }

    fn exhaustive(&self, choose: usize) -> (Vec<usize>, f64) {
        let n = self.incident.len();
        let mut mark = vec![false; self.weights.len()];
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut combo: Vec<usize> = (0..choose).collect();
        loop {
            let v = self.value(&combo, &mut mark);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, combo.clone()));
            }
            // next combination in lexicographic order
            let Some(i) = (0..choose).rev().find(|&i| combo[i] < n - choose + i) else { break };
            combo[i] += 1;
            for j in i + 1..choose {
                combo[j] = combo[j - 1] + 1;
            }
        }
        let (value, picked) = best.unwrap_or((0.0, Vec::new()));
        (picked, value)
    }

    fn lazy_greedy(&self, choose: usize) -> (Vec<usize>, f64) {
        let mut covered = vec![false; self.weights.len()];
        let gain = |i: usize, covered: &[bool]| -> f64 {
            self.incident[i].iter().filter(|&&e| !covered[e]).map(|&e| self.weights[e]).sum()
        };
        let mut heap: BinaryHeap<Candidate> =
            (0..self.incident.len()).map(|i| Candidate { bound: gain(i, &covered), index: i }).collect();
        let mut picked = Vec::new();
        let mut total = 0.0;
        while picked.len() < choose {
            let Some(top) = heap.pop() else { break };
            let fresh = gain(top.index, &covered);
            if heap.peek().is_none_or(|next| Candidate { bound: fresh, index: top.index } >= *next) {
                for &e in &self.incident[top.index] {
                    covered[e] = true;
                }
                total += fresh;
                picked.push(top.index);
            } else {
                heap.push(Candidate { bound: fresh, index: top.index });
            }
        }
        (picked, total)
    }
}

/// Max-heap entry: larger bound first, then smaller index.
#[derive(Clone, Copy, Debug)]
struct Candidate {
    bound: f64,
    index: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound).then(other.index.cmp(&self.index))
    }
}
