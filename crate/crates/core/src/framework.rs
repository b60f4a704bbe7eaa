//! Guess, subsample, and verify.
//!
//! Without knowing `OPT`, the driver runs one instance of a streaming
//! algorithm per value `v` on a geometric ladder. Instance `v` keeps each
//! element with probability `p = min(1, λ/v)` via a limited-independence
//! hash, so for the right guess the subsampled optimum concentrates around
//! `λ` and the instance can be fed a fixed `z`. Instances whose subsampled
//! coverage exceeds `z` are terminated. Every live instance also sketches the
//! original elements of what it picks, and the instance with the largest
//! estimated original coverage wins.
//!
//! All instances advance through the same replays of the stream in lockstep,
//! so running `L` guesses costs the passes of one.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::distinct::{F0Sketch, SketchFamily};
use crate::error::{Error, Result};
use crate::hashing::{independence_degree, Subsampler, DEFAULT_MAX_DEGREE};
use crate::offline::{Solution, DEFAULT_ORACLE_CAP};
use crate::seed;
use crate::setstream::{ElementId, SetId, SetRecord, SetStream, SpaceLedger};
use crate::streamalgs::{
    check_epsilon, BudgetedSinglePass, GroupMultiPass, GroupSinglePass, HalfSinglePass, MultiPassThreshold,
    Outcome, StreamingAlgorithm, ThresholdSinglePass,
};

/// Dense membership caches are used up to this universe size.
const DENSE_CACHE_LIMIT: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LadderKind {
    /// Powers of two.
    Pow2,
    /// Powers of `1 + ε/4`.
    Fine,
}

/// Geometric guesses `g^i` such that every value in `[lo, hi]` has a guess
/// within a factor `g` below it.
#[derive(Clone, Debug, PartialEq)]
pub struct GuessLadder {
    base: f64,
    values: Vec<f64>,
}

impl GuessLadder {
    pub fn new(kind: LadderKind, epsilon: f64, lo: f64, hi: f64) -> Self {
        let base = match kind {
            LadderKind::Pow2 => 2.0,
            LadderKind::Fine => 1.0 + epsilon / 4.0,
        };
        Self::geometric(base, lo, hi)
    }

    /// Ladder for `OPT ∈ [1, n]`.
    pub fn over_universe(kind: LadderKind, epsilon: f64, n: u64) -> Self {
        Self::new(kind, epsilon, 1.0, n as f64)
    }

    pub fn geometric(base: f64, lo: f64, hi: f64) -> Self {
        assert!(base > 1.0, "ladder base must exceed 1");
        let lo = lo.max(1.0);
        let start = (lo.ln() / base.ln()).floor() as i32;
        let mut values = Vec::new();
        let mut i = start;
        loop {
            let v = base.powi(i);
            values.push(v);
            if v * base >= hi {
                break;
            }
            i += 1;
        }
        GuessLadder { base, values }
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Which streaming algorithm each guess instance runs.
#[derive(Clone, Debug, PartialEq)]
pub enum Algorithm {
    SinglePass,
    MultiPass,
    Half,
    Boosted { b: f64 },
    GroupSingle { quotas: Vec<usize> },
    GroupMulti { quotas: Vec<usize> },
}

impl Algorithm {
    /// The ladder the algorithm's analysis assumes.
    pub fn natural_ladder(&self) -> LadderKind {
        match self {
            Algorithm::Half | Algorithm::GroupSingle { .. } => LadderKind::Fine,
            _ => LadderKind::Pow2,
        }
    }

    /// Total number of sets the algorithm may choose.
    pub fn cardinality(&self, k: usize) -> usize {
        match self {
            Algorithm::GroupSingle { quotas } | Algorithm::GroupMulti { quotas } => quotas.iter().sum(),
            _ => k,
        }
    }

    fn instantiate(&self, k: usize, z: f64, epsilon: f64, cap: u64) -> Result<Box<dyn StreamingAlgorithm>> {
        Ok(match self {
            Algorithm::SinglePass => Box::new(ThresholdSinglePass::new(k, z)?),
            Algorithm::MultiPass => Box::new(MultiPassThreshold::new(k, z, epsilon)?),
            Algorithm::Half => Box::new(HalfSinglePass::new(k, z)?),
            Algorithm::Boosted { b } => Box::new(ThresholdSinglePass::boosted(k, z, *b, cap)?),
            Algorithm::GroupSingle { quotas } => Box::new(GroupSinglePass::new(quotas, z)?),
            Algorithm::GroupMulti { quotas } => Box::new(GroupMultiPass::new(quotas, z, epsilon)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GuessingConfig {
    pub k: usize,
    pub epsilon: f64,
    /// Defaults to the algorithm's natural ladder.
    pub ladder: Option<LadderKind>,
    /// Constant `c` in `λ = c·ε⁻²·k·ln m`.
    pub lambda_c: f64,
    pub max_degree: usize,
    pub seed: u64,
    /// Spend one extra pass on the largest set size to shorten the ladder.
    pub refine_with_largest_set: bool,
    pub oracle_cap: u64,
}

impl GuessingConfig {
    pub fn new(k: usize, epsilon: f64) -> Self {
        GuessingConfig {
            k,
            epsilon,
            ladder: None,
            lambda_c: 1.0,
            max_degree: DEFAULT_MAX_DEGREE,
            seed: 42,
            refine_with_largest_set: false,
            oracle_cap: DEFAULT_ORACLE_CAP,
        }
    }
}

/// `c·ε⁻²·k·ln m` (times 16 on the fine ladder), with `ln m` floored at 1.
pub fn lambda(kind: LadderKind, c: f64, epsilon: f64, k: usize, m: usize) -> f64 {
    let log_m = (m.max(1) as f64).ln().max(1.0);
    let base = c * k as f64 * log_m / (epsilon * epsilon);
    match kind {
        LadderKind::Pow2 => base,
        LadderKind::Fine => 16.0 * base,
    }
}

/// The `z` handed to, and the coverage cap enforced on, a guess whose
/// effective `λ` is `min(λ, v)`.
pub fn termination_cap(kind: LadderKind, epsilon: f64, effective_lambda: f64) -> f64 {
    match kind {
        LadderKind::Pow2 => 2.0 * (1.0 + epsilon) * effective_lambda,
        LadderKind::Fine => (1.0 + epsilon / 4.0).powi(2) * effective_lambda,
    }
}

/// Per-guess outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceReport {
    pub guess: f64,
    pub probability: f64,
    pub hash_degree: usize,
    pub cap: f64,
    pub terminated: bool,
    /// Largest subsampled coverage seen.
    pub peak_covered: usize,
    pub estimate: Option<f64>,
    pub exact_coverage: Option<u64>,
    pub ledger: SpaceLedger,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GuessingRun {
    pub solution: Solution,
    pub selected_guess: f64,
    pub instances: Vec<InstanceReport>,
}

/// Runs `algorithm` across the guess ladder and returns the best live instance.
pub fn run_guessing(stream: &SetStream, algorithm: &Algorithm, config: &GuessingConfig) -> Result<GuessingRun> {
    check_epsilon(config.epsilon)?;
    let k = algorithm.cardinality(config.k);
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let kind = config.ladder.unwrap_or_else(|| algorithm.natural_ladder());
    let n = stream.universe_size();
    let lambda = lambda(kind, config.lambda_c, config.epsilon, k, stream.total_sets());

    let mut passes = 0;
    let ladder = if config.refine_with_largest_set {
        passes += 1;
        let largest = stream.replay().map(SetRecord::len).max().unwrap_or(0).max(1) as f64;
        GuessLadder::new(kind, config.epsilon, largest, (k as f64 * largest).min(n.max(1) as f64))
    } else {
        GuessLadder::over_universe(kind, config.epsilon, n)
    };
    let degree = independence_degree(lambda, config.max_degree);
    let ln_inv_delta = {
        let n = n.max(1) as f64;
        n.ln() + n.log2().ceil().max(1.0).ln()
    };

    let mut instances = ladder
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let effective = lambda.min(v);
            let cap = termination_cap(kind, config.epsilon, effective);
            let sampler = Subsampler::build(degree, n, effective / v, seed::derive(config.seed, "subsample", i as u64))?;
            let family = SketchFamily::for_log_inverse_delta(
                config.epsilon,
                ln_inv_delta,
                seed::derive(config.seed, "coverage-sketch", i as u64),
            )?;
            let algorithm = algorithm.instantiate(k, cap, config.epsilon, config.oracle_cap)?;
            Ok(Instance::new(v, cap, Some(sampler), Some(family), algorithm, n))
        })
        .collect::<Result<Vec<_>>>()?;

    let ledger = run_lockstep(stream, &mut instances, passes)?;
    let finished = finish_all(stream, instances)?;
    select(finished, ledger, |f| f.estimate.unwrap_or(0.0))
}

/// Budgeted coverage over a `(1+ε)^j` ladder of guesses `z`, without
/// subsampling. The winner is the instance with the largest exact coverage.
pub fn run_budgeted_guessing(stream: &SetStream, budget: f64, epsilon: f64) -> Result<GuessingRun> {
    check_epsilon(epsilon)?;
    let ladder = GuessLadder::geometric(1.0 + epsilon, 1.0, stream.universe_size().max(1) as f64);
    let mut instances = ladder
        .values()
        .iter()
        .map(|&z| {
            let algorithm: Box<dyn StreamingAlgorithm> = Box::new(BudgetedSinglePass::new(budget, z)?);
            Ok(Instance::new(z, f64::INFINITY, None, None, algorithm, 0))
        })
        .collect::<Result<Vec<_>>>()?;
    let ledger = run_lockstep(stream, &mut instances, 0)?;
    let finished = finish_all(stream, instances)?;
    select(finished, ledger, |f| f.exact as f64)
}

/// A materialized copy of `stream` with every record filtered through
/// `subsampler`. Consumes one pass of `stream`; IDs, costs, and groups are kept
/// and records that become empty are still present.
pub fn subsampled_view(stream: &SetStream, subsampler: &Subsampler) -> Result<SetStream> {
    let records = stream
        .replay()
        .map(|r| {
            Ok(SetRecord {
                id: r.id,
                elements: subsampler.filter(&r.elements)?,
                cost: r.cost,
                group: r.group,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SetStream::with_kind(records, Some(stream.universe_size()), stream.kind())
}

enum Membership {
    Identity,
    /// 0 = unknown, 1 = dropped, 2 = kept.
    Dense(Vec<u8>),
    Direct,
}

struct Instance {
    guess: f64,
    cap: f64,
    sampler: Option<Subsampler>,
    membership: Membership,
    family: Option<Arc<SketchFamily>>,
    coverage: Option<F0Sketch>,
    leftovers: HashMap<SetId, F0Sketch>,
    leftover_registers: usize,
    admitted: HashSet<SetId>,
    algorithm: Option<Box<dyn StreamingAlgorithm>>,
    in_pass: bool,
    peak_covered: usize,
    ledger: SpaceLedger,
}

impl Instance {
    fn new(
        guess: f64,
        cap: f64,
        sampler: Option<Subsampler>,
        family: Option<Arc<SketchFamily>>,
        algorithm: Box<dyn StreamingAlgorithm>,
        universe: u64,
    ) -> Self {
        let membership = match &sampler {
            None => Membership::Identity,
            Some(s) if s.is_identity() => Membership::Identity,
            Some(_) if universe <= DENSE_CACHE_LIMIT => Membership::Dense(vec![0; universe as usize]),
            Some(_) => Membership::Direct,
        };
        Instance {
            guess,
            cap,
            sampler,
            membership,
            coverage: family.as_ref().map(|f| f.empty_sketch()),
            family,
            leftovers: HashMap::new(),
            leftover_registers: 0,
            admitted: HashSet::new(),
            algorithm: Some(algorithm),
            in_pass: false,
            peak_covered: 0,
            ledger: SpaceLedger::new(),
        }
    }

    fn live(&self) -> bool {
        self.algorithm.is_some()
    }

    fn filter(&mut self, elements: &[ElementId]) -> Result<Vec<ElementId>> {
        let Some(sampler) = &self.sampler else {
            return Ok(elements.to_vec());
        };
        match &mut self.membership {
            Membership::Identity => Ok(elements.to_vec()),
            Membership::Direct => sampler.filter(elements),
            Membership::Dense(cache) => {
                if let Some(&e) = elements.iter().find(|&&e| e >= sampler.universe_size()) {
                    return sampler.member(e).map(|_| Vec::new());
                }
                let unknown: Vec<ElementId> =
                    elements.iter().copied().filter(|&e| cache[e as usize] == 0).collect();
                for (e, kept) in unknown.iter().zip(sampler.member_many_unchecked(&unknown)) {
                    cache[*e as usize] = if kept { 2 } else { 1 };
                }
                Ok(elements.iter().copied().filter(|&e| cache[e as usize] == 2).collect())
            }
        }
    }

    /// Feeds one record and returns the slots held just after it, before
    /// any termination releases them.
    fn observe(&mut self, record: &SetRecord) -> Result<Slots> {
        if !self.in_pass || !self.live() {
            return Ok(self.slots());
        }
        let filtered = SetRecord {
            id: record.id,
            elements: self.filter(&record.elements)?,
            cost: record.cost,
            group: record.group,
        };
        let algorithm = self.algorithm.as_mut().expect("live instance");
        let outcome = algorithm.observe(&filtered)?;
        let covered = algorithm.covered_count();
        match outcome {
            Outcome::Admitted => {
                self.admitted.insert(record.id);
                if let Some(sketch) = &mut self.coverage {
                    for &e in &record.elements {
                        sketch.insert(e);
                    }
                }
            }
            Outcome::Stored => {
                if let Some(family) = &self.family {
                    let sketch = family.sketch_of(record.elements.iter().copied());
                    self.leftover_registers += sketch.registers();
                    if let Some(old) = self.leftovers.insert(record.id, sketch) {
                        self.leftover_registers -= old.registers();
                    }
                }
            }
            Outcome::Skipped => {}
        }
        self.peak_covered = self.peak_covered.max(covered);
        let slots = self.slots();
        self.ledger.record_elements(slots.elements);
        self.ledger.record_set_ids(slots.set_ids);
        self.ledger.record_sketch_registers(slots.registers);
        if covered as f64 > self.cap {
            self.terminate();
        }
        Ok(slots)
    }

    fn terminate(&mut self) {
        self.algorithm = None;
        self.coverage = None;
        self.leftovers.clear();
        self.leftover_registers = 0;
        self.admitted.clear();
    }

    fn slots(&self) -> Slots {
        let Some(algorithm) = &self.algorithm else {
            return Slots::default();
        };
        let usage = algorithm.usage();
        Slots {
            elements: usage.element_slots,
            set_ids: usage.set_id_slots,
            registers: self.coverage.as_ref().map_or(0, F0Sketch::registers) + self.leftover_registers,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Slots {
    elements: usize,
    set_ids: usize,
    registers: usize,
}

/// Drives every instance through shared replays until none wants another
/// pass. Returns the concurrent ledger: peaks of the summed usage of all
/// live instances.
fn run_lockstep(stream: &SetStream, instances: &mut [Instance], mut passes: usize) -> Result<SpaceLedger> {
    let mut ledger = SpaceLedger::new();
    loop {
        let mut any = false;
        for inst in instances.iter_mut() {
            inst.in_pass = match &mut inst.algorithm {
                Some(a) => a.begin_pass(),
                None => false,
            };
            if inst.in_pass {
                inst.ledger.record_pass();
            }
            any |= inst.in_pass;
        }
        if !any {
            break;
        }
        passes += 1;
        for record in stream.replay() {
            let mut total = Slots::default();
            for inst in instances.iter_mut() {
                let slots = inst.observe(record)?;
                total.elements += slots.elements;
                total.set_ids += slots.set_ids;
                total.registers += slots.registers;
            }
            ledger.record_elements(total.elements);
            ledger.record_set_ids(total.set_ids);
            ledger.record_sketch_registers(total.registers);
        }
    }
    ledger.set_passes(passes);
    Ok(ledger)
}

struct Finished {
    report: InstanceReport,
    solution: Option<Solution>,
    exact: u64,
    estimate: Option<f64>,
}

fn finish_all(stream: &SetStream, instances: Vec<Instance>) -> Result<Vec<Finished>> {
    let mut finished = Vec::with_capacity(instances.len());
    for mut inst in instances {
        let (probability, hash_degree) =
            inst.sampler.as_ref().map_or((1.0, 0), |s| (s.probability(), s.hash().degree()));
        let mut solution = match inst.algorithm.take() {
            Some(a) => Some(a.finish()?),
            None => None,
        };
        if solution.as_ref().is_some_and(|s| s.exact_coverage as f64 > inst.cap) {
            solution = None;
        }
        let mut estimate = None;
        let mut exact = 0;
        if let Some(sol) = &mut solution {
            inst.peak_covered = inst.peak_covered.max(sol.exact_coverage as usize);
            if let Some(coverage) = &inst.coverage {
                let mut merged = coverage.clone();
                for id in sol.chosen.iter().filter(|id| !inst.admitted.contains(id)) {
                    if let Some(sketch) = inst.leftovers.get(id) {
                        merged.merge_from(sketch)?;
                    }
                }
                estimate = Some(merged.estimate());
            }
            exact = stream.coverage_of(&sol.chosen);
            sol.gains = original_gains(stream, &sol.chosen);
            sol.exact_coverage = exact;
            sol.estimated_coverage = estimate;
        }
        finished.push(Finished {
            report: InstanceReport {
                guess: inst.guess,
                probability,
                hash_degree,
                cap: inst.cap,
                terminated: solution.is_none(),
                peak_covered: inst.peak_covered,
                estimate,
                exact_coverage: solution.as_ref().map(|_| exact),
                ledger: inst.ledger,
            },
            solution,
            exact,
            estimate,
        });
    }
    Ok(finished)
}

fn select(finished: Vec<Finished>, ledger: SpaceLedger, score: impl Fn(&Finished) -> f64) -> Result<GuessingRun> {
    let mut best: Option<(f64, usize)> = None;
    for (i, f) in finished.iter().enumerate() {
        if f.solution.is_some() && best.is_none_or(|(s, _)| score(f) > s) {
            best = Some((score(f), i));
        }
    }
    let Some((_, winner)) = best else {
        return Err(Error::Invariant("every guess instance was terminated".into()));
    };
    let selected_guess = finished[winner].report.guess;
    let instances: Vec<InstanceReport> = finished.iter().map(|f| f.report.clone()).collect();
    let mut solution = finished.into_iter().nth(winner).and_then(|f| f.solution).expect("winner is live");
    solution.ledger = ledger;
    Ok(GuessingRun { solution, selected_guess, instances })
}

/// Marginal original-universe gains of `chosen`, in order.
fn original_gains(stream: &SetStream, chosen: &[SetId]) -> Vec<u64> {
    let by_id: HashMap<SetId, &SetRecord> = stream.audit().iter().map(|r| (r.id, r)).collect();
    let mut covered = HashSet::new();
    chosen
        .iter()
        .map(|id| {
            let record = by_id[id];
            record.elements.iter().filter(|&&e| covered.insert(e)).count() as u64
        })
        .collect()
}
