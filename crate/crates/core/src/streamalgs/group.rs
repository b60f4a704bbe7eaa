use super::{check_epsilon, check_positive_guess, residual, Cover, Outcome, StreamingAlgorithm, Usage};
use crate::error::{Error, Result};
use crate::offline::Solution;
use crate::setstream::{SetRecord, SetStream, SpaceLedger};

/// `⌈log_{1+ε}(10k/ε)⌉`, at least 1.
pub fn group_multi_pass_budget(k: usize, epsilon: f64) -> usize {
    let passes = ((10.0 * k as f64 / epsilon).ln() / epsilon.ln_1p()).ceil();
    if passes.is_finite() && passes >= 1.0 {
        passes as usize
    } else {
        1
    }
}

/// Per-group quota bookkeeping shared by both group algorithms.
#[derive(Debug)]
struct Quotas {
    quotas: Vec<usize>,
    taken: Vec<usize>,
    cover: Cover,
    ledger: SpaceLedger,
}

impl Quotas {
    fn new(quotas: &[usize]) -> Self {
        Self {
            quotas: quotas.to_vec(),
            taken: vec![0; quotas.len()],
            cover: Cover::default(),
            ledger: SpaceLedger::new(),
        }
    }

    fn group_of(&self, record: &SetRecord) -> Result<usize> {
        match record.group {
            Some(g) if g < self.quotas.len() => Ok(g),
            other => Err(Error::Format {
                line: None,
                message: format!("set {} has group {other:?}, expected < {}", record.id, self.quotas.len()),
            }),
        }
    }

    fn full(&self) -> bool {
        self.taken.iter().zip(&self.quotas).all(|(t, q)| t >= q)
    }

    /// Admits `record` into group `g` if it has room and the residual reaches `threshold`.
    fn offer(&mut self, record: &SetRecord, g: usize, threshold: f64) -> Outcome {
        if self.taken[g] >= self.quotas[g] || self.cover.chosen.contains(&record.id) {
            return Outcome::Skipped;
        }
        let rest = residual(record, &self.cover.covered);
        if rest.is_empty() || (rest.len() as f64) < threshold {
            return Outcome::Skipped;
        }
        self.taken[g] += 1;
        self.cover.admit(record.id, rest);
        self.ledger.record_elements(self.cover.covered.len());
        self.ledger.record_set_ids(self.cover.chosen.len());
        Outcome::Admitted
    }

    fn usage(&self) -> Usage {
        Usage { element_slots: self.cover.covered.len(), set_id_slots: self.cover.chosen.len() }
    }

    fn finish(self) -> Solution {
        let ledger = self.ledger;
        let mut solution = self.cover.into_solution();
        solution.ledger = ledger;
        solution
    }
}

/// One pass; group `i` admits on a residual of at least `z/((ℓ+1)k_i)`.
#[derive(Debug)]
pub struct GroupSinglePass {
    state: Quotas,
    z: f64,
    started: bool,
}

impl GroupSinglePass {
    pub fn new(quotas: &[usize], z: f64) -> Result<Self> {
        check_positive_guess(z)?;
        Ok(Self { state: Quotas::new(quotas), z, started: false })
    }

    pub fn threshold(&self, group: usize) -> f64 {
        let groups = self.state.quotas.len() as f64;
        self.z / ((groups + 1.0) * self.state.quotas[group] as f64)
    }
}

impl StreamingAlgorithm for GroupSinglePass {
    fn begin_pass(&mut self) -> bool {
        if self.started {
            return false;
        }
        self.started = true;
        self.state.ledger.record_pass();
        true
    }

    fn observe(&mut self, record: &SetRecord) -> Result<Outcome> {
        let g = self.state.group_of(record)?;
        let threshold = self.threshold(g);
        Ok(self.state.offer(record, g, threshold))
    }

    fn covered_count(&self) -> usize {
        self.state.cover.covered.len()
    }

    fn usage(&self) -> Usage {
        self.state.usage()
    }

    fn finish(self: Box<Self>) -> Result<Solution> {
        Ok(self.state.finish())
    }
}

/// Pass `j` admits on a residual of at least `z/(1+ε)^j`, subject to quotas.
#[derive(Debug)]
pub struct GroupMultiPass {
    state: Quotas,
    z: f64,
    epsilon: f64,
    max_passes: usize,
    pass: usize,
}

impl GroupMultiPass {
    pub fn new(quotas: &[usize], z: f64, epsilon: f64) -> Result<Self> {
        check_positive_guess(z)?;
        check_epsilon(epsilon)?;
        let k = quotas.iter().sum();
        Ok(Self {
            state: Quotas::new(quotas),
            z,
            epsilon,
            max_passes: group_multi_pass_budget(k, epsilon),
            pass: 0,
        })
    }

    pub fn threshold(&self) -> f64 {
        self.z / (1.0 + self.epsilon).powi(self.pass.max(1) as i32)
    }
}

impl StreamingAlgorithm for GroupMultiPass {
    fn begin_pass(&mut self) -> bool {
        if self.pass >= self.max_passes || self.state.full() {
            return false;
        }
        self.pass += 1;
        self.state.ledger.record_pass();
        true
    }

    fn observe(&mut self, record: &SetRecord) -> Result<Outcome> {
        let g = self.state.group_of(record)?;
        let threshold = self.threshold();
        Ok(self.state.offer(record, g, threshold))
    }

    fn covered_count(&self) -> usize {
        self.state.cover.covered.len()
    }

    fn usage(&self) -> Usage {
        self.state.usage()
    }

    fn finish(self: Box<Self>) -> Result<Solution> {
        Ok(self.state.finish())
    }
}

pub fn group_single_pass(stream: &SetStream, quotas: &[usize], z: f64) -> Result<Solution> {
    super::drive(stream, GroupSinglePass::new(quotas, z)?)
}

pub fn group_multi_pass(stream: &SetStream, quotas: &[usize], z: f64, epsilon: f64) -> Result<Solution> {
    super::drive(stream, GroupMultiPass::new(quotas, z, epsilon)?)
}
