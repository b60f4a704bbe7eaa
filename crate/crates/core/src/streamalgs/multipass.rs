use super::{check_epsilon, check_positive_guess, residual, Cover, Outcome, StreamingAlgorithm, Usage};
use crate::error::{Error, Result};
use crate::offline::Solution;
use crate::setstream::{SetRecord, SetStream, SpaceLedger};

/// `1 + ⌈log_{1+ε}(4e)⌉`.
pub fn multi_pass_budget(epsilon: f64) -> usize {
    1 + ((4.0 * std::f64::consts::E).ln() / epsilon.ln_1p()).ceil() as usize
}

/// Decreasing-threshold algorithm: pass `j` admits sets whose residual is at
/// least `z/(k(1+ε)^(j-1))`. Stops early once `k` sets are chosen.
#[derive(Debug)]
pub struct MultiPassThreshold {
    k: usize,
    z: f64,
    epsilon: f64,
    max_passes: usize,
    pass: usize,
    cover: Cover,
    ledger: SpaceLedger,
}

impl MultiPassThreshold {
    pub fn new(k: usize, z: f64, epsilon: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        check_positive_guess(z)?;
        check_epsilon(epsilon)?;
        Ok(Self {
            k,
            z,
            epsilon,
            max_passes: multi_pass_budget(epsilon),
            pass: 0,
            cover: Cover::default(),
            ledger: SpaceLedger::new(),
        })
    }

    /// Threshold of the current pass (1-based).
    pub fn threshold(&self) -> f64 {
        let j = self.pass.max(1) as i32;
        self.z / (self.k as f64 * (1.0 + self.epsilon).powi(j - 1))
    }
}

impl StreamingAlgorithm for MultiPassThreshold {
    fn begin_pass(&mut self) -> bool {
        if self.pass >= self.max_passes || self.cover.chosen.len() >= self.k {
            return false;
        }
        self.pass += 1;
        self.ledger.record_pass();
        true
    }

    fn observe(&mut self, record: &SetRecord) -> Result<Outcome> {
        if self.cover.chosen.len() >= self.k || self.cover.chosen.contains(&record.id) {
            return Ok(Outcome::Skipped);
        }
        let rest = residual(record, &self.cover.covered);
        if rest.is_empty() || (rest.len() as f64) < self.threshold() {
            return Ok(Outcome::Skipped);
        }
        self.cover.admit(record.id, rest);
        self.ledger.record_elements(self.cover.covered.len());
        self.ledger.record_set_ids(self.cover.chosen.len());
        Ok(Outcome::Admitted)
    }

    fn covered_count(&self) -> usize {
        self.cover.covered.len()
    }

    fn usage(&self) -> Usage {
        Usage { element_slots: self.cover.covered.len(), set_id_slots: self.cover.chosen.len() }
    }

    fn finish(self: Box<Self>) -> Result<Solution> {
        let ledger = self.ledger;
        let mut solution = self.cover.into_solution();
        solution.ledger = ledger;
        Ok(solution)
    }
}

pub fn multi_pass_threshold(stream: &SetStream, k: usize, z: f64, epsilon: f64) -> Result<Solution> {
    super::drive(stream, MultiPassThreshold::new(k, z, epsilon)?)
}
