use super::{check_positive_guess, residual, Cover, Outcome, StreamingAlgorithm, Usage};
use crate::error::{Error, Result};
use crate::offline::Solution;
use crate::setstream::{SetRecord, SetStream, SpaceLedger};

/// Single pass with threshold `z/(2k)` and no leftover storage.
#[derive(Debug)]
pub struct HalfSinglePass {
    k: usize,
    threshold: f64,
    cover: Cover,
    ledger: SpaceLedger,
    started: bool,
}

impl HalfSinglePass {
    pub fn new(k: usize, z: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        check_positive_guess(z)?;
        Ok(Self {
            k,
            threshold: z / (2.0 * k as f64),
            cover: Cover::default(),
            ledger: SpaceLedger::new(),
            started: false,
        })
    }
}

impl StreamingAlgorithm for HalfSinglePass {
    fn begin_pass(&mut self) -> bool {
        if self.started {
            return false;
        }
        self.started = true;
        self.ledger.record_pass();
        true
    }

    fn observe(&mut self, record: &SetRecord) -> Result<Outcome> {
        if self.cover.chosen.len() >= self.k {
            return Ok(Outcome::Skipped);
        }
        let rest = residual(record, &self.cover.covered);
        if rest.is_empty() || (rest.len() as f64) < self.threshold {
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

pub fn half_single_pass(stream: &SetStream, k: usize, z: f64) -> Result<Solution> {
    super::drive(stream, HalfSinglePass::new(k, z)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streamalgs::fixtures::{plain, toy_a};

    #[test]
    fn toy_a_admits_both_halves() {
        let sol = half_single_pass(&toy_a(), 2, 8.0).unwrap();
        assert_eq!(sol.chosen, vec![1, 2]);
        assert_eq!(sol.exact_coverage, 8);
        assert_eq!(sol.ledger.set_id_slots(), 2);
    }

    #[test]
    fn identical_sets_admit_only_the_first() {
        let sol = half_single_pass(&plain(&[(1, &[1, 2]), (2, &[1, 2]), (3, &[1, 2])]), 2, 4.0).unwrap();
        assert_eq!(sol.chosen, vec![1]);
    }

    #[test]
    fn low_guess_is_greedy_by_arrival() {
        let sol = half_single_pass(&plain(&[(1, &[1]), (2, &[2, 3]), (3, &[4, 5, 6])]), 2, 1.0).unwrap();
        assert_eq!(sol.chosen, vec![1, 2]);
    }
}
