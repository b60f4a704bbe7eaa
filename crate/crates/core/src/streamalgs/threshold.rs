use super::{check_positive_guess, residual, Cover, Outcome, StreamingAlgorithm, Usage};
use crate::error::{Error, Result};
use crate::offline::{exact_pick_from_leftovers, greedy_pick_from_leftovers, Solution};
use crate::setstream::{ElementId, SetId, SetRecord, SetStream, SpaceLedger};

#[derive(Clone, Copy, Debug)]
enum PostProcess {
    Greedy,
    Exact { cap: u64 },
}

/// One-pass threshold algorithm: admit a set whose residual reaches the
/// threshold, keep the residuals of the rest, and fill the remaining slots
/// from them afterwards.
#[derive(Debug)]
pub struct ThresholdSinglePass {
    k: usize,
    threshold: f64,
    post: PostProcess,
    largest_only: bool,
    cover: Cover,
    leftovers: Vec<(SetId, Vec<ElementId>)>,
    leftover_elements: usize,
    largest: Option<(SetId, Vec<ElementId>)>,
    ledger: SpaceLedger,
    started: bool,
}

impl ThresholdSinglePass {
    /// Threshold `z/k` with greedy post-processing. A non-positive `z`
    /// stores every set. With `k = 1` only the largest set is tracked.
    pub fn new(k: usize, z: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let threshold = if z > 0.0 { z / k as f64 } else { f64::INFINITY };
        Ok(Self::build(k, threshold, PostProcess::Greedy, k == 1 && z > 0.0))
    }

    /// Threshold `b·z/k` with exhaustive post-processing under `cap`.
    pub fn boosted(k: usize, z: f64, b: f64, cap: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        check_positive_guess(z)?;
        if !(b >= 1.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("boost factor b = {b} must be at least 1")));
        }
        Ok(Self::build(k, b * z / k as f64, PostProcess::Exact { cap }, false))
    }

    fn build(k: usize, threshold: f64, post: PostProcess, largest_only: bool) -> Self {
        Self {
            k,
            threshold,
            post,
            largest_only,
            cover: Cover::default(),
            leftovers: Vec::new(),
            leftover_elements: 0,
            largest: None,
            ledger: SpaceLedger::new(),
            started: false,
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Residuals currently kept for post-processing.
    pub fn leftovers(&self) -> &[(SetId, Vec<ElementId>)] {
        &self.leftovers
    }

    fn observe_largest(&mut self, record: &SetRecord) -> Outcome {
        let better = self.largest.as_ref().is_none_or(|(_, e)| record.len() > e.len());
        if !better {
            return Outcome::Skipped;
        }
        self.largest = Some((record.id, record.elements.clone()));
        Outcome::Stored
    }
}

impl StreamingAlgorithm for ThresholdSinglePass {
    fn begin_pass(&mut self) -> bool {
        if self.started {
            return false;
        }
        self.started = true;
        self.ledger.record_pass();
        true
    }

    fn observe(&mut self, record: &SetRecord) -> Result<Outcome> {
        let outcome = if self.largest_only {
            self.observe_largest(record)
        } else if self.cover.chosen.len() >= self.k {
            Outcome::Skipped
        } else {
            let rest = residual(record, &self.cover.covered);
            if rest.len() as f64 >= self.threshold {
                self.cover.admit(record.id, rest);
                Outcome::Admitted
            } else if rest.is_empty() {
                Outcome::Skipped
            } else {
                self.leftover_elements += rest.len();
                self.leftovers.push((record.id, rest));
                Outcome::Stored
            }
        };
        let usage = self.usage();
        self.ledger.record_elements(usage.element_slots);
        self.ledger.record_set_ids(usage.set_id_slots);
        Ok(outcome)
    }

    fn covered_count(&self) -> usize {
        match &self.largest {
            Some((_, e)) => e.len(),
            None => self.cover.covered.len(),
        }
    }

    fn usage(&self) -> Usage {
        if let Some((_, e)) = &self.largest {
            return Usage { element_slots: e.len(), set_id_slots: 1 };
        }
        Usage {
            element_slots: self.cover.covered.len() + self.leftover_elements,
            set_id_slots: self.cover.chosen.len() + self.leftovers.len(),
        }
    }

    fn finish(self: Box<Self>) -> Result<Solution> {
        let mut this = *self;
        if let Some((id, elements)) = this.largest.take() {
            this.cover.admit(id, elements);
        }
        let slots = this.k - this.cover.chosen.len();
        let picks = match this.post {
            PostProcess::Greedy => {
                greedy_pick_from_leftovers(&this.leftovers, &mut this.cover.covered, slots)
            }
            PostProcess::Exact { cap } => {
                exact_pick_from_leftovers(&this.leftovers, &mut this.cover.covered, slots, cap)?
            }
        };
        for pick in picks {
            this.cover.chosen.push(pick.id);
            this.cover.gains.push(pick.gain);
        }
        let ledger = this.ledger;
        let mut solution = this.cover.into_solution();
        solution.ledger = ledger;
        Ok(solution)
    }
}

pub fn single_pass_threshold(stream: &SetStream, k: usize, z: f64) -> Result<Solution> {
    super::drive(stream, ThresholdSinglePass::new(k, z)?)
}

pub fn boosted_single_pass(stream: &SetStream, k: usize, z: f64, b: f64, cap: u64) -> Result<Solution> {
    super::drive(stream, ThresholdSinglePass::boosted(k, z, b, cap)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::offline::{brute_force_opt, DEFAULT_ORACLE_CAP};
    use crate::streamalgs::fixtures::{plain, toy_a};

    #[test]
    fn toy_a_admits_both_disjoint_halves() {
        let stream = toy_a();
        let sol = single_pass_threshold(&stream, 2, 8.0).unwrap();
        assert_eq!(sol.chosen, vec![1, 2]);
        assert_eq!(sol.exact_coverage, 8);
        assert_eq!(sol.exact_coverage, brute_force_opt(&stream, 2, DEFAULT_ORACLE_CAP).unwrap().exact_coverage);
        assert_eq!(sol.ledger.passes(), 1);
        assert_eq!(stream.passes_consumed(), 1);
    }

    #[test]
    fn unreachable_threshold_falls_back_to_greedy() {
        let stream = toy_a();
        let sol = single_pass_threshold(&stream, 2, 1000.0).unwrap();
        assert_eq!(sol.chosen, vec![1, 2]);
        assert_eq!(sol.exact_coverage, 8);
        assert_eq!(sol.ledger.set_id_slots(), 4);
    }

    #[test]
    fn non_positive_guess_stores_everything() {
        let sol = single_pass_threshold(&toy_a(), 2, 0.0).unwrap();
        assert_eq!(sol.exact_coverage, 8);
        assert_eq!(sol.ledger.element_slots(), 16);
    }

    #[test]
    fn empty_stream() {
        let stream = plain(&[]);
        let sol = single_pass_threshold(&stream, 3, 5.0).unwrap();
        assert!(sol.chosen.is_empty());
        assert_eq!(sol.exact_coverage, 0);
        assert_eq!(stream.passes_consumed(), 1);
    }

    #[test]
    fn k_one_keeps_the_largest_set() {
        let stream = plain(&[(1, &[1, 2]), (2, &[3, 4, 5]), (3, &[6, 7, 8])]);
        let sol = single_pass_threshold(&stream, 1, 100.0).unwrap();
        assert_eq!(sol.chosen, vec![2]);
        assert_eq!(sol.exact_coverage, 3);
        assert_eq!(sol.ledger.element_slots(), 3);
    }

    #[test]
    fn boosted_exact_post_processing() {
        let sol = boosted_single_pass(&toy_a(), 2, 8.0, 2.0, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(sol.sorted_ids(), vec![1, 2]);
        assert_eq!(sol.exact_coverage, 8);
    }

    #[test]
    fn boosted_single_set() {
        let sol = boosted_single_pass(&plain(&[(9, &[1, 2, 3])]), 1, 2.0, 5.0, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(sol.chosen, vec![9]);
    }

    #[test]
    fn boosted_rejects_small_factor() {
        assert!(ThresholdSinglePass::boosted(2, 4.0, 0.5, 10).is_err());
    }

    #[test]
    fn stored_residuals_stay_below_threshold() {
        let stream = plain(&[(1, &[1, 2]), (2, &[2, 3, 4, 5]), (3, &[1, 6]), (4, &[7])]);
        let mut alg = ThresholdSinglePass::new(2, 6.0).unwrap();
        assert!(alg.begin_pass());
        for r in stream.replay() {
            alg.observe(r).unwrap();
        }
        assert!(alg.leftovers().iter().all(|(_, r)| (r.len() as f64) < alg.threshold()));
        assert_eq!(alg.cover.chosen, vec![2]);
    }
}
