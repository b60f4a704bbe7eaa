use super::{check_positive_guess, residual, Cover, Outcome, StreamingAlgorithm, Usage};
use crate::error::{Error, Result};
use crate::offline::Solution;
use crate::setstream::{SetId, SetRecord, SetStream, SpaceLedger};

/// One pass under a knapsack budget `L`. A set qualifies when its residual is
/// at least `(2z/3)·(w_S/L)`. The first qualifying set that would overflow the
/// budget ends the run: the answer is the current selection or that set
/// alone, whichever is larger.
#[derive(Debug)]
pub struct BudgetedSinglePass {
    budget: f64,
    z: f64,
    spent: f64,
    cover: Cover,
    replacement: Option<(SetId, usize)>,
    terminated: bool,
    ledger: SpaceLedger,
    started: bool,
}

impl BudgetedSinglePass {
    pub fn new(budget: f64, z: f64) -> Result<Self> {
        check_positive_guess(z)?;
        if !(budget >= 0.0 && budget.is_finite()) {
            return Err(Error::InvalidParameter(format!("budget {budget} must be finite and non-negative")));
        }
        Ok(Self {
            budget,
            z,
            spent: 0.0,
            cover: Cover::default(),
            replacement: None,
            terminated: false,
            ledger: SpaceLedger::new(),
            started: false,
        })
    }

    pub fn spent(&self) -> f64 {
        self.spent
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    fn cost_of(&self, record: &SetRecord) -> Result<f64> {
        match record.cost {
            Some(w) if (0.0..=self.budget).contains(&w) => Ok(w),
            other => Err(Error::Format {
                line: None,
                message: format!("set {} has cost {other:?}, expected within [0, {}]", record.id, self.budget),
            }),
        }
    }

    fn required(&self, cost: f64) -> f64 {
        if self.budget == 0.0 {
            0.0
        } else {
            2.0 * self.z / 3.0 * (cost / self.budget)
        }
    }
}

impl StreamingAlgorithm for BudgetedSinglePass {
    fn begin_pass(&mut self) -> bool {
        if self.started {
            return false;
        }
        self.started = true;
        self.ledger.record_pass();
        true
    }

    fn observe(&mut self, record: &SetRecord) -> Result<Outcome> {
        let cost = self.cost_of(record)?;
        if self.terminated {
            return Ok(Outcome::Skipped);
        }
        let rest = residual(record, &self.cover.covered);
        if rest.is_empty() || (rest.len() as f64) < self.required(cost) {
            return Ok(Outcome::Skipped);
        }
        if self.spent + cost > self.budget {
            self.terminated = true;
            if self.cover.covered.len() < record.len() {
                self.replacement = Some((record.id, record.len()));
                return Ok(Outcome::Admitted);
            }
            return Ok(Outcome::Skipped);
        }
        self.spent += cost;
        self.cover.admit(record.id, rest);
        self.ledger.record_elements(self.cover.covered.len());
        self.ledger.record_set_ids(self.cover.chosen.len());
        Ok(Outcome::Admitted)
    }

    fn covered_count(&self) -> usize {
        match self.replacement {
            Some((_, size)) => size,
            None => self.cover.covered.len(),
        }
    }

    fn usage(&self) -> Usage {
        Usage { element_slots: self.cover.covered.len(), set_id_slots: self.cover.chosen.len() }
    }

    fn finish(self: Box<Self>) -> Result<Solution> {
        let ledger = self.ledger;
        let mut solution = match self.replacement {
            Some((id, size)) => Solution {
                chosen: vec![id],
                exact_coverage: size as u64,
                gains: vec![size as u64],
                ..Default::default()
            },
            None => self.cover.into_solution(),
        };
        solution.ledger = ledger;
        Ok(solution)
    }
}

pub fn budgeted_single_pass(stream: &SetStream, budget: f64, z: f64) -> Result<Solution> {
    super::drive(stream, BudgetedSinglePass::new(budget, z)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::offline::brute_force_budgeted;

    fn costed(sets: &[(u64, &[u64], f64)]) -> SetStream {
        SetStream::new(
            sets.iter().map(|(id, e, w)| SetRecord::new(*id, e.to_vec()).with_cost(*w)).collect(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn overflow_keeps_the_larger_side() {
        let stream = costed(&[(1, &[1, 2, 3], 2.0), (2, &[4], 1.0)]);
        let sol = budgeted_single_pass(&stream, 2.0, 3.0).unwrap();
        assert_eq!(sol.chosen, vec![1]);
        assert_eq!(sol.exact_coverage, 3);
        assert_eq!(sol.exact_coverage, brute_force_budgeted(&stream, 2.0).unwrap().exact_coverage);
    }

    #[test]
    fn overflow_switches_to_the_bigger_set() {
        let stream = costed(&[(1, &[1], 1.0), (2, &[2, 3, 4, 5], 2.0)]);
        let sol = budgeted_single_pass(&stream, 2.0, 3.0).unwrap();
        assert_eq!(sol.chosen, vec![2]);
        assert_eq!(sol.exact_coverage, 4);
        assert_eq!(stream.passes_consumed(), 1);
    }

    #[test]
    fn free_sets_need_a_nonempty_residual() {
        let stream = costed(&[(1, &[1, 2], 0.0), (2, &[1], 0.0), (3, &[3], 0.0)]);
        let sol = budgeted_single_pass(&stream, 1.0, 50.0).unwrap();
        assert_eq!(sol.chosen, vec![1, 3]);
    }

    #[test]
    fn full_budget_single_set() {
        let stream = costed(&[(7, &[1, 2, 3], 5.0)]);
        let sol = budgeted_single_pass(&stream, 5.0, 4.0).unwrap();
        assert_eq!(sol.chosen, vec![7]);
    }

    #[test]
    fn cost_above_budget_is_rejected() {
        let stream = costed(&[(1, &[1], 3.0)]);
        assert!(matches!(budgeted_single_pass(&stream, 2.0, 1.0), Err(Error::Format { .. })));
    }
}
