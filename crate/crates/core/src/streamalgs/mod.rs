//! Thresholded streaming algorithms for maximum coverage.
//!
//! Each algorithm is a push-based state machine ([`StreamingAlgorithm`]): a
//! driver announces passes, feeds records in stream order, and finally asks
//! for the [`Solution`]. Algorithms never see the stream itself, so they
//! cannot peek ahead or revisit a record outside of a new pass. The same
//! state machines run directly over a [`SetStream`] (see [`drive`]) or inside
//! the guessing framework over a subsampled universe.
//!
//! All algorithms except [`sketch_all`] track the covered set `C` exactly.

mod budgeted;
mod group;
mod half;
mod multipass;
mod sketch_all;
mod threshold;

pub use budgeted::{budgeted_single_pass, BudgetedSinglePass};
pub use group::{group_multi_pass, group_multi_pass_budget, group_single_pass, GroupMultiPass, GroupSinglePass};
pub use half::{half_single_pass, HalfSinglePass};
pub use multipass::{multi_pass_budget, multi_pass_threshold, MultiPassThreshold};
pub use sketch_all::sketch_all;
pub use threshold::{boosted_single_pass, single_pass_threshold, ThresholdSinglePass};

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::offline::Solution;
use crate::setstream::{ElementId, SetRecord, SetStream};

/// What an algorithm did with one record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Added to the solution during the stream.
    Admitted,
    /// Residual kept for post-processing.
    Stored,
    /// Neither kept nor chosen.
    Skipped,
}

/// Slots held right now (not the peak).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Usage {
    pub element_slots: usize,
    pub set_id_slots: usize,
}

pub trait StreamingAlgorithm {
    /// Opens the next pass. Returns `false` once no further pass is wanted.
    fn begin_pass(&mut self) -> bool;

    fn observe(&mut self, record: &SetRecord) -> Result<Outcome>;

    /// `|C|` on the universe the algorithm sees.
    fn covered_count(&self) -> usize;

    fn usage(&self) -> Usage;

    /// Runs post-processing and returns the solution with its ledger.
    fn finish(self: Box<Self>) -> Result<Solution>;
}

/// Runs `algorithm` over `stream`, one full replay per requested pass.
pub fn drive<A: StreamingAlgorithm>(stream: &SetStream, algorithm: A) -> Result<Solution> {
    let mut algorithm = Box::new(algorithm);
    while algorithm.begin_pass() {
        for record in stream.replay() {
            algorithm.observe(record)?;
        }
    }
    algorithm.finish()
}

/// Elements of `record` not yet in `covered`, in record order.
pub(crate) fn residual(record: &SetRecord, covered: &HashSet<ElementId>) -> Vec<ElementId> {
    record.elements.iter().copied().filter(|e| !covered.contains(e)).collect()
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("epsilon {epsilon} outside (0, 1)")))
    }
}

pub(crate) fn check_positive_guess(z: f64) -> Result<()> {
    if z > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("guess z = {z} must be positive")))
    }
}

/// Tracks `|I|`, `C`, and the pick trace shared by every exact-coverage algorithm.
#[derive(Debug, Default)]
pub(crate) struct Cover {
    pub chosen: Vec<u64>,
    pub covered: HashSet<ElementId>,
    pub gains: Vec<u64>,
}

impl Cover {
    /// Adds `id` with its residual elements.
    pub fn admit(&mut self, id: u64, residual: Vec<ElementId>) {
        self.gains.push(residual.len() as u64);
        self.covered.extend(residual);
        self.chosen.push(id);
    }

    pub fn into_solution(self) -> Solution {
        Solution {
            exact_coverage: self.covered.len() as u64,
            chosen: self.chosen,
            gains: self.gains,
            ..Default::default()
        }
    }
}
