//! Set systems as replayable, pass-counting streams.
//!
//! A [`SetStream`] owns its records and hands them out only through
//! [`SetStream::replay`], one full traversal at a time. Every traversal that
//! runs to exhaustion bumps the stream's pass counter, which is how the
//! streaming algorithms prove how many passes they used. Offline oracles and
//! reporting code use [`SetStream::audit`] instead, which is explicitly not a
//! streaming pass.
//!
//! The text formats (plain, budgeted, grouped, graph) live in [`parse`];
//! dynamic (hyper)graph streams in [`graph`].

mod graph;
mod ledger;
mod parse;

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};

pub use graph::{materialize_graph, EdgeSign, EdgeUpdate, Hyperedge, Hypergraph};
pub use ledger::SpaceLedger;
pub use parse::{
    parse_graph_stream, parse_set_stream, read_graph_stream, read_set_stream, write_graph_stream,
    write_set_stream, RecordKind,
};

use crate::error::{Error, Result};

pub type SetId = u64;
pub type ElementId = u64;
pub type NodeId = u64;

/// One set of the stream: its ID, its elements, and the optional per-set
/// attribute used by the budgeted and grouped variants.
#[derive(Clone, Debug, PartialEq)]
pub struct SetRecord {
    pub id: SetId,
    pub elements: Vec<ElementId>,
    pub cost: Option<f64>,
    pub group: Option<usize>,
}

impl SetRecord {
    pub fn new(id: SetId, elements: impl Into<Vec<ElementId>>) -> Self {
        SetRecord { id, elements: elements.into(), cost: None, group: None }
    }

    pub fn with_cost(mut self, cost: f64) -> Self {
        self.cost = Some(cost);
        self
    }

    pub fn with_group(mut self, group: usize) -> Self {
        self.group = Some(group);
        self
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// A replayable sequence of [`SetRecord`]s over the universe `[0, n)`.
#[derive(Debug)]
pub struct SetStream {
    records: Vec<SetRecord>,
    universe_size: u64,
    kind: RecordKind,
    passes: AtomicUsize,
}

impl SetStream {
    /// Builds a stream, validating ID uniqueness and element distinctness.
    ///
    /// `universe_size` defaults to one more than the largest element seen.
    pub fn new(records: Vec<SetRecord>, universe_size: Option<u64>) -> Result<Self> {
        let kind = match records.first() {
            Some(r) if r.cost.is_some() => RecordKind::Budgeted,
            Some(r) if r.group.is_some() => RecordKind::Grouped,
            _ => RecordKind::Plain,
        };
        Self::with_kind(records, universe_size, kind)
    }

    pub(crate) fn with_kind(
        records: Vec<SetRecord>,
        universe_size: Option<u64>,
        kind: RecordKind,
    ) -> Result<Self> {
        let mut ids = HashSet::with_capacity(records.len());
        let mut max_element: Option<ElementId> = None;
        for (index, record) in records.iter().enumerate() {
            if !ids.insert(record.id) {
                return Err(Error::Format {
                    line: None,
                    message: format!("duplicate set id {} (record {index})", record.id),
                });
            }
            let mut seen = HashSet::with_capacity(record.elements.len());
            for &e in &record.elements {
                if !seen.insert(e) {
                    return Err(Error::Format {
                        line: None,
                        message: format!("duplicate element {e} in set {}", record.id),
                    });
                }
                max_element = Some(max_element.map_or(e, |m| m.max(e)));
            }
        }
        let observed = max_element.map_or(0, |m| m + 1);
        let universe_size = match universe_size {
            Some(n) if n < observed => {
                return Err(Error::Format {
                    line: None,
                    message: format!("universe size {n} but element {} present", observed - 1),
                })
            }
            Some(n) => n,
            None => observed,
        };
        Ok(SetStream { records, universe_size, kind, passes: AtomicUsize::new(0) })
    }

    /// Starts a new traversal. Only traversals that reach the end count as a pass.
    pub fn replay(&self) -> Replay<'_> {
        Replay { stream: self, position: 0, finished: false }
    }

    /// Number of completed traversals so far.
    pub fn passes_consumed(&self) -> usize {
        self.passes.load(Ordering::SeqCst)
    }

    /// Random access to the records for oracles and reporting. Not a pass.
    pub fn audit(&self) -> &[SetRecord] {
        &self.records
    }

    /// m
    pub fn total_sets(&self) -> usize {
        self.records.len()
    }

    /// n
    pub fn universe_size(&self) -> u64 {
        self.universe_size
    }

    pub fn kind(&self) -> RecordKind {
        self.kind
    }

    /// Number of distinct elements covered by the given sets, computed
    /// offline. Unknown IDs are ignored.
    pub fn coverage_of(&self, ids: &[SetId]) -> u64 {
        let wanted: HashSet<SetId> = ids.iter().copied().collect();
        let mut covered = HashSet::new();
        for record in self.records.iter().filter(|r| wanted.contains(&r.id)) {
            covered.extend(record.elements.iter().copied());
        }
        covered.len() as u64
    }
}

/// Cursor over one traversal of a [`SetStream`].
pub struct Replay<'a> {
    stream: &'a SetStream,
    position: usize,
    finished: bool,
}

impl<'a> Iterator for Replay<'a> {
    type Item = &'a SetRecord;

    fn next(&mut self) -> Option<Self::Item> {
        if let Some(record) = self.stream.records.get(self.position) {
            self.position += 1;
            return Some(record);
        }
        if !self.finished {
            self.finished = true;
            self.stream.passes.fetch_add(1, Ordering::SeqCst);
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_sets() -> SetStream {
        SetStream::new(vec![SetRecord::new(1, vec![1, 2]), SetRecord::new(2, vec![3])], None)
            .unwrap()
    }

    #[test]
    fn replay_twice_yields_same_records() {
        let stream = two_sets();
        let first: Vec<_> = stream.replay().cloned().collect();
        let second: Vec<_> = stream.replay().cloned().collect();
        assert_eq!(first, second);
        assert_eq!(first.len(), 2);
        assert_eq!(stream.passes_consumed(), 2);
    }

    #[test]
    fn empty_stream_counts_one_pass() {
        let stream = SetStream::new(vec![], None).unwrap();
        assert_eq!(stream.replay().count(), 0);
        assert_eq!(stream.passes_consumed(), 1);
        assert_eq!(stream.universe_size(), 0);
    }

    #[test]
    fn partial_replays_do_not_count() {
        let stream = two_sets();
        let mut a = stream.replay();
        let mut b = stream.replay();
        a.next();
        b.next();
        a.next();
        assert_eq!(stream.passes_consumed(), 0);
        assert!(a.next().is_none());
        assert!(a.next().is_none());
        assert_eq!(stream.passes_consumed(), 1);
        drop(b);
        assert_eq!(stream.passes_consumed(), 1);
    }

    #[test]
    fn rejects_duplicate_ids_and_elements() {
        let dup_id = SetStream::new(vec![SetRecord::new(1, vec![1]), SetRecord::new(1, vec![2])], None);
        assert!(matches!(dup_id, Err(Error::Format { .. })));
        let dup_elem = SetStream::new(vec![SetRecord::new(1, vec![1, 1])], None);
        assert!(matches!(dup_elem, Err(Error::Format { .. })));
    }

    #[test]
    fn universe_defaults_to_max_plus_one() {
        assert_eq!(two_sets().universe_size(), 4);
        assert!(SetStream::new(vec![SetRecord::new(1, vec![9])], Some(5)).is_err());
    }

    #[test]
    fn coverage_of_counts_distinct_elements() {
        let stream = two_sets();
        assert_eq!(stream.coverage_of(&[1, 2]), 3);
        assert_eq!(stream.coverage_of(&[2]), 1);
        assert_eq!(stream.passes_consumed(), 0);
    }
}
