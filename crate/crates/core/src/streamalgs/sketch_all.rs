use crate::distinct::{F0Sketch, SketchFamily};
use crate::error::{Error, Result};
use crate::offline::{binomial, check_cap, Solution};
use crate::setstream::{SetId, SetStream, SpaceLedger};

/// Sketches every set in one pass, then picks the `k`-subset whose merged
/// sketch estimates the largest union. Ties go to the smallest ID list.
/// The sketches target failure probability `1/(n·m^k)`.
pub fn sketch_all(stream: &SetStream, k: usize, epsilon: f64, seed: u64, cap: u64) -> Result<Solution> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let m = stream.total_sets();
    let choose = k.min(m);
    check_cap(binomial(m, choose), cap)?;
    let n = stream.universe_size().max(1) as f64;
    let ln_inv_delta = n.ln() + k as f64 * (m.max(1) as f64).ln();
    let family = SketchFamily::for_log_inverse_delta(epsilon, ln_inv_delta, seed)?;

    let mut ledger = SpaceLedger::new();
    ledger.record_pass();
    let mut sketches: Vec<(SetId, F0Sketch)> = Vec::with_capacity(m);
    let mut registers = 0;
    for record in stream.replay() {
        let sketch = family.sketch_of(record.elements.iter().copied());
        registers += sketch.registers();
        sketches.push((record.id, sketch));
        ledger.record_sketch_registers(registers);
        ledger.record_set_ids(sketches.len());
    }
    sketches.sort_by_key(|(id, _)| *id);

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut current = Vec::with_capacity(choose);
    search(&sketches, choose, 0, &family.empty_sketch(), &mut current, &mut best)?;

    let (estimate, indices) = best.unwrap_or((0.0, Vec::new()));
    let chosen: Vec<SetId> = indices.iter().map(|&i| sketches[i].0).collect();
    Ok(Solution {
        exact_coverage: stream.coverage_of(&chosen),
        chosen,
        estimated_coverage: Some(estimate),
        gains: Vec::new(),
        ledger,
    })
}

fn search(
    sketches: &[(SetId, F0Sketch)],
    remaining: usize,
    from: usize,
    prefix: &F0Sketch,
    current: &mut Vec<usize>,
    best: &mut Option<(f64, Vec<usize>)>,
) -> Result<()> {
    if remaining == 0 {
        let estimate = prefix.estimate();
        if best.as_ref().is_none_or(|(b, _)| estimate > *b) {
            *best = Some((estimate, current.clone()));
        }
        return Ok(());
    }
    for i in from..=sketches.len() - remaining {
        let mut merged = prefix.clone();
        merged.merge_from(&sketches[i].1)?;
        current.push(i);
        search(sketches, remaining - 1, i + 1, &merged, current, best)?;
        current.pop();
    }
    Ok(())
}
