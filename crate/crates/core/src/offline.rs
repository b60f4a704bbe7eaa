//! Exhaustive oracles and greedy baselines over materialized instances.
//!
//! Every tie is broken toward the lexicographically smallest ID list so that
//! oracles and baselines are reproducible. Enumeration is guarded by an
//! explicit cap; exceeding it is an error, never a silent fallback.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::setstream::{ElementId, Hypergraph, SetId, SetRecord, SetStream, SpaceLedger};

pub const DEFAULT_ORACLE_CAP: u64 = 10_000_000;

/// Largest stream the budgeted oracle will enumerate (2^m subsets).
pub const BUDGETED_MAX_SETS: usize = 25;

/// Chosen sets (or nodes) with their coverage and the space the run used.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Solution {
    /// Set or node IDs in the order they were chosen.
    pub chosen: Vec<u64>,
    pub exact_coverage: u64,
    pub estimated_coverage: Option<f64>,
    /// Marginal gain of each pick, in pick order, on the instance the
    /// algorithm saw.
    pub gains: Vec<u64>,
    pub ledger: SpaceLedger,
}

impl Solution {
    pub(crate) fn from_picks(picks: &[Pick]) -> Self {
        Solution {
            chosen: picks.iter().map(|p| p.id).collect(),
            exact_coverage: picks.iter().map(|p| p.gain).sum(),
            gains: picks.iter().map(|p| p.gain).collect(),
            ..Default::default()
        }
    }

    pub fn sorted_ids(&self) -> Vec<u64> {
        let mut ids = self.chosen.clone();
        ids.sort_unstable();
        ids
    }
}

/// One post-processing pick: a leftover's ID and how many new elements it covered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pick {
    pub id: SetId,
    pub gain: u64,
}

/// `C(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub(crate) fn check_cap(required: u128, cap: u64) -> Result<()> {
    if required > cap as u128 {
        Err(Error::OracleTooLarge { required, cap })
    } else {
        Ok(())
    }
}

/// Dense bitset over a compacted element index.
#[derive(Clone, Debug)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub(crate) fn zeros(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    pub(crate) fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    pub(crate) fn count(&self) -> u64 {
        self.0.iter().map(|w| w.count_ones() as u64).sum()
    }
}

/// Compacts element IDs so set families can be held as bitsets.
pub(crate) fn to_bitsets<'a>(sets: impl IntoIterator<Item = &'a [ElementId]> + Clone) -> Vec<Bits> {
    let mut index: HashMap<ElementId, usize> = HashMap::new();
    for set in sets.clone() {
        for &e in set {
            let next = index.len();
            index.entry(e).or_insert(next);
        }
    }
    sets.into_iter()
        .map(|set| {
            let mut bits = Bits::zeros(index.len());
            for e in set {
                bits.set(index[e]);
            }
            bits
        })
        .collect()
}

/// Best `choose`-subset of `sets` (indices ascending) by union size; among
/// equals the lexicographically first, which is the smallest ID list when
/// `sets` is ordered by ID.
pub(crate) fn best_combination(sets: &[Bits], choose: usize, start: &Bits) -> (Vec<usize>, u64) {
    fn recurse(
        sets: &[Bits],
        remaining: usize,
        from: usize,
        prefix: &Bits,
        current: &mut Vec<usize>,
        best: &mut (Vec<usize>, u64),
    ) {
        if remaining == 0 {
            let value = prefix.count();
            if value > best.1 || best.0.is_empty() && value == best.1 && !current.is_empty() {
                *best = (current.clone(), value);
            }
            return;
        }
        for i in from..=sets.len() - remaining {
            let mut union = prefix.clone();
            union.union_with(&sets[i]);
            current.push(i);
            recurse(sets, remaining - 1, i + 1, &union, current, best);
            current.pop();
        }
    }
    let choose = choose.min(sets.len());
    let mut best = (Vec::new(), start.count());
    if choose == 0 {
        return best;
    }
    recurse(sets, choose, 0, start, &mut Vec::new(), &mut best);
    best
}

fn sorted_records(stream: &SetStream) -> Vec<&SetRecord> {
    let mut records: Vec<&SetRecord> = stream.audit().iter().collect();
    records.sort_by_key(|r| r.id);
    records
}

/// The optimal `k` sets, by exhaustive enumeration.
pub fn brute_force_opt(stream: &SetStream, k: usize, cap: u64) -> Result<Solution> {
    let records = sorted_records(stream);
    let choose = k.min(records.len());
    check_cap(binomial(records.len(), choose), cap)?;
    let bits = to_bitsets(records.iter().map(|r| r.elements.as_slice()));
    let universe = bits.first().map_or(0, |b| b.0.len() * 64);
    let (indices, coverage) = best_combination(&bits, choose, &Bits::zeros(universe));
    Ok(Solution {
        chosen: indices.iter().map(|&i| records[i].id).collect(),
        exact_coverage: coverage,
        ..Default::default()
    })
}

/// Classic greedy: `k` rounds of the largest marginal gain, ties to the smaller ID.
pub fn greedy_opt(stream: &SetStream, k: usize) -> Solution {
    let leftovers: Vec<(SetId, Vec<ElementId>)> =
        stream.audit().iter().map(|r| (r.id, r.elements.clone())).collect();
    let mut covered = HashSet::new();
    Solution::from_picks(&greedy_pick_from_leftovers(&leftovers, &mut covered, k))
}

/// Greedily adds up to `slots` leftovers to `covered`. Stops early once no
/// leftover adds anything.
pub fn greedy_pick_from_leftovers(
    leftovers: &[(SetId, Vec<ElementId>)],
    covered: &mut HashSet<ElementId>,
    slots: usize,
) -> Vec<Pick> {
    let mut taken = vec![false; leftovers.len()];
    let mut picks = Vec::new();
    for _ in 0..slots {
        let best = leftovers
            .iter()
            .enumerate()
            .filter(|(i, _)| !taken[*i])
            .map(|(i, (id, elems))| {
                let gain = elems.iter().filter(|e| !covered.contains(e)).count() as u64;
                (i, *id, gain)
            })
            .filter(|&(_, _, gain)| gain > 0)
            .max_by(|a, b| a.2.cmp(&b.2).then(b.1.cmp(&a.1)));
        let Some((i, id, gain)) = best else { break };
        taken[i] = true;
        covered.extend(leftovers[i].1.iter().copied());
        picks.push(Pick { id, gain });
    }
    picks
}

/// Exhaustively picks up to `slots` leftovers maximizing the additional
/// coverage over `covered`, then adds them to `covered`.
pub fn exact_pick_from_leftovers(
    leftovers: &[(SetId, Vec<ElementId>)],
    covered: &mut HashSet<ElementId>,
    slots: usize,
    cap: u64,
) -> Result<Vec<Pick>> {
    let mut useful: Vec<(SetId, Vec<ElementId>)> = leftovers
        .iter()
        .map(|(id, elems)| (*id, elems.iter().copied().filter(|e| !covered.contains(e)).collect()))
        .filter(|(_, residual): &(SetId, Vec<ElementId>)| !residual.is_empty())
        .collect();
    useful.sort_by_key(|(id, _)| *id);
    let choose = slots.min(useful.len());
    check_cap(binomial(useful.len(), choose), cap)?;
    let bits = to_bitsets(useful.iter().map(|(_, r)| r.as_slice()));
    let universe = bits.first().map_or(0, |b| b.0.len() * 64);
    let (indices, _) = best_combination(&bits, choose, &Bits::zeros(universe));

    let mut picks = Vec::new();
    for i in indices {
        let (id, residual) = &useful[i];
        let gain = residual.iter().filter(|e| !covered.contains(e)).count() as u64;
        if gain > 0 {
            covered.extend(residual.iter().copied());
            picks.push(Pick { id: *id, gain });
        }
    }
    Ok(picks)
}

/// Optimal budget-feasible collection: most coverage, then least cost, then
/// smallest ID list.
pub fn brute_force_budgeted(stream: &SetStream, budget: f64) -> Result<Solution> {
    let records = sorted_records(stream);
    if records.len() > BUDGETED_MAX_SETS {
        return Err(Error::OracleTooLarge {
            required: 1u128 << records.len(),
            cap: 1u64 << BUDGETED_MAX_SETS,
        });
    }
    let costs = records
        .iter()
        .map(|r| {
            r.cost.ok_or_else(|| Error::Format {
                line: None,
                message: format!("set {} has no cost", r.id),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let bits = to_bitsets(records.iter().map(|r| r.elements.as_slice()));
    let universe = bits.first().map_or(0, |b| b.0.len() * 64);

    let mut best: (u64, f64, Vec<SetId>) = (0, 0.0, Vec::new());
    for mask in 1u64..(1u64 << records.len()) {
        let members = (0..records.len()).filter(|i| mask >> i & 1 == 1);
        let cost: f64 = members.clone().map(|i| costs[i]).sum();
        if cost > budget {
            continue;
        }
        let mut union = Bits::zeros(universe);
        for i in members.clone() {
            union.union_with(&bits[i]);
        }
        let coverage = union.count();
        let ids: Vec<SetId> = members.map(|i| records[i].id).collect();
        let better = coverage > best.0
            || coverage == best.0 && (cost < best.1 || cost == best.1 && ids < best.2);
        if better {
            best = (coverage, cost, ids);
        }
    }
    Ok(Solution { chosen: best.2, exact_coverage: best.0, ..Default::default() })
}

/// Best selection taking at most `quotas[g]` sets from each group `g`.
pub fn brute_force_group(stream: &SetStream, quotas: &[usize], cap: u64) -> Result<Solution> {
    let mut groups: Vec<Vec<&SetRecord>> = vec![Vec::new(); quotas.len()];
    for record in sorted_records(stream) {
        match record.group {
            Some(g) if g < quotas.len() => groups[g].push(record),
            other => {
                return Err(Error::Format {
                    line: None,
                    message: format!("set {} has group {other:?}, expected < {}", record.id, quotas.len()),
                })
            }
        }
    }
    let required = groups
        .iter()
        .zip(quotas)
        .map(|(g, &q)| binomial(g.len(), q.min(g.len())))
        .try_fold(1u128, |acc, c| acc.checked_mul(c))
        .unwrap_or(u128::MAX);
    check_cap(required, cap)?;

    let all: Vec<&SetRecord> = groups.iter().flatten().copied().collect();
    let bits = to_bitsets(all.iter().map(|r| r.elements.as_slice()));
    let universe = bits.first().map_or(0, |b| b.0.len() * 64);
    let mut offsets = Vec::with_capacity(groups.len());
    let mut offset = 0;
    for g in &groups {
        offsets.push(offset);
        offset += g.len();
    }

    struct Search<'a> {
        groups: &'a [Vec<&'a SetRecord>],
        quotas: &'a [usize],
        offsets: &'a [usize],
        bits: &'a [Bits],
        best: Option<(u64, Vec<SetId>)>,
    }

    impl Search<'_> {
        fn groups_from(&mut self, g: usize, union: &Bits, chosen: &mut Vec<SetId>) {
            if g == self.groups.len() {
                let coverage = union.count();
                let mut ids = chosen.clone();
                ids.sort_unstable();
                let better = match &self.best {
                    None => true,
                    Some((c, best_ids)) => coverage > *c || coverage == *c && ids < *best_ids,
                };
                if better {
                    self.best = Some((coverage, ids));
                }
                return;
            }
            let take = self.quotas[g].min(self.groups[g].len());
            self.within(g, take, 0, union, chosen);
        }

        fn within(&mut self, g: usize, remaining: usize, from: usize, union: &Bits, chosen: &mut Vec<SetId>) {
            if remaining == 0 {
                return self.groups_from(g + 1, union, chosen);
            }
            let members = &self.groups[g];
            for i in from..=members.len() - remaining {
                let mut next = union.clone();
                next.union_with(&self.bits[self.offsets[g] + i]);
                chosen.push(members[i].id);
                self.within(g, remaining - 1, i + 1, &next, chosen);
                chosen.pop();
            }
        }
    }

    let mut search = Search {
        groups: &groups,
        quotas,
        offsets: &offsets,
        bits: &bits,
        best: None,
    };
    search.groups_from(0, &Bits::zeros(universe), &mut Vec::new());
    let (coverage, ids) = search.best.expect("at least one selection is enumerated");
    Ok(Solution { chosen: ids, exact_coverage: coverage, ..Default::default() })
}

/// Optimal `k` nodes by number of hyperedges they touch.
pub fn brute_force_vertex(graph: &Hypergraph, k: usize, cap: u64) -> Result<Solution> {
    let n = graph.node_count();
    let choose = k.min(n);
    check_cap(binomial(n, choose), cap)?;
    let position: HashMap<u64, usize> = graph.nodes().iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut incidence: Vec<Bits> = (0..n).map(|_| Bits::zeros(graph.edge_count())).collect();
    for (e, edge) in graph.edges().iter().enumerate() {
        for v in &edge.nodes {
            incidence[position[v]].set(e);
        }
    }
    let (indices, coverage) = best_combination(&incidence, choose, &Bits::zeros(graph.edge_count()));
    Ok(Solution {
        chosen: indices.iter().map(|&i| graph.nodes()[i]).collect(),
        exact_coverage: coverage,
        ..Default::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn toy_a() -> SetStream {
        SetStream::new(
            vec![
                SetRecord::new(1, vec![1, 2, 3, 4]),
                SetRecord::new(2, vec![5, 6, 7, 8]),
                SetRecord::new(3, vec![1, 2, 5, 6]),
                SetRecord::new(4, vec![3, 4, 7, 8]),
            ],
            None,
        )
        .unwrap()
    }

    fn stream_of(sets: &[(u64, &[u64])]) -> SetStream {
        SetStream::new(sets.iter().map(|(id, e)| SetRecord::new(*id, e.to_vec())).collect(), None)
            .unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(20, 4), 4845);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(1000, 500), u128::MAX);
    }

    #[test]
    fn opt_on_toy_a() {
        let s = brute_force_opt(&toy_a(), 2, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(s.exact_coverage, 8);
        assert_eq!(s.chosen, vec![1, 2]);
    }

    #[test]
    fn opt_with_k_at_least_m_takes_everything() {
        let s = brute_force_opt(&toy_a(), 9, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(s.chosen, vec![1, 2, 3, 4]);
        assert_eq!(s.exact_coverage, 8);
    }

    #[test]
    fn opt_with_k_one_is_largest_set() {
        let s = stream_of(&[(1, &[1]), (2, &[2, 3, 4]), (3, &[5, 6])]);
        assert_eq!(brute_force_opt(&s, 1, DEFAULT_ORACLE_CAP).unwrap().chosen, vec![2]);
    }

    #[test]
    fn opt_cap_is_an_error() {
        let err = brute_force_opt(&toy_a(), 2, 5).unwrap_err();
        assert!(matches!(err, Error::OracleTooLarge { required: 6, cap: 5 }));
    }

    #[test]
    fn greedy_hand_trace() {
        let s = stream_of(&[(1, &[1, 2]), (2, &[3, 4]), (3, &[1, 3])]);
        let sol = greedy_opt(&s, 2);
        assert_eq!(sol.chosen, vec![1, 2]);
        assert_eq!(sol.exact_coverage, 4);
        assert_eq!(greedy_opt(&s, 0).exact_coverage, 0);
        let disjoint = stream_of(&[(1, &[1, 2, 3]), (2, &[4, 5, 6]), (3, &[7, 8, 9])]);
        assert_eq!(greedy_opt(&disjoint, 2).exact_coverage, 6);
    }

    #[test]
    fn greedy_leftover_rules() {
        let mut covered: HashSet<u64> = [1, 2].into();
        let picks = greedy_pick_from_leftovers(&[(2, vec![3])], &mut covered, 1);
        assert_eq!(picks, vec![Pick { id: 2, gain: 1 }]);
        assert_eq!(covered, [1, 2, 3].into());

        let before = covered.clone();
        assert!(greedy_pick_from_leftovers(&[(5, vec![9])], &mut covered, 0).is_empty());
        assert_eq!(covered, before);

        let mut covered = HashSet::new();
        let picks = greedy_pick_from_leftovers(&[(7, vec![1, 2]), (4, vec![3, 4])], &mut covered, 1);
        assert_eq!(picks[0].id, 4);
    }

    #[test]
    fn exact_leftover_rules() {
        let leftovers = vec![(1, vec![1, 2]), (2, vec![2, 3]), (3, vec![3])];
        let mut covered = HashSet::new();
        let picks = exact_pick_from_leftovers(&leftovers, &mut covered, 2, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(picks.iter().map(|p| p.id).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(covered.len(), 3);

        let mut covered = HashSet::new();
        let picks = exact_pick_from_leftovers(&leftovers, &mut covered, 5, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(picks.len(), 2, "third set adds nothing after the first two");
        assert_eq!(covered.len(), 3);

        let mut covered: HashSet<u64> = [1, 2, 3].into();
        assert!(exact_pick_from_leftovers(&leftovers, &mut covered, 2, DEFAULT_ORACLE_CAP)
            .unwrap()
            .is_empty());
    }

    fn budgeted(sets: &[(u64, f64, &[u64])]) -> SetStream {
        SetStream::new(
            sets.iter().map(|(id, w, e)| SetRecord::new(*id, e.to_vec()).with_cost(*w)).collect(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn budgeted_oracle() {
        let s = budgeted(&[(1, 2.0, &[1, 2, 3]), (2, 1.0, &[4])]);
        let sol = brute_force_budgeted(&s, 2.0).unwrap();
        assert_eq!((sol.chosen.clone(), sol.exact_coverage), (vec![1], 3));
        assert_eq!(brute_force_budgeted(&s, 0.0).unwrap().exact_coverage, 0);
        assert_eq!(brute_force_budgeted(&s, 3.0).unwrap().chosen, vec![1, 2]);
    }

    #[test]
    fn budgeted_oracle_refuses_large_streams() {
        let sets: Vec<_> = (0..26).map(|i| SetRecord::new(i, vec![i]).with_cost(1.0)).collect();
        let s = SetStream::new(sets, None).unwrap();
        assert!(matches!(brute_force_budgeted(&s, 1.0), Err(Error::OracleTooLarge { .. })));
    }

    fn grouped(sets: &[(u64, usize, &[u64])]) -> SetStream {
        SetStream::new(
            sets.iter().map(|(id, g, e)| SetRecord::new(*id, e.to_vec()).with_group(*g)).collect(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn group_oracle() {
        let s = grouped(&[(1, 0, &[1, 2]), (2, 1, &[2, 3]), (3, 1, &[4])]);
        let sol = brute_force_group(&s, &[1, 1], DEFAULT_ORACLE_CAP).unwrap();
        // {1,2} ∪ {2,3} and {1,2} ∪ {4} both cover 3; the smaller ID list wins.
        assert_eq!((sol.chosen.clone(), sol.exact_coverage), (vec![1, 2], 3));
        let none = brute_force_group(&s, &[0, 0], DEFAULT_ORACLE_CAP).unwrap();
        assert!(none.chosen.is_empty());
        let all = brute_force_group(&s, &[5, 5], DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(all.chosen, vec![1, 2, 3]);
        assert!(brute_force_group(&s, &[1], DEFAULT_ORACLE_CAP).is_err());
    }

    #[test]
    fn vertex_oracle() {
        let triangle = Hypergraph::from_edges([vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        let sol = brute_force_vertex(&triangle, 1, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!((sol.chosen.clone(), sol.exact_coverage), (vec![0], 2));
        assert_eq!(brute_force_vertex(&triangle, 5, DEFAULT_ORACLE_CAP).unwrap().exact_coverage, 3);
        let star = Hypergraph::from_edges((1..=5).map(|leaf| vec![0, leaf])).unwrap();
        let sol = brute_force_vertex(&star, 1, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!((sol.chosen.clone(), sol.exact_coverage), (vec![0], 5));
    }
}
