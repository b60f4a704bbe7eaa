use std::collections::{BTreeMap, BTreeSet};

use super::NodeId;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeSign {
    Insert,
    Delete,
}

/// One update of a dynamic (hyper)graph stream. Nodes are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeUpdate {
    pub sign: EdgeSign,
    pub nodes: Vec<NodeId>,
}

impl EdgeUpdate {
    pub fn new(sign: EdgeSign, mut nodes: Vec<NodeId>) -> Result<Self, String> {
        if nodes.is_empty() {
            return Err("an edge needs at least one node".into());
        }
        nodes.sort_unstable();
        if nodes.windows(2).any(|w| w[0] == w[1]) {
            return Err(format!("repeated node in edge {nodes:?}"));
        }
        Ok(EdgeUpdate { sign, nodes })
    }

    pub fn insert(nodes: Vec<NodeId>) -> Self {
        Self::new(EdgeSign::Insert, nodes).expect("valid edge")
    }

    pub fn delete(nodes: Vec<NodeId>) -> Self {
        Self::new(EdgeSign::Delete, nodes).expect("valid edge")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hyperedge {
    pub nodes: Vec<NodeId>,
    pub weight: f64,
}

/// A weighted hypergraph. Parallel edges are allowed and counted separately.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypergraph {
    nodes: Vec<NodeId>,
    edges: Vec<Hyperedge>,
}

impl Hypergraph {
    /// The node set is `nodes` plus every node named by an edge.
    pub fn new(nodes: impl IntoIterator<Item = NodeId>, edges: Vec<Hyperedge>) -> Result<Self> {
        let mut all: BTreeSet<NodeId> = nodes.into_iter().collect();
        let mut edges = edges;
        for edge in &mut edges {
            if !(edge.weight.is_finite() && edge.weight > 0.0) {
                return Err(Error::Domain(format!("edge weight {} not positive", edge.weight)));
            }
            edge.nodes.sort_unstable();
            if edge.nodes.is_empty() || edge.nodes.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Domain(format!("bad edge node list {:?}", edge.nodes)));
            }
            all.extend(edge.nodes.iter().copied());
        }
        Ok(Hypergraph { nodes: all.into_iter().collect(), edges })
    }

    /// Unit-weight hypergraph on the nodes its edges mention.
    pub fn from_edges(edges: impl IntoIterator<Item = Vec<NodeId>>) -> Result<Self> {
        let edges = edges.into_iter().map(|nodes| Hyperedge { nodes, weight: 1.0 }).collect();
        Self::new(std::iter::empty(), edges)
    }

    /// Sorted node IDs.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Largest edge arity (d).
    pub fn rank(&self) -> usize {
        self.edges.iter().map(|e| e.nodes.len()).max().unwrap_or(0)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Number of edges containing each node (isolated nodes included with 0).
    pub fn degrees(&self) -> BTreeMap<NodeId, usize> {
        let mut degrees: BTreeMap<NodeId, usize> = self.nodes.iter().map(|&v| (v, 0)).collect();
        for edge in &self.edges {
            for v in &edge.nodes {
                *degrees.get_mut(v).expect("edge nodes are graph nodes") += 1;
            }
        }
        degrees
    }
}

/// Replays a dynamic stream and returns the live edge multiset.
///
/// Edges come out in sorted order of their node lists; the node set is the
/// set of nodes touched by live edges.
pub fn materialize_graph(updates: &[EdgeUpdate]) -> Result<Hypergraph> {
    let mut live: BTreeMap<Vec<NodeId>, usize> = BTreeMap::new();
    for (index, update) in updates.iter().enumerate() {
        match update.sign {
            EdgeSign::Insert => *live.entry(update.nodes.clone()).or_default() += 1,
            EdgeSign::Delete => match live.get_mut(&update.nodes) {
                Some(count) if *count > 0 => {
                    *count -= 1;
                    if *count == 0 {
                        live.remove(&update.nodes);
                    }
                }
                _ => {
                    return Err(Error::StreamConsistency {
                        index,
                        message: format!("delete of edge {:?} that is not live", update.nodes),
                    })
                }
            },
        }
    }
    let edges = live
        .into_iter()
        .flat_map(|(nodes, count)| std::iter::repeat_n(nodes, count))
        .map(|nodes| Hyperedge { nodes, weight: 1.0 })
        .collect();
    Hypergraph::new(std::iter::empty(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: NodeId = 0;
    const B: NodeId = 1;
    const C: NodeId = 2;
    const V: NodeId = 3;

    #[test]
    fn delete_removes_insert() {
        let g = materialize_graph(&[
            EdgeUpdate::insert(vec![A, B]),
            EdgeUpdate::insert(vec![B, C]),
            EdgeUpdate::delete(vec![A, B]),
        ])
        .unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges()[0].nodes, vec![B, C]);
        assert_eq!(g.nodes(), &[B, C]);
    }

    #[test]
    fn rank_three_edges() {
        let g = materialize_graph(&[
            EdgeUpdate::insert(vec![A, B, V]),
            EdgeUpdate::insert(vec![B, C, V]),
            EdgeUpdate::insert(vec![C, A, V]),
        ])
        .unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.rank(), 3);
    }

    #[test]
    fn delete_before_insert_fails() {
        let err = materialize_graph(&[EdgeUpdate::delete(vec![A, B])]).unwrap_err();
        assert!(matches!(err, Error::StreamConsistency { index: 0, .. }));
    }

    #[test]
    fn parallel_edges_keep_multiplicity() {
        let g = materialize_graph(&[
            EdgeUpdate::insert(vec![A, B]),
            EdgeUpdate::insert(vec![B, A]),
            EdgeUpdate::delete(vec![A, B]),
            EdgeUpdate::insert(vec![A, B]),
        ])
        .unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degrees()[&A], 2);
    }
}
