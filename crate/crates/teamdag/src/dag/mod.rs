//! The team belief DAG: decision nodes keyed by beliefs (sets of same-layer
//! TFSDP nodes), with observation nodes folded into prescription edges.
//!
//! A `DagEdge` bundles what is conceptually an observation node: taking
//! the edge's prescription from a belief leads to an observation set, whose
//! public-observation components are the edge's children. Folding keeps the
//! representation compact; raw (unfolded) vertex and edge counts are still
//! reported by [`explore::stats`].

mod build;
mod explore;
mod optimize;
mod report;

pub use build::{build, Grouping};
pub use explore::{
    best_response, correlation_plan, enumerate_pure, expected_value_of_pure, stats, PureStrategy,
    SizeReport,
};
pub use optimize::optimize;
pub use report::unfolded_optimized_counts;

use crate::game::NodeId;

pub type DagId = usize;

/// One prescription: the action chosen at each infoset intersecting the
/// belief, ordered by each infoset's minimal member node id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Prescription {
    pub actions: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct DagEdge {
    pub prescription: Prescription,
    pub children: Vec<DagId>,
}

#[derive(Debug, Clone)]
pub struct DagNode {
    /// Sorted TFSDP node ids forming the belief.
    pub belief: Vec<NodeId>,
    pub layer: usize,
    pub edges: Vec<DagEdge>,
    /// TFSDP terminal ids this node stands for; nonempty exactly for
    /// terminal decision nodes (more than one only after alias merging).
    pub terminals: Vec<NodeId>,
}

impl DagNode {
    pub fn is_terminal(&self) -> bool {
        !self.terminals.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct TbDag {
    pub nodes: Vec<DagNode>,
    pub root: DagId,
    /// Topological order (parents before children).
    pub topo: Vec<DagId>,
}

impl TbDag {
    /// (folded vertices, folded edges): decision nodes only, and one edge
    /// per (node, prescription, child) triple.
    pub fn folded_counts(&self) -> (usize, usize) {
        let v = self.nodes.len();
        let e = self
            .nodes
            .iter()
            .map(|n| n.edges.iter().map(|e| e.children.len()).sum::<usize>())
            .sum();
        (v, e)
    }

    /// (raw vertices, raw edges) with observation nodes unfolded: one
    /// observation node per (decision node, prescription), an edge into it,
    /// and an edge out to each child.
    pub fn raw_counts(&self) -> (usize, usize) {
        let presc: usize = self.nodes.iter().map(|n| n.edges.len()).sum();
        let out: usize = self
            .nodes
            .iter()
            .map(|n| n.edges.iter().map(|e| e.children.len()).sum::<usize>())
            .sum();
        (self.nodes.len() + presc, presc + out)
    }

    pub fn terminal_nodes(&self) -> Vec<DagId> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].is_terminal()).collect()
    }

    /// Recomputes `topo` with Kahn's algorithm; panics on a cycle, which
    /// would indicate corruption.
    pub fn recompute_topo(&mut self) {
        let mut indeg = vec![0usize; self.nodes.len()];
        for n in &self.nodes {
            for e in &n.edges {
                for &c in &e.children {
                    indeg[c] += 1;
                }
            }
        }
        let mut queue: Vec<DagId> = vec![self.root];
        debug_assert_eq!(indeg[self.root], 0);
        let mut topo = Vec::with_capacity(self.nodes.len());
        while let Some(s) = queue.pop() {
            topo.push(s);
            for e in &self.nodes[s].edges {
                for &c in &e.children {
                    indeg[c] -= 1;
                    if indeg[c] == 0 {
                        queue.push(c);
                    }
                }
            }
        }
        assert_eq!(topo.len(), self.nodes.len(), "unreachable or cyclic DAG nodes");
        self.topo = topo;
    }
}
