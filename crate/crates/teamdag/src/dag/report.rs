//! Size accounting on the unfolded DAG (explicit observation vertices),
//! after the same shrinking passes [`super::optimize`] applies — terminal
//! merging and splicing of pass-through decision nodes — but performed on
//! the unfolded graph, where a decision node is pass-through only when its
//! single prescription leads to a single observation vertex.
//!
//! [`super::TbDag::folded_counts`] measures the solver's working
//! representation; this module measures the same DAG in the unfolded
//! convention, which is the one meaningful for comparing against
//! sequence-form-style size reports.

use std::collections::HashMap;

use crate::tfsdp::TeamTfsdp;

use super::TbDag;

#[derive(Clone, Copy, PartialEq)]
enum RawKind {
    Decision,
    Observation,
    /// Terminal, tagged with its team sequence id.
    Terminal(usize),
}

struct RawGraph {
    kind: Vec<RawKind>,
    out: Vec<Vec<usize>>,
    root: usize,
}

impl RawGraph {
    /// Unfolds `d`: one vertex per decision node, one per (node,
    /// prescription) pair, edges decision -> observation -> child.
    fn unfold(d: &TbDag, t: &TeamTfsdp) -> Self {
        let (team_seq, _) = t.team_sequence_ids();
        let mut kind = Vec::with_capacity(d.nodes.len());
        let mut out: Vec<Vec<usize>> = Vec::with_capacity(d.nodes.len());
        for n in &d.nodes {
            kind.push(if n.is_terminal() {
                RawKind::Terminal(team_seq[n.terminals[0]])
            } else {
                RawKind::Decision
            });
            out.push(Vec::new());
        }
        for (i, n) in d.nodes.iter().enumerate() {
            for e in &n.edges {
                kind.push(RawKind::Observation);
                out.push(e.children.clone());
                let o = kind.len() - 1;
                out[i].push(o);
            }
        }
        RawGraph { kind, out, root: d.root }
    }

    fn reachable(&self) -> Vec<bool> {
        let mut reach = vec![false; self.kind.len()];
        let mut stack = vec![self.root];
        reach[self.root] = true;
        while let Some(v) = stack.pop() {
            for &c in &self.out[v] {
                if !reach[c] {
                    reach[c] = true;
                    stack.push(c);
                }
            }
        }
        reach
    }

    /// Merges reachable terminal vertices sharing a team sequence into one
    /// representative; duplicate resulting edges collapse.
    fn merge_terminals(&mut self) -> bool {
        let reach = self.reachable();
        let mut by_seq: HashMap<usize, usize> = HashMap::new();
        let mut replace: HashMap<usize, usize> = HashMap::new();
        for v in 0..self.kind.len() {
            if !reach[v] {
                continue;
            }
            if let RawKind::Terminal(s) = self.kind[v] {
                match by_seq.get(&s) {
                    Some(&keep) => {
                        replace.insert(v, keep);
                    }
                    None => {
                        by_seq.insert(s, v);
                    }
                }
            }
        }
        if replace.is_empty() {
            return false;
        }
        for o in self.out.iter_mut() {
            for c in o.iter_mut() {
                if let Some(&keep) = replace.get(c) {
                    *c = keep;
                }
            }
            o.sort_unstable();
            o.dedup();
        }
        true
    }

    /// Drops edges into sections with no terminal below (safeguard pass).
    fn prune_dead(&mut self) -> bool {
        let n = self.kind.len();
        let mut live = vec![false; n];
        loop {
            let mut changed = false;
            for v in 0..n {
                if live[v] {
                    continue;
                }
                if matches!(self.kind[v], RawKind::Terminal(_))
                    || self.out[v].iter().any(|&c| live[c])
                {
                    live[v] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut any = false;
        for o in self.out.iter_mut() {
            let before = o.len();
            o.retain(|&c| live[c]);
            any |= o.len() != before;
        }
        any
    }

    /// Splices out non-root decision vertices with exactly one parent and
    /// one child, chaining the parent directly to the child. Candidacy is
    /// judged once per pass; chains are followed to their end.
    fn splice_passthrough(&mut self) -> bool {
        let reach = self.reachable();
        let mut indeg = vec![0usize; self.kind.len()];
        for (v, o) in self.out.iter().enumerate() {
            if reach[v] {
                for &c in o {
                    indeg[c] += 1;
                }
            }
        }
        let candidate: Vec<bool> = (0..self.kind.len())
            .map(|v| {
                v != self.root
                    && reach[v]
                    && self.kind[v] == RawKind::Decision
                    && indeg[v] == 1
                    && self.out[v].len() == 1
            })
            .collect();
        if !candidate.iter().any(|&b| b) {
            return false;
        }
        for v in 0..self.kind.len() {
            if candidate[v] {
                continue;
            }
            let mut o = std::mem::take(&mut self.out[v]);
            for c in o.iter_mut() {
                while candidate[*c] {
                    *c = self.out[*c][0];
                }
            }
            o.sort_unstable();
            o.dedup();
            self.out[v] = o;
        }
        for (v, &cand) in candidate.iter().enumerate() {
            if cand {
                self.out[v].clear();
            }
        }
        true
    }

    fn counts(&self) -> (usize, usize) {
        let reach = self.reachable();
        let v = reach.iter().filter(|&&r| r).count();
        let e = (0..self.kind.len())
            .filter(|&i| reach[i])
            .map(|i| self.out[i].len())
            .sum();
        (v, e)
    }
}

/// (vertices, edges) of the unfolded DAG after terminal merging and
/// pass-through splicing. Call with the freshly built DAG (before
/// [`super::optimize`], whose folded splicing is more aggressive).
pub fn unfolded_optimized_counts(d: &TbDag, t: &TeamTfsdp) -> (usize, usize) {
    let mut g = RawGraph::unfold(d, t);
    loop {
        let mut changed = false;
        changed |= g.merge_terminals();
        changed |= g.prune_dead();
        changed |= g.splice_passthrough();
        if !changed {
            break;
        }
    }
    g.counts()
}
