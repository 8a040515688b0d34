//! Post-construction shrinking of a TB-DAG, preserving the set of
//! correlation plans up to terminal aliasing:
//!
//! 1. Terminal decision nodes whose TFSDP terminals share a team sequence
//!    are deduplicated: the duplicate is deleted and the survivor's
//!    `terminals` list records the alias (their plan values are forced
//!    equal, so nothing is lost).
//! 2. Sections with no terminal descendants are dropped.
//! 3. A non-root decision node with exactly one incoming edge slot and a
//!    single prescription offers no choice and no information; it is
//!    spliced out, its children inherited by the parent edge.
//!
//! The passes run to a fixpoint, since splicing can expose new merges.

use std::collections::HashMap;

use crate::tfsdp::TeamTfsdp;

use super::{DagId, TbDag};

pub fn optimize(d: &TbDag, t: &TeamTfsdp) -> TbDag {
    let (team_seq, _) = t.team_sequence_ids();
    let mut dag = d.clone();
    loop {
        let mut changed = false;
        changed |= merge_terminals(&mut dag, &team_seq);
        changed |= prune_dead(&mut dag);
        changed |= splice_passthrough(&mut dag);
        if !changed {
            break;
        }
    }
    compact(&mut dag);
    dag.recompute_topo();
    dag
}

/// Merges terminal nodes whose TFSDP terminals all share one team
/// sequence. Returns whether anything changed.
fn merge_terminals(dag: &mut TbDag, team_seq: &[usize]) -> bool {
    // Only terminals with a uniform sequence are mergeable; nodes carrying
    // several distinct sequences (possible under public-states grouping)
    // are left alone.
    let mut by_seq: HashMap<usize, DagId> = HashMap::new();
    let mut replace: HashMap<DagId, DagId> = HashMap::new();
    for s in 0..dag.nodes.len() {
        if !dag.nodes[s].is_terminal() {
            continue;
        }
        let seqs: Vec<usize> = dag.nodes[s].terminals.iter().map(|&z| team_seq[z]).collect();
        if seqs.windows(2).any(|w| w[0] != w[1]) {
            continue;
        }
        match by_seq.get(&seqs[0]) {
            Some(&keep) => {
                replace.insert(s, keep);
            }
            None => {
                by_seq.insert(seqs[0], s);
            }
        }
    }
    if replace.is_empty() {
        return false;
    }
    // Deletion, not redirection: a duplicate terminal's plan value is
    // forced equal to the survivor's (pure flows reach exactly the
    // terminals whose team sequence they play), so the node is dropped
    // and the survivor's alias list extended. Redirecting parents instead
    // would sum the two flows and double-count.
    for (&gone, &keep) in &replace {
        let moved = std::mem::take(&mut dag.nodes[gone].terminals);
        dag.nodes[keep].terminals.extend(moved);
        dag.nodes[keep].terminals.sort_unstable();
        dag.nodes[keep].terminals.dedup();
    }
    for n in &mut dag.nodes {
        for e in &mut n.edges {
            e.children.retain(|c| !replace.contains_key(c));
        }
    }
    true
}

/// Removes nodes from which no terminal is reachable. In a well-formed DAG
/// every path ends at a terminal belief, so this is a safeguard that only
/// fires on sections emptied by earlier passes.
fn prune_dead(dag: &mut TbDag) -> bool {
    let mut alive = vec![false; dag.nodes.len()];
    // Repeated sweeps; cheap because the DAG is shallow in practice.
    loop {
        let mut changed = false;
        for s in 0..dag.nodes.len() {
            if alive[s] {
                continue;
            }
            let ok = dag.nodes[s].is_terminal()
                || dag.nodes[s]
                    .edges
                    .iter()
                    .any(|e| e.children.iter().any(|&c| alive[c]));
            if ok {
                alive[s] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut any = false;
    for n in &mut dag.nodes {
        for e in &mut n.edges {
            let before = e.children.len();
            e.children.retain(|&c| alive[c]);
            any |= e.children.len() != before;
        }
        // Edges left with no children are kept: the prescription remains a
        // legal (if fruitless) choice, and removing it would force flow
        // into the sibling prescriptions' subtrees.
    }
    any
}

/// Splices out non-root decision nodes with exactly one incoming edge slot
/// and exactly one prescription.
fn splice_passthrough(dag: &mut TbDag) -> bool {
    let mut indeg = vec![0usize; dag.nodes.len()];
    for n in &dag.nodes {
        for e in &n.edges {
            for &c in &e.children {
                indeg[c] += 1;
            }
        }
    }
    let splice: Vec<bool> = (0..dag.nodes.len())
        .map(|s| {
            s != dag.root
                && !dag.nodes[s].is_terminal()
                && indeg[s] == 1
                && dag.nodes[s].edges.len() == 1
        })
        .collect();
    if !splice.iter().any(|&b| b) {
        return false;
    }
    for s in 0..dag.nodes.len() {
        let mut edges = std::mem::take(&mut dag.nodes[s].edges);
        for e in &mut edges {
            let mut out: Vec<DagId> = Vec::with_capacity(e.children.len());
            for &c in &e.children {
                if splice[c] {
                    // The child's single prescription is forced; its
                    // children hang directly from this edge. Chains are
                    // followed to the end.
                    let mut stack = dag.nodes[c].edges[0].children.clone();
                    while let Some(g) = stack.pop() {
                        if splice[g] {
                            stack.extend(dag.nodes[g].edges[0].children.iter().copied());
                        } else {
                            out.push(g);
                        }
                    }
                } else {
                    out.push(c);
                }
            }
            out.sort_unstable();
            out.dedup();
            e.children = out;
        }
        dag.nodes[s].edges = edges;
    }
    // Disconnect the spliced nodes so compaction drops them.
    for (s, &sp) in splice.iter().enumerate() {
        if sp {
            dag.nodes[s].edges.clear();
        }
    }
    true
}

/// Drops nodes unreachable from the root and renumbers the rest.
fn compact(dag: &mut TbDag) {
    let mut reach = vec![false; dag.nodes.len()];
    let mut stack = vec![dag.root];
    reach[dag.root] = true;
    while let Some(s) = stack.pop() {
        for e in &dag.nodes[s].edges {
            for &c in &e.children {
                if !reach[c] {
                    reach[c] = true;
                    stack.push(c);
                }
            }
        }
    }
    let mut new_id = vec![usize::MAX; dag.nodes.len()];
    let mut kept = Vec::new();
    for s in 0..dag.nodes.len() {
        if reach[s] {
            new_id[s] = kept.len();
            kept.push(dag.nodes[s].clone());
        }
    }
    for n in &mut kept {
        for e in &mut n.edges {
            for c in &mut e.children {
                *c = new_id[*c];
            }
        }
    }
    dag.root = new_id[dag.root];
    dag.nodes = kept;
}
