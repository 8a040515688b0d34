//! Memoized TB-DAG construction from a timed team TFSDP.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::NodeId;
use crate::public::compute_public_structure;
use crate::tfsdp::TeamTfsdp;

use super::{DagEdge, DagId, DagNode, Prescription, TbDag};

/// How the observation set reached by a prescription is split into child
/// beliefs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    /// Connected components of the connectivity graph induced on the
    /// observation set.
    PublicObservations,
    /// Intersections with the global public states (a coarser grouping
    /// kept for the blowup comparison).
    PublicStates,
}

/// Builds the TB-DAG of `t`. Fails when `t` is untimed or when a
/// connectivity bug would put a terminal into a non-singleton belief.
pub fn build(t: &TeamTfsdp, grouping: Grouping) -> Result<TbDag> {
    let viol = t.validate();
    if let Some(v) = viol.iter().find(|v| v.kind == "not-timed") {
        let infoset = v
            .message
            .split_whitespace()
            .find_map(|w| w.parse::<usize>().ok())
            .unwrap_or(0);
        return Err(Error::NotTimed(infoset));
    }
    if !viol.is_empty() {
        return Err(Error::InvalidTfsdp(viol[0].to_string()));
    }

    // reach[h]: sorted infoset ids with a member at or below h; the
    // connectivity graph links same-layer nodes with intersecting reach.
    let reach = infoset_reach(t);
    let state_of = match grouping {
        Grouping::PublicObservations => None,
        Grouping::PublicStates => Some(compute_public_structure(t).state_of),
    };

    let mut memo: HashMap<Vec<NodeId>, DagId> = HashMap::new();
    let mut nodes: Vec<DagNode> = Vec::new();
    fn intern(
        memo: &mut HashMap<Vec<NodeId>, DagId>,
        nodes: &mut Vec<DagNode>,
        belief: Vec<NodeId>,
        layer: usize,
    ) -> (DagId, bool) {
        if let Some(&id) = memo.get(&belief) {
            return (id, false);
        }
        nodes.push(DagNode { belief: belief.clone(), layer, edges: Vec::new(), terminals: Vec::new() });
        let id = nodes.len() - 1;
        memo.insert(belief, id);
        (id, true)
    }

    let (root, _) = intern(&mut memo, &mut nodes, vec![t.root], t.nodes[t.root].layer);
    let mut queue: Vec<DagId> = vec![root];
    let mut head = 0;
    while head < queue.len() {
        let s = queue[head];
        head += 1;
        let belief = nodes[s].belief.clone();
        let n_terminal = belief.iter().filter(|&&h| t.nodes[h].is_terminal()).count();
        if n_terminal > 0 {
            // A belief may hold several terminals only when all its members
            // are terminal (they then act as aliases of one another, which
            // the public-states grouping can produce by merging equal
            // terminal team sequences); mixing signals a connectivity bug.
            if n_terminal != belief.len() {
                return Err(Error::MixedTerminalBelief(belief));
            }
            nodes[s].terminals = belief;
            continue;
        }

        // Infosets intersecting the belief, ordered by minimal member id,
        // with the members present.
        let mut by_infoset: Vec<(usize, Vec<NodeId>)> = Vec::new();
        let mut observation_nodes: Vec<NodeId> = Vec::new();
        for &h in &belief {
            match t.nodes[h].infoset() {
                Some(i) => match by_infoset.iter_mut().find(|(j, _)| *j == i) {
                    Some((_, v)) => v.push(h),
                    None => by_infoset.push((i, vec![h])),
                },
                None => observation_nodes.push(h),
            }
        }
        // `belief` is sorted, so first appearance == minimal member id.

        // Enumerate prescriptions in lexicographic action order.
        let action_counts: Vec<usize> = by_infoset
            .iter()
            .map(|(_, members)| t.nodes[members[0]].children.len())
            .collect();
        let mut choice = vec![0usize; by_infoset.len()];
        loop {
            let mut obs_set: Vec<NodeId> = Vec::new();
            for ((_, members), &a) in by_infoset.iter().zip(&choice) {
                for &h in members {
                    obs_set.push(t.nodes[h].children[a].child);
                }
            }
            for &h in &observation_nodes {
                for e in &t.nodes[h].children {
                    obs_set.push(e.child);
                }
            }
            obs_set.sort_unstable();
            obs_set.dedup();

            let components = split_observation(&reach, state_of.as_deref(), &obs_set);
            let prescription = Prescription {
                actions: by_infoset
                    .iter()
                    .zip(&choice)
                    .map(|((i, _), &a)| (*i, a))
                    .collect(),
            };
            let mut children = Vec::with_capacity(components.len());
            for comp in components {
                let layer = t.nodes[comp[0]].layer;
                let (c, new) = intern(&mut memo, &mut nodes, comp, layer);
                if new {
                    queue.push(c);
                }
                children.push(c);
            }
            nodes[s].edges.push(DagEdge { prescription, children });

            // Advance the mixed-radix counter; empty product = 1 pass.
            let mut k = 0;
            loop {
                if k == choice.len() {
                    break;
                }
                choice[k] += 1;
                if choice[k] < action_counts[k] {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }

    let mut dag = TbDag { nodes, root, topo: Vec::new() };
    dag.recompute_topo();
    Ok(dag)
}

/// For each node, the sorted ids of infosets with members at or below it.
fn infoset_reach(t: &TeamTfsdp) -> Vec<Vec<u32>> {
    let mut reach: Vec<Vec<u32>> = vec![Vec::new(); t.nodes.len()];
    let order = t.bfs_order();
    for &h in order.iter().rev() {
        let mut r: Vec<u32> = Vec::new();
        if let Some(i) = t.nodes[h].infoset() {
            r.push(i as u32);
        }
        for e in &t.nodes[h].children {
            r.extend_from_slice(&reach[e.child]);
        }
        r.sort_unstable();
        r.dedup();
        reach[h] = r;
    }
    reach
}

/// Splits an observation set into child beliefs: connected components of
/// the induced connectivity subgraph, or intersections with global public
/// states. Returned components are sorted, deterministic, nonempty.
fn split_observation(
    reach: &[Vec<u32>],
    state_of: Option<&[usize]>,
    obs_set: &[NodeId],
) -> Vec<Vec<NodeId>> {
    if let Some(state_of) = state_of {
        let mut by_state: Vec<(usize, Vec<NodeId>)> = Vec::new();
        for &h in obs_set {
            let s = state_of[h];
            match by_state.iter_mut().find(|(j, _)| *j == s) {
                Some((_, v)) => v.push(h),
                None => by_state.push((s, vec![h])),
            }
        }
        return by_state.into_iter().map(|(_, v)| v).collect();
    }

    // Union-find over positions in obs_set, seeded by shared infoset reach.
    let mut uf: Vec<usize> = (0..obs_set.len()).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    // Terminals have empty reach and so stay isolated, as required.
    let mut seen: HashMap<u32, usize> = HashMap::new();
    for (idx, &h) in obs_set.iter().enumerate() {
        for &i in &reach[h] {
            match seen.get(&i) {
                Some(&first) => {
                    let (a, b) = (find(&mut uf, first), find(&mut uf, idx));
                    if a != b {
                        uf[a] = b;
                    }
                }
                None => {
                    seen.insert(i, idx);
                }
            }
        }
    }
    let mut comps: Vec<(usize, Vec<NodeId>)> = Vec::new();
    for (idx, &h) in obs_set.iter().enumerate() {
        let r = find(&mut uf, idx);
        match comps.iter_mut().find(|(j, _)| *j == r) {
            Some((_, v)) => v.push(h),
            None => comps.push((r, vec![h])),
        }
    }
    comps.into_iter().map(|(_, v)| v).collect()
}
