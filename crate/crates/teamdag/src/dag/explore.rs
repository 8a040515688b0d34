//! Size accounting, brute-force strategy enumeration, and exact best
//! response on a TB-DAG.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::public::PublicStructure;
use crate::tfsdp::TeamTfsdp;

use super::{DagId, TbDag};

#[derive(Debug, Clone)]
pub struct SizeReport {
    /// Counts with observation nodes unfolded (one per prescription edge).
    pub raw_vertices: usize,
    pub raw_edges: usize,
    /// Counts over decision nodes and (node, prescription, child) triples.
    pub folded_vertices: usize,
    pub folded_edges: usize,
    /// Largest effective size (distinct team sequences) of any belief.
    pub w: usize,
    /// Edge bound (b(p+1))^w * b' * |P| driven by belief size.
    pub bound_belief: f64,
    /// Edge bound (b+1)^k * b' * |P| driven by k-privacy.
    pub bound_privacy: f64,
}

/// Size statistics and the two theoretical edge bounds for a DAG built
/// from the TFSDP that produced `ps`.
pub fn stats(d: &TbDag, t: &TeamTfsdp, ps: &PublicStructure) -> SizeReport {
    let (team_seq, _) = t.team_sequence_ids();
    let w = d
        .nodes
        .iter()
        .map(|n| {
            let mut seqs: Vec<usize> = n.belief.iter().map(|&h| team_seq[h]).collect();
            seqs.sort_unstable();
            seqs.dedup();
            seqs.len()
        })
        .max()
        .unwrap_or(0);
    let (raw_vertices, raw_edges) = d.raw_counts();
    let (folded_vertices, folded_edges) = d.folded_counts();
    let np = ps.num_states() as f64;
    // A team with no decision nodes has b = 0; its prescriptions are all
    // empty, so it contributes a factor of 1 (not 0) to the bound.
    let b = ps.b.max(1);
    let bound_belief = ((b * (ps.p + 1)) as f64).powi(w as i32) * ps.b_prime as f64 * np;
    let bound_privacy = ((b + 1) as f64).powi(ps.k as i32) * ps.b_prime as f64 * np;
    SizeReport {
        raw_vertices,
        raw_edges,
        folded_vertices,
        folded_edges,
        w,
        bound_belief,
        bound_privacy,
    }
}

/// A pure DAG strategy: the chosen prescription-edge index at every
/// decision node reached under the earlier choices.
pub type PureStrategy = HashMap<DagId, usize>;

/// The 0/1 leaf vector induced by a pure strategy, indexed by TFSDP node
/// id (nonzero only at terminals). Aliased terminals share their value.
pub fn correlation_plan(d: &TbDag, t: &TeamTfsdp, pure: &PureStrategy) -> Result<Vec<f64>> {
    let mut x = vec![0.0; t.nodes.len()];
    let mut reached = vec![false; d.nodes.len()];
    reached[d.root] = true;
    for &s in &d.topo {
        if !reached[s] {
            continue;
        }
        let n = &d.nodes[s];
        if n.is_terminal() {
            for &z in &n.terminals {
                x[z] = 1.0;
            }
            continue;
        }
        let &e = pure
            .get(&s)
            .ok_or(Error::BadPrescription(usize::MAX, s))?;
        if e >= n.edges.len() {
            return Err(Error::BadPrescription(e, s));
        }
        for &c in &n.edges[e].children {
            reached[c] = true;
        }
    }
    Ok(x)
}

/// Enumerates every pure strategy, assigning prescriptions only at nodes
/// reachable under the choices already made. Fails once more than `guard`
/// strategies would be produced.
pub fn enumerate_pure(d: &TbDag, guard: u64) -> Result<Vec<PureStrategy>> {
    let mut out: Vec<PureStrategy> = Vec::new();
    // Depth-first over the frontier of reached-but-unexpanded nodes,
    // visiting nodes in topological position order so each is expanded
    // exactly once.
    let topo_pos: HashMap<DagId, usize> =
        d.topo.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    fn rec(
        d: &TbDag,
        topo_pos: &HashMap<DagId, usize>,
        mut pending: Vec<DagId>,
        assignment: &mut PureStrategy,
        out: &mut Vec<PureStrategy>,
        guard: u64,
    ) -> Result<()> {
        let s = loop {
            match pending.pop() {
                None => {
                    if out.len() as u64 >= guard {
                        return Err(Error::TooLarge(guard));
                    }
                    out.push(assignment.clone());
                    return Ok(());
                }
                Some(s) if d.nodes[s].is_terminal() => continue,
                Some(s) => break s,
            }
        };
        for e in 0..d.nodes[s].edges.len() {
            assignment.insert(s, e);
            let mut next = pending.clone();
            for &c in &d.nodes[s].edges[e].children {
                if !next.contains(&c) {
                    next.push(c);
                }
            }
            // Pop order: highest topological position last... we need the
            // earliest unexpanded node first, so keep the vector sorted by
            // descending topological position.
            next.sort_by(|a, b| topo_pos[b].cmp(&topo_pos[a]));
            rec(d, topo_pos, next, assignment, out, guard)?;
            assignment.remove(&s);
        }
        Ok(())
    }
    rec(d, &topo_pos, vec![d.root], &mut PureStrategy::new(), &mut out, guard)?;
    Ok(out)
}

/// Exact best response to a utility vector indexed by DAG node id (read at
/// terminal nodes): maximizes the summed utility over reachable terminals.
/// Ties break toward the lowest prescription index. Returns the root value
/// and the maximizing pure strategy (over all nodes, reachable or not).
pub fn best_response(d: &TbDag, u: &[f64]) -> (f64, PureStrategy) {
    let mut val = vec![0.0f64; d.nodes.len()];
    let mut pick = PureStrategy::new();
    for &s in d.topo.iter().rev() {
        let n = &d.nodes[s];
        if n.is_terminal() {
            val[s] = u[s];
            continue;
        }
        let mut best = f64::NEG_INFINITY;
        let mut best_e = 0;
        for (ei, e) in n.edges.iter().enumerate() {
            let v: f64 = e.children.iter().map(|&c| val[c]).sum();
            if v > best {
                best = v;
                best_e = ei;
            }
        }
        val[s] = best;
        pick.insert(s, best_e);
    }
    (val[d.root], pick)
}

/// Total utility collected by a pure strategy: sum of `u` over the
/// terminal DAG nodes it reaches.
pub fn expected_value_of_pure(d: &TbDag, pure: &PureStrategy, u: &[f64]) -> Result<f64> {
    let mut reached = vec![false; d.nodes.len()];
    reached[d.root] = true;
    let mut total = 0.0;
    for &s in &d.topo {
        if !reached[s] {
            continue;
        }
        let n = &d.nodes[s];
        if n.is_terminal() {
            total += u[s];
            continue;
        }
        let &e = pure.get(&s).ok_or(Error::BadPrescription(usize::MAX, s))?;
        for &c in &n.edges[e].children {
            reached[c] = true;
        }
    }
    Ok(total)
}
