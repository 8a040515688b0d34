//! One team's tree-form sequential decision problem (TFSDP): projection
//! from a game tree, timing normalization, and infoset inflation.
//!
//! A team TFSDP keeps only the team's choices as decision nodes; every
//! chance node and opposing-team decision node becomes an observation node.
//! What the team knows is carried entirely by the infoset partition, not by
//! the observation branching.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::{GameNodeKind, GameTree, NodeId, PlayerId, TeamSpec, Violation};

#[derive(Debug, Clone, PartialEq)]
pub enum TfKind {
    Decision { infoset: usize },
    Observation,
    Terminal,
}

#[derive(Debug, Clone)]
pub struct TfEdge {
    pub label: String,
    pub child: NodeId,
}

#[derive(Debug, Clone)]
pub struct TfNode {
    pub kind: TfKind,
    pub children: Vec<TfEdge>,
    pub layer: usize,
    pub parent: Option<NodeId>,
    /// Originating game-tree node, if the problem was projected from one.
    pub origin: Option<NodeId>,
}

impl TfNode {
    pub fn is_terminal(&self) -> bool {
        matches!(self.kind, TfKind::Terminal)
    }
    pub fn infoset(&self) -> Option<usize> {
        match self.kind {
            TfKind::Decision { infoset } => Some(infoset),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TfInfoset {
    pub nodes: Vec<NodeId>,
    /// Owning player in the original game; None for hand-built fixtures,
    /// where each infoset is treated as its own player.
    pub owner: Option<PlayerId>,
}

#[derive(Debug, Clone)]
pub struct TeamTfsdp {
    pub nodes: Vec<TfNode>,
    pub root: NodeId,
    pub infosets: Vec<TfInfoset>,
}

impl TeamTfsdp {
    pub fn node(&self, id: NodeId) -> &TfNode {
        &self.nodes[id]
    }

    pub fn terminals(&self) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].is_terminal()).collect()
    }

    pub fn num_layers(&self) -> usize {
        self.nodes.iter().map(|n| n.layer + 1).max().unwrap_or(0)
    }

    /// The player identity used for player-sequence computations: the
    /// original owner when known, otherwise a per-infoset pseudo-player.
    pub fn infoset_player(&self, infoset: usize) -> usize {
        match self.infosets[infoset].owner {
            Some(p) => p,
            None => usize::MAX - infoset,
        }
    }

    /// Distinct players appearing among infoset owners.
    pub fn num_players(&self) -> usize {
        let mut ps: Vec<usize> =
            (0..self.infosets.len()).map(|i| self.infoset_player(i)).collect();
        ps.sort_unstable();
        ps.dedup();
        ps.len()
    }

    /// Nodes in breadth-first order from the root.
    pub fn bfs_order(&self) -> Vec<NodeId> {
        let mut order = vec![self.root];
        let mut i = 0;
        while i < order.len() {
            for e in &self.nodes[order[i]].children {
                order.push(e.child);
            }
            i += 1;
        }
        order
    }

    /// Team sequence id for every node: nodes share an id iff they have the
    /// same sequence of (infoset, action) pairs on their root path, where a
    /// decision node's own infoset is included with no action. Returns the
    /// per-node ids and the number of distinct sequences.
    pub fn team_sequence_ids(&self) -> (Vec<usize>, usize) {
        // Sequence interning: id 0 is the empty sequence; every other id is
        // (parent sequence, infoset, action), with action None marking "at
        // the infoset, action pending".
        let mut intern: HashMap<(usize, usize, Option<usize>), usize> = HashMap::new();
        let mut next = 1usize;
        let mut extend = |parent: usize, infoset: usize, action: Option<usize>| -> usize {
            *intern.entry((parent, infoset, action)).or_insert_with(|| {
                next += 1;
                next - 1
            })
        };
        // path_seq[h]: team sequence of the path above h (excluding h's own
        // infoset); ids[h]: the team sequence of h itself.
        let mut path_seq = vec![0usize; self.nodes.len()];
        let mut ids = vec![0usize; self.nodes.len()];
        for h in self.bfs_order() {
            let n = &self.nodes[h];
            ids[h] = match n.infoset() {
                Some(i) => extend(path_seq[h], i, None),
                None => path_seq[h],
            };
            for (ai, e) in n.children.iter().enumerate() {
                path_seq[e.child] = match n.infoset() {
                    Some(i) => extend(path_seq[h], i, Some(ai)),
                    None => path_seq[h],
                };
            }
        }
        (ids, next)
    }

    /// Per-node player sequence ids, one per distinct player. Sequences of
    /// different players never share an id except for the shared empty
    /// sequence 0. Returns (players, per-node per-player ids).
    pub fn player_sequence_ids(&self) -> (Vec<usize>, Vec<Vec<usize>>) {
        let mut players: Vec<usize> =
            (0..self.infosets.len()).map(|i| self.infoset_player(i)).collect();
        players.sort_unstable();
        players.dedup();
        let pidx: HashMap<usize, usize> =
            players.iter().enumerate().map(|(i, &p)| (p, i)).collect();

        let mut intern: HashMap<(usize, usize, Option<usize>), usize> = HashMap::new();
        let mut next = 1usize;
        let mut extend = |parent: usize, infoset: usize, action: Option<usize>| -> usize {
            *intern.entry((parent, infoset, action)).or_insert_with(|| {
                next += 1;
                next - 1
            })
        };
        let np = players.len().max(1);
        let mut path = vec![vec![0usize; np]; self.nodes.len()];
        let mut ids = vec![vec![0usize; np]; self.nodes.len()];
        for h in self.bfs_order() {
            let n = &self.nodes[h];
            ids[h] = path[h].clone();
            if let Some(i) = n.infoset() {
                let pi = pidx[&self.infoset_player(i)];
                ids[h][pi] = extend(path[h][pi], i, None);
            }
            for (ai, e) in n.children.iter().enumerate() {
                let mut s = path[h].clone();
                if let Some(i) = n.infoset() {
                    let pi = pidx[&self.infoset_player(i)];
                    s[pi] = extend(path[h][pi], i, Some(ai));
                }
                path[e.child] = s;
            }
        }
        (players, ids)
    }

    /// Checks all TeamTfsdp invariants.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |kind: &'static str, message: String| {
            out.push(Violation { kind, message });
        };

        for (id, n) in self.nodes.iter().enumerate() {
            if n.is_terminal() && !n.children.is_empty() {
                push("terminal-children", format!("terminal {id} has children"));
            }
            if !n.is_terminal() && n.children.is_empty() {
                push("childless", format!("nonterminal {id} has no children"));
            }
            for e in &n.children {
                if self.nodes[e.child].layer != n.layer + 1 {
                    push(
                        "layer-gap",
                        format!("edge {id} -> {} skips layers", e.child),
                    );
                }
                if self.nodes[e.child].parent != Some(id) {
                    push("parent-link", format!("node {} has a stale parent link", e.child));
                }
            }
        }

        for (i, is) in self.infosets.iter().enumerate() {
            if is.nodes.is_empty() {
                push("empty-infoset", format!("infoset {i} has no members"));
                continue;
            }
            let layer = self.nodes[is.nodes[0]].layer;
            let labels: Vec<&str> =
                self.nodes[is.nodes[0]].children.iter().map(|e| e.label.as_str()).collect();
            for &h in &is.nodes {
                if self.nodes[h].infoset() != Some(i) {
                    push(
                        "infoset-membership",
                        format!("node {h} does not point back to infoset {i}"),
                    );
                }
                if self.nodes[h].layer != layer {
                    push("not-timed", format!("infoset {i} spans layers"));
                }
                let l: Vec<&str> =
                    self.nodes[h].children.iter().map(|e| e.label.as_str()).collect();
                if l != labels {
                    push(
                        "action-set-mismatch",
                        format!("infoset {i}: node {h} has a different action set"),
                    );
                }
            }
        }
        for (id, n) in self.nodes.iter().enumerate() {
            if let Some(i) = n.infoset() {
                if !self.infosets[i].nodes.contains(&id) {
                    push("infoset-missing", format!("node {id} missing from infoset {i}"));
                }
            }
        }

        if self.infoset_layer_order().is_err() {
            push("untimeable", "infoset precedence is not a partial order".into());
        }
        out
    }

    /// Topological check of infoset precedence: I precedes J when a member
    /// of J is a strict descendant of a member of I. In a timed problem the
    /// relation is layer-ordered; failure means no timing exists.
    fn infoset_layer_order(&self) -> Result<()> {
        // Precedence edges go from a node's infoset to every descendant's
        // infoset; a cycle makes the problem untimeable.
        let mut edges: Vec<Vec<usize>> = vec![Vec::new(); self.infosets.len()];
        let mut stack: Vec<(NodeId, Vec<usize>)> = vec![(self.root, Vec::new())];
        while let Some((h, above)) = stack.pop() {
            let here = self.nodes[h].infoset();
            if let Some(i) = here {
                for &j in &above {
                    if j != i && !edges[j].contains(&i) {
                        edges[j].push(i);
                    }
                }
            }
            for e in &self.nodes[h].children {
                let mut a = above.clone();
                if let Some(i) = here {
                    a.push(i);
                }
                stack.push((e.child, a));
            }
        }
        // Kahn's algorithm; leftovers mean a cycle.
        let mut indeg = vec![0usize; self.infosets.len()];
        for js in &edges {
            for &j in js {
                indeg[j] += 1;
            }
        }
        let mut queue: Vec<usize> =
            (0..self.infosets.len()).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = queue.pop() {
            seen += 1;
            for &j in &edges[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push(j);
                }
            }
        }
        if seen == self.infosets.len() {
            Ok(())
        } else {
            Err(Error::Untimeable)
        }
    }
}

/// Projects a game tree onto `team`'s decision problem. Team members'
/// decision nodes keep their infosets; chance nodes and opposing-team
/// decision nodes become observation nodes; terminals keep origin links.
pub fn project(tree: &GameTree, team: &TeamSpec) -> TeamTfsdp {
    let infoset_of = tree.infoset_of();
    // Map from game infoset id to projected infoset id, created on demand.
    let mut is_map: HashMap<usize, usize> = HashMap::new();
    let mut infosets: Vec<TfInfoset> = Vec::new();
    let mut nodes: Vec<TfNode> = Vec::new();

    // (game node, parent tf node, layer)
    let mut stack: Vec<(NodeId, Option<(NodeId, usize)>, usize)> =
        vec![(tree.root, None, 0)];
    while let Some((g, parent_slot, layer)) = stack.pop() {
        let gn = &tree.nodes[g];
        let kind = match &gn.kind {
            GameNodeKind::Terminal { .. } => TfKind::Terminal,
            GameNodeKind::Chance => TfKind::Observation,
            GameNodeKind::Decision { player } if !team.contains(*player) => TfKind::Observation,
            GameNodeKind::Decision { player } => {
                let gi = infoset_of[&g];
                let ti = *is_map.entry(gi).or_insert_with(|| {
                    infosets.push(TfInfoset { nodes: Vec::new(), owner: Some(*player) });
                    infosets.len() - 1
                });
                infosets[ti].nodes.push(nodes.len());
                TfKind::Decision { infoset: ti }
            }
        };
        let id = nodes.len();
        nodes.push(TfNode {
            kind,
            children: Vec::new(),
            layer,
            parent: parent_slot.map(|(p, _)| p),
            origin: Some(g),
        });
        if let Some((p, slot)) = parent_slot {
            nodes[p].children[slot].child = id;
        }
        for (slot, e) in gn.children.iter().enumerate() {
            nodes[id].children.push(TfEdge { label: e.label.clone(), child: usize::MAX });
            stack.push((e.child, Some((id, slot)), layer + 1));
        }
    }
    TeamTfsdp { nodes, root: 0, infosets }
}

/// Normalizes a TFSDP so that every infoset lies in a single layer and
/// every edge advances exactly one layer, inserting single-branch dummy
/// observation nodes where needed. Fails when infoset precedence admits no
/// consistent timing.
pub fn make_timed(t: &TeamTfsdp) -> Result<TeamTfsdp> {
    // Least fixpoint of: layer(child) >= layer(parent) + 1, and all members
    // of an infoset share the maximum member layer.
    let order = t.bfs_order();
    let mut layer: Vec<usize> = t.nodes.iter().map(|n| n.layer).collect();
    for &h in &order {
        layer[h] = match t.nodes[h].parent {
            Some(p) => layer[p] + 1,
            None => 0,
        };
    }
    let bound = t.nodes.len() + t.infosets.len() + 2;
    let mut rounds = 0;
    loop {
        let mut changed = false;
        for is in &t.infosets {
            let m = is.nodes.iter().map(|&h| layer[h]).max().unwrap();
            for &h in &is.nodes {
                if layer[h] < m {
                    layer[h] = m;
                    changed = true;
                }
            }
        }
        for &h in &order {
            if let Some(p) = t.nodes[h].parent {
                if layer[h] < layer[p] + 1 {
                    layer[h] = layer[p] + 1;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        rounds += 1;
        if rounds > bound {
            return Err(Error::Untimeable);
        }
    }

    // Rebuild, inserting a dummy chain on every edge that now skips layers.
    let mut nodes: Vec<TfNode> = Vec::with_capacity(t.nodes.len());
    let mut new_id = vec![usize::MAX; t.nodes.len()];
    for &h in &order {
        let id = nodes.len();
        new_id[h] = id;
        nodes.push(TfNode {
            kind: t.nodes[h].kind.clone(),
            children: Vec::new(),
            layer: layer[h],
            parent: None,
            origin: t.nodes[h].origin,
        });
    }
    for &h in &order {
        for e in &t.nodes[h].children {
            let mut from = new_id[h];
            for l in layer[h] + 1..layer[e.child] {
                let d = nodes.len();
                nodes.push(TfNode {
                    kind: TfKind::Observation,
                    children: Vec::new(),
                    layer: l,
                    parent: Some(from),
                    origin: None,
                });
                let label = if from == new_id[h] { e.label.clone() } else { "pad".into() };
                nodes[from].children.push(TfEdge { label, child: d });
                from = d;
            }
            let label = if from == new_id[h] { e.label.clone() } else { "pad".into() };
            nodes[from].children.push(TfEdge { label, child: new_id[e.child] });
            nodes[new_id[e.child]].parent = Some(from);
        }
    }
    let infosets = t
        .infosets
        .iter()
        .map(|is| TfInfoset {
            nodes: is.nodes.iter().map(|&h| new_id[h]).collect(),
            owner: is.owner,
        })
        .collect();
    let mut out = TeamTfsdp { nodes, root: new_id[t.root], infosets };
    // Keep decision nodes pointing at their (unchanged) infoset ids.
    for (i, is) in out.infosets.iter().enumerate() {
        for &h in &is.nodes {
            debug_assert_eq!(out.nodes[h].infoset(), Some(i));
        }
    }
    debug_assert!(out.root == 0 || out.nodes[out.root].parent.is_none());
    normalize_ids(&mut out);
    Ok(out)
}

/// Renumbers nodes in BFS order so layouts are deterministic and the root
/// is node 0.
fn normalize_ids(t: &mut TeamTfsdp) {
    let order = t.bfs_order();
    let mut new_id = vec![usize::MAX; t.nodes.len()];
    for (i, &h) in order.iter().enumerate() {
        new_id[h] = i;
    }
    let mut nodes: Vec<TfNode> = Vec::with_capacity(t.nodes.len());
    for &h in &order {
        let n = &t.nodes[h];
        nodes.push(TfNode {
            kind: n.kind.clone(),
            children: n
                .children
                .iter()
                .map(|e| TfEdge { label: e.label.clone(), child: new_id[e.child] })
                .collect(),
            layer: n.layer,
            parent: n.parent.map(|p| new_id[p]),
            origin: n.origin,
        });
    }
    for is in &mut t.infosets {
        for h in &mut is.nodes {
            *h = new_id[*h];
        }
        is.nodes.sort_unstable();
    }
    t.root = new_id[t.root];
    t.nodes = nodes;
}

/// Splits every infoset into co-playability classes: members stay together
/// only when some pure team strategy plays to both. Implemented as
/// connected components of the pairwise relation "the two members'
/// root-path (infoset, action) prescriptions never conflict", processed
/// top-down so ancestor infosets are already refined when a deeper infoset
/// is examined.
pub fn inflate(t: &TeamTfsdp) -> TeamTfsdp {
    // Current infoset id per decision node; starts at the original ids and
    // is refined in place.
    let mut cur: HashMap<NodeId, usize> = HashMap::new();
    for (i, is) in t.infosets.iter().enumerate() {
        for &h in &is.nodes {
            cur.insert(h, i);
        }
    }
    // Root-path prescriptions per node under the current refinement:
    // (current infoset of ancestor, action index taken there).
    let prescriptions = |t: &TeamTfsdp, cur: &HashMap<NodeId, usize>, mut h: NodeId| {
        let mut out: HashMap<usize, usize> = HashMap::new();
        while let Some(p) = t.nodes[h].parent {
            if t.nodes[p].infoset().is_some() {
                let ai = t.nodes[p].children.iter().position(|e| e.child == h).unwrap();
                out.insert(cur[&p], ai);
            }
            h = p;
        }
        out
    };

    let mut order: Vec<usize> = (0..t.infosets.len()).collect();
    order.sort_by_key(|&i| t.nodes[t.infosets[i].nodes[0]].layer);

    let mut new_sets: Vec<(Vec<NodeId>, Option<PlayerId>)> = Vec::new();
    for &i in &order {
        let members = &t.infosets[i].nodes;
        let pres: Vec<HashMap<usize, usize>> =
            members.iter().map(|&h| prescriptions(t, &cur, h)).collect();
        // Union-find over member indices.
        let mut uf: Vec<usize> = (0..members.len()).collect();
        fn find(uf: &mut Vec<usize>, x: usize) -> usize {
            if uf[x] != x {
                let r = find(uf, uf[x]);
                uf[x] = r;
            }
            uf[x]
        }
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                let conflict = pres[a]
                    .iter()
                    .any(|(is, ai)| pres[b].get(is).map_or(false, |aj| aj != ai));
                if !conflict {
                    let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
                    uf[ra] = rb;
                }
            }
        }
        let mut comp: HashMap<usize, usize> = HashMap::new();
        let mut locals: Vec<Vec<NodeId>> = Vec::new();
        for (mi, &h) in members.iter().enumerate() {
            let r = find(&mut uf, mi);
            let c = *comp.entry(r).or_insert_with(|| {
                locals.push(Vec::new());
                locals.len() - 1
            });
            locals[c].push(h);
        }
        for l in locals {
            let id = new_sets.len();
            for &h in &l {
                cur.insert(h, id);
            }
            new_sets.push((l, t.infosets[i].owner));
        }
    }

    let mut nodes = t.nodes.clone();
    let infosets: Vec<TfInfoset> = new_sets
        .into_iter()
        .map(|(nodes, owner)| TfInfoset { nodes, owner })
        .collect();
    for (i, is) in infosets.iter().enumerate() {
        for &h in &is.nodes {
            nodes[h].kind = TfKind::Decision { infoset: i };
        }
    }
    TeamTfsdp { nodes, root: t.root, infosets }
}

/// The hand-built crossed-infosets fixture: an observation root with two
/// decision children in singleton infosets, whose grandchildren are linked
/// pairwise across the two branches, over eight terminals.
pub fn build_crossed_fixture() -> TeamTfsdp {
    let mut nodes: Vec<TfNode> = Vec::new();
    let mut add = |kind: TfKind, layer: usize, parent: Option<NodeId>| -> NodeId {
        nodes.push(TfNode { kind, children: Vec::new(), layer, parent, origin: None });
        nodes.len() - 1
    };
    let a = add(TfKind::Observation, 0, None);
    let b = add(TfKind::Decision { infoset: 0 }, 1, Some(a));
    let c = add(TfKind::Decision { infoset: 1 }, 1, Some(a));
    let d = add(TfKind::Decision { infoset: 2 }, 2, Some(b));
    let e = add(TfKind::Decision { infoset: 3 }, 2, Some(b));
    let f = add(TfKind::Decision { infoset: 2 }, 2, Some(c));
    let g = add(TfKind::Decision { infoset: 3 }, 2, Some(c));
    let mut terminals = Vec::new();
    for p in [d, e, f, g] {
        for _ in 0..2 {
            terminals.push(add(TfKind::Terminal, 3, Some(p)));
        }
    }
    let mut t = TeamTfsdp {
        nodes,
        root: a,
        infosets: vec![
            TfInfoset { nodes: vec![b], owner: None },
            TfInfoset { nodes: vec![c], owner: None },
            TfInfoset { nodes: vec![d, f], owner: None },
            TfInfoset { nodes: vec![e, g], owner: None },
        ],
    };
    let edges: Vec<(NodeId, &str, NodeId)> = vec![
        (a, "b", b),
        (a, "c", c),
        (b, "l", d),
        (b, "r", e),
        (c, "l", f),
        (c, "r", g),
        (d, "l", terminals[0]),
        (d, "r", terminals[1]),
        (e, "l", terminals[2]),
        (e, "r", terminals[3]),
        (f, "l", terminals[4]),
        (f, "r", terminals[5]),
        (g, "l", terminals[6]),
        (g, "r", terminals[7]),
    ];
    for (from, label, to) in edges {
        t.nodes[from].children.push(TfEdge { label: label.into(), child: to });
    }
    t
}
