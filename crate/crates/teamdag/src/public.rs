//! Public states and the structural parameters of a team TFSDP.
//!
//! The connectivity graph links two same-layer nodes whenever one infoset
//! has descendants (or members) under both; public states are its connected
//! components, except that terminals are grouped by their team sequence so
//! that each distinct terminal team sequence forms one public state.

use std::collections::HashMap;

use crate::tfsdp::TeamTfsdp;

#[derive(Debug, Clone)]
pub struct PublicState {
    pub layer: usize,
    pub nodes: Vec<usize>,
    /// Parent public state in the public tree; None at the root. Terminal
    /// states merged across connectivity components keep the first
    /// member's parent.
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PublicStructure {
    pub states: Vec<PublicState>,
    /// Node id -> public state id.
    pub state_of: Vec<usize>,
    /// Team branching factor: most actions at any decision node.
    pub b: usize,
    /// Public branching factor: most children of any public state.
    pub b_prime: usize,
    /// Largest effective size (distinct team sequences) of a public state.
    pub p: usize,
    /// Most distinct player sequences in any public state.
    pub k: usize,
    /// Team player count.
    pub n: usize,
}

impl PublicStructure {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Computes public states and the parameters (b, b', p, k, n). Requires a
/// timed input.
pub fn compute_public_structure(t: &TeamTfsdp) -> PublicStructure {
    let mut dsu = Dsu::new(t.nodes.len());
    // For each infoset, union its members, then walk all members' ancestor
    // chains in lockstep, unioning at every layer. Once all current
    // ancestors already share a component, every higher layer does too
    // (each previous union came with its full ancestor chain), so stop.
    for is in &t.infosets {
        if is.nodes.len() < 2 {
            continue;
        }
        let mut frontier: Vec<usize> = is.nodes.clone();
        loop {
            let mut any = false;
            for i in 1..frontier.len() {
                if dsu.union(frontier[0], frontier[i]) {
                    any = true;
                }
            }
            if !any && frontier.len() > 1 {
                break;
            }
            let mut next = Vec::with_capacity(frontier.len());
            for &h in &frontier {
                match t.nodes[h].parent {
                    Some(p) => next.push(p),
                    None => break,
                }
            }
            if next.len() < frontier.len() {
                break;
            }
            frontier = next;
        }
    }

    let (team_seq, _) = t.team_sequence_ids();

    // Group nodes into states: terminals by (layer, team sequence), others
    // by (layer, component root).
    let mut key_of: HashMap<(usize, usize, bool), usize> = HashMap::new();
    let mut states: Vec<PublicState> = Vec::new();
    let mut state_of = vec![usize::MAX; t.nodes.len()];
    for h in t.bfs_order() {
        let n = &t.nodes[h];
        let key = if n.is_terminal() {
            (n.layer, team_seq[h], true)
        } else {
            (n.layer, dsu.find(h), false)
        };
        let s = *key_of.entry(key).or_insert_with(|| {
            states.push(PublicState {
                layer: n.layer,
                nodes: Vec::new(),
                parent: None,
                children: Vec::new(),
            });
            states.len() - 1
        });
        states[s].nodes.push(h);
        state_of[h] = s;
    }

    // Public tree: a state's children are the states its members' children
    // fall into.
    for s in 0..states.len() {
        let mut kids: Vec<usize> = states[s]
            .nodes
            .iter()
            .flat_map(|&h| t.nodes[h].children.iter().map(|e| state_of[e.child]))
            .collect();
        kids.sort_unstable();
        kids.dedup();
        for &c in &kids {
            if states[c].parent.is_none() {
                states[c].parent = Some(s);
            }
        }
        states[s].children = kids;
    }

    let b = t
        .nodes
        .iter()
        .filter(|n| n.infoset().is_some())
        .map(|n| n.children.len())
        .max()
        .unwrap_or(0);
    let b_prime = states.iter().map(|s| s.children.len()).max().unwrap_or(0);

    let p = states
        .iter()
        .map(|s| {
            let mut seqs: Vec<usize> = s.nodes.iter().map(|&h| team_seq[h]).collect();
            seqs.sort_unstable();
            seqs.dedup();
            seqs.len()
        })
        .max()
        .unwrap_or(0);

    let (players, pseq) = t.player_sequence_ids();
    let k = states
        .iter()
        .map(|s| {
            let mut seqs: Vec<usize> = s
                .nodes
                .iter()
                .flat_map(|&h| pseq[h].iter().copied())
                .collect();
            seqs.sort_unstable();
            seqs.dedup();
            seqs.len()
        })
        .max()
        .unwrap_or(0);

    PublicStructure { states, state_of, b, b_prime, p, k, n: players.len() }
}
