//! Branching-factor reduction: rewrites every public state that contains
//! decision nodes so that team choices are made through a balanced binary
//! tree over the state's label set, leaving decision nodes with at most two
//! actions. Applicable only when actions are team-public (each label's
//! child set is a union of public states), which guarantees the gadget
//! cannot leak information across public states.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::public::{compute_public_structure, PublicStructure};
use crate::tfsdp::{TeamTfsdp, TfEdge, TfInfoset, TfKind, TfNode};

/// A binary code tree over a sorted label set: left-balanced, splitting at
/// the ceiling midpoint.
enum Code {
    Leaf(String),
    Node(Box<Code>, Box<Code>),
}

impl Code {
    fn build(labels: &[String]) -> Code {
        if labels.len() == 1 {
            return Code::Leaf(labels[0].clone());
        }
        let mid = labels.len().div_ceil(2);
        Code::Node(
            Box::new(Code::build(&labels[..mid])),
            Box::new(Code::build(&labels[mid..])),
        )
    }

    fn depth(&self) -> usize {
        match self {
            Code::Leaf(_) => 0,
            Code::Node(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    fn contains_any(&self, set: &BTreeSet<&str>) -> bool {
        match self {
            Code::Leaf(a) => set.contains(a.as_str()),
            Code::Node(l, r) => l.contains_any(set) || r.contains_any(set),
        }
    }
}

/// Checks the team-public-actions property: in every public state with
/// decision nodes, each edge label's child set is a union of public states.
pub fn is_team_public(t: &TeamTfsdp, ps: &PublicStructure) -> bool {
    for s in &ps.states {
        if !s.nodes.iter().any(|&h| t.nodes[h].infoset().is_some()) {
            continue;
        }
        let mut by_label: HashMap<&str, BTreeSet<usize>> = HashMap::new();
        for &h in &s.nodes {
            for e in &t.nodes[h].children {
                by_label.entry(e.label.as_str()).or_default().insert(e.child);
            }
        }
        for kids in by_label.values() {
            let states: BTreeSet<usize> = kids.iter().map(|&c| ps.state_of[c]).collect();
            for &st in &states {
                if !ps.states[st].nodes.iter().all(|n| kids.contains(n)) {
                    return false;
                }
            }
        }
    }
    true
}

struct Rewriter<'a> {
    t: &'a TeamTfsdp,
    ps: &'a PublicStructure,
    /// Per public state: the code tree and its depth, for states that get a
    /// gadget (contain decision nodes and more than two labels... or any
    /// decision nodes; states with <= 2 labels get depth-1 "gadgets" that
    /// reduce to the original shape).
    codes: Vec<Option<(Code, usize)>>,
    nodes: Vec<TfNode>,
    /// (original infoset, partial-action path) -> new infoset id.
    partial: HashMap<(usize, String), usize>,
    infosets: Vec<TfInfoset>,
}

impl<'a> Rewriter<'a> {
    fn add(&mut self, kind: TfKind, layer: usize, parent: Option<usize>) -> usize {
        self.nodes.push(TfNode { kind, children: Vec::new(), layer, parent, origin: None });
        self.nodes.len() - 1
    }

    fn link(&mut self, parent: usize, label: &str, child: usize) {
        self.nodes[parent].children.push(TfEdge { label: label.into(), child });
    }

    /// Inserts `count` single-branch observation nodes below `parent`,
    /// returning the node the original child should hang from and the label
    /// to use for the final edge.
    fn pad(&mut self, mut parent: usize, label: &str, count: usize, mut layer: usize) -> (usize, String) {
        let mut lab = label.to_string();
        for _ in 0..count {
            let d = self.add(TfKind::Observation, layer, Some(parent));
            self.link(parent, &lab, d);
            parent = d;
            lab = "pad".into();
            layer += 1;
        }
        (parent, lab)
    }

    fn rebuild(&mut self, h: usize, layer: usize, parent: Option<usize>) -> usize {
        let n = &self.t.nodes[h];
        let state = self.ps.state_of[h];
        if n.is_terminal() || self.codes[state].is_none() {
            let id = self.add(n.kind.clone(), layer, parent);
            self.nodes[id].origin = n.origin;
            if let TfKind::Decision { infoset } = n.kind {
                // Unreduced decision node (its state needed no gadget):
                // keep its original infoset, registered under an empty
                // partial path.
                let iid = self.partial_infoset(infoset, "");
                self.nodes[id].kind = TfKind::Decision { infoset: iid };
                self.infosets[iid].nodes.push(id);
            }
            for e in &self.t.nodes[h].children {
                let c = self.rebuild(e.child, layer + 1, Some(id));
                self.link(id, &e.label, c);
            }
            return id;
        }
        let depth = self.codes[state].as_ref().unwrap().1;
        let labels: BTreeSet<&str> =
            self.t.nodes[h].children.iter().map(|e| e.label.as_str()).collect();
        self.emit(h, state, CodePath { path: String::new(), depth: 0 }, &labels, layer, parent, depth)
    }

    /// Emits the copy of `h`'s gadget node at the given position in the
    /// state's code tree, pruned to `h`'s own labels.
    fn emit(
        &mut self,
        h: usize,
        state: usize,
        at: CodePath,
        labels: &BTreeSet<&str>,
        layer: usize,
        parent: Option<usize>,
        total_depth: usize,
    ) -> usize {
        let code = self.code_at(state, &at.path);
        let (kids, is_decision) = match code {
            Code::Leaf(_) => (Vec::new(), false),
            Code::Node(l, r) => {
                let mut kids = Vec::new();
                if l.contains_any(labels) {
                    kids.push('0');
                }
                if r.contains_any(labels) {
                    kids.push('1');
                }
                let dec = self.t.nodes[h].infoset().is_some() && kids.len() == 2;
                (kids, dec)
            }
        };
        let kind = if is_decision {
            let orig = self.t.nodes[h].infoset().unwrap();
            let iid = self.partial_infoset(orig, &at.path);
            TfKind::Decision { infoset: iid }
        } else {
            TfKind::Observation
        };
        let id = self.add(kind, layer, parent);
        if let TfKind::Decision { infoset } = self.nodes[id].kind {
            self.infosets[infoset].nodes.push(id);
        }

        if kids.is_empty() {
            // A bare leaf at the root: h has one label; chain straight down.
            let label = match self.code_at(state, &at.path) {
                Code::Leaf(a) => a.clone(),
                _ => unreachable!(),
            };
            self.attach_action(h, id, &label, at.depth, layer, total_depth);
            return id;
        }
        for side in kids {
            let sub = CodePath {
                path: format!("{}{}", at.path, side),
                depth: at.depth + 1,
            };
            match self.code_at(state, &sub.path) {
                Code::Leaf(a) => {
                    let a = a.clone();
                    let bit = if side == '0' { "0" } else { "1" };
                    self.attach_action_labeled(h, id, &a, bit, sub.depth, layer, total_depth);
                }
                Code::Node(..) => {
                    let bit = if side == '0' { "0" } else { "1" };
                    let c = self.emit(h, state, sub, labels, layer + 1, Some(id), total_depth);
                    self.link(id, bit, c);
                }
            }
        }
        id
    }

    /// Hangs the original children of `h` reached by `label` below gadget
    /// node `from`, padded so every original child sits `total_depth`
    /// layers below the state.
    fn attach_action(&mut self, h: usize, from: usize, label: &str, consumed: usize, from_layer: usize, total_depth: usize) {
        self.attach_action_labeled(h, from, label, label, consumed, from_layer, total_depth);
    }

    fn attach_action_labeled(
        &mut self,
        h: usize,
        from: usize,
        label: &str,
        edge_label: &str,
        consumed: usize,
        from_layer: usize,
        total_depth: usize,
    ) {
        let pads = total_depth - consumed.max(1);
        let edges: Vec<usize> = self
            .t
            .nodes[h]
            .children
            .iter()
            .enumerate()
            .filter(|(_, e)| e.label == label)
            .map(|(i, _)| i)
            .collect();
        for ei in edges {
            let (hang, lab) = self.pad(from, edge_label, pads, from_layer + 1);
            let child = self.t.nodes[h].children[ei].child;
            let c = self.rebuild(child, from_layer + 1 + pads, Some(hang));
            self.link(hang, &lab, c);
        }
    }

    fn code_at(&self, state: usize, path: &str) -> &Code {
        let mut c = &self.codes[state].as_ref().unwrap().0;
        for bit in path.chars() {
            c = match c {
                Code::Node(l, r) => {
                    if bit == '0' {
                        l
                    } else {
                        r
                    }
                }
                Code::Leaf(_) => panic!("path walks past a leaf"),
            };
        }
        c
    }

    fn partial_infoset(&mut self, orig: usize, path: &str) -> usize {
        let key = (orig, path.to_string());
        if let Some(&i) = self.partial.get(&key) {
            return i;
        }
        let owner = self.t.infosets[orig].owner;
        self.infosets.push(TfInfoset { nodes: Vec::new(), owner });
        let i = self.infosets.len() - 1;
        self.partial.insert(key, i);
        i
    }
}

#[derive(Clone)]
struct CodePath {
    path: String,
    depth: usize,
}

/// Rewrites `t` so every decision node has at most two actions. Fails when
/// actions are not team-public.
pub fn reduce_branching(t: &TeamTfsdp) -> Result<TeamTfsdp> {
    let ps = compute_public_structure(t);
    if !is_team_public(t, &ps) {
        return Err(Error::NotTeamPublic);
    }
    let codes: Vec<Option<(Code, usize)>> = ps
        .states
        .iter()
        .map(|s| {
            let has_decision = s.nodes.iter().any(|&h| t.nodes[h].infoset().is_some());
            if !has_decision {
                return None;
            }
            let mut labels: BTreeSet<String> = BTreeSet::new();
            for &h in &s.nodes {
                for e in &t.nodes[h].children {
                    labels.insert(e.label.clone());
                }
            }
            if labels.len() <= 2 {
                return None;
            }
            let v: Vec<String> = labels.into_iter().collect();
            let code = Code::build(&v);
            let d = code.depth();
            Some((code, d))
        })
        .collect();
    if codes.iter().all(|c| c.is_none()) {
        // Nothing to do; keep the input (with infosets intact) unchanged.
        return Ok(t.clone());
    }

    let mut rw = Rewriter {
        t,
        ps: &ps,
        codes,
        nodes: Vec::new(),
        partial: HashMap::new(),
        infosets: Vec::new(),
    };
    let root = rw.rebuild(t.root, 0, None);
    let mut out = TeamTfsdp { nodes: rw.nodes, root, infosets: rw.infosets };
    // Empty infosets can appear if an original infoset only produced unary
    // gadget nodes; drop them and renumber.
    let mut remap = vec![usize::MAX; out.infosets.len()];
    let mut kept = Vec::new();
    for (i, is) in out.infosets.iter().enumerate() {
        if !is.nodes.is_empty() {
            remap[i] = kept.len();
            kept.push(is.clone());
        }
    }
    for n in &mut out.nodes {
        if let TfKind::Decision { infoset } = n.kind {
            n.kind = TfKind::Decision { infoset: remap[infoset] };
        }
    }
    out.infosets = kept;
    Ok(out)
}
