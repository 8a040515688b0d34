//! Shared brute-force helpers for the oracle and acceptance suites.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use teamdag::dag::{build, correlation_plan, enumerate_pure, optimize, Grouping, TbDag};
use teamdag::tfsdp::{TeamTfsdp, TfEdge, TfInfoset, TfKind, TfNode};

/// Indicator vectors over terminal ids, one per pure team strategy
/// (an action choice at every infoset): a terminal is reached iff every
/// decision ancestor picks the edge on its root path.
pub fn team_pure_plans(t: &TeamTfsdp, guard: u64) -> BTreeSet<Vec<u8>> {
    let terminals = t.terminals();
    let arity: Vec<usize> = t
        .infosets
        .iter()
        .map(|is| {
            let k = t.nodes[is.nodes[0]].children.len();
            for &h in &is.nodes {
                assert_eq!(t.nodes[h].children.len(), k, "ragged infoset");
            }
            k
        })
        .collect();
    let combos: u64 = arity.iter().map(|&k| k as u64).product();
    assert!(combos <= guard, "too many pure team strategies: {combos}");

    let mut out = BTreeSet::new();
    let mut pick = vec![0usize; arity.len()];
    loop {
        let mut reached = vec![false; t.nodes.len()];
        let mut stack = vec![t.root];
        while let Some(h) = stack.pop() {
            reached[h] = true;
            match t.nodes[h].kind {
                TfKind::Decision { infoset } => {
                    stack.push(t.nodes[h].children[pick[infoset]].child);
                }
                TfKind::Observation => {
                    stack.extend(t.nodes[h].children.iter().map(|e| e.child));
                }
                TfKind::Terminal => {}
            }
        }
        out.insert(terminals.iter().map(|&z| reached[z] as u8).collect());
        // Odometer increment.
        let mut i = 0;
        loop {
            if i == pick.len() {
                return out;
            }
            pick[i] += 1;
            if pick[i] < arity[i] {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

pub fn dag_plans(d: &TbDag, t: &TeamTfsdp, guard: u64) -> BTreeSet<Vec<u8>> {
    let terminals = t.terminals();
    enumerate_pure(d, guard)
        .expect("enumeration within guard")
        .iter()
        .map(|pure| {
            let x = correlation_plan(d, t, pure).expect("complete pure strategy");
            terminals.iter().map(|&z| (x[z] > 0.5) as u8).collect()
        })
        .collect()
}

/// Whether the optimized DAG's pure strategies induce exactly the team's
/// pure correlation plans.
pub fn plan_sets_match(t: &TeamTfsdp) -> bool {
    let d = optimize(&build(t, Grouping::PublicObservations).unwrap(), t);
    team_pure_plans(t, 100_000) == dag_plans(&d, t, 2_000_000)
}

/// A random layered decision problem: random tree with depth-consistent
/// layers, decision nodes grouped into infosets only within one
/// (layer, arity) class. Terminals get unique origin tags so instances
/// can be compared across preprocessing.
pub fn random_tfsdp(rng: &mut ChaCha8Rng) -> TeamTfsdp {
    let max_depth = rng.gen_range(2..=4);
    let mut nodes: Vec<TfNode> = Vec::new();

    fn grow(
        rng: &mut ChaCha8Rng,
        nodes: &mut Vec<TfNode>,
        depth: usize,
        max_depth: usize,
        parent: Option<usize>,
    ) -> usize {
        let id = nodes.len();
        let roll: f64 = rng.gen();
        let kind = if depth == max_depth || (depth > 0 && roll < 0.3) {
            TfKind::Terminal
        } else if roll < 0.65 {
            TfKind::Observation
        } else {
            // Placeholder infoset id; assigned after the tree exists.
            TfKind::Decision { infoset: usize::MAX }
        };
        let arity = match kind {
            TfKind::Terminal => 0,
            TfKind::Observation => rng.gen_range(1..=3),
            TfKind::Decision { .. } => rng.gen_range(2..=3),
        };
        nodes.push(TfNode { kind, children: Vec::new(), layer: depth, parent, origin: None });
        for _ in 0..arity {
            let c = grow(rng, nodes, depth + 1, max_depth, Some(id));
            let label = format!("a{}", nodes[id].children.len());
            nodes[id].children.push(TfEdge { label, child: c });
        }
        id
    }
    grow(rng, &mut nodes, 0, max_depth, None);

    for (i, n) in nodes.iter_mut().enumerate() {
        if n.is_terminal() {
            n.origin = Some(i);
        }
    }

    // Random partition of each (layer, arity) class into infosets.
    let mut classes: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (id, n) in nodes.iter().enumerate() {
        if matches!(n.kind, TfKind::Decision { .. }) {
            classes.entry((n.layer, n.children.len())).or_default().push(id);
        }
    }
    let mut keys: Vec<(usize, usize)> = classes.keys().copied().collect();
    keys.sort_unstable();
    let mut infosets: Vec<TfInfoset> = Vec::new();
    for k in keys {
        let members = &classes[&k];
        let buckets = rng.gen_range(1..=members.len().min(2));
        let mut parts: Vec<Vec<usize>> = vec![Vec::new(); buckets];
        for &h in members {
            parts[rng.gen_range(0..buckets)].push(h);
        }
        for p in parts.into_iter().filter(|p| !p.is_empty()) {
            let i = infosets.len();
            for &h in &p {
                nodes[h].kind = TfKind::Decision { infoset: i };
            }
            infosets.push(TfInfoset { nodes: p, owner: None });
        }
    }
    let root = 0;
    TeamTfsdp { nodes, root, infosets }
}

/// Yields `count` random instances small enough for brute force, skipping
/// degenerate or oversized draws.
pub fn random_instances(seed: u64, count: usize) -> Vec<TeamTfsdp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let t = random_tfsdp(&mut rng);
        if t.infosets.is_empty() || t.infosets.len() > 12 {
            continue;
        }
        let combos: u64 = t
            .infosets
            .iter()
            .map(|is| t.nodes[is.nodes[0]].children.len() as u64)
            .product();
        if combos > 20_000 {
            continue;
        }
        assert!(t.validate().is_empty(), "generator produced an invalid instance");
        out.push(t);
    }
    out
}

/// Canonical signature of a DAG as an unordered structure, labeling
/// terminal nodes by the origins of the decision-problem terminals they
/// carry. Equal signatures mean the DAGs unfold to the same structure.
pub fn canon(d: &TbDag, t: &TeamTfsdp) -> String {
    let mut sig: Vec<String> = vec![String::new(); d.nodes.len()];
    for &s in d.topo.iter().rev() {
        let n = &d.nodes[s];
        sig[s] = if n.is_terminal() {
            let mut origins: Vec<usize> = n
                .terminals
                .iter()
                .map(|&z| t.nodes[z].origin.expect("origin-tagged terminal"))
                .collect();
            origins.sort_unstable();
            format!("T{origins:?}")
        } else {
            let mut edges: Vec<String> = n
                .edges
                .iter()
                .map(|e| {
                    let mut kids: Vec<&str> =
                        e.children.iter().map(|&c| sig[c].as_str()).collect();
                    kids.sort_unstable();
                    format!("({})", kids.join(","))
                })
                .collect();
            edges.sort_unstable();
            format!("D[{}]", edges.join(";"))
        };
    }
    sig[d.root].clone()
}

/// Whether building after inflation yields the same DAG (sizes and
/// canonical structure) as building directly.
pub fn inflation_invariant(t: &TeamTfsdp) -> bool {
    let plain = build(t, Grouping::PublicObservations).unwrap();
    let inflated = build(&teamdag::tfsdp::inflate(t), Grouping::PublicObservations).unwrap();
    plain.folded_counts() == inflated.folded_counts() && canon(&plain, t) == canon(&inflated, t)
}
