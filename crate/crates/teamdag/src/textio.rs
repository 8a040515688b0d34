//! Line-oriented textual formats: game trees (import and export, with
//! round-trip identity), team decision problems (export, with infoset and
//! layer annotations), and belief-DAG dumps.
//!
//! All records are tab-separated; the label field, when present, is last
//! and may contain any character except tab and newline. Lines that are
//! blank or start with `#` are ignored on input. The exact grammar is
//! documented in `docs/formats.md`.
//!
//! Game format:
//! ```text
//! game\t<num_players>\t<member_sum|difference>\t<root id>
//! chance\t<id>
//! decision\t<id>\t<player>
//! terminal\t<id>\t<payoff,payoff,...>
//! edge\t<parent>\t<child>\t<prob or ->\t<label>
//! infoset\t<player>\t<id,id,...>
//! ```
//! Nodes appear in id order, edges in (parent, position) order, infosets
//! in their stored order, so export ∘ import ∘ export is the identity on
//! the text and import ∘ export the identity on the tree.

use std::fmt::Write as _;
use std::path::Path;

use crate::dag::TbDag;
use crate::error::{Error, Result};
use crate::game::{GameEdge, GameInfoset, GameNode, GameNodeKind, GameTree, PayoffMode};
use crate::tfsdp::{TeamTfsdp, TfKind};

fn join_ids(ids: &[usize]) -> String {
    ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

pub fn export_game(g: &GameTree) -> String {
    let mode = match g.payoff_mode {
        PayoffMode::MemberSum => "member_sum",
        PayoffMode::Difference => "difference",
    };
    let mut out = String::new();
    let _ = writeln!(out, "game\t{}\t{}\t{}", g.num_players, mode, g.root);
    for (id, n) in g.nodes.iter().enumerate() {
        match &n.kind {
            GameNodeKind::Chance => {
                let _ = writeln!(out, "chance\t{id}");
            }
            GameNodeKind::Decision { player } => {
                let _ = writeln!(out, "decision\t{id}\t{player}");
            }
            GameNodeKind::Terminal { payoffs } => {
                let ps =
                    payoffs.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
                let _ = writeln!(out, "terminal\t{id}\t{ps}");
            }
        }
    }
    for (id, n) in g.nodes.iter().enumerate() {
        let chance = matches!(n.kind, GameNodeKind::Chance);
        for e in &n.children {
            let p = if chance { e.prob.to_string() } else { "-".to_string() };
            let _ = writeln!(out, "edge\t{id}\t{}\t{p}\t{}", e.child, e.label);
        }
    }
    for is in &g.infosets {
        let _ = writeln!(out, "infoset\t{}\t{}", is.player, join_ids(&is.nodes));
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_usize(s: &str, line: usize, what: &str) -> Result<usize> {
    s.parse().map_err(|_| perr(line, format!("bad {what} `{s}`")))
}

fn parse_f64(s: &str, line: usize, what: &str) -> Result<f64> {
    s.parse().map_err(|_| perr(line, format!("bad {what} `{s}`")))
}

fn parse_id_list(s: &str, line: usize) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| parse_usize(x, line, "id list entry")).collect()
}

pub fn import_game(text: &str) -> Result<GameTree> {
    let mut header: Option<(usize, PayoffMode, usize)> = None;
    // (id, kind) records; edges and infosets applied after all nodes exist.
    let mut nodes: Vec<Option<GameNode>> = Vec::new();
    let mut edges: Vec<(usize, GameEdge, usize)> = Vec::new();
    let mut infosets: Vec<GameInfoset> = Vec::new();

    let ensure = |nodes: &mut Vec<Option<GameNode>>, id: usize| {
        if nodes.len() <= id {
            nodes.resize(id + 1, None);
        }
    };

    for (i, raw) in text.lines().enumerate() {
        let lno = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields[0] {
            "game" => {
                if fields.len() != 4 {
                    return Err(perr(lno, "game record needs 3 fields"));
                }
                let mode = match fields[2] {
                    "member_sum" => PayoffMode::MemberSum,
                    "difference" => PayoffMode::Difference,
                    other => return Err(perr(lno, format!("unknown payoff mode `{other}`"))),
                };
                header = Some((
                    parse_usize(fields[1], lno, "player count")?,
                    mode,
                    parse_usize(fields[3], lno, "root id")?,
                ));
            }
            "chance" => {
                if fields.len() != 2 {
                    return Err(perr(lno, "chance record needs 1 field"));
                }
                let id = parse_usize(fields[1], lno, "node id")?;
                ensure(&mut nodes, id);
                nodes[id] = Some(GameNode { kind: GameNodeKind::Chance, children: vec![] });
            }
            "decision" => {
                if fields.len() != 3 {
                    return Err(perr(lno, "decision record needs 2 fields"));
                }
                let id = parse_usize(fields[1], lno, "node id")?;
                let player = parse_usize(fields[2], lno, "player")?;
                ensure(&mut nodes, id);
                nodes[id] =
                    Some(GameNode { kind: GameNodeKind::Decision { player }, children: vec![] });
            }
            "terminal" => {
                if fields.len() != 3 {
                    return Err(perr(lno, "terminal record needs 2 fields"));
                }
                let id = parse_usize(fields[1], lno, "node id")?;
                let payoffs: Vec<f64> = fields[2]
                    .split(',')
                    .map(|x| parse_f64(x, lno, "payoff"))
                    .collect::<Result<_>>()?;
                ensure(&mut nodes, id);
                nodes[id] =
                    Some(GameNode { kind: GameNodeKind::Terminal { payoffs }, children: vec![] });
            }
            "edge" => {
                if fields.len() != 5 {
                    return Err(perr(lno, "edge record needs 4 fields"));
                }
                let parent = parse_usize(fields[1], lno, "parent id")?;
                let child = parse_usize(fields[2], lno, "child id")?;
                let prob =
                    if fields[3] == "-" { 1.0 } else { parse_f64(fields[3], lno, "probability")? };
                edges.push((parent, GameEdge { label: fields[4].to_string(), child, prob }, lno));
            }
            "infoset" => {
                if fields.len() != 3 {
                    return Err(perr(lno, "infoset record needs 2 fields"));
                }
                infosets.push(GameInfoset {
                    player: parse_usize(fields[1], lno, "player")?,
                    nodes: parse_id_list(fields[2], lno)?,
                });
            }
            other => return Err(perr(lno, format!("unknown record `{other}`"))),
        }
    }

    let (num_players, payoff_mode, root) =
        header.ok_or_else(|| perr(0, "missing game header record"))?;
    let mut out_nodes = Vec::with_capacity(nodes.len());
    for (id, n) in nodes.into_iter().enumerate() {
        match n {
            Some(n) => out_nodes.push(n),
            None => return Err(perr(0, format!("node {id} referenced but never declared"))),
        }
    }
    for (parent, e, lno) in edges {
        if parent >= out_nodes.len() || e.child >= out_nodes.len() {
            return Err(perr(lno, "edge endpoint out of range"));
        }
        out_nodes[parent].children.push(e);
    }
    if root >= out_nodes.len() {
        return Err(perr(0, format!("root id {root} out of range")));
    }
    for is in &infosets {
        for &n in &is.nodes {
            if n >= out_nodes.len() {
                return Err(perr(0, format!("infoset member {n} out of range")));
            }
        }
    }
    Ok(GameTree { nodes: out_nodes, root, num_players, infosets, payoff_mode })
}

pub fn write_game(g: &GameTree, path: &Path) -> Result<()> {
    std::fs::write(path, export_game(g))?;
    Ok(())
}

pub fn read_game(path: &Path) -> Result<GameTree> {
    import_game(&std::fs::read_to_string(path)?)
}

/// Exports a team decision problem in the same tab-separated style, with
/// infoset and layer annotations on every node.
///
/// ```text
/// tfsdp\t<root id>\t<num infosets>
/// decision\t<id>\t<layer>\t<infoset>
/// observation\t<id>\t<layer>
/// terminal\t<id>\t<layer>\t<origin id or ->
/// edge\t<parent>\t<child>\t<label>
/// infoset\t<index>\t<owner or ->\t<id,id,...>
/// ```
pub fn export_tfsdp(t: &TeamTfsdp) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "tfsdp\t{}\t{}", t.root, t.infosets.len());
    for (id, n) in t.nodes.iter().enumerate() {
        match n.kind {
            TfKind::Decision { infoset } => {
                let _ = writeln!(out, "decision\t{id}\t{}\t{infoset}", n.layer);
            }
            TfKind::Observation => {
                let _ = writeln!(out, "observation\t{id}\t{}", n.layer);
            }
            TfKind::Terminal => {
                let origin =
                    n.origin.map(|o| o.to_string()).unwrap_or_else(|| "-".to_string());
                let _ = writeln!(out, "terminal\t{id}\t{}\t{origin}", n.layer);
            }
        }
    }
    for (id, n) in t.nodes.iter().enumerate() {
        for e in &n.children {
            let _ = writeln!(out, "edge\t{id}\t{}\t{}", e.child, e.label);
        }
    }
    for (i, is) in t.infosets.iter().enumerate() {
        let owner = is.owner.map(|o| o.to_string()).unwrap_or_else(|| "-".to_string());
        let _ = writeln!(out, "infoset\t{i}\t{owner}\t{}", join_ids(&is.nodes));
    }
    out
}

/// Dumps a belief DAG: one line per node (id, kind, layer, belief member
/// ids) and one per edge (from, to, prescription label). A prescription is
/// written `i<infoset>:a<action>` joined by `,`, or `-` when empty.
pub fn dump_dag(d: &TbDag) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dag\t{}", d.root);
    for (id, n) in d.nodes.iter().enumerate() {
        let kind = if n.is_terminal() { "terminal" } else { "decision" };
        let _ = writeln!(out, "node\t{id}\t{kind}\t{}\t{}", n.layer, join_ids(&n.belief));
    }
    for (id, n) in d.nodes.iter().enumerate() {
        for e in &n.edges {
            let label = if e.prescription.actions.is_empty() {
                "-".to_string()
            } else {
                e.prescription
                    .actions
                    .iter()
                    .map(|(i, a)| format!("i{i}:a{a}"))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            for &c in &e.children {
                let _ = writeln!(out, "edge\t{id}\t{c}\t{label}");
            }
        }
    }
    out
}
