//! Extensive-form game trees for two-team zero-sum adversarial team games.
//!
//! Nodes are stored index-based in a flat vector so that trees with millions
//! of nodes stay cheap to build and traverse. Payoffs are kept per player;
//! the team payoff for a given split is derived on demand.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type PlayerId = usize;

/// The two team identifiers. `Plus` is the maximizing team.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Team {
    Plus,
    Minus,
}

impl Team {
    pub fn other(self) -> Team {
        match self {
            Team::Plus => Team::Minus,
            Team::Minus => Team::Plus,
        }
    }
}

/// One team's identity and member players.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeamSpec {
    pub team: Team,
    pub members: Vec<PlayerId>,
}

impl TeamSpec {
    pub fn new(team: Team, mut members: Vec<PlayerId>) -> Self {
        members.sort_unstable();
        members.dedup();
        TeamSpec { team, members }
    }

    pub fn contains(&self, p: PlayerId) -> bool {
        self.members.binary_search(&p).is_ok()
    }
}

/// A full two-team split of the player set.
#[derive(Debug, Clone)]
pub struct TeamSplit {
    pub plus: TeamSpec,
    pub minus: TeamSpec,
}

impl TeamSplit {
    /// Builds a split from the set of minus-team members; everyone else is
    /// on the plus team.
    pub fn from_minus(num_players: usize, minus: &[PlayerId]) -> Result<Self> {
        let minus_set: BTreeSet<PlayerId> = minus.iter().copied().collect();
        for &p in &minus_set {
            if p >= num_players {
                return Err(Error::InvalidParameters(format!(
                    "player {p} out of range (game has {num_players} players)"
                )));
            }
        }
        let plus: Vec<PlayerId> = (0..num_players).filter(|p| !minus_set.contains(p)).collect();
        if plus.is_empty() || minus_set.is_empty() {
            return Err(Error::InvalidParameters(
                "both teams must be nonempty".into(),
            ));
        }
        Ok(TeamSplit {
            plus: TeamSpec::new(Team::Plus, plus),
            minus: TeamSpec::new(Team::Minus, minus_set.into_iter().collect()),
        })
    }

    pub fn spec(&self, team: Team) -> &TeamSpec {
        match team {
            Team::Plus => &self.plus,
            Team::Minus => &self.minus,
        }
    }
}

/// How the scalar team payoff is derived from per-player payoffs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffMode {
    /// Per-player payoffs sum to zero; a team's payoff is the sum over its
    /// members. Used by the poker and dice games, where money is conserved.
    MemberSum,
    /// The plus team's payoff is (sum over plus members) minus (sum over
    /// minus members). Used by score-accumulation games.
    Difference,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GameNodeKind {
    Decision { player: PlayerId },
    Chance,
    Terminal { payoffs: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct GameEdge {
    pub label: String,
    pub child: NodeId,
    /// Probability for chance edges; 1.0 on player edges.
    pub prob: f64,
}

#[derive(Debug, Clone)]
pub struct GameNode {
    pub kind: GameNodeKind,
    pub children: Vec<GameEdge>,
}

impl GameNode {
    pub fn is_terminal(&self) -> bool {
        matches!(self.kind, GameNodeKind::Terminal { .. })
    }
}

/// An infoset of one player: the set of that player's decision nodes it
/// cannot tell apart.
#[derive(Debug, Clone)]
pub struct GameInfoset {
    pub player: PlayerId,
    pub nodes: Vec<NodeId>,
}

/// An extensive-form game tree with per-player infosets.
#[derive(Debug, Clone)]
pub struct GameTree {
    pub nodes: Vec<GameNode>,
    pub root: NodeId,
    pub num_players: usize,
    pub infosets: Vec<GameInfoset>,
    pub payoff_mode: PayoffMode,
}

/// A named invariant violation found by [`GameTree::validate`].
#[derive(Debug, Clone)]
pub struct Violation {
    pub kind: &'static str,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.kind, self.message)
    }
}

impl GameTree {
    pub fn node(&self, id: NodeId) -> &GameNode {
        &self.nodes[id]
    }

    pub fn terminals(&self) -> Vec<NodeId> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].is_terminal())
            .collect()
    }

    pub fn terminal_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_terminal()).count()
    }

    /// Chance reach probability of every node (product of chance-edge
    /// probabilities on the root path).
    pub fn chance_reach(&self) -> Vec<f64> {
        let mut reach = vec![0.0; self.nodes.len()];
        let mut stack = vec![(self.root, 1.0f64)];
        while let Some((id, r)) = stack.pop() {
            reach[id] = r;
            for e in &self.nodes[id].children {
                let p = if matches!(self.nodes[id].kind, GameNodeKind::Chance) {
                    e.prob
                } else {
                    1.0
                };
                stack.push((e.child, r * p));
            }
        }
        reach
    }

    /// Scalar payoff for the plus team at a terminal node, under `split`.
    pub fn team_payoff(&self, leaf: NodeId, split: &TeamSplit) -> f64 {
        let payoffs = match &self.nodes[leaf].kind {
            GameNodeKind::Terminal { payoffs } => payoffs,
            _ => panic!("team_payoff on non-terminal node {leaf}"),
        };
        let sum_over = |spec: &TeamSpec| -> f64 {
            spec.members.iter().map(|&p| payoffs[p]).sum()
        };
        match self.payoff_mode {
            PayoffMode::MemberSum => sum_over(&split.plus),
            PayoffMode::Difference => sum_over(&split.plus) - sum_over(&split.minus),
        }
    }

    /// Infoset id of a decision node, if any.
    pub fn infoset_of(&self) -> HashMap<NodeId, usize> {
        let mut map = HashMap::new();
        for (i, is) in self.infosets.iter().enumerate() {
            for &n in &is.nodes {
                map.insert(n, i);
            }
        }
        map
    }

    /// Checks all structural invariants, returning every violation found.
    pub fn validate(&self, split: Option<&TeamSplit>) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |kind: &'static str, message: String| {
            out.push(Violation { kind, message });
        };

        // Chance probabilities sum to 1.
        for (id, n) in self.nodes.iter().enumerate() {
            if matches!(n.kind, GameNodeKind::Chance) {
                let s: f64 = n.children.iter().map(|e| e.prob).sum();
                if (s - 1.0).abs() > 1e-12 {
                    push(
                        "chance-probability",
                        format!("chance node {id} edge probabilities sum to {s}"),
                    );
                }
            }
            if let GameNodeKind::Terminal { payoffs } = &n.kind {
                if payoffs.len() != self.num_players {
                    push(
                        "payoff-arity",
                        format!("terminal {id} has {} payoffs", payoffs.len()),
                    );
                }
                if self.payoff_mode == PayoffMode::MemberSum {
                    let s: f64 = payoffs.iter().sum();
                    if s.abs() > 1e-9 {
                        push("zero-sum", format!("terminal {id} payoffs sum to {s}"));
                    }
                }
            }
        }

        // Infosets: member action sets identical; members are decision
        // nodes of the owning player.
        for (i, is) in self.infosets.iter().enumerate() {
            let mut labels: Option<Vec<&str>> = None;
            for &n in &is.nodes {
                match &self.nodes[n].kind {
                    GameNodeKind::Decision { player } if *player == is.player => {}
                    _ => push(
                        "infoset-membership",
                        format!("infoset {i}: node {n} is not a decision node of player {}", is.player),
                    ),
                }
                let l: Vec<&str> = self.nodes[n].children.iter().map(|e| e.label.as_str()).collect();
                match &labels {
                    None => labels = Some(l),
                    Some(prev) => {
                        if *prev != l {
                            push(
                                "action-set-mismatch",
                                format!("infoset {i}: node {n} has a different action set"),
                            );
                        }
                    }
                }
            }
        }

        // Every decision node belongs to exactly one infoset.
        let mut seen: HashMap<NodeId, usize> = HashMap::new();
        for (i, is) in self.infosets.iter().enumerate() {
            for &n in &is.nodes {
                if let Some(prev) = seen.insert(n, i) {
                    push(
                        "infoset-overlap",
                        format!("node {n} is in infosets {prev} and {i}"),
                    );
                }
            }
        }
        for (id, n) in self.nodes.iter().enumerate() {
            if matches!(n.kind, GameNodeKind::Decision { .. }) && !seen.contains_key(&id) {
                push("infoset-missing", format!("decision node {id} is in no infoset"));
            }
        }

        // Perfect recall: within an infoset of player p, all members have
        // the same player-p sequence of (infoset, action) pairs.
        let seqs = self.player_sequences();
        for (i, is) in self.infosets.iter().enumerate() {
            let mut first: Option<&Vec<(usize, usize)>> = None;
            for &n in &is.nodes {
                let s = &seqs[n][is.player];
                match first {
                    None => first = Some(s),
                    Some(f) => {
                        if f != s {
                            push(
                                "perfect-recall",
                                format!("infoset {i} of player {} mixes player sequences", is.player),
                            );
                            break;
                        }
                    }
                }
            }
        }

        if let Some(split) = split {
            let mut all: Vec<PlayerId> = split
                .plus
                .members
                .iter()
                .chain(split.minus.members.iter())
                .copied()
                .collect();
            all.sort_unstable();
            let expect: Vec<PlayerId> = (0..self.num_players).collect();
            if all != expect {
                push(
                    "team-partition",
                    "teams do not partition the player set".into(),
                );
            }
        }

        out
    }

    /// For each node, the per-player sequence of (infoset, action-index)
    /// pairs played on the root path (excluding the node itself).
    fn player_sequences(&self) -> Vec<Vec<Vec<(usize, usize)>>> {
        let infoset_of = self.infoset_of();
        let mut seqs: Vec<Vec<Vec<(usize, usize)>>> =
            vec![Vec::new(); self.nodes.len()];
        let mut stack = vec![self.root];
        seqs[self.root] = vec![Vec::new(); self.num_players];
        while let Some(id) = stack.pop() {
            for (ai, e) in self.nodes[id].children.iter().enumerate() {
                let mut s = seqs[id].clone();
                if let GameNodeKind::Decision { player } = self.nodes[id].kind {
                    if let Some(&is) = infoset_of.get(&id) {
                        s[player].push((is, ai));
                    }
                }
                seqs[e.child] = s;
                stack.push(e.child);
            }
        }
        seqs
    }
}

/// Incremental builder used by the game generators.
pub struct TreeBuilder {
    nodes: Vec<GameNode>,
    num_players: usize,
    /// Keyed infoset collection: nodes sharing a key end up in one infoset.
    infoset_keys: HashMap<(PlayerId, String), Vec<NodeId>>,
    infoset_order: Vec<(PlayerId, String)>,
    payoff_mode: PayoffMode,
}

impl TreeBuilder {
    pub fn new(num_players: usize, payoff_mode: PayoffMode) -> Self {
        TreeBuilder {
            nodes: Vec::new(),
            num_players,
            infoset_keys: HashMap::new(),
            infoset_order: Vec::new(),
            payoff_mode,
        }
    }

    pub fn chance(&mut self) -> NodeId {
        self.nodes.push(GameNode { kind: GameNodeKind::Chance, children: Vec::new() });
        self.nodes.len() - 1
    }

    /// Adds a decision node, grouping it with all nodes sharing `key`.
    pub fn decision(&mut self, player: PlayerId, key: impl Into<String>) -> NodeId {
        self.nodes.push(GameNode {
            kind: GameNodeKind::Decision { player },
            children: Vec::new(),
        });
        let id = self.nodes.len() - 1;
        let k = (player, key.into());
        let entry = self.infoset_keys.entry(k.clone()).or_default();
        if entry.is_empty() {
            self.infoset_order.push(k);
        }
        entry.push(id);
        
        id
    }

    pub fn terminal(&mut self, payoffs: Vec<f64>) -> NodeId {
        self.nodes.push(GameNode {
            kind: GameNodeKind::Terminal { payoffs },
            children: Vec::new(),
        });
        self.nodes.len() - 1
    }

    pub fn edge(&mut self, parent: NodeId, label: impl Into<String>, child: NodeId) {
        self.nodes[parent].children.push(GameEdge { label: label.into(), child, prob: 1.0 });
    }

    pub fn chance_edge(&mut self, parent: NodeId, label: impl Into<String>, child: NodeId, prob: f64) {
        self.nodes[parent].children.push(GameEdge { label: label.into(), child, prob });
    }

    pub fn finish(self, root: NodeId) -> GameTree {
        let infosets = self
            .infoset_order
            .iter()
            .map(|k| GameInfoset { player: k.0, nodes: self.infoset_keys[k].clone() })
            .collect();
        GameTree {
            nodes: self.nodes,
            root,
            num_players: self.num_players,
            infosets,
            payoff_mode: self.payoff_mode,
        }
    }
}
