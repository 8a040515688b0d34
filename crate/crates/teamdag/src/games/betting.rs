//! Shared limit-betting round used by the poker generators.
//!
//! One round: play proceeds in seat order; with no outstanding bet a player
//! may check or bet, facing a bet they may fold, call, or (while the bet cap
//! allows) raise. The round ends when every active player has matched the
//! outstanding bet, or immediately when a fold leaves a single player.

use crate::game::{NodeId, PlayerId, TreeBuilder};

#[derive(Clone)]
pub struct RoundState {
    /// Players still in the hand, in seat order.
    pub active: Vec<PlayerId>,
    /// Players that still have to act this round, front first.
    pub to_act: Vec<PlayerId>,
    /// Number of bets so far this round.
    pub bets: usize,
    /// Total chips contributed by each player over the whole hand.
    pub contrib: Vec<f64>,
    /// Chips contributed by each player in this round only.
    pub round_paid: Vec<f64>,
    /// Public action history of this round, e.g. "kbc".
    pub history: String,
}

impl RoundState {
    pub fn start(active: Vec<PlayerId>, num_players: usize, contrib: Vec<f64>) -> Self {
        RoundState {
            to_act: active.clone(),
            active,
            bets: 0,
            contrib,
            round_paid: vec![0.0; num_players],
            history: String::new(),
        }
    }
}

/// The outcome of a completed betting round.
pub struct RoundEnd {
    pub active: Vec<PlayerId>,
    pub contrib: Vec<f64>,
    pub history: String,
    /// True when everyone folded to a bet and one player remains.
    pub folded_out: bool,
}

pub struct RoundCfg<'a> {
    pub max_bets: usize,
    pub bet_size: f64,
    /// Infoset key for the acting player, given the round history so far.
    /// Must fold in every piece of private and public context outside the
    /// round itself.
    pub infoset_key: &'a dyn Fn(PlayerId, &str) -> String,
}

/// Expands one betting round into tree nodes. `on_end` produces the subtree
/// (showdown, next street, ...) hanging below each completed round.
pub fn run_round(
    b: &mut TreeBuilder,
    cfg: &RoundCfg,
    st: RoundState,
    on_end: &mut dyn FnMut(&mut TreeBuilder, RoundEnd) -> NodeId,
) -> NodeId {
    if st.to_act.is_empty() {
        return on_end(
            b,
            RoundEnd {
                folded_out: st.active.len() == 1,
                active: st.active,
                contrib: st.contrib,
                history: st.history,
            },
        );
    }
    let p = st.to_act[0];
    let node = b.decision(p, (cfg.infoset_key)(p, &st.history));
    let level = |bets: usize| bets as f64 * cfg.bet_size;

    if st.bets == 0 {
        // check
        {
            let mut s = st.clone();
            s.to_act.remove(0);
            s.history.push('k');
            let child = run_round(b, cfg, s, on_end);
            b.edge(node, "k", child);
        }
        if cfg.max_bets > 0 {
            let mut s = st.clone();
            s.history.push('b');
            s.bets = 1;
            s.contrib[p] += cfg.bet_size;
            s.round_paid[p] += cfg.bet_size;
            s.to_act = reopen(&s.active, p);
            let child = run_round(b, cfg, s, on_end);
            b.edge(node, "b", child);
        }
    } else {
        // fold
        {
            let mut s = st.clone();
            s.history.push('f');
            s.active.retain(|&q| q != p);
            s.to_act.retain(|&q| q != p);
            if s.active.len() == 1 {
                s.to_act.clear();
            }
            let child = run_round(b, cfg, s, on_end);
            b.edge(node, "f", child);
        }
        // call
        {
            let mut s = st.clone();
            s.history.push('c');
            let owe = level(s.bets) - s.round_paid[p];
            s.contrib[p] += owe;
            s.round_paid[p] += owe;
            s.to_act.remove(0);
            let child = run_round(b, cfg, s, on_end);
            b.edge(node, "c", child);
        }
        // raise
        if st.bets < cfg.max_bets {
            let mut s = st.clone();
            s.history.push('r');
            s.bets += 1;
            let owe = level(s.bets) - s.round_paid[p];
            s.contrib[p] += owe;
            s.round_paid[p] += owe;
            s.to_act = reopen(&s.active, p);
            let child = run_round(b, cfg, s, on_end);
            b.edge(node, "r", child);
        }
    }
    node
}

/// After an aggressive action by `p`, everyone else acts again, in seat
/// order starting after `p`.
fn reopen(active: &[PlayerId], p: PlayerId) -> Vec<PlayerId> {
    let idx = active.iter().position(|&q| q == p).unwrap();
    (1..active.len()).map(|i| active[(idx + i) % active.len()]).collect()
}
