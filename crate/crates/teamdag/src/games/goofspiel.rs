//! Goofspiel with sequentially encoded simultaneous bids.
//!
//! Chance reveals the prizes one at a time, in an order it picks uniformly
//! at random. Each round the players secretly bid one of their remaining
//! cards (encoded as sequential moves hidden by infosets); the highest bid
//! wins the prize's point value, ties splitting it equally.
//! In the limited-information variant only each auction's outcome (the
//! winner's identity, or a tie) is revealed, never the bids themselves.
//!
//! The plus team's payoff is its members' total score minus the opposing
//! team's total, so the generator needs the team split up front.

use crate::error::{Error, Result};
use crate::game::{GameTree, PayoffMode, TreeBuilder};

pub fn build_goofspiel(players: usize, ranks: usize, limited_info: bool) -> Result<GameTree> {
    if ranks != 3 {
        return Err(Error::InvalidParameters("goofspiel is fixed at 3 ranks".into()));
    }
    if players < 2 {
        return Err(Error::InvalidParameters("goofspiel needs at least 2 players".into()));
    }
    let mut b = TreeBuilder::new(players, PayoffMode::Difference);
    let st = State {
        players,
        ranks,
        limited_info,
        hands: vec![(0..ranks).map(|_| true).collect(); players],
        scores: vec![0.0; players],
        prizes_left: (0..ranks).collect(),
        view: vec![String::new(); players],
        bids: Vec::new(),
    };
    let root = prize_reveal(&mut b, st);
    Ok(b.finish(root))
}

#[derive(Clone)]
struct State {
    players: usize,
    ranks: usize,
    limited_info: bool,
    /// Remaining cards per player, indexed by rank.
    hands: Vec<Vec<bool>>,
    scores: Vec<f64>,
    prizes_left: Vec<usize>,
    /// What each player has observed so far (their infoset key prefix).
    view: Vec<String>,
    /// Bids of the current round so far.
    bids: Vec<usize>,
}

fn prize_reveal(b: &mut TreeBuilder, st: State) -> usize {
    if st.prizes_left.is_empty() {
        // Scores are halved, so the plus-minus difference equals the plus
        // team's prize haul above an even two-way split of the pot.
        return b.terminal(st.scores.iter().map(|s| s / 2.0).collect());
    }
    let chance = b.chance();
    let m = st.prizes_left.len() as f64;
    for (i, &prize) in st.prizes_left.iter().enumerate() {
        let mut s = st.clone();
        s.prizes_left.remove(i);
        for v in &mut s.view {
            v.push_str(&format!("P{prize};"));
        }
        let child = bid(b, s, prize);
        b.chance_edge(chance, format!("prize{prize}"), child, 1.0 / m);
    }
    chance
}

fn bid(b: &mut TreeBuilder, st: State, prize: usize) -> usize {
    let p = st.bids.len();
    if p == st.players {
        return resolve(b, st, prize);
    }
    let node = b.decision(p, format!("p{p}|{}", st.view[p]));
    for card in 0..st.ranks {
        if !st.hands[p][card] {
            continue;
        }
        let mut s = st.clone();
        s.hands[p][card] = false;
        s.bids.push(card);
        s.view[p].push_str(&format!("my{card};"));
        let child = bid(b, s, prize);
        b.edge(node, format!("bid{card}"), child);
    }
    node
}

fn resolve(b: &mut TreeBuilder, mut st: State, prize: usize) -> usize {
    let best = *st.bids.iter().max().unwrap();
    let winners: Vec<usize> = (0..st.players).filter(|&p| st.bids[p] == best).collect();
    // A tied prize is split equally among the tied top bidders.
    for &w in &winners {
        st.scores[w] += (prize + 1) as f64 / winners.len() as f64;
    }
    let bids = st.bids.clone();
    st.bids.clear();
    for p in 0..st.players {
        if st.limited_info {
            // Only the auction outcome is public: the set of players the
            // prize was awarded to, never the bids themselves.
            let outcome = format!(
                "w{}",
                winners.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(".")
            );
            st.view[p].push_str(&format!("{outcome};"));
        } else {
            let all = bids.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(".");
            st.view[p].push_str(&format!("bids{all};"));
        }
    }
    prize_reveal(b, st)
}
