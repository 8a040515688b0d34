//! Liar's Dice with one die per player.
//!
//! Each player privately rolls one `faces`-sided die. Starting from player
//! 0, players in turn either raise the standing bid — "at least `q` dice
//! show face `f`", bids ordered face-major (a higher face beats any
//! count; the same face needs a higher count) — or challenge it. On a
//! challenge the bid is checked against the actual rolls, no wild faces;
//! the loser of the challenge pays the winner one unit. This convention
//! matches the benchmark values.

use crate::error::{Error, Result};
use crate::game::{GameTree, PayoffMode, TreeBuilder};

pub fn build_liars_dice(players: usize, faces: usize) -> Result<GameTree> {
    build_liars_dice_variant(players, faces, None, false, true)
}

#[doc(hidden)]
pub fn build_liars_dice_variant(
    players: usize,
    faces: usize,
    wild_face: Option<usize>,
    exact: bool,
    face_major: bool,
) -> Result<GameTree> {
    if players < 2 || faces < 2 {
        return Err(Error::InvalidParameters(
            "liar's dice needs players >= 2 and faces >= 2".into(),
        ));
    }
    let mut b = TreeBuilder::new(players, PayoffMode::MemberSum);
    let root = b.chance();
    let n_rolls = (faces as f64).powi(players as i32);
    let mut roll = Vec::new();
    deal_rolls(&mut b, root, players, faces, 1.0 / n_rolls, &mut roll, wild_face, exact, face_major);
    Ok(b.finish(root))
}

fn deal_rolls(
    b: &mut TreeBuilder,
    parent: usize,
    players: usize,
    faces: usize,
    prob: f64,
    roll: &mut Vec<usize>,
    wild_face: Option<usize>,
    exact: bool,
    face_major: bool,
) {
    if roll.len() == players {
        let child = bidding(
            b, players, faces, roll.clone(), usize::MAX, 0, String::new(), wild_face, exact,
            face_major,
        );
        let label = roll.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(".");
        b.chance_edge(parent, label, child, prob);
        return;
    }
    for f in 0..faces {
        roll.push(f);
        deal_rolls(b, parent, players, faces, prob, roll, wild_face, exact, face_major);
        roll.pop();
    }
}

/// Bids are indexed 0..players*faces in the bidding order: by
/// (quantity, face) normally, by (face, quantity) when face-major.
fn bid_parts(bid: usize, players: usize, faces: usize, face_major: bool) -> (usize, usize) {
    if face_major {
        (bid % players + 1, bid / players)
    } else {
        (bid / faces + 1, bid % faces)
    }
}

fn bidding(
    b: &mut TreeBuilder,
    players: usize,
    faces: usize,
    roll: Vec<usize>,
    last_bid: usize,
    turn: usize,
    hist: String,
    wild_face: Option<usize>,
    exact: bool,
    face_major: bool,
) -> usize {
    let p = turn % players;
    let node = b.decision(p, format!("{}|{}", roll[p], hist));
    let num_bids = players * faces;
    let from = if last_bid == usize::MAX { 0 } else { last_bid + 1 };
    for bid in from..num_bids {
        let (q, f) = bid_parts(bid, players, faces, face_major);
        let child = bidding(
            b,
            players,
            faces,
            roll.clone(),
            bid,
            turn + 1,
            format!("{hist}{q}x{f};"),
            wild_face,
            exact,
            face_major,
        );
        b.edge(node, format!("{q}x{f}"), child);
    }
    if last_bid != usize::MAX {
        let (q, f) = bid_parts(last_bid, players, faces, face_major);
        let count = roll
            .iter()
            .filter(|&&d| d == f || wild_face.map_or(false, |w| d == w && w != f))
            .count();
        let bidder = (turn + players - 1) % players;
        let caller = p;
        let holds = if exact { count == q } else { count >= q };
        let (winner, loser) = if holds { (bidder, caller) } else { (caller, bidder) };
        let mut payoffs = vec![0.0; players];
        payoffs[winner] = 1.0;
        payoffs[loser] = -1.0;
        let t = b.terminal(payoffs);
        b.edge(node, "liar", t);
    }
    node
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_leaf_count() {
        // 3^3 deals times (2^(3*3) - 1) nonempty bid chains.
        let g = build_liars_dice(3, 3).unwrap();
        assert_eq!(g.terminal_count(), 27 * 511);
        assert!(g.validate(None).is_empty());
    }

    #[test]
    fn small_case_matches_closed_form() {
        // 2^2 deals times (2^(2*2) - 1) chains.
        let g = build_liars_dice(2, 2).unwrap();
        assert_eq!(g.terminal_count(), 4 * 15);
        assert!(g.validate(None).is_empty());
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(build_liars_dice(1, 3).is_err());
        assert!(build_liars_dice(2, 1).is_err());
    }
}
