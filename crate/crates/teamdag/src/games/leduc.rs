//! Multiplayer Leduc poker with a configurable bet cap per round.
//!
//! Deck: `ranks` ranks with `suits` identical copies each; suits never break
//! ties, so chance deals ranks directly with multiplicities. Each player
//! antes 1 and receives one card, then a betting round (bet size 2), one
//! public board card, a second betting round (bet size 4), and a showdown:
//! pairing the board beats any high card, ties split the pot.

use crate::error::{Error, Result};
use crate::game::{GameTree, PayoffMode, TreeBuilder};
use crate::games::betting::{run_round, RoundCfg, RoundEnd, RoundState};

const ROUND_BETS: [f64; 2] = [2.0, 4.0];

pub fn build_leduc(players: usize, max_bets: usize, ranks: usize, suits: usize) -> Result<GameTree> {
    if players < 2 {
        return Err(Error::InvalidParameters("leduc needs at least 2 players".into()));
    }
    if ranks * suits < players + 1 {
        return Err(Error::InvalidParameters(format!(
            "deck too small: {ranks} ranks x {suits} suits < {} cards needed",
            players + 1
        )));
    }
    let mut b = TreeBuilder::new(players, PayoffMode::MemberSum);
    let root = b.chance();
    let mut counts = vec![suits; ranks];
    let mut deal = Vec::new();
    deal_ranks(&mut b, root, players, max_bets, &mut counts, &mut deal, 1.0);
    Ok(b.finish(root))
}

fn deal_ranks(
    b: &mut TreeBuilder,
    parent: usize,
    players: usize,
    max_bets: usize,
    counts: &mut Vec<usize>,
    deal: &mut Vec<usize>,
    _acc: f64,
) {
    if deal.len() == players {
        let child = round_one(b, players, max_bets, deal.clone(), counts.clone());
        let label = deal.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(".");
        let prob = deal_probability(counts, deal);
        b.chance_edge(parent, label, child, prob);
        return;
    }
    for r in 0..counts.len() {
        if counts[r] == 0 {
            continue;
        }
        counts[r] -= 1;
        deal.push(r);
        deal_ranks(b, parent, players, max_bets, counts, deal, _acc);
        deal.pop();
        counts[r] += 1;
    }
}

/// Probability of dealing `deal` in order, where `counts` is the remaining
/// deck composition after the deal.
fn deal_probability(counts_after: &[usize], deal: &[usize]) -> f64 {
    let mut counts: Vec<usize> = counts_after.to_vec();
    for &r in deal {
        counts[r] += 1;
    }
    let mut deck: usize = counts.iter().sum();
    let mut p = 1.0;
    for &r in deal {
        p *= counts[r] as f64 / deck as f64;
        counts[r] -= 1;
        deck -= 1;
    }
    p
}

fn round_one(
    b: &mut TreeBuilder,
    players: usize,
    max_bets: usize,
    deal: Vec<usize>,
    counts: Vec<usize>,
) -> usize {
    let cards = deal.clone();
    let key = move |p: usize, hist: &str| format!("{}|r1:{}", cards[p], hist);
    let cfg = RoundCfg { max_bets, bet_size: ROUND_BETS[0], infoset_key: &key };
    let st = RoundState::start((0..players).collect(), players, vec![1.0; players]);
    run_round(b, &cfg, st, &mut |b, end: RoundEnd| {
        if end.folded_out {
            return payout(b, &deal, &end.active, &end.contrib, None);
        }
        board_card(b, players, max_bets, &deal, &counts, end)
    })
}

fn board_card(
    b: &mut TreeBuilder,
    players: usize,
    max_bets: usize,
    deal: &[usize],
    counts: &[usize],
    end: RoundEnd,
) -> usize {
    let chance = b.chance();
    let deck: usize = counts.iter().sum();
    for (board, &cnt) in counts.iter().enumerate() {
        if cnt == 0 {
            continue;
        }
        let child = round_two(b, players, max_bets, deal, board, &end);
        b.chance_edge(chance, format!("board{board}"), child, cnt as f64 / deck as f64);
    }
    chance
}

fn round_two(
    b: &mut TreeBuilder,
    players: usize,
    max_bets: usize,
    deal: &[usize],
    board: usize,
    prev: &RoundEnd,
) -> usize {
    let cards = deal.to_vec();
    let hist1 = prev.history.clone();
    let key = move |p: usize, hist: &str| {
        format!("{}|r1:{}|b{}|r2:{}", cards[p], hist1, board, hist)
    };
    let cfg = RoundCfg { max_bets, bet_size: ROUND_BETS[1], infoset_key: &key };
    let st = RoundState::start(prev.active.clone(), players, prev.contrib.clone());
    let deal = deal.to_vec();
    run_round(b, &cfg, st, &mut |b, end: RoundEnd| {
        payout(b, &deal, &end.active, &end.contrib, Some(board))
    })
}

fn payout(
    b: &mut TreeBuilder,
    deal: &[usize],
    active: &[usize],
    contrib: &[f64],
    board: Option<usize>,
) -> usize {
    let pot: f64 = contrib.iter().sum();
    let strength = |p: usize| -> (usize, usize) {
        let paired = board.map_or(false, |bd| deal[p] == bd);
        (paired as usize, deal[p])
    };
    let best = active.iter().map(|&p| strength(p)).max().unwrap();
    let winners: Vec<usize> = active.iter().copied().filter(|&p| strength(p) == best).collect();
    let share = pot / winners.len() as f64;
    let payoffs: Vec<f64> = (0..deal.len())
        .map(|p| {
            let won = if winners.contains(&p) { share } else { 0.0 };
            won - contrib[p]
        })
        .collect();
    b.terminal(payoffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_leaf_counts() {
        let g = build_leduc(3, 1, 3, 3).unwrap();
        assert_eq!(g.terminal_count(), 6477);
        assert!(g.validate(None).is_empty());
        let g = build_leduc(3, 2, 2, 3).unwrap();
        assert_eq!(g.terminal_count(), 8762);
        assert!(g.validate(None).is_empty());
    }

    #[test]
    fn deal_probabilities_sum_to_one() {
        let g = build_leduc(3, 1, 3, 2).unwrap();
        let root = &g.nodes[g.root];
        let s: f64 = root.children.iter().map(|e| e.prob).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_deck_smaller_than_deal_plus_board() {
        assert!(build_leduc(3, 1, 3, 1).is_err());
        assert!(build_leduc(1, 1, 3, 3).is_err());
    }
}
