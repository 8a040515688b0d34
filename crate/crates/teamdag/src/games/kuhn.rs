//! Multiplayer Kuhn poker: one ante, a single one-bet betting round, and a
//! showdown where the highest card wins the pot.

use crate::error::{Error, Result};
use crate::game::{GameTree, PayoffMode, TreeBuilder};
use crate::games::betting::{run_round, RoundCfg, RoundEnd, RoundState};

pub fn build_kuhn(players: usize, ranks: usize) -> Result<GameTree> {
    if players < 2 {
        return Err(Error::InvalidParameters("kuhn needs at least 2 players".into()));
    }
    if ranks < players {
        return Err(Error::InvalidParameters(format!(
            "kuhn needs ranks >= players ({ranks} < {players})"
        )));
    }
    let mut b = TreeBuilder::new(players, PayoffMode::MemberSum);
    let root = b.chance();
    let prob = 1.0 / perm(ranks, players) as f64;
    let mut deal = Vec::new();
    deal_distinct(&mut b, root, ranks, players, prob, &mut deal);
    Ok(b.finish(root))
}

fn deal_distinct(
    b: &mut TreeBuilder,
    parent: usize,
    ranks: usize,
    players: usize,
    prob: f64,
    deal: &mut Vec<usize>,
) {
    if deal.len() == players {
        let child = betting(b, players, deal.clone());
        let label = deal.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(".");
        b.chance_edge(parent, label, child, prob);
        return;
    }
    for c in 0..ranks {
        if deal.contains(&c) {
            continue;
        }
        deal.push(c);
        deal_distinct(b, parent, ranks, players, prob, deal);
        deal.pop();
    }
}

fn perm(n: usize, k: usize) -> usize {
    (0..k).map(|i| n - i).product()
}

fn betting(b: &mut TreeBuilder, players: usize, deal: Vec<usize>) -> usize {
    let cards = deal.clone();
    let key = move |p: usize, hist: &str| format!("{}|{}", cards[p], hist);
    let cfg = RoundCfg { max_bets: 1, bet_size: 1.0, infoset_key: &key };
    let st = RoundState::start((0..players).collect(), players, vec![1.0; players]);
    run_round(b, &cfg, st, &mut |b, end: RoundEnd| showdown(b, &deal, end))
}

fn showdown(b: &mut TreeBuilder, deal: &[usize], end: RoundEnd) -> usize {
    let pot: f64 = end.contrib.iter().sum();
    let winner = *end.active.iter().max_by_key(|&&p| deal[p]).unwrap();
    let payoffs: Vec<f64> = (0..deal.len())
        .map(|p| if p == winner { pot - end.contrib[p] } else { -end.contrib[p] })
        .collect();
    b.terminal(payoffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_player_leaf_counts() {
        for (ranks, leaves) in [(3, 78), (4, 312), (6, 1560)] {
            let g = build_kuhn(3, ranks).unwrap();
            assert_eq!(g.terminal_count(), leaves, "ranks={ranks}");
            assert!(g.validate(None).is_empty());
        }
    }

    #[test]
    fn two_player_matches_closed_form() {
        // 6 deals x 5 betting sequences (kk, kbf, kbc, bf, bc).
        let g = build_kuhn(2, 3).unwrap();
        assert_eq!(g.terminal_count(), 30);
    }

    #[test]
    fn pot_is_conserved() {
        let g = build_kuhn(3, 4).unwrap();
        assert!(g.validate(None).is_empty());
    }

    #[test]
    fn rejects_too_few_ranks() {
        assert!(build_kuhn(3, 2).is_err());
        assert!(build_kuhn(1, 3).is_err());
    }
}
