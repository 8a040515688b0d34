//! A family of single-team decision problems, parameterized by a chain
//! length `C`, in which grouping beliefs by public state blows up
//! exponentially while grouping by public observation stays quadratic.
//!
//! Nature picks a column `c` in `1..=C`. Over layers `t = 2..C-1`, if
//! `c` is `t-1` or `t+1`, a fresh team player who cannot tell the two
//! columns apart picks `a` in `{-1,+1}`; the game continues only when
//! `c = t+a`. Columns not involved at a layer pass through a probability-1
//! chance node so every column stays depth-aligned. At the bottom a
//! perfectly informed team player announces either `c` or `c+1`, and a
//! final team player who sees only the announced value (its infosets pair
//! the two columns that can announce the same value) picks one of two
//! actions. Payoffs are all zero; the family exercises structure, not
//! values. The last player index is a non-team dummy so the opposing team
//! is nonempty.

use crate::error::{Error, Result};
use crate::game::{GameTree, PayoffMode, TreeBuilder};

/// Player indices: gadget players 0..C-2 (one per middle layer), then the
/// announcer, the guesser, and a dummy opponent who never acts.
pub fn build_chain_game(c_max: usize) -> Result<GameTree> {
    if c_max < 2 {
        return Err(Error::InvalidParameters("chain game needs C >= 2".into()));
    }
    let announcer = c_max - 2;
    let guesser = c_max - 1;
    let num_players = c_max + 1; // gadget players + announcer + guesser + dummy
    let mut b = TreeBuilder::new(num_players, PayoffMode::MemberSum);
    let root = b.chance();
    for c in 1..=c_max {
        let child = column(&mut b, c_max, announcer, guesser, c, 2);
        b.chance_edge(root, format!("c{c}"), child, 1.0 / c_max as f64);
    }
    Ok(b.finish(root))
}

/// Expands column `c` from layer `t` down. Layers are "time steps":
/// layer `t` nodes sit at tree depth `t - 1`.
fn column(b: &mut TreeBuilder, c_max: usize, announcer: usize, guesser: usize, c: usize, t: usize) -> usize {
    if t == c_max {
        // Announcement layer: perfect information, singleton infosets.
        let node = b.decision(announcer, format!("ann{c}"));
        for v in [c, c + 1] {
            let g = b.decision(guesser, format!("heard{v}"));
            for opt in 0..2 {
                let z = b.terminal(vec![0.0; c_max + 1]);
                b.edge(g, format!("opt{opt}"), z);
            }
            b.edge(node, format!("say{v}"), g);
        }
        return node;
    }
    if c == t - 1 || c == t + 1 {
        // The layer-t gadget player cannot tell columns t-1 and t+1 apart.
        let node = b.decision(t - 2, format!("layer{t}"));
        for a in [-1i64, 1] {
            let child = if c as i64 == t as i64 + a {
                column(b, c_max, announcer, guesser, c, t + 1)
            } else {
                b.terminal(vec![0.0; c_max + 1])
            };
            let dir = if a < 0 { "down" } else { "up" };
            b.edge(node, dir, child);
        }
        node
    } else {
        // Pass-through padding keeps the column depth-aligned.
        let pad = b.chance();
        let child = column(b, c_max, announcer, guesser, c, t + 1);
        b.chance_edge(pad, "pass", child, 1.0);
        pad
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_closed_form() {
        // Per column, one kill terminal per gadget layer it acts in, plus
        // 2 announcements x 2 guesses when it survives. For C = 6 the
        // gadget act count is 8, so 8 + 6*4 = 32 leaves. Infosets: one per
        // gadget layer (4), C singleton announcer infosets, C+1 guesser
        // infosets keyed by announced value.
        let g = build_chain_game(6).unwrap();
        assert_eq!(g.terminal_count(), 32);
        assert_eq!(g.infosets.len(), 4 + 6 + 7);
        assert!(g.validate(None).is_empty());
    }

    #[test]
    fn nontrivial_infosets_have_size_two() {
        let g = build_chain_game(8).unwrap();
        assert!(g.infosets.iter().all(|is| is.nodes.len() <= 2));
        assert!(g.validate(None).is_empty());
    }

    #[test]
    fn rejects_short_chains() {
        assert!(build_chain_game(0).is_err());
        assert!(build_chain_game(1).is_err());
        assert!(build_chain_game(2).is_ok());
        assert!(build_chain_game(3).is_ok());
    }
}
