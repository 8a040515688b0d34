//! Export of the saddle-point problem as a linear program in CPLEX-style
//! LP text.
//!
//! Variables are the minimizing team's prescription flows `ym_<node>_<k>`
//! (one per decision-node prescription in the ⊖ DAG, nonnegative) and one
//! free value variable `vp_<node>` per ⊕ decision node. Constraints:
//!
//! * ⊖ flow conservation: the root's prescription flows sum to 1; at every
//!   other nonterminal ⊖ node, outgoing flow equals incoming flow.
//! * ⊕ dual feasibility: at every nonterminal ⊕ node, `vp` dominates the
//!   children sum of each prescription; at every ⊕ terminal, `vp`
//!   dominates the bilinear payoff column, a linear form in the ⊖ flows
//!   reaching the paired ⊖ terminals.
//!
//! Minimizing `vp` at the ⊕ root therefore computes min over ⊖ strategies
//! of the best ⊕ response: the game value. Variable order and naming are
//! deterministic, so exports are diffable.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::dag::TbDag;
use crate::equilibrium::BilinearTeamGame;
use crate::error::Result;

/// Static size facts about an exported LP, used to check the O(E + leaves)
/// bound.
#[derive(Debug, Clone, Copy)]
pub struct LpStats {
    pub variables: usize,
    pub constraints: usize,
    pub nonzeros: usize,
}

fn fmt_terms(terms: &[(f64, String)]) -> String {
    let mut s = String::new();
    for (i, (c, v)) in terms.iter().enumerate() {
        if *c >= 0.0 {
            if i > 0 {
                s.push_str(" + ");
            }
        } else {
            s.push_str(if i > 0 { " - " } else { "- " });
        }
        let a = c.abs();
        if a == 1.0 {
            let _ = write!(s, "{v}");
        } else {
            let _ = write!(s, "{a} {v}");
        }
    }
    s
}

/// Incoming (node, prescription-index) pairs per DAG node.
fn incoming(d: &TbDag) -> Vec<Vec<(usize, usize)>> {
    let mut inc = vec![Vec::new(); d.nodes.len()];
    for (s, n) in d.nodes.iter().enumerate() {
        for (a, e) in n.edges.iter().enumerate() {
            for &c in &e.children {
                inc[c].push((s, a));
            }
        }
    }
    inc
}

pub fn lp_text(g: &BilinearTeamGame) -> (String, LpStats) {
    let plus = &g.plus.dag;
    let minus = &g.minus.dag;
    let minus_in = incoming(minus);

    let mut constraints: Vec<(String, String, &'static str, f64)> = Vec::new();
    let mut nonzeros = 0usize;

    // Minus-team flow conservation.
    for (s, n) in minus.nodes.iter().enumerate() {
        if n.edges.is_empty() {
            continue;
        }
        let mut terms: Vec<(f64, String)> =
            (0..n.edges.len()).map(|a| (1.0, format!("ym_{s}_{a}"))).collect();
        let rhs = if s == minus.root {
            1.0
        } else {
            for &(p, a) in &minus_in[s] {
                terms.push((-1.0, format!("ym_{p}_{a}")));
            }
            0.0
        };
        nonzeros += terms.len();
        constraints.push((format!("flow_{s}"), fmt_terms(&terms), "=", rhs));
    }

    // Leaves grouped by their plus-side terminal node.
    let mut leaves_at: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, l) in g.leaves.iter().enumerate() {
        leaves_at.entry(l.plus_node).or_default().push(i);
    }

    // Plus-team dual feasibility.
    for (s, n) in plus.nodes.iter().enumerate() {
        if n.is_terminal() {
            // vp_s - sum over leaves at s of c*U*(incoming minus flow) >= 0.
            let mut coef: HashMap<(usize, usize), f64> = HashMap::new();
            for &i in leaves_at.get(&s).map(|v| v.as_slice()).unwrap_or(&[]) {
                let l = &g.leaves[i];
                for &(p, a) in &minus_in[l.minus_node] {
                    *coef.entry((p, a)).or_insert(0.0) += l.chance * l.payoff;
                }
            }
            let mut terms = vec![(1.0, format!("vp_{s}"))];
            let mut keys: Vec<(usize, usize)> = coef.keys().copied().collect();
            keys.sort_unstable();
            for k in keys {
                let c = coef[&k];
                if c != 0.0 {
                    terms.push((-c, format!("ym_{}_{}", k.0, k.1)));
                }
            }
            nonzeros += terms.len();
            constraints.push((format!("leaf_{s}"), fmt_terms(&terms), ">=", 0.0));
        } else {
            for (a, e) in n.edges.iter().enumerate() {
                let mut terms = vec![(1.0, format!("vp_{s}"))];
                for &c in &e.children {
                    terms.push((-1.0, format!("vp_{c}")));
                }
                nonzeros += terms.len();
                constraints.push((format!("dual_{s}_{a}"), fmt_terms(&terms), ">=", 0.0));
            }
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "\\ bilinear saddle point over two belief DAGs");
    let _ = writeln!(out, "Minimize");
    let _ = writeln!(out, " obj: vp_{}", plus.root);
    let _ = writeln!(out, "Subject To");
    for (name, lhs, op, rhs) in &constraints {
        let _ = writeln!(out, " {name}: {lhs} {op} {rhs}");
    }
    let _ = writeln!(out, "Bounds");
    for s in 0..plus.nodes.len() {
        let _ = writeln!(out, " vp_{s} free");
    }
    let _ = writeln!(out, "End");

    let y_vars: usize = minus.nodes.iter().map(|n| n.edges.len()).sum();
    let stats = LpStats {
        variables: y_vars + plus.nodes.len(),
        constraints: constraints.len(),
        nonzeros,
    };
    (out, stats)
}

pub fn lp_export(g: &BilinearTeamGame, path: &Path) -> Result<LpStats> {
    let (text, stats) = lp_text(g);
    std::fs::write(path, text)?;
    Ok(stats)
}
