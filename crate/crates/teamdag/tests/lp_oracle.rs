//! The exported LP solved by an external solver matches the learned game
//! value.

use std::process::Command;

use teamdag::equilibrium::{assemble, self_play, StopCriteria};
use teamdag::game::{PayoffMode, TeamSplit, TreeBuilder};
use teamdag::games::build_kuhn;
use teamdag::learn::CfrVariant;
use teamdag::lp::lp_text;
use teamdag::pipeline::PipelineOptions;

fn solve_externally(lp: &str, file: &str) -> f64 {
    let dir = std::env::temp_dir();
    let path = dir.join(file);
    std::fs::write(&path, lp).unwrap();
    let script = concat!(env!("CARGO_MANIFEST_DIR"), "/../../tools/solve_lp.py");
    let out = Command::new("python3").arg(script).arg(&path).output().expect("python3 runs");
    assert!(
        out.status.success(),
        "LP solve failed: {}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    let val = text
        .split_whitespace()
        .nth(1)
        .expect("optimal <value> output")
        .parse::<f64>()
        .expect("numeric optimum");
    val
}

#[test]
fn single_leaf_lp_optimum_is_the_payoff() {
    // One action each, one leaf: the LP collapses to the leaf value c*U.
    let mut b = TreeBuilder::new(2, PayoffMode::MemberSum);
    let root = b.decision(0, "p0");
    let mid = b.decision(1, "p1");
    let z = b.terminal(vec![0.7, -0.7]);
    b.edge(root, "go", mid);
    b.edge(mid, "go", z);
    let g = b.finish(root);
    let split = TeamSplit::from_minus(2, &[1]).unwrap();
    let game = assemble(&g, &split, PipelineOptions::default()).unwrap();
    let (lp, _) = lp_text(&game);
    let opt = solve_externally(&lp, "teamdag_unit.lp");
    assert!((opt - 0.7).abs() <= 1e-9, "LP optimum {opt}");
}

#[test]
fn kuhn_lp_optimum_matches_cfr_value() {
    let g = build_kuhn(3, 3).unwrap();
    let split = TeamSplit::from_minus(3, &[2]).unwrap();
    let game = assemble(&g, &split, PipelineOptions::default()).unwrap();

    let (lp, stats) = lp_text(&game);
    let (v_plus, e_plus) = game.plus.dag.folded_counts();
    let (v_minus, e_minus) = game.minus.dag.folded_counts();
    assert!(stats.constraints <= 3 * (e_plus + e_minus + game.leaves.len()));
    let presc_plus: usize = game.plus.dag.nodes.iter().map(|n| n.edges.len()).sum();
    assert!(stats.constraints <= v_plus + v_minus + presc_plus);

    let opt = solve_externally(&lp, "teamdag_kuhn3.lp");
    let (_, _, trace) = self_play(
        &game,
        CfrVariant::Dcfr,
        StopCriteria { max_iters: 200_000, target_gap_fraction: 1e-8, time_limit_secs: 120.0 },
    );
    assert!(
        (opt - trace.final_value).abs() <= 1e-6,
        "LP optimum {opt} vs CFR value {} (gap {})",
        trace.final_value,
        trace.final_gap
    );
}
