//! The two-team zero-sum saddle point over both belief DAGs: assembly of
//! the bilinear payoff registry, alternating CFR self-play, and
//! exploitability.

use std::collections::HashMap;
use std::time::Instant;

use crate::dag::{best_response, DagId};
use crate::error::{Error, Result};
use crate::game::{GameTree, Team, TeamSplit};
use crate::learn::{
    expected_value, next_strategy, observe_utility, AverageStrategy, CfrVariant, DagStrategy,
    RegretState,
};
use crate::pipeline::{run_pipeline, PipelineOptions, TeamPipeline};

/// One game leaf routed into both teams' DAGs.
#[derive(Debug, Clone, Copy)]
pub struct LeafEntry {
    /// Chance reach probability of the leaf.
    pub chance: f64,
    /// Payoff to the plus team.
    pub payoff: f64,
    /// Terminal decision node holding this leaf in the plus DAG.
    pub plus_node: DagId,
    /// Same in the minus DAG.
    pub minus_node: DagId,
}

pub struct BilinearTeamGame {
    pub plus: TeamPipeline,
    pub minus: TeamPipeline,
    pub leaves: Vec<LeafEntry>,
    /// Payoff spread max U - min U; the Nash-gap target scales with it.
    pub range: f64,
}

/// Terminal DAG node per original game leaf, resolved through the TFSDP
/// origin links and the DAG's terminal alias lists.
fn leaf_to_dag(p: &TeamPipeline) -> HashMap<crate::game::NodeId, DagId> {
    let mut map = HashMap::new();
    for (s, n) in p.dag.nodes.iter().enumerate() {
        for &z in &n.terminals {
            if let Some(g) = p.tfsdp.nodes[z].origin {
                map.insert(g, s);
            }
        }
    }
    map
}

pub fn assemble(tree: &GameTree, split: &TeamSplit, opt: PipelineOptions) -> Result<BilinearTeamGame> {
    let plus = run_pipeline(tree, &split.plus, opt)?;
    let minus = run_pipeline(tree, &split.minus, opt)?;
    let plus_map = leaf_to_dag(&plus);
    let minus_map = leaf_to_dag(&minus);
    let reach = tree.chance_reach();
    let mut leaves = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut total = 0.0;
    for z in tree.terminals() {
        let (pn, mn) = match (plus_map.get(&z), minus_map.get(&z)) {
            (Some(&a), Some(&b)) => (a, b),
            _ => {
                return Err(Error::InvalidTree(format!(
                    "game leaf {z} has no terminal in both DAGs"
                )))
            }
        };
        let payoff = tree.team_payoff(z, split);
        lo = lo.min(payoff);
        hi = hi.max(payoff);
        total += reach[z];
        leaves.push(LeafEntry { chance: reach[z], payoff, plus_node: pn, minus_node: mn });
    }
    let _ = total;
    let range = if hi > lo { hi - lo } else { 1.0 };
    let g = BilinearTeamGame { plus, minus, leaves, range };
    // Chance mass conservation: under any full behavioral profile the
    // reached leaves carry total probability 1. Checked at the uniform
    // profile, where both teams' reach values are exact products of
    // uniform infoset mixtures.
    let ux = DagStrategy::uniform(&g.plus.dag);
    let uy = DagStrategy::uniform(&g.minus.dag);
    let mass: f64 = g
        .leaves
        .iter()
        .map(|l| l.chance * ux.reach[l.plus_node] * uy.reach[l.minus_node])
        .sum();
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidTree(format!(
            "leaf probability under the uniform profile sums to {mass}, expected 1"
        )));
    }
    Ok(g)
}

/// Gradient of the bilinear payoff for one team against the opponent's
/// strategy: a utility vector indexed by that team's DAG node ids.
pub fn utility_for(g: &BilinearTeamGame, team: Team, opponent: &DagStrategy) -> Vec<f64> {
    match team {
        Team::Plus => {
            let mut u = vec![0.0; g.plus.dag.nodes.len()];
            for l in &g.leaves {
                u[l.plus_node] += l.chance * l.payoff * opponent.reach[l.minus_node];
            }
            u
        }
        Team::Minus => {
            let mut u = vec![0.0; g.minus.dag.nodes.len()];
            for l in &g.leaves {
                u[l.minus_node] -= l.chance * l.payoff * opponent.reach[l.plus_node];
            }
            u
        }
    }
}

/// Expected plus-team payoff of a strategy profile.
pub fn profile_value(g: &BilinearTeamGame, x: &DagStrategy, y: &DagStrategy) -> f64 {
    g.leaves
        .iter()
        .map(|l| l.chance * l.payoff * x.reach[l.plus_node] * y.reach[l.minus_node])
        .sum()
}

/// Nash gap of a profile: best response value for each team against the
/// other's strategy. Returns (gap, best plus value vs y, best-responded
/// minus value vs x); gap = br_plus - br_minus >= 0.
pub fn exploitability(g: &BilinearTeamGame, x: &DagStrategy, y: &DagStrategy) -> (f64, f64, f64) {
    let (br_plus, _) = best_response(&g.plus.dag, &utility_for(g, Team::Plus, y));
    let (br_minus_neg, _) = best_response(&g.minus.dag, &utility_for(g, Team::Minus, x));
    let br_minus = -br_minus_neg;
    (br_plus - br_minus, br_plus, br_minus)
}

#[derive(Debug, Clone, Copy)]
pub struct TracePoint {
    pub iteration: u64,
    pub seconds: f64,
    pub gap: f64,
    /// Plus-team value of the average profile.
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GapReached,
    IterationLimit,
    TimeLimit,
}

#[derive(Debug, Clone)]
pub struct SolveTrace {
    pub points: Vec<TracePoint>,
    pub stop: StopReason,
    pub iterations: u64,
    pub final_gap: f64,
    pub final_value: f64,
}

/// Which opponent strategy feeds each half-iteration's gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientSource {
    /// The opponent's running average (anytime-consistent with the gap
    /// evaluation, but a slower dynamic).
    Average,
    /// The opponent's current iterate (standard alternating CFR).
    Current,
}

#[derive(Debug, Clone, Copy)]
pub struct StopCriteria {
    pub max_iters: u64,
    /// Stop once gap <= target_gap_fraction * payoff range.
    pub target_gap_fraction: f64,
    pub time_limit_secs: f64,
}

impl Default for StopCriteria {
    fn default() -> Self {
        StopCriteria { max_iters: 100_000, target_gap_fraction: 1e-3, time_limit_secs: 600.0 }
    }
}

/// Alternating CFR self-play. Each half-iteration plays one team's next
/// strategy against the opponent's running average, folds the utility into
/// the regrets, and pushes the iterate into the average. Checkpoints
/// (exponentially dense early, then every max_iters/100) record the gap of
/// the average profile.
pub fn self_play(
    g: &BilinearTeamGame,
    variant: CfrVariant,
    stop: StopCriteria,
) -> (DagStrategy, DagStrategy, SolveTrace) {
    self_play_from(g, variant, stop, GradientSource::Current)
}

pub fn self_play_from(
    g: &BilinearTeamGame,
    variant: CfrVariant,
    stop: StopCriteria,
    source: GradientSource,
) -> (DagStrategy, DagStrategy, SolveTrace) {
    let start = Instant::now();
    let scheme = variant.averaging();
    let mut rs_plus = RegretState::new(&g.plus.dag, variant);
    let mut rs_minus = RegretState::new(&g.minus.dag, variant);
    let mut avg_plus = AverageStrategy::new(&g.plus.dag);
    let mut avg_minus = AverageStrategy::new(&g.minus.dag);
    let mut cur_minus = DagStrategy::uniform(&g.minus.dag);

    let cadence = (stop.max_iters / 100).max(1);
    let target = stop.target_gap_fraction * g.range;
    let mut points: Vec<TracePoint> = Vec::new();
    let reason;
    let mut t: u64 = 0;
    loop {
        t += 1;
        // Plus half-iteration against the minus running average (the
        // current iterate before any averages exist).
        let opp = match source {
            GradientSource::Current => cur_minus.clone(),
            GradientSource::Average if t == 1 => cur_minus.clone(),
            GradientSource::Average => avg_minus.normalized(&g.minus.dag),
        };
        let x = next_strategy(&rs_plus, &g.plus.dag);
        let ux = utility_for(g, Team::Plus, &opp);
        observe_utility(&mut rs_plus, &g.plus.dag, &x, &ux).expect("sized utility");
        avg_plus.add(&g.plus.dag, &x, scheme);

        // Minus half-iteration against the freshly updated plus side.
        let opp = match source {
            GradientSource::Current => x.clone(),
            GradientSource::Average => avg_plus.normalized(&g.plus.dag),
        };
        let y = next_strategy(&rs_minus, &g.minus.dag);
        let uy = utility_for(g, Team::Minus, &opp);
        observe_utility(&mut rs_minus, &g.minus.dag, &y, &uy).expect("sized utility");
        avg_minus.add(&g.minus.dag, &y, scheme);
        cur_minus = y;

        let checkpoint = t.is_power_of_two() || t % cadence == 0 || t >= stop.max_iters;
        let elapsed = start.elapsed().as_secs_f64();
        if checkpoint || elapsed > stop.time_limit_secs {
            let xb = avg_plus.normalized(&g.plus.dag);
            let yb = avg_minus.normalized(&g.minus.dag);
            let (gap, _, _) = exploitability(g, &xb, &yb);
            let value = profile_value(g, &xb, &yb);
            points.push(TracePoint { iteration: t, seconds: elapsed, gap, value });
            if gap <= target {
                reason = StopReason::GapReached;
                break;
            }
            if elapsed > stop.time_limit_secs {
                reason = StopReason::TimeLimit;
                break;
            }
            if t >= stop.max_iters {
                reason = StopReason::IterationLimit;
                break;
            }
        }
    }
    let xb = avg_plus.normalized(&g.plus.dag);
    let yb = avg_minus.normalized(&g.minus.dag);
    let last = points.last().copied().expect("at least one checkpoint");
    let trace = SolveTrace {
        points,
        stop: reason,
        iterations: t,
        final_gap: last.gap,
        final_value: last.value,
    };
    (xb, yb, trace)
}

/// Expected value of one team's strategy against a fixed opponent
/// gradient; exposed for tests.
pub fn team_value(g: &BilinearTeamGame, team: Team, own: &DagStrategy, opp: &DagStrategy) -> f64 {
    let d = match team {
        Team::Plus => &g.plus.dag,
        Team::Minus => &g.minus.dag,
    };
    expected_value(d, own, &utility_for(g, team, opp)).expect("sized utility")
}
