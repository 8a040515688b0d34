//! Sequence-form strategies and CFR-family regret minimization on a
//! TB-DAG.
//!
//! A strategy is a local mixture over prescriptions at every decision
//! node; pushing the root's unit mass down the DAG yields reach values
//! whose restriction to terminal nodes is the (mixed) correlation plan.
//! Each iteration is two linear passes: `next_strategy` (top-down) and
//! `observe_utility` (bottom-up), both in O(edges).

use crate::dag::TbDag;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfrVariant {
    /// Vanilla regret matching, uniform averaging.
    Cfr,
    /// Regret matching plus (clip at zero), linear averaging.
    CfrPlus,
    /// Linear CFR: cumulative regrets discounted by t/(t+1), linear
    /// averaging.
    Lcfr,
    /// Discounted CFR with alpha = 1.5, beta = 0, quadratic averaging.
    Dcfr,
    /// Predictive CFR+: regret matching on clipped regrets plus the last
    /// instantaneous regret as prediction, quadratic averaging.
    PcfrPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Averaging {
    Uniform,
    Linear,
    Quadratic,
}

impl CfrVariant {
    pub fn averaging(self) -> Averaging {
        match self {
            CfrVariant::Cfr => Averaging::Uniform,
            CfrVariant::CfrPlus | CfrVariant::Lcfr => Averaging::Linear,
            CfrVariant::Dcfr | CfrVariant::PcfrPlus => Averaging::Quadratic,
        }
    }
}

const DCFR_ALPHA: f64 = 1.5;
const DCFR_BETA: f64 = 0.0;

/// Local mixtures and the reach values they induce.
#[derive(Debug, Clone)]
pub struct DagStrategy {
    /// Per decision node, the mixture over its prescription edges; empty
    /// at terminal nodes.
    pub local: Vec<Vec<f64>>,
    /// Unit root mass pushed down: every child of a taken edge receives
    /// the edge's full mass (children are disjoint continuations).
    pub reach: Vec<f64>,
}

impl DagStrategy {
    pub fn uniform(d: &TbDag) -> DagStrategy {
        let local = d
            .nodes
            .iter()
            .map(|n| vec![1.0 / n.edges.len().max(1) as f64; n.edges.len()])
            .collect();
        let mut s = DagStrategy { local, reach: Vec::new() };
        s.propagate(d);
        s
    }

    /// Recomputes `reach` from `local` in topological order.
    pub fn propagate(&mut self, d: &TbDag) {
        let mut reach = vec![0.0; d.nodes.len()];
        reach[d.root] = 1.0;
        for &s in &d.topo {
            let m = reach[s];
            if m == 0.0 {
                continue;
            }
            for (a, e) in d.nodes[s].edges.iter().enumerate() {
                let flow = m * self.local[s][a];
                for &c in &e.children {
                    reach[c] += flow;
                }
            }
        }
        self.reach = reach;
    }

    /// Largest violation of the flow invariants: local mixtures summing
    /// to 1 and reach values matching the propagated flow.
    pub fn flow_violation(&self, d: &TbDag) -> f64 {
        let mut worst: f64 = 0.0;
        for (s, n) in d.nodes.iter().enumerate() {
            if !n.edges.is_empty() {
                let sum: f64 = self.local[s].iter().sum();
                worst = worst.max((sum - 1.0).abs());
            }
        }
        let mut reach = vec![0.0; d.nodes.len()];
        reach[d.root] = 1.0;
        for &s in &d.topo {
            for (a, e) in d.nodes[s].edges.iter().enumerate() {
                let flow = reach[s] * self.local[s][a];
                for &c in &e.children {
                    reach[c] += flow;
                }
            }
        }
        for (s, &r) in reach.iter().enumerate() {
            worst = worst.max((r - self.reach[s]).abs());
        }
        worst
    }
}

/// Inner product of the strategy's terminal reach with a utility vector
/// indexed by DAG node id.
pub fn expected_value(d: &TbDag, strategy: &DagStrategy, u: &[f64]) -> Result<f64> {
    if u.len() != d.nodes.len() {
        return Err(Error::DimensionMismatch { expected: d.nodes.len(), got: u.len() });
    }
    Ok(d
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.is_terminal())
        .map(|(s, _)| strategy.reach[s] * u[s])
        .sum())
}

#[derive(Debug, Clone)]
pub struct RegretState {
    pub variant: CfrVariant,
    /// Completed iterations.
    pub t: u64,
    /// Cumulative regret per decision-node edge.
    regret: Vec<Vec<f64>>,
    /// Last instantaneous regret, used as the PCFR+ prediction.
    prediction: Vec<Vec<f64>>,
}

impl RegretState {
    pub fn new(d: &TbDag, variant: CfrVariant) -> RegretState {
        let zero: Vec<Vec<f64>> = d.nodes.iter().map(|n| vec![0.0; n.edges.len()]).collect();
        RegretState { variant, t: 0, regret: zero.clone(), prediction: zero }
    }
}

/// Regret matching: mixture proportional to clipped (predicted) regrets,
/// uniform when the positive part vanishes.
pub fn next_strategy(state: &RegretState, d: &TbDag) -> DagStrategy {
    let mut local = Vec::with_capacity(d.nodes.len());
    for (s, n) in d.nodes.iter().enumerate() {
        let k = n.edges.len();
        let mut w = vec![0.0; k];
        let mut sum = 0.0;
        for a in 0..k {
            let r = match state.variant {
                CfrVariant::PcfrPlus => state.regret[s][a] + state.prediction[s][a],
                _ => state.regret[s][a],
            };
            let r = r.max(0.0);
            w[a] = r;
            sum += r;
        }
        if sum > 0.0 {
            for x in &mut w {
                *x /= sum;
            }
        } else if k > 0 {
            w = vec![1.0 / k as f64; k];
        }
        local.push(w);
    }
    let mut strat = DagStrategy { local, reach: Vec::new() };
    strat.propagate(d);
    strat
}

/// Folds a terminal utility vector (indexed by DAG node id) bottom-up and
/// accumulates counterfactual regrets under the state's variant. `t`
/// advances by one.
pub fn observe_utility(
    state: &mut RegretState,
    d: &TbDag,
    strategy: &DagStrategy,
    u: &[f64],
) -> Result<()> {
    if u.len() != d.nodes.len() {
        return Err(Error::DimensionMismatch { expected: d.nodes.len(), got: u.len() });
    }
    let t = state.t as f64 + 1.0;
    // Per-unit-mass utilities, bottom-up.
    let mut val = vec![0.0f64; d.nodes.len()];
    for &s in d.topo.iter().rev() {
        let n = &d.nodes[s];
        if n.is_terminal() {
            val[s] = u[s];
            continue;
        }
        let mut played = 0.0;
        let mut q = vec![0.0; n.edges.len()];
        for (a, e) in n.edges.iter().enumerate() {
            let qa: f64 = e.children.iter().map(|&c| val[c]).sum();
            q[a] = qa;
            played += strategy.local[s][a] * qa;
        }
        val[s] = played;
        let reg = &mut state.regret[s];
        let pred = &mut state.prediction[s];
        for a in 0..q.len() {
            let inst = q[a] - played;
            match state.variant {
                CfrVariant::Cfr => reg[a] += inst,
                CfrVariant::CfrPlus | CfrVariant::PcfrPlus => {
                    reg[a] = (reg[a] + inst).max(0.0);
                    pred[a] = inst;
                }
                CfrVariant::Lcfr => {
                    reg[a] = (reg[a] + inst) * (t / (t + 1.0));
                }
                CfrVariant::Dcfr => {
                    reg[a] += inst;
                    if reg[a] > 0.0 {
                        let ta = t.powf(DCFR_ALPHA);
                        reg[a] *= ta / (ta + 1.0);
                    } else {
                        let tb = t.powf(DCFR_BETA);
                        reg[a] *= tb / (tb + 1.0);
                    }
                }
            }
        }
    }
    state.t += 1;
    Ok(())
}

/// Weighted running average of strategy iterates, kept as accumulated
/// node masses and edge flows.
#[derive(Debug, Clone)]
pub struct AverageStrategy {
    node_sum: Vec<f64>,
    edge_sum: Vec<Vec<f64>>,
    weight: f64,
    /// Iterates added so far; the next iterate has index count+1 for the
    /// linear/quadratic weighting schemes.
    count: u64,
}

impl AverageStrategy {
    pub fn new(d: &TbDag) -> AverageStrategy {
        AverageStrategy {
            node_sum: vec![0.0; d.nodes.len()],
            edge_sum: d.nodes.iter().map(|n| vec![0.0; n.edges.len()]).collect(),
            weight: 0.0,
            count: 0,
        }
    }

    pub fn add(&mut self, d: &TbDag, strategy: &DagStrategy, scheme: Averaging) {
        self.count += 1;
        let t = self.count as f64;
        let w = match scheme {
            Averaging::Uniform => 1.0,
            Averaging::Linear => t,
            Averaging::Quadratic => t * t,
        };
        self.weight += w;
        for s in 0..d.nodes.len() {
            self.node_sum[s] += w * strategy.reach[s];
            for a in 0..d.nodes[s].edges.len() {
                self.edge_sum[s][a] += w * strategy.reach[s] * strategy.local[s][a];
            }
        }
    }

    /// The averaged strategy: reach values are the weighted mean of the
    /// iterates' reaches; local mixtures are flow ratios (uniform where no
    /// mass ever arrived).
    pub fn normalized(&self, d: &TbDag) -> DagStrategy {
        let mut local = Vec::with_capacity(d.nodes.len());
        let mut reach = vec![0.0; d.nodes.len()];
        for s in 0..d.nodes.len() {
            let k = d.nodes[s].edges.len();
            if self.node_sum[s] > 0.0 {
                local.push(self.edge_sum[s].iter().map(|&f| f / self.node_sum[s]).collect());
            } else {
                local.push(vec![1.0 / k.max(1) as f64; k]);
            }
            if self.weight > 0.0 {
                reach[s] = self.node_sum[s] / self.weight;
            }
        }
        if self.weight == 0.0 {
            return DagStrategy::uniform(d);
        }
        let mut s = DagStrategy { local, reach };
        // Renormalize the local mixtures (flow ratios can drift by float
        // error) and recompute reach so the invariants hold exactly.
        for (i, n) in d.nodes.iter().enumerate() {
            if n.edges.is_empty() {
                continue;
            }
            let sum: f64 = s.local[i].iter().sum();
            if sum > 0.0 {
                for x in &mut s.local[i] {
                    *x /= sum;
                }
            }
        }
        s.propagate(d);
        s
    }
}
