//! End-to-end construction of one team's belief DAG from a game tree:
//! project, normalize timing, inflate, optionally reduce branching, build,
//! optimize.

use crate::dag::{build, optimize, unfolded_optimized_counts, Grouping, TbDag};
use crate::game::{GameTree, TeamSpec};
use crate::public::{compute_public_structure, PublicStructure};
use crate::reduce::{is_team_public, reduce_branching};
use crate::tfsdp::{inflate, make_timed, project, TeamTfsdp};
use crate::Result;

/// Everything produced along the way to one team's optimized DAG.
pub struct TeamPipeline {
    /// The preprocessed TFSDP the DAG was built from (timed, inflated,
    /// branching-reduced when applicable).
    pub tfsdp: TeamTfsdp,
    pub public: PublicStructure,
    /// Whether branching reduction was applied (requires team-public
    /// actions and a decision branching factor above 2).
    pub reduced: bool,
    /// The DAG as built, before optimization.
    pub built: TbDag,
    /// The DAG the solver runs on.
    pub dag: TbDag,
    /// Unfolded (observation vertices explicit) counts of `built` after
    /// terminal merging and pass-through splicing.
    pub unfolded_counts: (usize, usize),
}

/// Options for [`run_pipeline`].
#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub grouping: Grouping,
    /// Apply branching reduction when the TFSDP is team-public and has a
    /// decision branching factor above 2.
    pub reduce: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { grouping: Grouping::PublicObservations, reduce: true }
    }
}

pub fn run_pipeline(tree: &GameTree, team: &TeamSpec, opt: PipelineOptions) -> Result<TeamPipeline> {
    let t = inflate(&make_timed(&project(tree, team))?);
    let ps = compute_public_structure(&t);
    let needs_gadget = t
        .nodes
        .iter()
        .any(|n| matches!(n.kind, crate::tfsdp::TfKind::Decision { .. }) && n.children.len() > 2);
    let (t, ps, reduced) = if opt.reduce && needs_gadget && is_team_public(&t, &ps) {
        let r = reduce_branching(&t)?;
        let rps = compute_public_structure(&r);
        (r, rps, true)
    } else {
        (t, ps, false)
    };
    let built = build(&t, opt.grouping)?;
    let dag = optimize(&built, &t);
    let unfolded_counts = unfolded_optimized_counts(&built, &t);
    Ok(TeamPipeline { tfsdp: t, public: ps, reduced, built, dag, unfolded_counts })
}
