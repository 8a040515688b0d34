//! Command-line front end: build games, report DAG statistics and
//! parameters, run solvers, export LPs, and run the brute-force oracle
//! suite.
//!
//! Exit codes: 0 success, 2 parse error, 3 resource guard, 4 property
//! failure.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dag::{
    build, correlation_plan, enumerate_pure, optimize, stats, Grouping as DagGrouping, TbDag,
};
use crate::equilibrium::{
    assemble, exploitability, profile_value, self_play, BilinearTeamGame, StopCriteria,
};
use crate::error::Error;
use crate::game::{GameTree, TeamSplit};
use crate::games::{build_chain_game, build_goofspiel, build_kuhn, build_leduc, build_liars_dice};
use crate::learn::{CfrVariant, DagStrategy};
use crate::lp::lp_export;
use crate::pipeline::{run_pipeline, PipelineOptions, TeamPipeline};
use crate::public::compute_public_structure;
use crate::tfsdp::{build_crossed_fixture, inflate, make_timed, TeamTfsdp, TfKind};

const EXIT_OK: i32 = 0;
const EXIT_PARSE: i32 = 2;
const EXIT_RESOURCE: i32 = 3;
const EXIT_PROPERTY: i32 = 4;

#[derive(Parser)]
#[command(
    name = "teamdag",
    about = "Team belief DAG toolkit for two-team zero-sum games",
    long_about = "Builds team belief DAGs for two-team zero-sum games, runs CFR-family \
solvers on them, exports equivalent linear programs, and cross-checks the \
construction against brute-force oracles.\n\n\
Game spec grammar: FAMILY [--players N] [--ranks R] [--suits S] [--max-bets B] \
[--faces F] [--c C] [--minus LIST]. Families: K (Kuhn poker), L (Leduc poker), \
D (Liar's Dice), G (Goofspiel), GL (limited-information Goofspiel), fig1 \
(crossed-infoset fixture), cex (public-state blowup family). --minus lists \
1-indexed players on the opposing team, comma-separated; default: the last \
player.\n\n\
If the environment variable TEAMDAG_OUT_DIR is set, relative output paths are \
placed under it."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build both teams' belief DAGs and report sizes, structure
    /// parameters, and the theoretical edge bounds.
    Build {
        #[command(flatten)]
        game: GameArgs,
        /// Write the plus-team DAG dump to this path.
        #[arg(long, value_name = "PATH")]
        dump_dag: Option<PathBuf>,
    },
    /// Run CFR self-play to a target gap and write the convergence trace.
    Solve {
        #[command(flatten)]
        game: GameArgs,
        /// CFR variant.
        #[arg(long, value_enum, default_value_t = Algo::Dcfr)]
        algo: Algo,
        /// Iteration budget; 0 evaluates the uniform profile only.
        #[arg(long, default_value_t = 100_000)]
        max_iters: u64,
        /// Stop once the Nash gap falls below this fraction of the payoff
        /// range.
        #[arg(long, default_value_t = 1e-3)]
        target: f64,
        /// Wall-clock budget in seconds.
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
        /// Write the trace as CSV (header: iteration,seconds,gap,value).
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Export the saddle-point linear program.
    Lp {
        #[command(flatten)]
        game: GameArgs,
        /// Output path for the LP file.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Run the brute-force oracle suite and print per-property verdicts.
    Oracle {
        #[command(flatten)]
        game: GameArgs,
        /// Upper bound on enumerated pure strategies before the
        /// equivalence check is skipped.
        #[arg(long, default_value_t = 500_000)]
        guard: u64,
        /// Corrupt the DAG before checking, to exercise the failure path.
        #[arg(long, default_value_t = false)]
        corrupt: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Multiplayer Kuhn poker (--players, --ranks).
    K,
    /// Multiplayer Leduc poker (--players, --max-bets, --ranks, --suits).
    L,
    /// Liar's Dice, one die per player (--players, --faces).
    D,
    /// Goofspiel with 3 ranks (--players).
    G,
    /// Limited-information Goofspiel (--players).
    #[value(name = "GL", alias = "gl")]
    Gl,
    /// Crossed-infoset decision-problem fixture (no parameters).
    Fig1,
    /// Public-state blowup family (--c).
    Cex,
}

#[derive(Args)]
struct GameArgs {
    /// Game family.
    #[arg(value_enum, ignore_case = true)]
    family: Family,
    /// Number of players.
    #[arg(long)]
    players: Option<usize>,
    /// Card ranks (K, L).
    #[arg(long)]
    ranks: Option<usize>,
    /// Card suits (L).
    #[arg(long)]
    suits: Option<usize>,
    /// Bet cap per betting round (L).
    #[arg(long)]
    max_bets: Option<usize>,
    /// Die faces (D).
    #[arg(long)]
    faces: Option<usize>,
    /// Chain length (cex).
    #[arg(long)]
    c: Option<usize>,
    /// Opposing-team players, 1-indexed, comma-separated (default: last
    /// player).
    #[arg(long, value_delimiter = ',')]
    minus: Option<Vec<usize>>,
    /// Child-belief grouping used during construction.
    #[arg(long, value_enum, default_value_t = Grouping::PublicObservations)]
    grouping: Grouping,
    /// Disable branching reduction (default: applied automatically when
    /// the team's actions are public).
    #[arg(long, default_value_t = false)]
    no_reduce: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Grouping {
    PublicObservations,
    PublicStates,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Cfr,
    #[value(name = "cfr+")]
    CfrPlus,
    Lcfr,
    Dcfr,
    #[value(name = "pcfr+")]
    PcfrPlus,
}

impl Algo {
    fn variant(self) -> CfrVariant {
        match self {
            Algo::Cfr => CfrVariant::Cfr,
            Algo::CfrPlus => CfrVariant::CfrPlus,
            Algo::Lcfr => CfrVariant::Lcfr,
            Algo::Dcfr => CfrVariant::Dcfr,
            Algo::PcfrPlus => CfrVariant::PcfrPlus,
        }
    }
}

/// What a game spec resolves to: a two-team game tree, or a single-team
/// decision-problem fixture.
enum Instance {
    Game { tree: GameTree, split: TeamSplit },
    Fixture(TeamTfsdp),
}

fn resolve(args: &GameArgs) -> Result<Instance, CliError> {
    let reject = |flag: &str| {
        Err(CliError::parse(format!("--{flag} does not apply to this game family")))
    };
    let players = args.players.unwrap_or(3);
    if args.family != Family::L && args.max_bets.is_some() {
        return reject("max-bets");
    }
    if args.family != Family::L && args.suits.is_some() {
        return reject("suits");
    }
    if !matches!(args.family, Family::K | Family::L) && args.ranks.is_some() {
        return reject("ranks");
    }
    if args.family != Family::D && args.faces.is_some() {
        return reject("faces");
    }
    if args.family != Family::Cex && args.c.is_some() {
        return reject("c");
    }
    if matches!(args.family, Family::Fig1 | Family::Cex) && args.players.is_some() {
        return reject("players");
    }
    let tree = match args.family {
        Family::K => build_kuhn(players, args.ranks.unwrap_or(3))?,
        Family::L => build_leduc(
            players,
            args.max_bets.unwrap_or(1),
            args.ranks.unwrap_or(3),
            args.suits.unwrap_or(3),
        )?,
        Family::D => build_liars_dice(players, args.faces.unwrap_or(3))?,
        Family::G => build_goofspiel(players, 3, false)?,
        Family::Gl => build_goofspiel(players, 3, true)?,
        Family::Cex => build_chain_game(args.c.unwrap_or(6))?,
        Family::Fig1 => {
            if args.minus.is_some() {
                return reject("minus");
            }
            let t = inflate(&make_timed(&build_crossed_fixture())?);
            return Ok(Instance::Fixture(t));
        }
    };
    let minus: Vec<usize> = match &args.minus {
        Some(list) => {
            let mut out = Vec::new();
            for &p in list {
                if p == 0 || p > tree.num_players {
                    return Err(CliError::parse(format!(
                        "--minus player {p} out of range 1..={}",
                        tree.num_players
                    )));
                }
                out.push(p - 1);
            }
            out
        }
        None => vec![tree.num_players - 1],
    };
    let split = TeamSplit::from_minus(tree.num_players, &minus)?;
    Ok(Instance::Game { tree, split })
}

fn pipeline_options(args: &GameArgs) -> PipelineOptions {
    PipelineOptions {
        grouping: match args.grouping {
            Grouping::PublicObservations => DagGrouping::PublicObservations,
            Grouping::PublicStates => DagGrouping::PublicStates,
        },
        reduce: !args.no_reduce,
    }
}

/// Resolves an output path against TEAMDAG_OUT_DIR for relative paths.
fn out_path(p: &Path) -> PathBuf {
    match std::env::var_os("TEAMDAG_OUT_DIR") {
        Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
        _ => p.to_path_buf(),
    }
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn parse(message: String) -> CliError {
        CliError { code: EXIT_PARSE, message }
    }
    fn resource(message: String) -> CliError {
        CliError { code: EXIT_RESOURCE, message }
    }
    fn property(message: String) -> CliError {
        CliError { code: EXIT_PROPERTY, message }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = match &e {
            Error::InvalidParameters(_) | Error::Parse { .. } => EXIT_PARSE,
            Error::TooLarge(_) => EXIT_RESOURCE,
            Error::Io(_) => EXIT_RESOURCE,
            _ => EXIT_PROPERTY,
        };
        CliError { code, message: e.to_string() }
    }
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap renders help/version through the error path with exit
            // code 0; real parse errors exit with 2.
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Build { game, dump_dag } => cmd_build(game, dump_dag.as_deref()),
        Command::Solve { game, algo, max_iters, target, time_limit, csv } => {
            cmd_solve(game, *algo, *max_iters, *target, *time_limit, csv.as_deref())
        }
        Command::Lp { game, out } => cmd_lp(game, out),
        Command::Oracle { game, guard, corrupt } => cmd_oracle(game, *guard, *corrupt),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn print_team_report(label: &str, p: &TeamPipeline) {
    let report = stats(&p.built, &p.tfsdp, &p.public);
    println!(
        "team {label}: vertices {} edges {} (optimized {} / {})",
        report.raw_vertices,
        report.raw_edges,
        p.dag.folded_counts().0,
        p.dag.folded_counts().1
    );
    println!(
        "  parameters: w {} p {} k {} |P| {} b {} b' {} team-size {} reduced {}",
        report.w,
        p.public.p,
        p.public.k,
        p.public.num_states(),
        p.public.b,
        p.public.b_prime,
        p.public.n,
        if p.reduced { "yes" } else { "no" }
    );
    println!(
        "  edge bounds: belief {:.0} privacy {:.0} (raw edges {})",
        report.bound_belief, report.bound_privacy, report.raw_edges
    );
}

fn cmd_build(args: &GameArgs, dump: Option<&Path>) -> Result<(), CliError> {
    match resolve(args)? {
        Instance::Game { tree, split } => {
            let opt = pipeline_options(args);
            println!(
                "game: {} players, {} leaves, plus team {:?} vs minus team {:?}",
                tree.num_players,
                tree.terminal_count(),
                split.plus.members,
                split.minus.members
            );
            let plus = run_pipeline(&tree, &split.plus, opt)?;
            let minus = run_pipeline(&tree, &split.minus, opt)?;
            print_team_report("plus", &plus);
            print_team_report("minus", &minus);
            if let Some(p) = dump {
                let path = out_path(p);
                std::fs::write(&path, crate::textio::dump_dag(&plus.dag)).map_err(Error::Io)?;
                println!("plus DAG dumped to {}", path.display());
            }
        }
        Instance::Fixture(t) => {
            let ps = compute_public_structure(&t);
            let grouping = pipeline_options(args).grouping;
            let built = build(&t, grouping)?;
            let dag = optimize(&built, &t);
            let report = stats(&built, &t, &ps);
            println!(
                "fixture: vertices {} edges {} (optimized {} / {})",
                report.raw_vertices,
                report.raw_edges,
                dag.folded_counts().0,
                dag.folded_counts().1
            );
            println!(
                "  parameters: w {} p {} k {} |P| {} b {} b' {}",
                report.w,
                ps.p,
                ps.k,
                ps.num_states(),
                ps.b,
                ps.b_prime
            );
            println!(
                "  edge bounds: belief {:.0} privacy {:.0} (raw edges {})",
                report.bound_belief, report.bound_privacy, report.raw_edges
            );
            for &s in &built.topo {
                let n = &built.nodes[s];
                println!("  belief layer {}: {:?}", n.layer, n.belief);
            }
            if let Some(p) = dump {
                let path = out_path(p);
                std::fs::write(&path, crate::textio::dump_dag(&dag)).map_err(Error::Io)?;
                println!("DAG dumped to {}", path.display());
            }
        }
    }
    Ok(())
}

fn assemble_game(args: &GameArgs) -> Result<BilinearTeamGame, CliError> {
    match resolve(args)? {
        Instance::Game { tree, split } => Ok(assemble(&tree, &split, pipeline_options(args))?),
        Instance::Fixture(_) => Err(CliError::parse(
            "this command needs a two-team game family (K, L, D, G, GL, cex)".into(),
        )),
    }
}

fn cmd_solve(
    args: &GameArgs,
    algo: Algo,
    max_iters: u64,
    target: f64,
    time_limit: f64,
    csv: Option<&Path>,
) -> Result<(), CliError> {
    if !(target > 0.0) {
        return Err(CliError::parse("--target must be positive".into()));
    }
    let game = assemble_game(args)?;
    let mut rows = String::from("iteration,seconds,gap,value\n");
    let (gap, value, iters) = if max_iters == 0 {
        let x = DagStrategy::uniform(&game.plus.dag);
        let y = DagStrategy::uniform(&game.minus.dag);
        let (gap, _, _) = exploitability(&game, &x, &y);
        let value = profile_value(&game, &x, &y);
        rows.push_str(&format!("0,0.000,{gap:.9},{value:.9}\n"));
        (gap, value, 0)
    } else {
        let stop = StopCriteria {
            max_iters,
            target_gap_fraction: target,
            time_limit_secs: time_limit,
        };
        let (_, _, trace) = self_play(&game, algo.variant(), stop);
        for p in &trace.points {
            rows.push_str(&format!(
                "{},{:.3},{:.9},{:.9}\n",
                p.iteration, p.seconds, p.gap, p.value
            ));
        }
        println!("stop: {:?}", trace.stop);
        (trace.final_gap, trace.final_value, trace.iterations)
    };
    println!("iterations: {iters}");
    println!("gap: {gap:.9} (target {:.9})", target * game.range);
    println!("value: {value:.6}");
    if let Some(p) = csv {
        let path = out_path(p);
        std::fs::write(&path, rows).map_err(Error::Io)?;
        println!("trace written to {}", path.display());
    }
    Ok(())
}

fn cmd_lp(args: &GameArgs, out: &Path) -> Result<(), CliError> {
    let game = assemble_game(args)?;
    let path = out_path(out);
    let s = lp_export(&game, &path)?;
    println!(
        "lp written to {}: {} variables, {} constraints, {} nonzeros",
        path.display(),
        s.variables,
        s.constraints,
        s.nonzeros
    );
    Ok(())
}

/// Indicator vectors over the problem's terminals, one per pure team
/// strategy (an action choice at every infoset).
fn brute_force_plans(t: &TeamTfsdp, guard: u64) -> Result<BTreeSet<Vec<u8>>, u64> {
    let terminals = t.terminals();
    let arity: Vec<usize> =
        t.infosets.iter().map(|is| t.nodes[is.nodes[0]].children.len()).collect();
    let combos = arity.iter().try_fold(1u64, |a, &k| {
        a.checked_mul(k as u64).filter(|&c| c <= guard)
    });
    let Some(_) = combos else { return Err(guard) };

    let mut out = BTreeSet::new();
    let mut pick = vec![0usize; arity.len()];
    loop {
        let mut reached = vec![false; t.nodes.len()];
        let mut stack = vec![t.root];
        while let Some(h) = stack.pop() {
            reached[h] = true;
            match t.nodes[h].kind {
                TfKind::Decision { infoset } => {
                    stack.push(t.nodes[h].children[pick[infoset]].child);
                }
                TfKind::Observation => {
                    stack.extend(t.nodes[h].children.iter().map(|e| e.child));
                }
                TfKind::Terminal => {}
            }
        }
        out.insert(terminals.iter().map(|&z| reached[z] as u8).collect());
        let mut i = 0;
        loop {
            if i == pick.len() {
                return Ok(out);
            }
            pick[i] += 1;
            if pick[i] < arity[i] {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

fn dag_plans(d: &TbDag, t: &TeamTfsdp, guard: u64) -> crate::Result<BTreeSet<Vec<u8>>> {
    let terminals = t.terminals();
    Ok(enumerate_pure(d, guard)?
        .iter()
        .map(|pure| {
            let x = correlation_plan(d, t, pure).expect("complete pure strategy");
            terminals.iter().map(|&z| (x[z] > 0.5) as u8).collect()
        })
        .collect())
}

/// Canonical unordered signature of a DAG; terminal nodes are labeled by
/// the decision-problem terminal ids they carry (stable under inflation,
/// which preserves node ids).
fn canon(d: &TbDag) -> String {
    let mut sig: Vec<String> = vec![String::new(); d.nodes.len()];
    for &s in d.topo.iter().rev() {
        let n = &d.nodes[s];
        sig[s] = if n.is_terminal() {
            let mut ids = n.terminals.clone();
            ids.sort_unstable();
            format!("T{ids:?}")
        } else {
            let mut edges: Vec<String> = n
                .edges
                .iter()
                .map(|e| {
                    let mut kids: Vec<&str> = e.children.iter().map(|&c| sig[c].as_str()).collect();
                    kids.sort_unstable();
                    format!("({})", kids.join(","))
                })
                .collect();
            edges.sort_unstable();
            format!("D[{}]", edges.join(";"))
        };
    }
    sig[d.root].clone()
}

struct OracleOutcome {
    failures: usize,
    skipped: usize,
    ran: usize,
}

impl OracleOutcome {
    fn new() -> Self {
        OracleOutcome { failures: 0, skipped: 0, ran: 0 }
    }
    fn record(&mut self, name: &str, pass: bool, detail: Option<String>) {
        self.ran += 1;
        if pass {
            println!("PASS {name}");
        } else {
            self.failures += 1;
            match detail {
                Some(d) => println!("FAIL {name}: {d}"),
                None => println!("FAIL {name}"),
            }
        }
    }
    fn skip(&mut self, name: &str, why: &str) {
        self.skipped += 1;
        println!("SKIP {name}: {why}");
    }
}

/// Drops one reachable child edge so the DAG no longer spans the full
/// plan set; used to exercise the oracle's failure path.
fn corrupt_dag(d: &mut TbDag) {
    for &s in &d.topo.clone() {
        if let Some(e) = d.nodes[s].edges.iter_mut().find(|e| !e.children.is_empty()) {
            // The stale topological order stays valid; orphaned nodes are
            // simply never reached.
            e.children.pop();
            return;
        }
    }
}

fn oracle_suite(
    label: &str,
    t: &TeamTfsdp,
    grouping: DagGrouping,
    guard: u64,
    corrupt: bool,
    out: &mut OracleOutcome,
) -> Result<(), CliError> {
    let built = build(t, grouping)?;
    let mut dag = optimize(&built, t);
    if corrupt {
        corrupt_dag(&mut dag);
    }

    // The DAG's pure strategies induce exactly the team's pure
    // correlation plans.
    let name = format!("plan-set-equivalence ({label})");
    match brute_force_plans(t, guard) {
        Err(g) => out.skip(
            &name,
            &format!(
                "more than {g} pure team strategies; raise --guard or use a smaller instance"
            ),
        ),
        Ok(want) => match dag_plans(&dag, t, guard.saturating_mul(8)) {
            Err(_) => out.skip(&name, "DAG pure-strategy enumeration exceeds the guard"),
            Ok(got) => {
                if got == want {
                    out.record(&name, true, None);
                } else {
                    let witness = want
                        .symmetric_difference(&got)
                        .next()
                        .map(|v| format!("witness leaf vector {v:?}"))
                        .unwrap_or_default();
                    out.record(&name, false, Some(witness));
                }
            }
        },
    }

    // Inflation does not change the built DAG.
    let reinflated = build(&inflate(t), grouping)?;
    let same = built.folded_counts() == reinflated.folded_counts()
        && canon(&built) == canon(&reinflated);
    out.record(
        &format!("inflation-invariance ({label})"),
        same,
        Some(format!(
            "built {:?} vs inflated {:?}",
            built.folded_counts(),
            reinflated.folded_counts()
        )),
    );

    // Both theoretical edge bounds hold for the built DAG.
    let ps = compute_public_structure(t);
    let report = stats(&built, t, &ps);
    let edges = report.raw_edges as f64;
    out.record(
        &format!("edge-bounds ({label})"),
        edges <= report.bound_belief && edges <= report.bound_privacy,
        Some(format!(
            "raw edges {} vs bounds {:.0} / {:.0}",
            report.raw_edges, report.bound_belief, report.bound_privacy
        )),
    );

    // Every decision-problem terminal is carried by exactly one DAG node.
    let mut carried: Vec<usize> = dag.nodes.iter().flat_map(|n| n.terminals.clone()).collect();
    carried.sort_unstable();
    let covered = carried.windows(2).all(|w| w[0] != w[1]) && carried == t.terminals();
    out.record(
        &format!("terminal-coverage ({label})"),
        covered,
        Some(format!("{} carried vs {} problem terminals", carried.len(), t.terminals().len())),
    );
    Ok(())
}

fn cmd_oracle(args: &GameArgs, guard: u64, corrupt: bool) -> Result<(), CliError> {
    let opt = pipeline_options(args);
    let mut out = OracleOutcome::new();
    match resolve(args)? {
        Instance::Game { tree, split } => {
            if tree.terminal_count() > 200_000 {
                return Err(CliError::resource(
                    "instance too large for the oracle suite; use a smaller instance \
                     (the suite brute-forces all pure team strategies)"
                        .into(),
                ));
            }
            for (label, spec) in [("plus", &split.plus), ("minus", &split.minus)] {
                let p = run_pipeline(&tree, spec, opt)?;
                oracle_suite(label, &p.tfsdp, opt.grouping, guard, corrupt, &mut out)?;
            }
        }
        Instance::Fixture(t) => {
            oracle_suite("fixture", &t, opt.grouping, guard, corrupt, &mut out)?;
        }
    }
    if out.failures > 0 {
        return Err(CliError::property(format!(
            "{} of {} oracle properties failed",
            out.failures, out.ran
        )));
    }
    if out.ran == 0 {
        return Err(CliError::resource(
            "every oracle property was skipped; raise --guard or use a smaller instance".into(),
        ));
    }
    Ok(())
}
