//! Complete decision procedure: depth-first refinement of disjunctive labels
//! with path consistency as in-search filtering and Simplex feasibility at
//! the leaves.
//!
//! Path consistency alone is sound but not known to be complete for basic
//! networks, so a path-consistent leaf is never declared consistent outright:
//! it is translated to linear inequalities and decided by the Simplex. A
//! returned witness is always re-verified against the original network's
//! labels through the membership oracle before `Consistent` is reported.

use std::time::{Duration, Instant};

use crate::lp::{simplex_feasible, translate_bsp, FeasibilityStatus, LpConfig};
use crate::network::{Network, PcOutcome, PcStats};
use crate::relation::Point;

/// Tolerance used when re-verifying a Simplex witness against the membership
/// oracle: Simplex solutions satisfy non-strict boundaries only up to float
/// noise, while strict-side margins are large by construction.
pub const VERIFY_TOL: f64 = 1e-6;

/// Branching-edge selection heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeOrder {
    /// Fewest remaining disjuncts, ties by lowest index pair.
    #[default]
    MinDisjuncts,
}

/// Order in which an edge's disjuncts are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DisjunctOrder {
    /// Canonical order: arcs by lower bound, equality last.
    #[default]
    Canonical,
}

#[derive(Debug, Clone, Default)]
pub struct SearchConfig {
    pub edge_order: EdgeOrder,
    pub disjunct_order: DisjunctOrder,
    /// Maximum number of search nodes expanded.
    pub step_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Reserved for randomized heuristics; the default heuristics are
    /// deterministic and ignore it.
    pub seed: u64,
    pub lp: LpConfig,
    /// Explore root-level siblings on threads. Falls back to sequential when
    /// step or time limits are set, so budget semantics stay identical.
    pub parallel: bool,
    /// Collect a deterministic text dump of every leaf system solved.
    pub dump_lp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Consistent,
    Inconsistent,
    ResourceLimit,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Search nodes expanded.
    pub nodes: u64,
    pub pc_calls: u64,
    pub lp_calls: u64,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Placement of every variable (origin included), present iff consistent.
    pub witness: Option<Vec<Point>>,
    pub stats: SolveStats,
    pub warnings: Vec<String>,
    /// Leaf system dumps, in visit order (when requested).
    pub lp_dumps: Vec<String>,
}

/// Outcome of the propagation-only check.
#[derive(Debug, Clone)]
pub enum PcCheck {
    /// No inconsistency found; says nothing about actual consistency.
    ConsistentSoFar(PcStats),
    Inconsistent {
        edge: (usize, usize),
        stats: PcStats,
    },
}

impl PcCheck {
    pub fn is_consistent_so_far(&self) -> bool {
        matches!(self, PcCheck::ConsistentSoFar(_))
    }
}

/// Runs path consistency once on a copy of the network. Propagation is a
/// filter: a clean pass never claims full consistency.
pub fn check_pc_only(net: &Network) -> PcCheck {
    let mut work = net.clone();
    match work.path_consistency() {
        PcOutcome::Consistent(stats) => PcCheck::ConsistentSoFar(stats),
        PcOutcome::Inconsistent { edge, stats } => PcCheck::Inconsistent { edge, stats },
    }
}

enum Step {
    Found(Vec<Point>),
    Exhausted,
    Limit,
}

struct Search<'a> {
    cfg: &'a SearchConfig,
    original: &'a Network,
    stats: SolveStats,
    deadline: Option<Instant>,
    numerically_ill: bool,
    warnings: Vec<String>,
    lp_dumps: Vec<String>,
}

impl<'a> Search<'a> {
    fn new(cfg: &'a SearchConfig, original: &'a Network) -> Self {
        Search {
            cfg,
            original,
            stats: SolveStats::default(),
            deadline: cfg.time_limit.map(|d| Instant::now() + d),
            numerically_ill: false,
            warnings: Vec::new(),
            lp_dumps: Vec::new(),
        }
    }

    fn dfs(&mut self, mut net: Network) -> Step {
        self.stats.nodes += 1;
        if let Some(limit) = self.cfg.step_limit {
            if self.stats.nodes > limit {
                return Step::Limit;
            }
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() > deadline {
                return Step::Limit;
            }
        }
        self.stats.pc_calls += 1;
        if let PcOutcome::Inconsistent { .. } = net.path_consistency() {
            return Step::Exhausted;
        }
        if net.is_bsp() {
            return self.decide_leaf(&net);
        }
        let (i, j) = net
            .most_constrained_disjunctive_edge()
            .expect("a non-basic network has a disjunctive edge");
        for refinement in net.basic_refinements(i, j) {
            let mut child = net.clone();
            child.set_edge(i, j, refinement);
            match self.dfs(child) {
                Step::Found(w) => return Step::Found(w),
                Step::Limit => return Step::Limit,
                Step::Exhausted => {}
            }
        }
        Step::Exhausted
    }

    fn decide_leaf(&mut self, net: &Network) -> Step {
        self.stats.lp_calls += 1;
        let sys = match translate_bsp(net) {
            Ok(sys) => sys,
            Err(e) => {
                // is_bsp held, so this is numeric/shape trouble, not a verdict.
                self.numerically_ill = true;
                self.warnings.push(format!("leaf translation failed: {e}"));
                return Step::Exhausted;
            }
        };
        if self.cfg.dump_lp {
            self.lp_dumps
                .push(format!("# leaf {}\n{}", self.stats.lp_calls, sys.dump()));
        }
        let res = simplex_feasible(&sys, &self.cfg.lp);
        match res.status {
            FeasibilityStatus::Feasible => {
                let witness = res.witness.expect("feasible results carry a witness");
                if verify_witness(self.original, &witness) {
                    Step::Found(witness)
                } else {
                    self.numerically_ill = true;
                    self.warnings.push(
                        "a feasible leaf witness failed oracle verification; leaf skipped"
                            .to_string(),
                    );
                    Step::Exhausted
                }
            }
            FeasibilityStatus::Infeasible => Step::Exhausted,
            FeasibilityStatus::NumericallyIll => {
                self.numerically_ill = true;
                self.warnings
                    .push("Simplex reported numeric trouble at a leaf; leaf skipped".to_string());
                Step::Exhausted
            }
        }
    }
}

/// Checks a placement against every label of a network with the verification
/// tolerance.
pub fn verify_witness(net: &Network, witness: &[Point]) -> bool {
    if witness.len() != net.num_vars() {
        return false;
    }
    for (i, j, label) in net.edges() {
        if !label
            .member_eval()
            .member_relaxed(witness[i], witness[j], VERIFY_TOL)
        {
            return false;
        }
    }
    true
}

/// Complete backtracking search.
///
/// Runs path consistency at every node; basic leaves go to the Simplex.
/// `Inconsistent` is returned only after the whole refinement tree is
/// exhausted, and `Consistent` always carries an oracle-verified witness.
/// Numeric trouble at any leaf downgrades an exhausted search to
/// `ResourceLimit` rather than claiming inconsistency.
pub fn solve(net: &Network, cfg: &SearchConfig) -> SolveOutcome {
    if cfg.parallel && cfg.step_limit.is_none() && cfg.time_limit.is_none() && !cfg.dump_lp {
        return solve_parallel(net, cfg);
    }
    let mut search = Search::new(cfg, net);
    let step = search.dfs(net.clone());
    finish(
        step,
        search.stats,
        search.numerically_ill,
        search.warnings,
        search.lp_dumps,
    )
}

fn finish(
    step: Step,
    stats: SolveStats,
    ill: bool,
    warnings: Vec<String>,
    lp_dumps: Vec<String>,
) -> SolveOutcome {
    let status = match &step {
        Step::Found(_) => SolveStatus::Consistent,
        Step::Limit => SolveStatus::ResourceLimit,
        Step::Exhausted => {
            if ill {
                SolveStatus::ResourceLimit
            } else {
                SolveStatus::Inconsistent
            }
        }
    };
    let witness = match step {
        Step::Found(w) => Some(w),
        _ => None,
    };
    SolveOutcome {
        status,
        witness,
        stats,
        warnings,
        lp_dumps,
    }
}

/// Root-level sibling parallelism. Every branch is explored to completion on
/// its own network copy; aggregation then replays the sequential order
/// (branches before the first consistent one, then the winner), so outcome,
/// witness and stats all match the sequential run.
fn solve_parallel(net: &Network, cfg: &SearchConfig) -> SolveOutcome {
    let mut root = net.clone();
    let mut stats = SolveStats {
        nodes: 1,
        pc_calls: 1,
        lp_calls: 0,
    };
    if let PcOutcome::Inconsistent { .. } = root.path_consistency() {
        return finish(Step::Exhausted, stats, false, Vec::new(), Vec::new());
    }
    if root.is_bsp() {
        let mut search = Search::new(cfg, net);
        let step = search.decide_leaf(&root);
        stats.lp_calls = search.stats.lp_calls;
        return finish(
            step,
            stats,
            search.numerically_ill,
            search.warnings,
            search.lp_dumps,
        );
    }
    let (i, j) = root
        .most_constrained_disjunctive_edge()
        .expect("non-basic network");
    let refinements = root.basic_refinements(i, j);

    let branch_results: Vec<(Step, SolveStats, bool, Vec<String>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = refinements
            .into_iter()
            .map(|refinement| {
                let root = &root;
                let original = net;
                scope.spawn(move || {
                    let mut child = root.clone();
                    child.set_edge(i, j, refinement);
                    let mut search = Search::new(cfg, original);
                    let step = search.dfs(child);
                    (step, search.stats, search.numerically_ill, search.warnings)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("branch thread panicked"))
            .collect()
    });

    let mut ill = false;
    let mut warnings = Vec::new();
    for (step, branch_stats, branch_ill, branch_warnings) in branch_results {
        stats.nodes += branch_stats.nodes;
        stats.pc_calls += branch_stats.pc_calls;
        stats.lp_calls += branch_stats.lp_calls;
        ill |= branch_ill;
        warnings.extend(branch_warnings);
        if let Step::Found(w) = step {
            return finish(Step::Found(w), stats, ill, warnings, Vec::new());
        }
    }
    finish(Step::Exhausted, stats, ill, warnings, Vec::new())
}
