//! Linear-inequality translation of basic networks and Simplex feasibility.
//!
//! Every convex label translates into a small conjunction of half-plane
//! inequalities over the point coordinates via the cross-product rule: the
//! lower bound of a sector at angle `g` contributes `cos(g)·Δy − sin(g)·Δx ≥ 0`
//! (strict when open), the upper bound the mirror image. Equality labels pin
//! coordinates pairwise, line labels pin the pair onto the line, rays combine
//! both. The origin variable is pinned to `(0, 0)`.
//!
//! Feasibility of the resulting system (all bounds are zero, so it is
//! homogeneous) is decided by a dense single-phase Simplex maximizing one
//! global strictness slack `t`: every strict inequality `lhs < 0` becomes
//! `lhs + t ≤ 0`, free coordinates split into differences of nonnegative
//! variables, and a cap row `t ≤ 1` keeps the program bounded. By homogeneity
//! the optimum is exactly 0 or 1; the system with its strict inequalities is
//! satisfiable iff the optimum exceeds the configured threshold, and the
//! optimal basis provides the witness placement.

use std::fmt;

use thiserror::Error;

use crate::angle::Angle;
use crate::network::Network;
use crate::relation::{LabelShape, Point, Relation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("edge ({0}, {1}) carries a disjunctive label; refine it before translating")]
    DisjunctiveLabel(usize, usize),
    #[error("edge ({0}, {1}) is empty; the network is already inconsistent")]
    EmptyLabel(usize, usize),
    #[error("network is not basic: {0}")]
    NotABsp(String),
}

/// Tolerances of the floating-point pipeline, surfaced as configuration.
#[derive(Debug, Clone, Copy)]
pub struct LpConfig {
    /// Pivot magnitudes at or below this count as zero.
    pub eps_pivot: f64,
    /// Feasibility threshold on the maximized strictness slack.
    pub eps_strict: f64,
    /// Tolerance when checking a witness against non-strict inequalities.
    pub eps_lp: f64,
    /// Guaranteed strict-inequality margin of a returned witness.
    pub eps_strict_out: f64,
    /// Optional coordinate box `[-B, B]` keeping witnesses small.
    pub bounding_box: Option<f64>,
    /// Iteration cap; exceeding it reports numeric trouble, never a verdict.
    pub max_pivots: usize,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig {
            eps_pivot: 1e-9,
            eps_strict: 1e-7,
            eps_lp: 1e-6,
            eps_strict_out: 5e-8,
            bounding_box: None,
            max_pivots: 100_000,
        }
    }
}

/// One normalized inequality `Σ coeff·unknown ≤ bound` (strict when flagged).
/// Unknown `2k` is `x` of variable `k`, unknown `2k+1` its `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearInequality {
    pub coeffs: Vec<(usize, f64)>,
    pub bound: f64,
    pub strict: bool,
}

impl LinearInequality {
    fn new(mut coeffs: Vec<(usize, f64)>, bound: f64, strict: bool) -> Self {
        coeffs.retain(|(_, c)| *c != 0.0);
        coeffs.sort_by_key(|(id, _)| *id);
        LinearInequality {
            coeffs,
            bound,
            strict,
        }
    }

    /// Left-hand side evaluated at a placement (flat `[x0, y0, x1, y1, …]`).
    pub fn lhs(&self, coords: &[f64]) -> f64 {
        self.coeffs.iter().map(|(id, c)| c * coords[*id]).sum()
    }

    /// Satisfaction at a placement: within `eps` for non-strict rows, with at
    /// least `margin` slack for strict ones.
    pub fn satisfied(&self, coords: &[f64], eps: f64, margin: f64) -> bool {
        let v = self.lhs(coords);
        if self.strict {
            v <= self.bound - margin
        } else {
            v <= self.bound + eps
        }
    }
}

impl fmt::Display for LinearInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (idx, (id, c)) in self.coeffs.iter().enumerate() {
            let var = if id % 2 == 0 {
                format!("x{}", id / 2)
            } else {
                format!("y{}", id / 2)
            };
            if idx == 0 {
                write!(f, "{c}*{var}")?;
            } else if *c >= 0.0 {
                write!(f, " + {c}*{var}")?;
            } else {
                write!(f, " - {}*{var}", -c)?;
            }
        }
        write!(f, " <= {}", self.bound)?;
        if self.strict {
            write!(f, " # strict")?;
        }
        Ok(())
    }
}

/// A conjunction of linear inequalities over the `2n` coordinates of `n`
/// point variables, with the origin pinned at `(0, 0)`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub num_points: usize,
    pub inequalities: Vec<LinearInequality>,
}

impl LinearSystem {
    pub fn num_unknowns(&self) -> usize {
        2 * self.num_points
    }

    /// Deterministic plain-text dump, one inequality per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for ineq in &self.inequalities {
            out.push_str(&ineq.to_string());
            out.push('\n');
        }
        out
    }

    pub fn satisfied(&self, coords: &[f64], eps: f64, margin: f64) -> bool {
        self.inequalities
            .iter()
            .all(|i| i.satisfied(coords, eps, margin))
    }
}

/// Unit direction and left normal of an angle, in doubles. The four cardinal
/// directions come out exact, so axis-aligned constraints carry clean
/// coefficients.
fn direction(g: &Angle) -> (f64, f64) {
    let ht = g.half_turns();
    let quarters = ht * num::BigRational::from_integer(2.into());
    if quarters.is_integer() {
        if let Some(q) = num::ToPrimitive::to_i64(&quarters.to_integer()) {
            match q.rem_euclid(4) {
                0 => return (1.0, 0.0),
                1 => return (0.0, 1.0),
                2 => return (-1.0, 0.0),
                _ => return (0.0, -1.0),
            }
        }
    }
    let r = g.to_radians();
    (r.cos(), r.sin())
}

fn left_normal(g: &Angle) -> (f64, f64) {
    let (c, s) = direction(g);
    (-s, c)
}

/// Coefficients for `v · (p_i − p_j)` over the flat unknown vector.
fn delta_coeffs(i: usize, j: usize, vx: f64, vy: f64) -> Vec<(usize, f64)> {
    vec![(2 * i, vx), (2 * i + 1, vy), (2 * j, -vx), (2 * j + 1, -vy)]
}

/// `v · Δ ≥ 0` rewritten as `−v · Δ ≤ 0`.
fn ge_zero(i: usize, j: usize, v: (f64, f64), strict: bool) -> LinearInequality {
    LinearInequality::new(delta_coeffs(i, j, -v.0, -v.1), 0.0, strict)
}

/// `v · Δ ≤ 0`.
fn le_zero(i: usize, j: usize, v: (f64, f64), strict: bool) -> LinearInequality {
    LinearInequality::new(delta_coeffs(i, j, v.0, v.1), 0.0, strict)
}

/// Translates the label of edge `(i, j)` — read as `label(p_i, p_j)`, the
/// cone rooted at `p_j` — into inequalities. The label must be convex.
pub fn translate_edge(
    i: usize,
    j: usize,
    label: &Relation,
) -> Result<Vec<LinearInequality>, LpError> {
    match label.shape() {
        LabelShape::Empty => Err(LpError::EmptyLabel(i, j)),
        LabelShape::Universal => Ok(Vec::new()),
        LabelShape::EqOnly => {
            let mut out = Vec::new();
            for axis in [(1.0, 0.0), (0.0, 1.0)] {
                out.push(le_zero(i, j, axis, false));
                out.push(ge_zero(i, j, axis, false));
            }
            Ok(out)
        }
        LabelShape::Line(axis) => {
            let n = left_normal(&axis);
            Ok(vec![le_zero(i, j, n, false), ge_zero(i, j, n, false)])
        }
        LabelShape::Basic { arc, vertex } => {
            if arc.is_ray() {
                // Pin onto the line, then keep the forward side; the vertex
                // convention decides strictness.
                let n = left_normal(arc.lo());
                let u = direction(arc.lo());
                Ok(vec![
                    le_zero(i, j, n, false),
                    ge_zero(i, j, n, false),
                    ge_zero(i, j, u, !vertex),
                ])
            } else {
                if vertex && !arc.is_closed_closed() {
                    return Err(LpError::DisjunctiveLabel(i, j));
                }
                let n_lo = left_normal(arc.lo());
                let n_hi = left_normal(arc.hi());
                let mut out = vec![
                    ge_zero(i, j, n_lo, !arc.lo_closed()),
                    le_zero(i, j, n_hi, !arc.hi_closed()),
                ];
                if arc.is_closed_closed() && !vertex {
                    // Closed sector minus its apex: exclude the single point
                    // where both boundary expressions vanish.
                    out.push(ge_zero(i, j, (n_lo.0 - n_hi.0, n_lo.1 - n_hi.1), true));
                }
                Ok(out)
            }
        }
        LabelShape::HalfPlane {
            lo,
            lo_closed,
            hi_closed,
            vertex,
        } => {
            let n = left_normal(&lo);
            match (lo_closed, hi_closed, vertex) {
                (false, false, false) => Ok(vec![ge_zero(i, j, n, true)]),
                (true, true, true) => Ok(vec![ge_zero(i, j, n, false)]),
                _ => Err(LpError::DisjunctiveLabel(i, j)),
            }
        }
        LabelShape::Other => Err(LpError::DisjunctiveLabel(i, j)),
    }
}

/// Translates a basic network: origin pinning plus every non-universal
/// upper-triangle edge.
pub fn translate_bsp(net: &Network) -> Result<LinearSystem, LpError> {
    if !net.is_bsp() {
        let edge = net
            .most_constrained_disjunctive_edge()
            .map(|(i, j)| format!("edge ({i}, {j}) is disjunctive"))
            .unwrap_or_else(|| "an edge label is empty".to_string());
        return Err(LpError::NotABsp(edge));
    }
    let mut inequalities = Vec::new();
    // Pin the origin variable to (0, 0).
    for id in [0usize, 1] {
        inequalities.push(LinearInequality::new(vec![(id, 1.0)], 0.0, false));
        inequalities.push(LinearInequality::new(vec![(id, -1.0)], 0.0, false));
    }
    for (i, j, label) in net.edges() {
        if label.is_universal() {
            continue;
        }
        inequalities.extend(translate_edge(i, j, label)?);
    }
    Ok(LinearSystem {
        num_points: net.num_vars(),
        inequalities,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    /// Pivoting degenerated numerically; no verdict.
    NumericallyIll,
}

#[derive(Debug, Clone)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    /// Placement of all point variables, present iff feasible.
    pub witness: Option<Vec<Point>>,
    /// Maximized strictness slack.
    pub slack: f64,
}

/// Decides satisfiability of the system (with strict inequalities) and
/// extracts a witness placement.
pub fn simplex_feasible(sys: &LinearSystem, cfg: &LpConfig) -> FeasibilityResult {
    let n_unknowns = sys.num_unknowns();
    // Columns: split nonnegative pair per unknown, then t, then row slacks.
    let t_col = 2 * n_unknowns;
    type RawRow = (Vec<(usize, f64)>, f64, bool);
    let mut rows: Vec<RawRow> = sys
        .inequalities
        .iter()
        .map(|ineq| (ineq.coeffs.clone(), ineq.bound, ineq.strict))
        .collect();
    if let Some(b) = cfg.bounding_box {
        for id in 0..n_unknowns {
            rows.push((vec![(id, 1.0)], b, false));
            rows.push((vec![(id, -1.0)], b, false));
        }
    }
    // Cap row keeps the slack maximization bounded.
    rows.push((Vec::new(), 1.0, false));
    let cap_row = rows.len() - 1;

    let m = rows.len();
    let num_cols = t_col + 1 + m; // structural + t + slacks
    let rhs_col = num_cols;

    let mut tab = vec![vec![0.0f64; num_cols + 1]; m];
    for (r, (coeffs, bound, strict)) in rows.iter().enumerate() {
        debug_assert!(*bound >= 0.0, "slack basis needs nonnegative bounds");
        for (id, c) in coeffs {
            tab[r][2 * id] = *c;
            tab[r][2 * id + 1] = -*c;
        }
        if *strict || r == cap_row {
            tab[r][t_col] = 1.0;
        }
        tab[r][t_col + 1 + r] = 1.0;
        tab[r][rhs_col] = *bound;
    }
    // Maximize t: cost row holds reduced costs, starting at −c.
    let mut cost = vec![0.0f64; num_cols + 1];
    cost[t_col] = -1.0;

    let mut basis: Vec<usize> = (0..m).map(|r| t_col + 1 + r).collect();

    let mut pivots = 0usize;
    loop {
        // Bland's rule: entering column is the lowest-index improving one.
        let entering = (0..num_cols).find(|&j| cost[j] < -cfg.eps_pivot);
        let Some(col) = entering else { break };
        // Ratio test; ties resolved by the smallest basis variable index.
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            let a = tab[r][col];
            if a > cfg.eps_pivot {
                let ratio = tab[r][rhs_col] / a;
                match leave {
                    None => leave = Some((r, ratio)),
                    Some((br, bratio)) => {
                        if ratio < bratio - cfg.eps_pivot
                            || ((ratio - bratio).abs() <= cfg.eps_pivot && basis[r] < basis[br])
                        {
                            leave = Some((r, ratio));
                        }
                    }
                }
            }
        }
        let Some((prow, _)) = leave else {
            // The capped objective cannot be unbounded; treat as numeric trouble.
            return FeasibilityResult {
                status: FeasibilityStatus::NumericallyIll,
                witness: None,
                slack: 0.0,
            };
        };
        // Gauss-Jordan pivot.
        let piv = tab[prow][col];
        for v in tab[prow].iter_mut() {
            *v /= piv;
        }
        let pivot_row = tab[prow].clone();
        for (r, row) in tab.iter_mut().enumerate() {
            if r != prow {
                let f = row[col];
                if f != 0.0 {
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
        let f = cost[col];
        if f != 0.0 {
            for (v, p) in cost.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
        }
        basis[prow] = col;

        pivots += 1;
        if pivots > cfg.max_pivots {
            return FeasibilityResult {
                status: FeasibilityStatus::NumericallyIll,
                witness: None,
                slack: 0.0,
            };
        }
    }

    let mut values = vec![0.0f64; num_cols];
    for r in 0..m {
        values[basis[r]] = tab[r][rhs_col];
    }
    let slack = values[t_col];
    if slack <= cfg.eps_strict {
        return FeasibilityResult {
            status: FeasibilityStatus::Infeasible,
            witness: None,
            slack,
        };
    }
    let coords: Vec<f64> = (0..n_unknowns)
        .map(|id| values[2 * id] - values[2 * id + 1])
        .collect();
    let witness = (0..sys.num_points)
        .map(|k| Point::new(coords[2 * k], coords[2 * k + 1]))
        .collect();
    FeasibilityResult {
        status: FeasibilityStatus::Feasible,
        witness: Some(witness),
        slack,
    }
}
