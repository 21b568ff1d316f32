//! The sector relation algebra.
//!
//! A [`Relation`] denotes a set of ordered point pairs `(x, y)`: a finite
//! union of cone-shaped sectors rooted at `y` (each stored as an [`Arc`] of
//! directions), plus an optional equality flag admitting `x = y`. Arcs carry
//! pure direction information; whether the pair `x = y` is admitted is
//! recorded solely by the `eq` flag, which is what lets the algebra express
//! both closed cones (which contain their apex) and the vertex-free rays and
//! half-lines of the cardinal calculi.
//!
//! Converse, intersection, union and composition all stay exact over rational
//! angles. Composition goes through the five-atom half-plane calculi: each
//! sector bound maps to a (possibly disjunctive) half-plane relation over an
//! axis in `[0, π)`, atom pairs compose by table, and the results are
//! intersected. The table route over-approximates in general (it is exact on
//! equal-axis cases and on single half-plane products); every emitted
//! relation is a superset of the true composition, which is the property the
//! propagation engine needs.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num::rational::BigRational;
use num::{BigInt, One, Zero};
use thiserror::Error;

use crate::angle::{Angle, AngleSpan};

/// Default boundary tolerance of the floating-point membership oracle,
/// in half-turns.
pub const EPS_MEM: f64 = 1e-9;

/// A 2D point with floating-point coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("basic constraint span must be strictly less than pi: sector from {lo} to {hi} spans {span} half-turns")]
    MalformedBasicConstraint {
        lo: String,
        hi: String,
        span: String,
    },
    #[error("arc from {lo} to {hi} is not basic (span of one half-turn or more)")]
    NonBasicArc { lo: String, hi: String },
}

/// A directed angular interval: the directions swept anticlockwise from `lo`
/// to `hi`, with independent open/closed endpoint flags.
///
/// Well-formedness: when `lo == hi` both flags are closed (a single ray);
/// degenerate open zero-span arcs do not exist as values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Arc {
    lo: Angle,
    hi: Angle,
    lo_closed: bool,
    hi_closed: bool,
}

impl Arc {
    /// Builds an arc; `None` for degenerate zero-span arcs with an open flag.
    pub fn new(lo: Angle, lo_closed: bool, hi: Angle, hi_closed: bool) -> Option<Arc> {
        if lo == hi && !(lo_closed && hi_closed) {
            return None;
        }
        Some(Arc {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn ray(at: Angle) -> Arc {
        Arc {
            lo: at.clone(),
            hi: at,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn lo(&self) -> &Angle {
        &self.lo
    }

    pub fn hi(&self) -> &Angle {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    /// Anticlockwise span `hi ⊖ lo`. Zero for rays.
    pub fn span(&self) -> AngleSpan {
        self.hi.circ_sub(&self.lo)
    }

    pub fn is_ray(&self) -> bool {
        self.lo == self.hi
    }

    /// Basic arcs span strictly less than π.
    pub fn is_basic(&self) -> bool {
        self.span().is_basic()
    }

    pub fn is_closed_closed(&self) -> bool {
        self.lo_closed && self.hi_closed
    }
}

impl fmt::Debug for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' },
        )
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

/// Anticlockwise-inside test: is direction `g` inside the arc, counting
/// closed endpoints as inside?
///
/// The membership decomposes additively: `g` lies strictly inside iff the
/// distances `g ⊖ lo` and `hi ⊖ g` sum (as plain rationals) to the arc span.
pub fn acwi(g: &Angle, arc: &Arc) -> bool {
    if *g == arc.lo {
        return arc.lo_closed;
    }
    if *g == arc.hi {
        return arc.hi_closed;
    }
    let total = arc.hi.circ_sub(&arc.lo);
    let s1 = g.circ_sub(&arc.lo);
    let s2 = arc.hi.circ_sub(g);
    s1.plain_add(&s2) == *total.value()
}

fn one() -> BigRational {
    BigRational::one()
}

fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

/// Recursively split an angular run into stored arcs of span `< 1`.
/// Splits happen at `lo ⊕ span/2`: left half closed at the split, right half
/// open at the split.
fn push_split(
    out: &mut Vec<Arc>,
    lo: Angle,
    lo_closed: bool,
    hi: Angle,
    hi_closed: bool,
    span: BigRational,
) {
    if span < one() {
        let arc = Arc::new(lo, lo_closed, hi, hi_closed).expect("run arcs are never degenerate");
        out.push(arc);
        return;
    }
    let half = &span / two();
    let mid = Angle::from_half_turns(lo.half_turns() + &half);
    push_split(out, lo, lo_closed, mid.clone(), true, half.clone());
    push_split(out, mid, false, hi, hi_closed, half);
}

/// Canonical direction-set representation: the maximal covered runs of the
/// input arcs, split into sub-arcs of span `< 1`, sorted by lower bound.
fn canonical_arcs(input: &[Arc]) -> Vec<Arc> {
    if input.is_empty() {
        return Vec::new();
    }
    let mut pts: BTreeSet<Angle> = BTreeSet::new();
    for a in input {
        pts.insert(a.lo.clone());
        pts.insert(a.hi.clone());
    }
    let pts: Vec<Angle> = pts.into_iter().collect();
    let k = pts.len();

    // Atomic pieces of the circle induced by the endpoint set: piece 2i is
    // the point pts[i], piece 2i+1 the open interval up to the next point.
    // Coverage is constant on each piece, so one probe per piece suffices.
    let piece_covered = |piece: usize| -> bool {
        if piece % 2 == 0 {
            let g = &pts[piece / 2];
            input.iter().any(|a| acwi(g, a))
        } else {
            let i = piece / 2;
            let from = &pts[i];
            let to = &pts[(i + 1) % k];
            let raw = to.circ_sub(from);
            let mid = if raw.is_zero() {
                from.add_pi()
            } else {
                from.add_span(&raw.half())
            };
            input.iter().any(|a| acwi(&mid, a))
        }
    };

    let total = 2 * k;
    let covered: Vec<bool> = (0..total).map(piece_covered).collect();

    let mut out = Vec::new();
    let Some(start) = (0..total).find(|&p| !covered[p]) else {
        // Full circle: split from direction 0.
        let z = Angle::zero();
        push_split_full(&mut out, z);
        return out;
    };

    let piece_span = |piece: usize| -> BigRational {
        if piece % 2 == 0 {
            BigRational::zero()
        } else {
            let i = piece / 2;
            let from = &pts[i];
            let to = &pts[(i + 1) % k];
            let raw = to.circ_sub(from);
            if raw.is_zero() {
                two()
            } else {
                raw.value().clone()
            }
        }
    };

    let mut p = (start + 1) % total;
    let mut steps = 0;
    while steps < total {
        // Skip uncovered pieces.
        while steps < total && !covered[p] {
            p = (p + 1) % total;
            steps += 1;
        }
        if steps >= total {
            break;
        }
        // Collect one maximal covered run.
        let first = p;
        let mut last = p;
        let mut span = BigRational::zero();
        while steps < total && covered[p] {
            span += piece_span(p);
            last = p;
            p = (p + 1) % total;
            steps += 1;
        }
        let (lo, lo_closed) = if first % 2 == 0 {
            (pts[first / 2].clone(), true)
        } else {
            (pts[first / 2].clone(), false)
        };
        let (hi, hi_closed) = if last % 2 == 0 {
            (pts[last / 2].clone(), true)
        } else {
            (pts[(last / 2 + 1) % k].clone(), false)
        };
        push_split(&mut out, lo, lo_closed, hi, hi_closed, span);
    }

    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

/// Canonical arcs of the full circle, split from direction 0.
fn push_split_full(out: &mut Vec<Arc>, zero: Angle) {
    let pi = zero.add_pi();
    push_split(out, zero.clone(), true, pi.clone(), true, one());
    push_split(out, pi, false, zero, false, one());
}

fn universal_arcs() -> Vec<Arc> {
    let mut out = Vec::new();
    push_split_full(&mut out, Angle::zero());
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

/// A canonical relation between two points: a union of pairwise-disjoint
/// direction arcs plus an equality flag. [`Relation::EMPTY`](Relation::empty)
/// and [`Relation::UNIVERSAL`](Relation::universal) are ordinary values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    arcs: Vec<Arc>,
    eq: bool,
}

impl Relation {
    pub fn empty() -> Relation {
        Relation {
            arcs: Vec::new(),
            eq: false,
        }
    }

    pub fn universal() -> Relation {
        Relation {
            arcs: universal_arcs(),
            eq: true,
        }
    }

    pub fn eq_only() -> Relation {
        Relation {
            arcs: Vec::new(),
            eq: true,
        }
    }

    /// Canonicalizing constructor from raw parts.
    pub fn from_parts(arcs: Vec<Arc>, eq: bool) -> Relation {
        Relation {
            arcs: canonical_arcs(&arcs),
            eq,
        }
    }

    /// The basic constraint `⟨ᶦlo, hi⟩ʲ`: the cone rooted at the second
    /// argument bounded by the two directions. A closed-closed cone contains
    /// its apex, so the equality flag is set exactly when both bounds are
    /// closed.
    ///
    /// Rejects spans of π or more; a zero-span arc with an open flag
    /// normalizes to the empty relation.
    pub fn from_basic(
        lo: Angle,
        lo_closed: bool,
        hi: Angle,
        hi_closed: bool,
    ) -> Result<Relation, RelationError> {
        if lo == hi && !(lo_closed && hi_closed) {
            return Ok(Relation::empty());
        }
        let span = hi.circ_sub(&lo);
        if !span.is_basic() {
            return Err(RelationError::MalformedBasicConstraint {
                lo: lo.to_string(),
                hi: hi.to_string(),
                span: format!("{}/{}", span.value().numer(), span.value().denom()),
            });
        }
        let eq = lo_closed && hi_closed;
        let arc =
            Arc::new(lo, lo_closed, hi, hi_closed).expect("non-degenerate by the checks above");
        Ok(Relation::from_parts(vec![arc], eq))
    }

    /// Vertex-free single-arc relation (no `x = y` pair admitted).
    pub fn from_arc(arc: Arc) -> Relation {
        Relation::from_parts(vec![arc], false)
    }

    /// The pairs whose first point lies on the line through the second at
    /// angle `axis`: both closed rays plus equality.
    pub fn line(axis: &Angle) -> Relation {
        Relation::from_parts(vec![Arc::ray(axis.clone()), Arc::ray(axis.add_pi())], true)
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn eq(&self) -> bool {
        self.eq
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty() && !self.eq
    }

    pub fn is_eq_only(&self) -> bool {
        self.arcs.is_empty() && self.eq
    }

    pub fn covers_all_directions(&self) -> bool {
        self.arcs == universal_arcs()
    }

    pub fn is_universal(&self) -> bool {
        self.eq && self.covers_all_directions()
    }

    /// Converse relation: every arc rotated by π with flags preserved,
    /// equality preserved.
    pub fn converse(&self) -> Relation {
        let arcs = self
            .arcs
            .iter()
            .map(|a| Arc {
                lo: a.lo.add_pi(),
                hi: a.hi.add_pi(),
                lo_closed: a.lo_closed,
                hi_closed: a.hi_closed,
            })
            .collect();
        Relation::from_parts(arcs, self.eq)
    }

    /// Set intersection. Arcs intersect pairwise through the
    /// anticlockwise-inside endpoint selection; equality holds iff it holds
    /// on both sides.
    pub fn intersect(&self, other: &Relation) -> Relation {
        if self.is_universal() {
            return other.clone();
        }
        if other.is_universal() {
            return self.clone();
        }
        let mut arcs = Vec::new();
        for a in &self.arcs {
            for b in &other.arcs {
                if let Some(c) = intersect_arcs(a, b) {
                    arcs.push(c);
                }
            }
        }
        Relation::from_parts(arcs, self.eq && other.eq)
    }

    /// Set union.
    pub fn union(&self, other: &Relation) -> Relation {
        if self.is_empty() || other.is_universal() {
            return other.clone();
        }
        if other.is_empty() || self.is_universal() {
            return self.clone();
        }
        let mut arcs = self.arcs.clone();
        arcs.extend(other.arcs.iter().cloned());
        Relation::from_parts(arcs, self.eq || other.eq)
    }

    /// Relational composition `{(x, z) : ∃y, self(x, y) ∧ other(y, z)}`,
    /// computed through the half-plane atom calculi. The result is always a
    /// superset of the true composition; it is exact for ray and equality
    /// components and for equal-axis sector pairs.
    pub fn compose(&self, other: &Relation) -> Relation {
        if self.is_empty() || other.is_empty() {
            return Relation::empty();
        }
        if self.is_universal() || other.is_universal() {
            return Relation::universal();
        }
        if self.is_eq_only() {
            return other.clone();
        }
        if other.is_eq_only() {
            return self.clone();
        }
        let mut arcs = Vec::new();
        let mut eq = false;
        for p in self.pieces() {
            for q in other.pieces() {
                let part = compose_pieces(&p, &q);
                if part.is_universal() {
                    return part;
                }
                arcs.extend(part.arcs.iter().cloned());
                eq |= part.eq;
            }
        }
        Relation::from_parts(arcs, eq)
    }

    /// Basic disjuncts of the relation: each arc as a vertex-free piece, plus
    /// an equality piece when `eq` is set.
    fn pieces(&self) -> Vec<Piece<'_>> {
        let mut out: Vec<Piece<'_>> = self.arcs.iter().map(Piece::Arc).collect();
        if self.eq {
            out.push(Piece::Eq);
        }
        out
    }

    /// Containment test via intersection (canonical forms make this exact).
    pub fn is_subset(&self, other: &Relation) -> bool {
        self.intersect(other) == *self
    }

    /// Maximal arcs of the denoted direction set, re-merging the sub-arcs the
    /// canonical splitting introduced. `Coverage::Full` when every direction
    /// is covered.
    pub fn coverage(&self) -> Coverage {
        if self.covers_all_directions() {
            return Coverage::Full;
        }
        if self.arcs.is_empty() {
            return Coverage::Arcs(Vec::new());
        }
        let mut runs: Vec<MaxArc> = Vec::new();
        for a in &self.arcs {
            let span = a.span().value().clone();
            match runs.last_mut() {
                Some(prev) if prev.hi == a.lo && (prev.hi_closed || a.lo_closed) => {
                    prev.hi = a.hi.clone();
                    prev.hi_closed = a.hi_closed;
                    prev.span += span;
                }
                _ => runs.push(MaxArc {
                    lo: a.lo.clone(),
                    lo_closed: a.lo_closed,
                    hi: a.hi.clone(),
                    hi_closed: a.hi_closed,
                    span,
                }),
            }
        }
        // The last run may wrap around and continue into the first.
        if runs.len() > 1 {
            let last = runs.last().unwrap();
            let first = &runs[0];
            if last.hi == first.lo && (last.hi_closed || first.lo_closed) {
                let last = runs.pop().unwrap();
                let first = &mut runs[0];
                first.lo = last.lo;
                first.lo_closed = last.lo_closed;
                first.span += last.span;
            }
        }
        Coverage::Arcs(runs)
    }

    /// Semantic boundary angles of the denoted direction set: endpoints of
    /// maximal arcs. Split midpoints are representation artifacts and do not
    /// appear here.
    pub fn boundary_angles(&self) -> BTreeSet<Angle> {
        match self.coverage() {
            Coverage::Full => BTreeSet::new(),
            Coverage::Arcs(runs) => {
                let mut out = BTreeSet::new();
                for r in runs {
                    out.insert(r.lo);
                    out.insert(r.hi);
                }
                out
            }
        }
    }

    /// Classifies the label against the convex shapes propagation preserves.
    pub fn shape(&self) -> LabelShape {
        if self.is_empty() {
            return LabelShape::Empty;
        }
        if self.is_universal() {
            return LabelShape::Universal;
        }
        if self.is_eq_only() {
            return LabelShape::EqOnly;
        }
        match self.coverage() {
            Coverage::Full => LabelShape::Other, // all directions but no vertex
            Coverage::Arcs(mut runs) => match runs.len() {
                1 => {
                    let r = runs.pop().unwrap();
                    if r.span < one() {
                        let arc = Arc::new(r.lo, r.lo_closed, r.hi, r.hi_closed)
                            .expect("maximal runs are never degenerate");
                        LabelShape::Basic {
                            arc,
                            vertex: self.eq,
                        }
                    } else if r.span == one() {
                        LabelShape::HalfPlane {
                            lo: r.lo,
                            lo_closed: r.lo_closed,
                            hi_closed: r.hi_closed,
                            vertex: self.eq,
                        }
                    } else {
                        LabelShape::Other
                    }
                }
                2 => {
                    let a = &runs[0];
                    let b = &runs[1];
                    let rays = a.span.is_zero() && b.span.is_zero();
                    if rays && b.lo == a.lo.add_pi() && self.eq {
                        LabelShape::Line(a.lo.clone())
                    } else {
                        LabelShape::Other
                    }
                }
                _ => LabelShape::Other,
            },
        }
    }

    /// Floating-point membership oracle with the default tolerance
    /// [`EPS_MEM`]. Exactly coincident points are members iff `eq` is set.
    pub fn member(&self, x: Point, y: Point) -> bool {
        MemberEval::new(self).member(x, y)
    }

    /// Precompiled membership evaluator for sampling loops.
    pub fn member_eval(&self) -> MemberEval {
        MemberEval::new(self)
    }
}

/// A maximal (re-merged) arc; `span` may reach up to, but not including, 2.
#[derive(Clone, Debug)]
pub struct MaxArc {
    pub lo: Angle,
    pub lo_closed: bool,
    pub hi: Angle,
    pub hi_closed: bool,
    pub span: BigRational,
}

/// Direction coverage of a relation: either everything, or a list of maximal arcs.
pub enum Coverage {
    Full,
    Arcs(Vec<MaxArc>),
}

/// Shape classification of a label, on maximal arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelShape {
    Empty,
    EqOnly,
    Universal,
    /// Full line through the root point at the given axis, including it.
    Line(Angle),
    /// Single arc of span `< π`; `vertex` tells whether `x = y` is admitted.
    Basic {
        arc: Arc,
        vertex: bool,
    },
    /// Single maximal arc of span exactly π.
    HalfPlane {
        lo: Angle,
        lo_closed: bool,
        hi_closed: bool,
        vertex: bool,
    },
    /// Anything else (a genuine disjunction).
    Other,
}

impl LabelShape {
    /// Convex point sets: the family path consistency preserves when it
    /// starts from basic labels. Every single-arc shape is convex (a proper
    /// cone stays convex whether or not it carries its apex or boundary
    /// rays); half-planes are convex except when both boundary rays are
    /// included but the vertex is not (a segment between opposite rays then
    /// crosses the missing vertex).
    pub fn is_convex(&self) -> bool {
        match self {
            LabelShape::Other => false,
            LabelShape::HalfPlane {
                lo_closed,
                hi_closed,
                vertex,
                ..
            } => !(*lo_closed && *hi_closed && !vertex),
            _ => true,
        }
    }

    /// Shapes expressible as a conjunction of linear inequalities, i.e. what
    /// a search leaf may carry. Narrower than [`is_convex`](Self::is_convex):
    /// an open sector plus the vertex and the mixed-boundary half-planes are
    /// convex but not polyhedral, so they are branched instead.
    pub fn is_leaf_translatable(&self) -> bool {
        match self {
            LabelShape::Empty | LabelShape::Other => false,
            LabelShape::EqOnly | LabelShape::Universal | LabelShape::Line(_) => true,
            LabelShape::Basic { arc, vertex } => !vertex || arc.is_closed_closed(),
            LabelShape::HalfPlane {
                lo_closed,
                hi_closed,
                vertex,
                ..
            } => (!lo_closed && !hi_closed && !vertex) || (*lo_closed && *hi_closed && *vertex),
        }
    }
}

/// Pairwise arc intersection: the anticlockwise-inside endpoint selection
/// (take each bound from whichever arc's endpoint lies inside the other),
/// carried out in exact offset coordinates anchored at `a.lo` so that shared
/// endpoints and touching bounds resolve by flag conjunction. Sound and
/// complete for arcs of span `< π` (their intersection is a single arc).
/// `None` means empty.
fn intersect_arcs(a: &Arc, b: &Arc) -> Option<Arc> {
    let sa = a.span().value().clone();
    let sb = b.span().value().clone();
    let ob = b.lo.circ_sub(&a.lo).value().clone();
    // b may sit ahead of a or wrap behind it; spans under 1 mean at most one
    // of the two shifted copies can overlap [0, sa].
    for shift in [ob.clone(), ob - two()] {
        let b_end = &shift + &sb;
        let (lo_pos, lo_angle, lo_closed) = match shift.cmp(&BigRational::zero()) {
            Ordering::Greater => (shift.clone(), b.lo.clone(), b.lo_closed),
            Ordering::Less => (BigRational::zero(), a.lo.clone(), a.lo_closed),
            Ordering::Equal => (
                BigRational::zero(),
                a.lo.clone(),
                a.lo_closed && b.lo_closed,
            ),
        };
        let (hi_pos, hi_angle, hi_closed) = match sa.cmp(&b_end) {
            Ordering::Less => (sa.clone(), a.hi.clone(), a.hi_closed),
            Ordering::Greater => (b_end, b.hi.clone(), b.hi_closed),
            Ordering::Equal => (sa.clone(), a.hi.clone(), a.hi_closed && b.hi_closed),
        };
        match lo_pos.cmp(&hi_pos) {
            Ordering::Less => return Arc::new(lo_angle, lo_closed, hi_angle, hi_closed),
            Ordering::Equal => {
                if lo_closed && hi_closed {
                    return Some(Arc::ray(lo_angle));
                }
            }
            Ordering::Greater => {}
        }
    }
    None
}

#[derive(Clone)]
enum Piece<'a> {
    Eq,
    Arc(&'a Arc),
}

fn compose_pieces(p: &Piece<'_>, q: &Piece<'_>) -> Relation {
    match (p, q) {
        (Piece::Eq, Piece::Eq) => Relation::eq_only(),
        (Piece::Eq, Piece::Arc(b)) => Relation::from_arc((*b).clone()),
        (Piece::Arc(a), Piece::Eq) => Relation::from_arc((*a).clone()),
        (Piece::Arc(a), Piece::Arc(b)) => compose_arcs(a, b),
    }
}

/// Composition of two vertex-free arc components through their half-plane
/// atom sets: intersect the compositions of every bound pair.
fn compose_arcs(a: &Arc, b: &Arc) -> Relation {
    let ra = arc_atom_sets(a);
    let rb = arc_atom_sets(b);
    let mut result = Relation::universal();
    for x in &ra {
        for y in &rb {
            result = result.intersect(&atomset_compose(x, y));
            if result.is_empty() {
                return result;
            }
        }
    }
    result
}

/// The five atoms of the half-plane calculus over a directed line: the left
/// open half-plane, the negative half-line, equality with the root point,
/// the positive half-line, and the right open half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    Lohp,
    Nhl,
    Eqa,
    Phl,
    Rohp,
}

impl AtomKind {
    pub const ALL: [AtomKind; 5] = [
        AtomKind::Lohp,
        AtomKind::Nhl,
        AtomKind::Eqa,
        AtomKind::Phl,
        AtomKind::Rohp,
    ];

    pub fn converse(self) -> AtomKind {
        match self {
            AtomKind::Lohp => AtomKind::Rohp,
            AtomKind::Rohp => AtomKind::Lohp,
            AtomKind::Nhl => AtomKind::Phl,
            AtomKind::Phl => AtomKind::Nhl,
            AtomKind::Eqa => AtomKind::Eqa,
        }
    }
}

/// One atom of the calculus over the line at the given axis (`axis ∈ [0, π)`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfPlaneAtom {
    kind: AtomKind,
    axis: Angle,
}

impl HalfPlaneAtom {
    pub fn new(kind: AtomKind, axis: Angle) -> HalfPlaneAtom {
        assert!(axis.in_axis_range(), "half-plane axis must lie in [0, pi)");
        HalfPlaneAtom { kind, axis }
    }

    pub fn kind(&self) -> AtomKind {
        self.kind
    }

    pub fn axis(&self) -> &Angle {
        &self.axis
    }

    pub fn to_relation(&self) -> Relation {
        atom_relation(self.kind, &self.axis)
    }
}

/// A disjunctive relation of the calculus over one axis: a subset of the five
/// atoms. Houses the closed half-planes (four atoms each) and the full-line
/// relation (three atoms).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomSet {
    axis: Angle,
    members: Vec<AtomKind>,
}

impl AtomSet {
    pub fn new(axis: Angle, mut members: Vec<AtomKind>) -> AtomSet {
        assert!(axis.in_axis_range(), "half-plane axis must lie in [0, pi)");
        members.sort();
        members.dedup();
        AtomSet { axis, members }
    }

    pub fn singleton(axis: Angle, kind: AtomKind) -> AtomSet {
        AtomSet::new(axis, vec![kind])
    }

    /// Left closed half-plane: everything except the right open half-plane.
    pub fn lchp(axis: Angle) -> AtomSet {
        AtomSet::new(
            axis,
            vec![AtomKind::Lohp, AtomKind::Nhl, AtomKind::Eqa, AtomKind::Phl],
        )
    }

    /// Right closed half-plane: everything except the left open half-plane.
    pub fn rchp(axis: Angle) -> AtomSet {
        AtomSet::new(
            axis,
            vec![AtomKind::Nhl, AtomKind::Eqa, AtomKind::Phl, AtomKind::Rohp],
        )
    }

    /// The on-line relation over this axis.
    pub fn on_line(axis: Angle) -> AtomSet {
        AtomSet::new(axis, vec![AtomKind::Nhl, AtomKind::Eqa, AtomKind::Phl])
    }

    pub fn axis(&self) -> &Angle {
        &self.axis
    }

    pub fn members(&self) -> &[AtomKind] {
        &self.members
    }

    pub fn to_relation(&self) -> Relation {
        let mut acc = Relation::empty();
        for m in &self.members {
            acc = acc.union(&atom_relation(*m, &self.axis));
        }
        acc
    }
}

fn atom_relation(kind: AtomKind, axis: &Angle) -> Relation {
    match kind {
        AtomKind::Lohp => {
            let arc = Arc::new(axis.clone(), false, axis.add_pi(), false).unwrap();
            Relation::from_parts(vec![arc], false)
        }
        AtomKind::Rohp => {
            let arc = Arc::new(axis.add_pi(), false, axis.clone(), false).unwrap();
            Relation::from_parts(vec![arc], false)
        }
        AtomKind::Nhl => Relation::from_arc(Arc::ray(axis.add_pi())),
        AtomKind::Phl => Relation::from_arc(Arc::ray(axis.clone())),
        AtomKind::Eqa => Relation::eq_only(),
    }
}

/// Symbolic composition-table entry for a pair of half-plane atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CtEntry {
    EqOnly,
    Atom(AtomKind, Angle),
    Meet(AtomKind, Angle, AtomKind, Angle),
    Line(Angle),
    Universal,
}

impl CtEntry {
    pub fn to_relation(&self) -> Relation {
        match self {
            CtEntry::EqOnly => Relation::eq_only(),
            CtEntry::Atom(k, axis) => atom_relation(*k, axis),
            CtEntry::Meet(k1, a1, k2, a2) => {
                atom_relation(*k1, a1).intersect(&atom_relation(*k2, a2))
            }
            CtEntry::Line(axis) => Relation::line(axis),
            CtEntry::Universal => Relation::universal(),
        }
    }
}

/// Composition of an atom over axis `alpha` with an atom over axis `beta`
/// (both in `[0, π)`), as a symbolic table entry.
pub fn compose_entry(a: AtomKind, alpha: &Angle, b: AtomKind, beta: &Angle) -> CtEntry {
    use AtomKind::*;
    debug_assert!(alpha.in_axis_range() && beta.in_axis_range());
    let ord = alpha.cmp(beta);
    match (a, b) {
        (Eqa, Eqa) => CtEntry::EqOnly,
        (Eqa, k) => CtEntry::Atom(k, beta.clone()),
        (k, Eqa) => CtEntry::Atom(k, alpha.clone()),
        (Lohp, Lohp) => ct_if(ord == Ordering::Equal, Lohp, alpha),
        // Translating lohp_α backwards along the β direction sweeps it across
        // itself, so it stays lohp_α exactly when α ≥ β; mirrors (Phl, Rohp)
        // under converse duality.
        (Lohp, Nhl) => ct_if(ord != Ordering::Less, Lohp, alpha),
        (Lohp, Phl) => ct_if(ord != Ordering::Greater, Lohp, alpha),
        (Lohp, Rohp) => CtEntry::Universal,
        (Nhl, Lohp) => ct_if(ord != Ordering::Greater, Lohp, beta),
        (Nhl, Nhl) => match ord {
            Ordering::Greater => CtEntry::Meet(Lohp, alpha.clone(), Rohp, beta.clone()),
            Ordering::Equal => CtEntry::Atom(Nhl, alpha.clone()),
            Ordering::Less => CtEntry::Meet(Rohp, alpha.clone(), Lohp, beta.clone()),
        },
        (Nhl, Phl) => match ord {
            Ordering::Less => CtEntry::Meet(Lohp, alpha.clone(), Lohp, beta.clone()),
            Ordering::Equal => CtEntry::Line(alpha.clone()),
            Ordering::Greater => CtEntry::Meet(Rohp, alpha.clone(), Rohp, beta.clone()),
        },
        (Nhl, Rohp) => ct_if(ord != Ordering::Less, Rohp, beta),
        (Phl, Lohp) => ct_if(ord != Ordering::Less, Lohp, beta),
        (Phl, Nhl) => match ord {
            Ordering::Greater => CtEntry::Meet(Lohp, alpha.clone(), Lohp, beta.clone()),
            Ordering::Equal => CtEntry::Line(alpha.clone()),
            Ordering::Less => CtEntry::Meet(Rohp, alpha.clone(), Rohp, beta.clone()),
        },
        (Phl, Phl) => match ord {
            Ordering::Less => CtEntry::Meet(Lohp, alpha.clone(), Rohp, beta.clone()),
            Ordering::Equal => CtEntry::Atom(Phl, alpha.clone()),
            Ordering::Greater => CtEntry::Meet(Rohp, alpha.clone(), Lohp, beta.clone()),
        },
        // The right open half-plane is invariant under translation along its
        // own axis, so α = β lands back in rohp, not on the half-line.
        (Phl, Rohp) => ct_if(ord != Ordering::Greater, Rohp, beta),
        (Rohp, Lohp) => CtEntry::Universal,
        (Rohp, Nhl) => ct_if(ord != Ordering::Greater, Rohp, alpha),
        (Rohp, Phl) => ct_if(ord != Ordering::Less, Rohp, alpha),
        (Rohp, Rohp) => ct_if(ord == Ordering::Equal, Rohp, alpha),
    }
}

fn ct_if(cond: bool, kind: AtomKind, axis: &Angle) -> CtEntry {
    if cond {
        CtEntry::Atom(kind, axis.clone())
    } else {
        CtEntry::Universal
    }
}

/// Composition of two half-plane atoms, materialized as a relation.
pub fn atom_compose(a: &HalfPlaneAtom, b: &HalfPlaneAtom) -> Relation {
    compose_entry(a.kind, &a.axis, b.kind, &b.axis).to_relation()
}

fn atomset_compose(x: &AtomSet, y: &AtomSet) -> Relation {
    let mut arcs = Vec::new();
    let mut eq = false;
    for p in &x.members {
        for q in &y.members {
            let entry = compose_entry(*p, &x.axis, *q, &y.axis);
            if matches!(entry, CtEntry::Universal) {
                return Relation::universal();
            }
            let part = entry.to_relation();
            arcs.extend(part.arcs.iter().cloned());
            eq |= part.eq;
        }
    }
    Relation::from_parts(arcs, eq)
}

/// Half-plane atom sets bounding a vertex-free arc component, used by
/// composition. Rays map to their exact half-line atom (the two-half-plane
/// translation would widen a ray to its whole line).
fn arc_atom_sets(a: &Arc) -> Vec<AtomSet> {
    if a.is_ray() {
        let (axis, shifted) = a.lo.reduce_axis();
        let kind = if shifted {
            AtomKind::Nhl
        } else {
            AtomKind::Phl
        };
        return vec![AtomSet::singleton(axis, kind)];
    }
    let (lo_set, hi_set) = bound_atom_sets(a);
    vec![lo_set, hi_set]
}

/// Translation of a basic arc into the pair of half-plane relations bounding
/// it: the lower bound contributes a left half-plane over its axis reduced to
/// `[0, π)` (a right half-plane when the bound lies in `[π, 2π)`), the upper
/// bound the mirror image. Closed bounds yield the four-atom closed
/// half-planes, open bounds the single open-half-plane atom.
///
/// Exact for spans in `(0, π)`. For a zero-span arc the two half-planes
/// intersect to the full line, a strict superset of the ray; composition uses
/// the exact half-line atoms instead.
pub fn basic_to_halfplanes(a: &Arc) -> Result<(AtomSet, AtomSet), RelationError> {
    if !a.is_basic() {
        return Err(RelationError::NonBasicArc {
            lo: a.lo.to_string(),
            hi: a.hi.to_string(),
        });
    }
    Ok(bound_atom_sets(a))
}

fn bound_atom_sets(a: &Arc) -> (AtomSet, AtomSet) {
    let (lo_axis, lo_shifted) = a.lo.reduce_axis();
    let (hi_axis, hi_shifted) = a.hi.reduce_axis();
    let lo_set = match (lo_shifted, a.lo_closed) {
        (false, true) => AtomSet::lchp(lo_axis),
        (false, false) => AtomSet::singleton(lo_axis, AtomKind::Lohp),
        (true, true) => AtomSet::rchp(lo_axis),
        (true, false) => AtomSet::singleton(lo_axis, AtomKind::Rohp),
    };
    let hi_set = match (hi_shifted, a.hi_closed) {
        (false, true) => AtomSet::rchp(hi_axis),
        (false, false) => AtomSet::singleton(hi_axis, AtomKind::Rohp),
        (true, true) => AtomSet::lchp(hi_axis),
        (true, false) => AtomSet::singleton(hi_axis, AtomKind::Lohp),
    };
    (lo_set, hi_set)
}

/// Precompiled floating-point membership evaluator.
pub struct MemberEval {
    arcs: Vec<FloatArc>,
    eq: bool,
}

struct FloatArc {
    lo: f64,
    span: f64,
    lo_closed: bool,
    hi_closed: bool,
}

fn wrap2(mut v: f64) -> f64 {
    v %= 2.0;
    if v < 0.0 {
        v += 2.0;
    }
    v
}

impl MemberEval {
    pub fn new(rel: &Relation) -> MemberEval {
        let arcs = rel
            .arcs
            .iter()
            .map(|a| FloatArc {
                lo: a.lo.half_turns().to_f64_lossy(),
                span: a.span().to_f64_half_turns(),
                lo_closed: a.lo_closed,
                hi_closed: a.hi_closed,
            })
            .collect();
        MemberEval { arcs, eq: rel.eq }
    }

    /// Membership with the default boundary tolerance; exact coincidence is
    /// decided by the equality flag alone.
    pub fn member(&self, x: Point, y: Point) -> bool {
        self.member_eps(x, y, EPS_MEM, false)
    }

    /// Verification-grade membership: positions within `tol` of a closed
    /// boundary (or of coincidence, for equality labels) count as inside.
    pub fn member_relaxed(&self, x: Point, y: Point, tol: f64) -> bool {
        let dx = x.x - y.x;
        let dy = x.y - y.y;
        if (dx * dx + dy * dy).sqrt() <= tol {
            return self.eq;
        }
        self.member_eps(x, y, tol, true)
    }

    fn member_eps(&self, x: Point, y: Point, eps: f64, boundary_inclusive: bool) -> bool {
        let dx = x.x - y.x;
        let dy = x.y - y.y;
        if dx == 0.0 && dy == 0.0 {
            return self.eq;
        }
        let theta = wrap2(dy.atan2(dx) / std::f64::consts::PI);
        for a in &self.arcs {
            let d1 = wrap2(theta - a.lo);
            let at_lo = d1 <= eps || d1 >= 2.0 - eps;
            if a.span == 0.0 {
                if at_lo && (boundary_inclusive || a.lo_closed) {
                    return true;
                }
                continue;
            }
            if at_lo {
                if boundary_inclusive || a.lo_closed {
                    return true;
                }
                continue;
            }
            if (d1 - a.span).abs() <= eps {
                if boundary_inclusive || a.hi_closed {
                    return true;
                }
                continue;
            }
            if d1 < a.span {
                return true;
            }
        }
        false
    }
}

trait ToF64Lossy {
    fn to_f64_lossy(&self) -> f64;
}

impl ToF64Lossy for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        num::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "empty");
        }
        if self.is_universal() {
            return write!(f, "?");
        }
        let mut first = true;
        for a in &self.arcs {
            if !first {
                write!(f, " | ")?;
            }
            write!(f, "{}", a)?;
            first = false;
        }
        if self.eq {
            if !first {
                write!(f, " | ")?;
            }
            write!(f, "eq")?;
        }
        Ok(())
    }
}
