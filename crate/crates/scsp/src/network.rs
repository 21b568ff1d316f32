//! Constraint networks over point variables.
//!
//! A [`Network`] is an n×n matrix of [`Relation`] labels maintaining the
//! diagonal property (every `matrix[i][i]` is the equality relation) and the
//! converse property (`matrix[j][i]` is always the converse of
//! `matrix[i][j]`). Variable 0 is reserved as the origin of the plane, which
//! is how unary constraints become binary ones.
//!
//! [`Network::path_consistency`] runs the queue-based fixpoint
//! `B_ij ← B_ij ∩ (B_ik ∘ B_kj)` with instrumentation: per-edge update
//! counts, queue pops, and the set of sector boundary angles occurring in the
//! network (with its closure under ±π), which bounds how often an edge label
//! can be successfully tightened.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::angle::Angle;
use crate::relation::Relation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("network needs at least the origin variable")]
    NoVariables,
    #[error("variable index {0} out of range (n = {1})")]
    IndexOutOfRange(usize, usize),
    #[error("unary constraints on the origin variable are not allowed")]
    UnaryOnOrigin,
}

/// Result of adding a constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddOutcome {
    Updated,
    Unchanged,
    /// The edge label became empty (or a self-loop without equality was
    /// posted); the network is inconsistent.
    EmptyDetected,
}

/// Outcome of path consistency.
#[derive(Debug, Clone)]
pub enum PcOutcome {
    Consistent(PcStats),
    Inconsistent {
        edge: (usize, usize),
        stats: PcStats,
    },
}

impl PcOutcome {
    pub fn stats(&self) -> &PcStats {
        match self {
            PcOutcome::Consistent(s) => s,
            PcOutcome::Inconsistent { stats, .. } => stats,
        }
    }

    pub fn is_consistent(&self) -> bool {
        matches!(self, PcOutcome::Consistent(_))
    }
}

/// Propagation instrumentation.
#[derive(Debug, Clone, Default)]
pub struct PcStats {
    updates: HashMap<(usize, usize), u64>,
    pub queue_pops: u64,
    /// Triangle relaxation steps attempted (compose+intersect pairs).
    pub relaxations: u64,
    pub holes_count: usize,
    pub holes_plus_count: usize,
}

impl PcStats {
    pub fn edge_updates(&self, i: usize, j: usize) -> u64 {
        self.updates.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn max_edge_updates(&self) -> u64 {
        self.updates.values().copied().max().unwrap_or(0)
    }

    pub fn total_updates(&self) -> u64 {
        self.updates.values().sum()
    }
}

/// A constraint network over `n` point variables; variable 0 is the world
/// origin.
#[derive(Clone)]
pub struct Network {
    n: usize,
    matrix: Vec<Relation>,
    names: Vec<Option<String>>,
    /// Set when an added constraint already emptied an edge (or contradicted
    /// the diagonal), before any propagation.
    empty_edge: Option<(usize, usize)>,
}

impl Network {
    /// Fresh network: all off-diagonal labels universal, diagonal equality.
    pub fn new(n: usize) -> Result<Network, NetworkError> {
        if n == 0 {
            return Err(NetworkError::NoVariables);
        }
        let mut matrix = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                matrix.push(if i == j {
                    Relation::eq_only()
                } else {
                    Relation::universal()
                });
            }
        }
        Ok(Network {
            n,
            matrix,
            names: vec![None; n],
            empty_edge: None,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn set_name(&mut self, i: usize, name: impl Into<String>) {
        self.names[i] = Some(name.into());
    }

    pub fn name(&self, i: usize) -> Option<&str> {
        self.names.get(i).and_then(|n| n.as_deref())
    }

    pub fn label(&self, i: usize, j: usize) -> &Relation {
        &self.matrix[i * self.n + j]
    }

    fn set_pair(&mut self, i: usize, j: usize, r: Relation) {
        let conv = r.converse();
        self.matrix[i * self.n + j] = r;
        self.matrix[j * self.n + i] = conv;
    }

    /// Replaces an edge label outright (both directions); used by search
    /// refinement. The new label must refine the old one.
    pub fn set_edge(&mut self, i: usize, j: usize, r: Relation) {
        debug_assert!(i != j && i < self.n && j < self.n);
        debug_assert!(
            r.is_subset(self.label(i, j)),
            "refinement must shrink the label"
        );
        self.set_pair(i, j, r);
    }

    pub fn empty_edge(&self) -> Option<(usize, usize)> {
        self.empty_edge
    }

    /// Intersects constraint `r` into edge `(i, j)` and maintains the
    /// converse property. Posting on the diagonal is a no-op when `r` admits
    /// equality and an immediate inconsistency otherwise.
    pub fn add_constraint(
        &mut self,
        i: usize,
        j: usize,
        r: &Relation,
    ) -> Result<AddOutcome, NetworkError> {
        if i >= self.n {
            return Err(NetworkError::IndexOutOfRange(i, self.n));
        }
        if j >= self.n {
            return Err(NetworkError::IndexOutOfRange(j, self.n));
        }
        if i == j {
            if r.eq() {
                return Ok(AddOutcome::Unchanged);
            }
            self.empty_edge = Some((i, i));
            return Ok(AddOutcome::EmptyDetected);
        }
        let tightened = self.label(i, j).intersect(r);
        if tightened == *self.label(i, j) {
            return Ok(AddOutcome::Unchanged);
        }
        let empty = tightened.is_empty();
        self.set_pair(i, j, tightened);
        if empty {
            self.empty_edge = Some((i, j));
            Ok(AddOutcome::EmptyDetected)
        } else {
            Ok(AddOutcome::Updated)
        }
    }

    /// Unary constraint `r(x_i)`, posted as the binary constraint
    /// `r(x_i, origin)`.
    pub fn add_unary(&mut self, i: usize, r: &Relation) -> Result<AddOutcome, NetworkError> {
        if i == 0 {
            return Err(NetworkError::UnaryOnOrigin);
        }
        self.add_constraint(i, 0, r)
    }

    /// Sector boundary angles occurring in the network's upper-triangle
    /// labels.
    pub fn holes(&self) -> BTreeSet<Angle> {
        let mut out = BTreeSet::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                out.extend(self.label(i, j).boundary_angles());
            }
        }
        out
    }

    /// `holes()` closed under ±π. Never more than twice the size of
    /// `holes()`.
    pub fn holes_plus(&self) -> BTreeSet<Angle> {
        let h = self.holes();
        let mut out = h.clone();
        for a in &h {
            out.insert(a.add_pi());
        }
        assert!(out.len() <= 2 * h.len().max(1));
        out
    }

    /// True when every off-diagonal label is one of the shapes the
    /// linear-inequality translation accepts: universal, equality-only, a
    /// single basic arc, a full line, or a uniform half-plane.
    pub fn is_bsp(&self) -> bool {
        self.edges()
            .all(|(_, _, r)| r.shape().is_leaf_translatable())
    }

    /// The basic disjuncts of an edge label in deterministic order: each arc
    /// as a vertex-free relation ordered by lower bound, then the
    /// equality-only relation when the label admits it. Universal labels are
    /// a single refinement, left unsplit.
    pub fn basic_refinements(&self, i: usize, j: usize) -> Vec<Relation> {
        let label = self.label(i, j);
        if label.is_universal() {
            return vec![label.clone()];
        }
        let mut out: Vec<Relation> = label
            .arcs()
            .iter()
            .map(|a| Relation::from_arc(a.clone()))
            .collect();
        if label.eq() {
            out.push(Relation::eq_only());
        }
        out
    }

    /// Queue-based path consistency to fixpoint.
    ///
    /// Seeds a FIFO queue with every non-universal directed edge; popping
    /// `(i, j)` relaxes all triangles through it. Stops at the first empty
    /// label. When the starting network is basic, every intermediate label is
    /// asserted to stay within the convex shapes and to draw its boundary
    /// angles from the ±π closure of the initial ones.
    pub fn path_consistency(&mut self) -> PcOutcome {
        let holes = self.holes();
        let holes_plus = self.holes_plus();
        let mut stats = PcStats {
            holes_count: holes.len(),
            holes_plus_count: holes_plus.len(),
            ..PcStats::default()
        };

        if let Some(edge) = self.empty_edge {
            return PcOutcome::Inconsistent { edge, stats };
        }
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.label(i, j).is_empty() {
                    return PcOutcome::Inconsistent {
                        edge: (i, j),
                        stats,
                    };
                }
            }
        }

        let track_closure = self.is_bsp();

        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
        let mut queued = vec![false; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && !self.label(i, j).is_universal() {
                    queue.push_back((i, j));
                    queued[i * self.n + j] = true;
                }
            }
        }

        // Compositions recur heavily on the handful of distinct labels, so
        // memoize per run.
        let mut compose_memo: HashMap<(Relation, Relation), Relation> = HashMap::new();
        let mut compose = |a: &Relation, b: &Relation| -> Relation {
            let key = (a.clone(), b.clone());
            if let Some(r) = compose_memo.get(&key) {
                return r.clone();
            }
            let r = a.compose(b);
            compose_memo.insert(key, r.clone());
            r
        };

        while let Some((i, j)) = queue.pop_front() {
            queued[i * self.n + j] = false;
            stats.queue_pops += 1;
            for k in 0..self.n {
                if k == i || k == j {
                    continue;
                }
                // Tighten (i, k) through j, and (k, j) through i.
                for (x, y, composed) in [
                    (i, k, compose(self.label(i, j), self.label(j, k))),
                    (k, j, compose(self.label(k, i), self.label(i, j))),
                ] {
                    stats.relaxations += 1;
                    let current = self.label(x, y);
                    let tightened = current.intersect(&composed);
                    if tightened == *current {
                        continue;
                    }
                    if track_closure {
                        assert!(
                            tightened.shape().is_convex(),
                            "propagation left the convex label family on edge ({x},{y}): {tightened}"
                        );
                        assert!(
                            tightened.boundary_angles().iter().all(|a| holes_plus.contains(a)),
                            "propagation produced a boundary angle outside the ±π closure on edge ({x},{y}): {tightened}"
                        );
                    }
                    *stats.updates.entry((x, y)).or_insert(0) += 1;
                    let empty = tightened.is_empty();
                    self.set_pair(x, y, tightened);
                    if empty {
                        return PcOutcome::Inconsistent {
                            edge: (x, y),
                            stats,
                        };
                    }
                    if !queued[x * self.n + y] {
                        queue.push_back((x, y));
                        queued[x * self.n + y] = true;
                    }
                }
            }
        }
        PcOutcome::Consistent(stats)
    }

    /// All off-diagonal labels, upper triangle.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Relation)> {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| (i, j, self.label(i, j))))
    }

    /// Picks the edge to branch on: fewest disjuncts first, ties broken by
    /// lowest index pair. `None` when the network is already basic.
    pub fn most_constrained_disjunctive_edge(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, (usize, usize))> = None;
        for (i, j, r) in self.edges() {
            if r.shape().is_leaf_translatable() {
                continue;
            }
            let count = r.arcs().len() + usize::from(r.eq());
            match best {
                Some((c, _)) if c <= count => {}
                _ => best = Some((count, (i, j))),
            }
        }
        best.map(|(_, e)| e)
    }

    /// Checks the diagonal and converse invariants (test support).
    pub fn check_invariants(&self) -> bool {
        for i in 0..self.n {
            if *self.label(i, i) != Relation::eq_only() {
                return false;
            }
            for j in 0..self.n {
                if self.label(i, j).converse() != *self.label(j, i) {
                    return false;
                }
            }
        }
        true
    }
}

impl std::fmt::Debug for Network {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Network(n={})", self.n)?;
        for (i, j, r) in self.edges() {
            if !r.is_universal() {
                writeln!(f, "  ({i},{j}): {r}")?;
            }
        }
        Ok(())
    }
}
