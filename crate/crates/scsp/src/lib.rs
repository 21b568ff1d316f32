//! A complete reasoner for spatial constraint networks over 2D points.
//!
//! Variables range over points of the plane; constraints are disjunctions of
//! cone-shaped angular sectors rooted at the second argument (plus point
//! equality), subsuming the cone-shaped and projection-based cardinal
//! direction calculi. The crate provides the exact relation algebra
//! (converse, intersection, composition), queue-based path-consistency
//! filtering, translation of basic networks into linear inequalities with a
//! built-in Simplex feasibility test, and a complete backtracking solver that
//! filters with path consistency and decides leaves with the Simplex.
//!
//! ```
//! use scsp::parse::parse_instance;
//! use scsp::solver::{solve, SearchConfig, SolveStatus};
//!
//! let instance = "
//! vars a b
//! a b : cone:NE | eq
//! a : [0, 1/4pi)
//! ";
//! let parsed = parse_instance(instance).unwrap();
//! let outcome = solve(&parsed.network, &SearchConfig::default());
//! assert_eq!(outcome.status, SolveStatus::Consistent);
//! assert!(outcome.witness.is_some());
//! ```

pub mod angle;
pub mod cardinal;
pub mod cli;
pub mod lp;
pub mod network;
pub mod parse;
pub mod relation;
pub mod solver;

pub use angle::{Angle, AngleSpan};
pub use network::{Network, PcOutcome, PcStats};
pub use relation::{Arc, Point, Relation};
pub use solver::{SearchConfig, SolveOutcome, SolveStatus};
