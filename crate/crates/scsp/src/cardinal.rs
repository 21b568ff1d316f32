//! Cardinal-direction calculi front-ends.
//!
//! Two nine-atom calculi over the eight compass directions plus equality:
//!
//! * the cone-shaped calculus partitions directions into eight 45° sectors
//!   centred on the compass points, and
//! * the projection-based calculus compares coordinates axis-wise, giving
//!   four open quadrants, four axis rays, and equality.
//!
//! Both map into sector relations, so their composition tables fall out of
//! the general algebra mechanically: compose the atom relations and abstract
//! the result back to the smallest covering atom set.
//!
//! Boundary ownership is a convention, not ground truth: cone sectors are
//! closed on their clockwise edge and open on the anticlockwise one, and the
//! projection quadrants are open with the axis rays closed and vertex-free.
//! Under this convention each calculus partitions the plane exactly (jointly
//! exhaustive, pairwise disjoint).

use std::fmt;
use std::str::FromStr;

use crate::angle::Angle;
use crate::relation::{Arc, Relation};

/// Atoms shared by both calculi.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
    EQ,
}

impl Atom {
    /// Fixed presentation order for tables and reports.
    pub const ALL: [Atom; 9] = [
        Atom::N,
        Atom::NE,
        Atom::E,
        Atom::SE,
        Atom::S,
        Atom::SW,
        Atom::W,
        Atom::NW,
        Atom::EQ,
    ];

    /// The diametrically opposite atom; equality is self-opposite.
    pub fn opposite(self) -> Atom {
        match self {
            Atom::N => Atom::S,
            Atom::NE => Atom::SW,
            Atom::E => Atom::W,
            Atom::SE => Atom::NW,
            Atom::S => Atom::N,
            Atom::SW => Atom::NE,
            Atom::W => Atom::E,
            Atom::NW => Atom::SE,
            Atom::EQ => Atom::EQ,
        }
    }

    /// Centre direction in half-turns (east is 0, anticlockwise positive).
    fn center(self) -> Option<Angle> {
        let (n, d) = match self {
            Atom::E => (0, 1),
            Atom::NE => (1, 4),
            Atom::N => (1, 2),
            Atom::NW => (3, 4),
            Atom::W => (1, 1),
            Atom::SW => (5, 4),
            Atom::S => (3, 2),
            Atom::SE => (7, 4),
            Atom::EQ => return None,
        };
        Some(Angle::ratio(n, d))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Atom::N => "N",
            Atom::NE => "NE",
            Atom::E => "E",
            Atom::SE => "SE",
            Atom::S => "S",
            Atom::SW => "SW",
            Atom::W => "W",
            Atom::NW => "NW",
            Atom::EQ => "EQ",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Atom {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N" => Ok(Atom::N),
            "NE" => Ok(Atom::NE),
            "E" => Ok(Atom::E),
            "SE" => Ok(Atom::SE),
            "S" => Ok(Atom::S),
            "SW" => Ok(Atom::SW),
            "W" => Ok(Atom::W),
            "NW" => Ok(Atom::NW),
            "EQ" => Ok(Atom::EQ),
            _ => Err(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Calculus {
    Cone,
    Proj,
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Calculus::Cone => write!(f, "cone"),
            Calculus::Proj => write!(f, "proj"),
        }
    }
}

/// Cone-shaped atom: the 45° sector centred on the compass direction,
/// closed at the lower (clockwise) boundary, open at the upper.
pub fn cone_to_relation(atom: Atom) -> Relation {
    match atom.center() {
        None => Relation::eq_only(),
        Some(center) => {
            let eighth = Angle::ratio(1, 8).circ_sub(&Angle::zero());
            let lo = Angle::from_half_turns(center.half_turns() - eighth.value());
            let hi = center.add_span(&eighth);
            // Half-open, so the vertex stays with EQ.
            Relation::from_basic(lo, true, hi, false).expect("cone sectors span a quarter turn")
        }
    }
}

/// Projection-based atom: axis atoms are the strict coordinate rays
/// (vertex-free), the diagonal atoms the open quadrants between them.
pub fn proj_to_relation(atom: Atom) -> Relation {
    match atom {
        Atom::EQ => Relation::eq_only(),
        Atom::N | Atom::E | Atom::S | Atom::W => {
            Relation::from_arc(Arc::ray(atom.center().expect("axis atom")))
        }
        _ => {
            let center = atom.center().expect("quadrant atom");
            let quarter = Angle::ratio(1, 4).circ_sub(&Angle::zero());
            let lo = Angle::from_half_turns(center.half_turns() - quarter.value());
            let hi = center.add_span(&quarter);
            Relation::from_basic(lo, false, hi, false).expect("quadrants span a half turn")
        }
    }
}

pub fn atom_to_relation(calculus: Calculus, atom: Atom) -> Relation {
    match calculus {
        Calculus::Cone => cone_to_relation(atom),
        Calculus::Proj => proj_to_relation(atom),
    }
}

/// Smallest set of atoms whose union contains the relation, with an exactness
/// flag telling whether the union equals it. Because each calculus partitions
/// the plane, the minimal cover is exactly the set of atoms it meets.
pub fn abstract_to_atoms(r: &Relation, calculus: Calculus) -> (Vec<Atom>, bool) {
    let mut atoms = Vec::new();
    let mut cover = Relation::empty();
    for atom in Atom::ALL {
        let rel = atom_to_relation(calculus, atom);
        if !r.intersect(&rel).is_empty() {
            atoms.push(atom);
            cover = cover.union(&rel);
        }
    }
    // The atoms partition the plane, so the cover always contains r;
    // exactness reduces to equality.
    let exact = cover == *r;
    (atoms, exact)
}

/// Entry of a derived composition table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub atoms: Vec<Atom>,
    pub exact: bool,
}

impl TableEntry {
    pub fn is_universal(&self) -> bool {
        self.atoms.len() == Atom::ALL.len()
    }
}

/// Derives the full 9×9 composition table of a calculus mechanically from
/// the relation algebra.
pub fn derive_table(calculus: Calculus) -> Vec<Vec<TableEntry>> {
    let rels: Vec<Relation> = Atom::ALL
        .iter()
        .map(|a| atom_to_relation(calculus, *a))
        .collect();
    Atom::ALL
        .iter()
        .enumerate()
        .map(|(i, _)| {
            Atom::ALL
                .iter()
                .enumerate()
                .map(|(j, _)| {
                    let composed = rels[i].compose(&rels[j]);
                    let (atoms, exact) = abstract_to_atoms(&composed, calculus);
                    TableEntry { atoms, exact }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ang(n: i64, d: i64) -> Angle {
        Angle::ratio(n, d)
    }

    #[test]
    fn cone_north_sector() {
        let n = cone_to_relation(Atom::N);
        assert_eq!(n.arcs().len(), 1);
        assert_eq!(n.arcs()[0].lo(), &ang(3, 8));
        assert_eq!(n.arcs()[0].hi(), &ang(5, 8));
        assert!(n.arcs()[0].lo_closed());
        assert!(!n.arcs()[0].hi_closed());
        assert!(!n.eq());
        assert_eq!(cone_to_relation(Atom::EQ), Relation::eq_only());
    }

    #[test]
    fn proj_atoms_shapes() {
        let n = proj_to_relation(Atom::N);
        assert_eq!(n, Relation::from_arc(Arc::ray(ang(1, 2))));
        let ne = proj_to_relation(Atom::NE);
        assert_eq!(
            ne,
            Relation::from_basic(ang(0, 1), false, ang(1, 2), false).unwrap()
        );
    }

    fn check_partition(calculus: Calculus) {
        let mut union = Relation::empty();
        for (i, a) in Atom::ALL.iter().enumerate() {
            let ra = atom_to_relation(calculus, *a);
            assert!(!ra.is_empty());
            for b in &Atom::ALL[i + 1..] {
                let rb = atom_to_relation(calculus, *b);
                assert!(
                    ra.intersect(&rb).is_empty(),
                    "{calculus}: {a} and {b} overlap"
                );
            }
            union = union.union(&ra);
        }
        assert!(
            union.is_universal(),
            "{calculus}: atoms must cover the plane"
        );
    }

    #[test]
    fn both_calculi_partition_the_plane() {
        check_partition(Calculus::Cone);
        check_partition(Calculus::Proj);
    }

    #[test]
    fn abstraction_examples() {
        let (atoms, exact) = abstract_to_atoms(
            &Relation::from_basic(ang(0, 1), false, ang(1, 2), false).unwrap(),
            Calculus::Proj,
        );
        assert_eq!(atoms, vec![Atom::NE]);
        assert!(exact);

        let (atoms, exact) = abstract_to_atoms(&cone_to_relation(Atom::N), Calculus::Cone);
        assert_eq!(atoms, vec![Atom::N]);
        assert!(exact);

        let (atoms, exact) = abstract_to_atoms(&Relation::universal(), Calculus::Cone);
        assert_eq!(atoms.len(), 9);
        assert!(exact);
    }

    #[test]
    fn eq_rows_are_identities() {
        for calculus in [Calculus::Cone, Calculus::Proj] {
            let table = derive_table(calculus);
            let eq_idx = Atom::ALL.iter().position(|a| *a == Atom::EQ).unwrap();
            for (k, atom) in Atom::ALL.iter().enumerate() {
                assert_eq!(table[eq_idx][k].atoms, vec![*atom]);
                assert_eq!(table[k][eq_idx].atoms, vec![*atom]);
                assert!(table[eq_idx][k].exact && table[k][eq_idx].exact);
            }
        }
    }

    #[test]
    fn spot_entries() {
        let cone = derive_table(Calculus::Cone);
        let proj = derive_table(Calculus::Proj);
        let idx = |a: Atom| Atom::ALL.iter().position(|x| *x == a).unwrap();

        // Straight-ahead composition stays in the atom for both calculi.
        assert_eq!(cone[idx(Atom::N)][idx(Atom::N)].atoms, vec![Atom::N]);
        assert_eq!(proj[idx(Atom::N)][idx(Atom::N)].atoms, vec![Atom::N]);

        // Opposite cones contain antipodal direction pairs, so sums cancel
        // and reach the whole plane.
        assert!(cone[idx(Atom::N)][idx(Atom::S)].is_universal());

        // Opposite projection rays stay on the vertical line.
        assert_eq!(
            proj[idx(Atom::N)][idx(Atom::S)].atoms,
            vec![Atom::N, Atom::S, Atom::EQ]
        );
    }

    #[test]
    fn converse_maps_to_opposite_atom() {
        for calculus in [Calculus::Cone, Calculus::Proj] {
            for atom in Atom::ALL {
                let conv = atom_to_relation(calculus, atom).converse();
                let (atoms, exact) = abstract_to_atoms(&conv, calculus);
                assert_eq!(atoms, vec![atom.opposite()], "{calculus} {atom}");
                assert!(exact);
            }
        }
    }
}
