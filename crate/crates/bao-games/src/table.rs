//! Solver-facing view of an atom structure.
//!
//! The game solver, the network validator and the basis checkers all run
//! against the `AtomTable` trait rather than against a concrete structure.
//! A finite structure implements it directly; a lazily enumerated structure
//! (rainbow atom structures, split term structures) implements the same
//! interface without ever materialising its atom set.
//!
//! Atoms are opaque `u64` keys. For a finite structure the key is the atom
//! index; lazy implementations are free to pack whatever they need into the
//! 64 bits as long as keys are stable for the lifetime of the table.

use bao_core::{FiniteAtomStructure, Kind};

/// Opaque atom key used by the game solver.
pub type Atom = u64;

/// Which network consistency conditions apply.
///
/// `Df` networks only obey the cylindrifier condition. `Ca` and `Qea` add
/// the diagonal condition, `Qa` and `Qea` the transposition condition, and
/// the diagonal-free flavors `Sc` and `Qa` compensate with the replacement
/// condition.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Flavor {
    Df,
    Sc,
    Ca,
    Qa,
    Qea,
}

impl Flavor {
    /// Maps a signature kind to its network flavor. Relation algebras have
    /// no n-ary network game in this crate, so `Ra` yields `None`.
    pub fn from_kind(kind: Kind) -> Option<Flavor> {
        match kind {
            Kind::Df => Some(Flavor::Df),
            Kind::Sc => Some(Flavor::Sc),
            Kind::Ca => Some(Flavor::Ca),
            Kind::Qa => Some(Flavor::Qa),
            Kind::Qea => Some(Flavor::Qea),
            Kind::Ra => None,
        }
    }

    pub fn has_diagonal_condition(self) -> bool {
        matches!(self, Flavor::Ca | Flavor::Qea)
    }

    pub fn has_transposition_condition(self) -> bool {
        matches!(self, Flavor::Qa | Flavor::Qea)
    }

    pub fn has_replacement_condition(self) -> bool {
        matches!(self, Flavor::Sc | Flavor::Qa)
    }
}

/// Atom-level interface the solver needs.
///
/// All relations are expressed below-the-operator: `cyl_related(i, b, a)`
/// holds when the atom `b` lies below `c_i a`, matching the convention used
/// by the finite structures in `bao-core`.
///
/// Ordering contract: `cyl_demands` and `atoms` may return atoms in any
/// order, but the order must be deterministic. The solver walks candidate
/// moves in the order given here, so implementations should put atoms that
/// make strong demands first (see `move_priority`); this affects only how
/// fast a winning move is found, never which side wins.
pub trait AtomTable: Sync {
    /// Network dimension n.
    fn dim(&self) -> usize;

    fn flavor(&self) -> Flavor;

    /// Number of atoms if cheaply known.
    fn atom_count(&self) -> Option<u64>;

    /// Every atom, in deterministic order.
    fn atoms(&self) -> Box<dyn Iterator<Item = Atom> + '_>;

    /// Atoms `b` with `b` below `c_i a`.
    fn cyl_lower(&self, i: usize, a: Atom) -> Vec<Atom>;

    /// Atoms `a` with `b` below `c_i a`. These are the demands player
    /// Forall can make against a tuple labelled `b` on coordinate `i`.
    fn cyl_demands(&self, i: usize, b: Atom) -> Vec<Atom>;

    /// The subset of `cyl_demands(i, b)` with positive `move_priority`,
    /// in the same order. The solver probes these before everything else,
    /// so structures whose priority atoms are sparse should override this
    /// to avoid materialising the full demand list on the hot path.
    fn cyl_demands_priority(&self, i: usize, b: Atom) -> Vec<Atom> {
        self.cyl_demands(i, b).into_iter().filter(|&a| self.move_priority(a) > 0).collect()
    }

    /// Whether `b` lies below `c_i a`.
    fn cyl_related(&self, i: usize, b: Atom, a: Atom) -> bool;

    /// Whether `a` lies below the diagonal `d_ij`. Only meaningful for
    /// flavors with the diagonal condition; `i == j` is always true.
    fn in_diag(&self, i: usize, j: usize, a: Atom) -> bool;

    /// The transposition image `s_[i,j] a`. Only called for flavors with
    /// the transposition condition.
    fn transpose(&self, i: usize, j: usize, a: Atom) -> Atom;

    /// Whether `b` lies below the replacement `s_i^j a`. The default uses
    /// the diagonal term `s_i^j x = c_i(x . d_ij)`, which is the right
    /// reading whenever diagonals are available; diagonal-free structures
    /// must override this with their explicit replacement tables.
    fn repl_related(&self, i: usize, j: usize, b: Atom, a: Atom) -> bool {
        if i == j {
            return b == a;
        }
        self.in_diag(i, j, a) && self.cyl_related(i, b, a)
    }

    /// Hint for move ordering: higher means player Forall should try
    /// demanding this atom earlier. Purely a search heuristic.
    fn move_priority(&self, _a: Atom) -> i64 {
        0
    }

    /// Human-readable atom name for traces and reports.
    fn atom_label(&self, a: Atom) -> String;
}

impl AtomTable for FiniteAtomStructure {
    fn dim(&self) -> usize {
        self.signature().dim
    }

    fn flavor(&self) -> Flavor {
        Flavor::from_kind(self.signature().kind).expect("relation algebras have no network flavor")
    }

    fn atom_count(&self) -> Option<u64> {
        Some(self.atom_count() as u64)
    }

    fn atoms(&self) -> Box<dyn Iterator<Item = Atom> + '_> {
        Box::new((0..FiniteAtomStructure::atom_count(self)).map(|a| a as Atom))
    }

    fn cyl_lower(&self, i: usize, a: Atom) -> Vec<Atom> {
        self.cyl_up(i, a as u32).iter().map(|&b| b as Atom).collect()
    }

    fn cyl_demands(&self, i: usize, b: Atom) -> Vec<Atom> {
        self.cyl_down(i, b as u32).iter().map(|&a| a as Atom).collect()
    }

    fn cyl_related(&self, i: usize, b: Atom, a: Atom) -> bool {
        self.cyl_related(i, b as u32, a as u32)
    }

    fn in_diag(&self, i: usize, j: usize, a: Atom) -> bool {
        FiniteAtomStructure::in_diag(self, i, j, a as u32)
    }

    fn transpose(&self, i: usize, j: usize, a: Atom) -> Atom {
        FiniteAtomStructure::transpose(self, i, j, a as u32) as Atom
    }

    fn repl_related(&self, i: usize, j: usize, b: Atom, a: Atom) -> bool {
        if i == j {
            return b == a;
        }
        self.repl_up(i, j, a as u32).contains(&(b as u32))
    }

    fn atom_label(&self, a: Atom) -> String {
        self.atom_name(a as u32).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bao_core::cartesian_atom_structure;

    #[test]
    fn finite_table_agrees_with_structure() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        let table: &dyn AtomTable = &at;
        assert_eq!(table.dim(), 3);
        assert_eq!(table.flavor(), Flavor::Qea);
        assert_eq!(table.atom_count(), Some(8));
        for a in table.atoms() {
            for i in 0..3 {
                for b in table.cyl_lower(i, a) {
                    assert!(table.cyl_related(i, b, a));
                    assert!(table.cyl_demands(i, b).contains(&a));
                }
            }
        }
    }

    #[test]
    fn flavor_conditions_follow_the_kind() {
        assert_eq!(Flavor::from_kind(Kind::Ra), None);
        assert!(Flavor::Qea.has_diagonal_condition());
        assert!(Flavor::Qea.has_transposition_condition());
        assert!(!Flavor::Qea.has_replacement_condition());
        assert!(Flavor::Sc.has_replacement_condition());
        assert!(!Flavor::Sc.has_diagonal_condition());
        assert!(Flavor::Qa.has_transposition_condition());
        assert!(Flavor::Qa.has_replacement_condition());
        assert!(!Flavor::Df.has_diagonal_condition());
    }
}
