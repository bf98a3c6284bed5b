use std::collections::HashMap;

use crate::error::Error;
use crate::signature::{Kind, Signature};
use crate::structure::{AtomId, FiniteAtomStructure};
use crate::BitSet;
use crate::Result;

/// Atom structure of the full set algebra on `base^n`: atoms are the
/// n-tuples over a base of size `base`, cylindrifier `i` relates tuples that
/// agree off coordinate `i`, diagonals collect tuples with equal coordinates,
/// transpositions swap coordinates.  Kind is QEA; replacements come from the
/// diagonal term.
pub fn cartesian_atom_structure(n: usize, base: usize) -> Result<FiniteAtomStructure> {
    if n == 0 || base == 0 {
        return Err(Error::InvalidInput("dimension and base must be positive".into()));
    }
    if n > 9 {
        return Err(Error::InvalidInput(format!("dimension {n} exceeds the supported maximum 9")));
    }
    let count = (base as u128).pow(n as u32);
    if count > 1 << 20 {
        return Err(Error::InvalidInput(format!(
            "base^n = {count} atoms exceeds the 2^20 cap"
        )));
    }
    let count = count as usize;

    let tuple_of = |mut idx: usize| -> Vec<usize> {
        let mut t = vec![0usize; n];
        for slot in t.iter_mut().rev() {
            *slot = idx % base;
            idx /= base;
        }
        t
    };
    let index_of = |t: &[usize]| -> usize { t.iter().fold(0, |acc, &v| acc * base + v) };

    let names: Vec<String> = (0..count)
        .map(|idx| {
            let t = tuple_of(idx);
            let parts: Vec<String> = t.iter().map(|v| v.to_string()).collect();
            format!("({})", parts.join(","))
        })
        .collect();

    let mut cyl_up = Vec::with_capacity(n);
    for i in 0..n {
        let mut table = Vec::with_capacity(count);
        for idx in 0..count {
            let mut t = tuple_of(idx);
            let mut ups: Vec<AtomId> = Vec::with_capacity(base);
            for v in 0..base {
                t[i] = v;
                ups.push(index_of(&t) as AtomId);
            }
            ups.sort_unstable();
            table.push(ups);
        }
        cyl_up.push(table);
    }

    let mut diag = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut d = BitSet::empty(count);
            for idx in 0..count {
                let t = tuple_of(idx);
                if t[i] == t[j] {
                    d.insert(idx);
                }
            }
            diag.insert((i, j), d);
        }
    }

    let mut transp = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let table: Vec<AtomId> = (0..count)
                .map(|idx| {
                    let mut t = tuple_of(idx);
                    t.swap(i, j);
                    index_of(&t) as AtomId
                })
                .collect();
            transp.insert((i, j), table);
        }
    }

    FiniteAtomStructure::new_cylindric(
        Signature::new(Kind::Qea, n),
        names,
        cyl_up,
        diag,
        transp,
        HashMap::new(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{dimension_set, neat_reduct, reconstruct_atom_structure, same_tables, AlgebraView, CmAlgebra};
    use crate::axioms::{check_ca_axioms, CheckOptions};

    #[test]
    fn small_cartesian_satisfies_ca_axioms_exhaustively() {
        let at = cartesian_atom_structure(2, 3).unwrap();
        assert_eq!(at.atom_count(), 9);
        let cm = CmAlgebra::new(&at);
        let report = check_ca_axioms(&cm, &CheckOptions::default());
        assert!(report.passed, "violations: {:?}", report.violations);
        assert!(!report.sampled);
    }

    #[test]
    fn atoms_of_complex_algebra_give_back_the_tables() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        let cm = CmAlgebra::new(&at);
        let back = reconstruct_atom_structure(&cm).unwrap();
        assert!(same_tables(&at, &back));
    }

    #[test]
    fn neat_reduct_of_cube_is_the_square() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        let cm = CmAlgebra::new(&at);
        let nr = neat_reduct(&cm, 2, 1 << 14).unwrap();
        // Elements fixed by c_2 are unions of lines in the third coordinate:
        // one line per pair (t_0, t_1), so 2^4 carrier elements.
        assert_eq!(nr.carrier().len(), 16);
        assert_eq!(nr.atoms_as_elements().len(), 4);
        for x in nr.carrier() {
            assert!(dimension_set(&nr, x).iter().all(|&i| i < 2));
        }
    }

    #[test]
    fn diagonal_counts() {
        let at = cartesian_atom_structure(3, 3).unwrap();
        let d01 = at.diag_atoms(0, 1).unwrap();
        assert_eq!(d01.count(), 9);
    }
}
