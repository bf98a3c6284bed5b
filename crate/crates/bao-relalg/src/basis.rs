use std::collections::HashMap;

use bao_core::{AtomId, Error, FiniteAtomStructure, Result};

use crate::forbidden::peircean_closed;
use crate::matrix::BasicMatrix;

/// An amalgamation counterexample: matrices `f` and `g` (indices into the
/// candidate set) agree off `{x, y}` but no member lies between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmalgamFailure {
    pub f: usize,
    pub g: usize,
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone)]
pub struct BasisReport {
    pub is_basis: bool,
    /// First consistent triple `(a, b, c)` with `a <= b;c` that no matrix
    /// witnesses at the base triangle.
    pub missing_triangle: Option<(AtomId, AtomId, AtomId)>,
    pub missing_amalgam: Option<AmalgamFailure>,
}

/// Check whether `matrices` forms an n-dimensional cylindric basis for the
/// relation algebra `ra`:
///
/// 1. every consistent triple `a <= b;c` is witnessed by some `f` with
///    `f(0,1) = a`, `f(0,2) = b`, `f(2,1) = c`, and
/// 2. any two members agreeing off `{x, y}` have an interpolant agreeing
///    with one off `x` and the other off `y`.
///
/// Counterexamples are reported in sorted order, so reruns are stable.
pub fn is_cylindric_basis(
    matrices: &[BasicMatrix],
    ra: &FiniteAtomStructure,
    n: usize,
) -> Result<BasisReport> {
    if n < 3 {
        return Err(Error::InvalidInput("cylindric bases need dimension at least 3".into()));
    }
    if !peircean_closed(ra)? {
        return Err(Error::InvalidInput(
            "consistency is not closed under the Peircean transforms".into(),
        ));
    }
    for (idx, m) in matrices.iter().enumerate() {
        if m.dim() != n {
            return Err(Error::InvalidInput(format!("matrix {idx} has dimension {}", m.dim())));
        }
        if !m.is_valid(ra)? {
            return Err(Error::InvalidInput(format!("matrix {idx} violates a triangle condition")));
        }
    }
    let t = ra.ra_tables_required()?;
    let atoms = ra.atom_count() as AtomId;

    let mut report = BasisReport { is_basis: true, missing_triangle: None, missing_amalgam: None };

    // Property 1.  Witness lookup keyed by the base triangle.
    let mut base: HashMap<(AtomId, AtomId, AtomId), ()> = HashMap::new();
    for m in matrices {
        base.insert((m.get(ra, 0, 1)?, m.get(ra, 0, 2)?, m.get(ra, 2, 1)?), ());
    }
    'outer: for a in 0..atoms {
        for b in 0..atoms {
            for c in 0..atoms {
                if t.consistent(b, c, a) && !base.contains_key(&(a, b, c)) {
                    report.is_basis = false;
                    report.missing_triangle = Some((a, b, c));
                    break 'outer;
                }
            }
        }
    }

    // Property 2.  For each x: classes of agreement off x, for candidate
    // interpolants.
    let mut off_class: Vec<HashMap<Vec<AtomId>, Vec<usize>>> = Vec::with_capacity(n);
    for x in 0..n {
        let mut groups: HashMap<Vec<AtomId>, Vec<usize>> = HashMap::new();
        for (idx, m) in matrices.iter().enumerate() {
            groups.entry(m.projection_off(x)).or_default().push(idx);
        }
        off_class.push(groups);
    }
    'amal: for (fi, f) in matrices.iter().enumerate() {
        for (gi, g) in matrices.iter().enumerate() {
            for x in 0..n {
                for y in 0..n {
                    if !f.agrees_off_two(g, x, y) {
                        continue;
                    }
                    let candidates = &off_class[x][&f.projection_off(x)];
                    let ok = candidates.iter().any(|&h| matrices[h].agrees_off(g, y));
                    if !ok {
                        report.is_basis = false;
                        report.missing_amalgam =
                            Some(AmalgamFailure { f: fi, g: gi, x, y });
                        break 'amal;
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::maddux;
    use crate::matrix::mat_n;
    use crate::ra_from_forbidden;

    #[test]
    fn full_matrix_set_of_maddux_is_a_basis() {
        for k in 1..=3 {
            let ra = maddux(k).unwrap();
            let m = mat_n(&ra, 3).unwrap();
            let report = is_cylindric_basis(&m.matrices, &ra, 3).unwrap();
            assert!(report.is_basis, "k={k}: {report:?}");
        }
    }

    #[test]
    fn deleting_a_witness_is_detected_with_the_exact_triple() {
        let ra = maddux(3).unwrap();
        let m = mat_n(&ra, 3).unwrap();
        // Delete the unique witness of the base triangle (a, b, c): the
        // matrix with f(0,1)=a, f(0,2)=b, f(2,1)=c.  Atoms are symmetric so
        // f(1,2) = c as well.
        let target = m
            .matrices
            .iter()
            .position(|f| f.upper() == [1, 2, 3])
            .expect("the [a,b,c] matrix exists");
        let mut rest = m.matrices.clone();
        rest.remove(target);
        let report = is_cylindric_basis(&rest, &ra, 3).unwrap();
        assert!(!report.is_basis);
        assert_eq!(report.missing_triangle, Some((1, 2, 3)));
    }

    #[test]
    fn single_identity_matrix_is_a_basis_for_the_identity_algebra() {
        let (ra, _) = ra_from_forbidden(vec!["Id".into()], 0, vec![0], &[]).unwrap();
        let m = mat_n(&ra, 3).unwrap();
        let report = is_cylindric_basis(&m.matrices, &ra, 3).unwrap();
        assert!(report.is_basis);
    }

    #[test]
    fn invalid_matrix_rejected_with_index() {
        let ra = maddux(1).unwrap();
        // (a, a, a) is forbidden, so [a,a,a] is not a valid matrix.
        let bad = BasicMatrix::from_upper(3, vec![1, 1, 1]).unwrap();
        let err = is_cylindric_basis(&[bad], &ra, 3).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("matrix 0"), "{msg}");
    }
}
