use bao_core::{AtomId, Error, FiniteAtomStructure, Result};

use crate::forbidden::ra_from_forbidden;

fn atom_letter(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("a{i}")
    }
}

/// The Maddux algebra with `k` symmetric non-identity atoms in which only
/// monochromatic triangles are forbidden: a triple of non-identity atoms is
/// consistent exactly when it uses more than one atom.
pub fn maddux(k: usize) -> Result<FiniteAtomStructure> {
    if k == 0 {
        return Err(Error::InvalidInput("need at least one non-identity atom".into()));
    }
    let mut names = vec!["Id".to_string()];
    names.extend((0..k).map(atom_letter));
    let conv: Vec<AtomId> = (0..=k as AtomId).collect();
    let forbidden: Vec<(AtomId, AtomId, AtomId)> =
        (1..=k as AtomId).map(|x| (x, x, x)).collect();
    let (at, report) = ra_from_forbidden(names, 0, conv, &forbidden)?;
    debug_assert!(report.added.is_empty(), "monochromatic triangles are orbit-closed");
    Ok(at)
}

/// The red/green symmetric algebra: atoms are the identity, `greens` green
/// atoms and `reds` red atoms; forbidden are the identity-law violations,
/// every all-green triangle, and each monochromatic red triangle
/// `(r_j, r_j, r_j)`.
pub fn redgreen(greens: usize, reds: usize) -> Result<FiniteAtomStructure> {
    if greens == 0 || reds == 0 {
        return Err(Error::InvalidInput("need at least one green and one red atom".into()));
    }
    let mut names = vec!["Id".to_string()];
    names.extend((0..greens).map(|i| format!("g_0^{i}")));
    names.extend((1..=reds).map(|j| format!("r_{j}")));
    let count = 1 + greens + reds;
    let conv: Vec<AtomId> = (0..count as AtomId).collect();
    let green = |i: usize| (1 + i) as AtomId;
    let red = |j: usize| (1 + greens + j) as AtomId;
    let mut forbidden = Vec::new();
    for i in 0..greens {
        for j in 0..greens {
            for l in 0..greens {
                forbidden.push((green(i), green(j), green(l)));
            }
        }
    }
    for j in 0..reds {
        forbidden.push((red(j), red(j), red(j)));
    }
    let (at, report) = ra_from_forbidden(names, 0, conv, &forbidden)?;
    debug_assert!(report.added.is_empty(), "both families are orbit-closed");
    Ok(at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bao_core::{check_ra_laws, CheckOptions, CmAlgebra};

    #[test]
    fn maddux_one_squares_to_identity() {
        let at = maddux(1).unwrap();
        let cm = CmAlgebra::new(&at);
        let a = cm.singleton(1);
        let sq = cm.comp(&a, &a).unwrap();
        assert_eq!(sq, cm.singleton(0));
    }

    #[test]
    fn maddux_three_compositions() {
        let at = maddux(3).unwrap();
        let cm = CmAlgebra::new(&at);
        let (a, b) = (cm.singleton(1), cm.singleton(2));
        // a;a = {Id, b, c}
        let mut expect = cm.singleton(0).union(&cm.singleton(2));
        expect = expect.union(&cm.singleton(3));
        assert_eq!(cm.comp(&a, &a).unwrap(), expect);
        // a;b = {a, b, c}
        let mut expect = cm.singleton(1).union(&cm.singleton(2));
        expect = expect.union(&cm.singleton(3));
        assert_eq!(cm.comp(&a, &b).unwrap(), expect);
    }

    #[test]
    fn maddux_three_satisfies_ra_laws_exhaustively() {
        let at = maddux(3).unwrap();
        let cm = CmAlgebra::new(&at);
        let report = check_ra_laws(&cm, &CheckOptions::default()).unwrap();
        assert!(report.passed, "violations: {:?}", report.violations);
        assert!(!report.sampled);
    }

    #[test]
    fn no_non_identity_atom_is_below_its_own_square() {
        for k in 2..=4 {
            let at = maddux(k).unwrap();
            let t = at.ra_tables().unwrap();
            for a in 1..at.atom_count() as AtomId {
                assert!(!t.consistent(a, a, a));
            }
        }
    }

    #[test]
    fn redgreen_basic_compositions() {
        let at = redgreen(1, 1).unwrap();
        let cm = CmAlgebra::new(&at);
        let g = cm.singleton(1);
        let r = cm.singleton(2);
        // green;green = {Id, r_1}
        assert_eq!(cm.comp(&g, &g).unwrap(), cm.singleton(0).union(&r));
        // r_1;r_1 excludes r_1
        assert!(!cm.comp(&r, &r).unwrap().contains(2));
        // (g, r, r): mixed triangle is consistent
        assert!(at.ra_tables().unwrap().consistent(1, 2, 2));
    }

    #[test]
    fn redgreen_is_symmetric_and_law_abiding() {
        let at = redgreen(2, 2).unwrap();
        let t = at.ra_tables().unwrap();
        assert_eq!(at.atom_count(), 5);
        for a in 0..5 {
            assert_eq!(t.conv[a], a as AtomId);
        }
        let cm = CmAlgebra::new(&at);
        let report = check_ra_laws(&cm, &CheckOptions::default()).unwrap();
        assert!(report.passed, "violations: {:?}", report.violations);
    }
}
