use bao_core::AtomId;
use bao_relalg::{maddux, mat_n, peircean_transforms, redgreen, BasicMatrix};
use proptest::prelude::*;

proptest! {
    // Validity via the symmetric-pair storage must agree with checking the
    // triangle inequality in every single orientation by hand.
    #[test]
    fn matrix_validity_matches_all_orientations(
        k in 1usize..4,
        entries in prop::collection::vec(0u32..5, 3),
    ) {
        let ra = maddux(k).unwrap();
        let atoms = ra.atom_count() as AtomId;
        let entries: Vec<AtomId> = entries.into_iter().map(|e| e % atoms).collect();
        let m = BasicMatrix::from_upper(3, entries).unwrap();
        let t = ra.ra_tables().unwrap();
        let mut by_hand = true;
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    let xz = m.get(&ra, x, z).unwrap();
                    let zy = m.get(&ra, z, y).unwrap();
                    let xy = m.get(&ra, x, y).unwrap();
                    if !t.consistent(xz, zy, xy) {
                        by_hand = false;
                    }
                }
            }
        }
        prop_assert_eq!(m.is_valid(&ra).unwrap(), by_hand);
    }

    // Every consistent triple of a generated algebra has all six Peircean
    // transforms consistent.
    #[test]
    fn generators_are_transform_closed(g in 1usize..4, r in 1usize..4) {
        let ra = redgreen(g, r).unwrap();
        let t = ra.ra_tables().unwrap();
        for trip in t.triples() {
            for tr in peircean_transforms(&t.conv, trip) {
                prop_assert!(t.consistent(tr.0, tr.1, tr.2));
            }
        }
    }

    // Basic-matrix cylindrifiers are definitionally agreement off a node;
    // recompute the relation independently of the grouping code.
    #[test]
    fn mat_cylindrifiers_are_agreement(k in 1usize..3) {
        let ra = maddux(k).unwrap();
        let m = mat_n(&ra, 3).unwrap();
        for i in 0..3 {
            for (fi, f) in m.matrices.iter().enumerate() {
                for (gi, g) in m.matrices.iter().enumerate() {
                    let related = m.at.cyl_related(i, fi as AtomId, gi as AtomId);
                    prop_assert_eq!(related, f.agrees_off(g, i));
                }
            }
        }
    }
}
