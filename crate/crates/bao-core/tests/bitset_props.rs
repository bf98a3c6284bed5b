use bao_core::BitSet;
use proptest::prelude::*;

fn bits(len: usize) -> impl Strategy<Value = BitSet> {
    prop::collection::vec(any::<bool>(), len).prop_map(|v| {
        let mut s = BitSet::empty(v.len());
        for (i, b) in v.iter().enumerate() {
            if *b {
                s.insert(i);
            }
        }
        s
    })
}

proptest! {
    #[test]
    fn de_morgan(x in bits(70), y in bits(70)) {
        let lhs = x.union(&y).complement();
        let rhs = x.complement().intersect(&y.complement());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn minus_is_meet_with_complement(x in bits(70), y in bits(70)) {
        prop_assert_eq!(x.minus(&y), x.intersect(&y.complement()));
    }

    #[test]
    fn iter_round_trip(x in bits(130)) {
        let idx: Vec<usize> = x.iter().collect();
        let back = BitSet::from_indices(130, idx.iter().copied());
        prop_assert_eq!(back, x);
    }
}
