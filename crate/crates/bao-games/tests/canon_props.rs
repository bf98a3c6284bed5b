//! Canonical forms must be blind to node names: renaming every network on
//! a board through one injection leaves the form unchanged, and boards
//! with genuinely different labellings keep different forms.

use std::sync::Arc;

use bao_core::cartesian_atom_structure;
use bao_games::canon::canonical_form;
use bao_games::{enumerate_networks, Network, NodeId};
use proptest::prelude::*;

fn boards() -> impl Strategy<Value = Vec<Network>> {
    let at = cartesian_atom_structure(3, 3).unwrap();
    let mut pool = Vec::new();
    for nodes in [vec![0u16, 1], vec![1u16, 2], vec![0u16, 1, 2]] {
        pool.extend(enumerate_networks(&at, &nodes, 10_000).unwrap());
    }
    let pool = Arc::new(pool);
    proptest::collection::vec(0..pool.len(), 1..4)
        .prop_map(move |picks| picks.into_iter().map(|i| pool[i].clone()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn renaming_a_board_preserves_its_canonical_form(
        board in boards(),
        shift in 0u16..5,
        flip in any::<bool>(),
    ) {
        // An injective renaming of the shared node space.
        let rename = |v: NodeId| -> NodeId {
            let v = v + shift;
            if flip { 13u16.saturating_sub(v) } else { v }
        };
        let before: Vec<Arc<Network>> = board.iter().cloned().map(Arc::new).collect();
        let after: Vec<Arc<Network>> =
            board.iter().map(|n| Arc::new(n.rename(rename))).collect();
        let a = canonical_form(&before, 40_320);
        let b = canonical_form(&after, 40_320);
        prop_assert_eq!(a.bytes, b.bytes);
        prop_assert_eq!(a.hash, b.hash);
    }

    #[test]
    fn one_orbit_collapses_and_sizes_separate(
        i in 0usize..6,
        j in 0usize..6,
    ) {
        let at = cartesian_atom_structure(3, 3).unwrap();
        // One network per map of 3 nodes into the base.
        let nets = enumerate_networks(&at, &[0, 1, 2], 10_000).unwrap();
        prop_assume!(nets.len() == 27);
        // The constant tuple (q,q,q) names the point node q is sent to, so
        // injective assignments are the ones with three distinct labels
        // there. Any two of them differ only by a node renaming.
        let injective: Vec<&Network> = nets
            .iter()
            .filter(|n| {
                let mut pts: Vec<_> = (0..3).map(|q| n.labels()[q * 13]).collect();
                pts.sort_unstable();
                pts.dedup();
                pts.len() == 3
            })
            .collect();
        prop_assume!(injective.len() == 6);
        let a = canonical_form(&[Arc::new(injective[i].clone())], 40_320);
        let b = canonical_form(&[Arc::new(injective[j].clone())], 40_320);
        prop_assert_eq!(&a.bytes, &b.bytes);
        // A collapsing assignment is a genuinely different labelling.
        let constant = nets
            .iter()
            .find(|n| n.labels().iter().all(|&l| l == n.labels()[0]))
            .expect("a constant assignment exists");
        let c = canonical_form(&[Arc::new(constant.clone())], 40_320);
        prop_assert_ne!(&a.bytes, &c.bytes);
        // A two-node network is a different position from any of them.
        let pair = &enumerate_networks(&at, &[0, 1], 10_000).unwrap()[0];
        let d = canonical_form(&[Arc::new(pair.clone())], 40_320);
        prop_assert_ne!(&a.bytes, &d.bytes);
    }
}
