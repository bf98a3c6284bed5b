use bao_graphs::{
    chromatic_number, colour_with, find_cycles, girth, is_colouring, random_graph, Extended, Graph,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn chromatic_witness_is_a_colouring(seed in 0u64..500, n in 1usize..9) {
        let g = random_graph(n, 0.45, seed);
        let chi = chromatic_number(&g).as_finite().unwrap();
        let f = colour_with(&g, chi).unwrap();
        prop_assert!(is_colouring(&g, &f));
        if chi > 1 {
            prop_assert!(colour_with(&g, chi - 1).is_none());
        }
    }

    #[test]
    fn girth_bounds_every_short_cycle(seed in 0u64..500, n in 3usize..9) {
        let g = random_graph(n, 0.4, seed);
        let cycles = find_cycles(&g, n);
        match girth(&g) {
            Extended::Fin(gir) => {
                prop_assert!(cycles.iter().all(|c| c.len() >= gir));
                prop_assert!(cycles.iter().any(|c| c.len() == gir));
            }
            Extended::Inf => prop_assert!(cycles.is_empty()),
        }
    }

    #[test]
    fn union_chromatic_number_is_the_max(s1 in 0u64..60, s2 in 0u64..60, n in 1usize..7) {
        let g = random_graph(n, 0.5, s1);
        let h = random_graph(n, 0.5, s2);
        let u = Graph::disjoint_union(&[g.clone(), h.clone()]);
        prop_assert_eq!(chromatic_number(&u), chromatic_number(&g).max(chromatic_number(&h)));
    }
}
