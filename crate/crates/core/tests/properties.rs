//! Property tests. Each property is checked against a direct computation
//! from the parent map or from bit arithmetic, not against the code path
//! that produced the value.

use std::collections::BTreeSet;

use proptest::prelude::*;

use cascade_core::cascade::{CascadeAutomorphism, Condition, Coordinate, GeneratorSpec, ToggleSet};
use cascade_core::f2linalg::{combine_stars, solve_star_span, star_matrix, F2Vector};
use cascade_core::forest::{NodeId, PredecessorForest};
use cascade_core::names::{CoordinateBox, PacketEnumeration, RawName};
use cascade_core::orbits::{
    close_group, orbit_partition, quotient_analysis, Permutation, TranslationPartition,
};
use cascade_core::selectors::{canonical_selector, TraceProfile};

/// Parent vectors for nodes 1..n: entry k-1 is drawn below k.
fn parents(max_n: usize) -> impl Strategy<Value = Vec<u32>> {
    (1..=max_n).prop_flat_map(|n| (1..n as u32).map(|k| (0..k).boxed()).collect::<Vec<_>>())
}

fn forest_and_nodes(max_n: usize) -> impl Strategy<Value = (PredecessorForest, Vec<u32>)> {
    parents(max_n).prop_flat_map(|p| {
        let n = p.len() as u32 + 1;
        let f = PredecessorForest::from_parents(&p).unwrap();
        (Just(f), proptest::collection::vec(0..n, 0..6))
    })
}

fn ancestors(f: &PredecessorForest, v: u32) -> Vec<u32> {
    let mut out = vec![v];
    let mut x = NodeId(v);
    while let Some(p) = f.pred(x) {
        out.push(p.0);
        x = p;
    }
    out
}

fn toggle() -> impl Strategy<Value = ToggleSet> {
    (
        any::<bool>(),
        proptest::collection::btree_set(0u32..10, 0..5),
    )
        .prop_map(|(cof, bits)| {
            if cof {
                ToggleSet::cofinite(bits)
            } else {
                ToggleSet::finite(bits)
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closure_is_the_set_of_ancestors((f, nodes) in forest_and_nodes(12)) {
        let closure = f.rho_closure(nodes.iter().map(|&v| NodeId(v))).unwrap();
        let expect: BTreeSet<u32> = nodes.iter().flat_map(|&v| ancestors(&f, v)).collect();
        let got: BTreeSet<u32> = closure.nodes().iter().map(|v| v.0).collect();
        prop_assert_eq!(got, expect);
        prop_assert!(f.is_rho_closed(closure.nodes().iter().copied()).unwrap());
    }

    #[test]
    fn successors_of_nodes_outside_a_closed_set_avoid_it((f, nodes) in forest_and_nodes(10)) {
        let a = f.rho_closure(nodes.iter().map(|&v| NodeId(v))).unwrap();
        for v in 0..f.universe_size() as u32 {
            if !a.contains(NodeId(v)) {
                prop_assert!(f.successors(NodeId(v)).unwrap().iter().all(|c| !a.contains(*c)));
            }
        }
    }

    #[test]
    fn forest_text_round_trip(p in parents(15)) {
        let f = PredecessorForest::from_parents(&p).unwrap();
        prop_assert_eq!(PredecessorForest::parse_text(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn toggle_xor_is_pointwise(x in toggle(), y in toggle(), z in toggle()) {
        let xy = x.xor(&y);
        for n in 0..40 {
            prop_assert_eq!(xy.contains(n), x.contains(n) != y.contains(n));
        }
        prop_assert_eq!(xy.is_cofinite(), x.is_cofinite() != y.is_cofinite());
        prop_assert_eq!(x.xor(&y).xor(&z), x.xor(&y.xor(&z)));
        prop_assert!(x.xor(&x).is_empty());
        prop_assert_eq!(x.to_string().parse::<ToggleSet>().unwrap(), x);
    }

    #[test]
    fn automorphisms_form_an_elementary_abelian_group(
        p in parents(6),
        specs in proptest::collection::vec((0u32..6, 0u32..2, toggle()), 0..5),
    ) {
        let f = PredecessorForest::from_parents(&p).unwrap();
        let n = f.universe_size() as u32;
        let specs: Vec<GeneratorSpec> = specs
            .into_iter()
            .filter(|(_, _, t)| !t.is_empty())
            .map(|(v, row, toggles)| GeneratorSpec { node: NodeId(v % n), row, toggles })
            .collect();
        let x = CascadeAutomorphism::from_generators(&f, &specs).unwrap();
        prop_assert!(x.compose(&x).unwrap().is_identity());
        let back = CascadeAutomorphism::from_generators(&f, &x.factorize()).unwrap();
        prop_assert_eq!(&back, &x);
        // flips: odd number of generators reach the coordinate
        for v in 0..n {
            for row in 0..2 {
                for bit in 0..12 {
                    let c = Coordinate::new(v, row, bit);
                    let hits = specs.iter().filter(|g| {
                        g.row == row && g.toggles.contains(bit)
                            && (g.node.0 == v || f.pred(NodeId(v)) == Some(g.node))
                    }).count();
                    prop_assert_eq!(x.flips(c), hits % 2 == 1);
                }
            }
        }
    }

    #[test]
    fn star_span_round_trip(p in parents(12), seed in any::<u64>()) {
        let f = PredecessorForest::from_parents(&p).unwrap();
        let k = f.full_window();
        let bits: Vec<bool> = (0..k.len()).map(|j| seed >> (j % 64) & 1 == 1).collect();
        let target = F2Vector::from_bits(&k, &bits).unwrap();
        let coefficients = solve_star_span(&k, &target).unwrap();
        prop_assert_eq!(combine_stars(&k, coefficients.iter().copied()).unwrap(), target.clone());
        // oracle: star(v) = {v} ∪ children(v); sum over the coefficients
        for (j, &u) in k.nodes().iter().enumerate() {
            let parity = coefficients.iter().filter(|&&v| v == u || f.pred(u) == Some(v)).count() % 2 == 1;
            prop_assert_eq!(parity, bits[j]);
        }
        let m = star_matrix(&k).unwrap();
        prop_assert!(m.is_upper_unitriangular());
        // children precede parents in the column order
        let order = m.col_order();
        for (c, &v) in order.iter().enumerate() {
            if let Some(parent) = f.pred(v) {
                prop_assert!(order.iter().position(|&x| x == parent).unwrap() > c);
            }
        }
    }

    #[test]
    fn enumeration_rank_unrank(p in parents(3), rows in 1u32..3, bits in 1u32..3, picks in proptest::collection::vec(0u8..3, 12)) {
        let f = PredecessorForest::from_parents(&p).unwrap();
        let cbox = CoordinateBox::new(f.full_window(), rows, bits).unwrap();
        let cond: Condition = cbox
            .coordinates()
            .zip(picks.iter())
            .filter(|(_, &v)| v < 2)
            .map(|(c, &v)| (c, v == 1))
            .collect();
        let en = PacketEnumeration::new(&cbox).unwrap();
        let r = en.rank(&cond).unwrap();
        prop_assert!(r < en.total());
        prop_assert_eq!(en.unrank(r).unwrap(), cond);
    }

    #[test]
    fn condition_text_round_trip(p in parents(4), picks in proptest::collection::vec(0u8..3, 16)) {
        let f = PredecessorForest::from_parents(&p).unwrap();
        let cbox = CoordinateBox::new(f.full_window(), 2, 2).unwrap();
        let cond: Condition = cbox
            .coordinates()
            .zip(picks.iter())
            .filter(|(_, &v)| v < 2)
            .map(|(c, &v)| (c, v == 1))
            .collect();
        let header = cascade_core::cascade::BoxHeader { nodes: f.universe_size() as u32, rows: 2, bits: 2 };
        let (h, back) = Condition::parse_text(&cond.to_text(header)).unwrap();
        prop_assert_eq!(h, header);
        prop_assert_eq!(back, cond);
    }

    #[test]
    fn two_group_orbits_are_dyadic(cycles in proptest::collection::vec(proptest::collection::vec((0u32..7, 0u32..7), 0..3), 1..3)) {
        let gens: Vec<Permutation> = cycles
            .iter()
            .map(|swaps| {
                // product of disjoint transpositions: an involution
                let mut p: Vec<u32> = (0..7).collect();
                let mut used = BTreeSet::new();
                for &(a, b) in swaps {
                    if a != b && used.insert(a) && used.insert(b) {
                        p.swap(a as usize, b as usize);
                    }
                }
                Permutation(p)
            })
            .collect();
        if let Ok(g) = close_group(7, &gens) {
            let orbits = orbit_partition(&g);
            prop_assert_eq!(orbits.iter().map(Vec::len).sum::<usize>(), 7);
            prop_assert!(orbits.iter().all(|o| o.len().is_power_of_two()));
            prop_assert!(orbits.iter().any(|o| o.len() == 1));
        }
    }

    #[test]
    fn coset_partitions_are_accepted(d in 1u32..6, gens in proptest::collection::vec(any::<u32>(), 0..4)) {
        let n = 1u32 << d;
        let mut w: BTreeSet<u32> = BTreeSet::from([0]);
        for g in gens {
            let g = g % n;
            w = w.iter().flat_map(|&x| [x, x ^ g]).collect();
        }
        let labels: Vec<u32> = (0..n).map(|v| w.iter().map(|&x| v ^ x).min().unwrap()).collect();
        let q = quotient_analysis(&TranslationPartition::new(d, labels).unwrap());
        prop_assert!(q.invariant);
        prop_assert_eq!(q.class_count, (n as usize) / w.len());
    }

    #[test]
    fn selector_ignores_input_order(masks in proptest::collection::btree_set(0u32..64, 3), perm in 0usize..6) {
        let f = PredecessorForest::star(6).unwrap();
        let w = f.full_window();
        let sets: Vec<TraceProfile> = masks
            .iter()
            .map(|m| TraceProfile::new(&w, (0..6).filter(|v| m >> v & 1 == 1).map(NodeId)).unwrap())
            .collect();
        let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let shuffled: Vec<TraceProfile> = orders[perm].iter().map(|&i| sets[i].clone()).collect();
        let a = canonical_selector(&sets).unwrap();
        let b = canonical_selector(&shuffled).unwrap();
        prop_assert_eq!(sets[a].nodes(), shuffled[b].nodes());
    }

    #[test]
    fn raw_name_mentions_its_coordinates(entries in proptest::collection::vec((0u32..4, 0u32..3, 0u32..3, any::<bool>()), 0..8)) {
        let mut name = RawName::new();
        let mut expect = BTreeSet::new();
        for (m, node, bit, v) in entries {
            let c = Coordinate::new(node, 0, bit);
            name.insert(m, Condition::from_entries([(c, v)]).unwrap());
            expect.insert(c);
        }
        prop_assert_eq!(name.mentioned(), expect);
    }
}
