use std::collections::{BTreeMap, BTreeSet};

use harmonic_core::galois::{random_cover_spec, HarmonicCover};
use harmonic_core::multigraph::{is_isomorphic, GraphMorphism, Multigraph};
use harmonic_core::oriented::{random_cubic_graph, OrientedGraph};
use harmonic_core::permgroup::catalog::Catalog;
use harmonic_core::permgroup::{left_cosets, all_subgroups, PermutationGroup, Subgroup};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_groups() -> Vec<PermutationGroup> {
    Catalog::shipped()
        .unwrap()
        .groups()
        .filter(|g| g.order() <= 24)
        .cloned()
        .collect()
}

fn random_cover(seed: u64, max_base: usize) -> HarmonicCover {
    let groups = small_groups();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = &groups[rng.gen_range(0..groups.len())];
    random_cover_spec(g, &mut rng, max_base).unwrap().build_with(g).unwrap()
}

fn multigraph() -> impl Strategy<Value = Multigraph> {
    (2u32..9).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..20).prop_map(move |pairs| {
            let edges: Vec<(u32, u32)> = pairs.into_iter().filter(|(a, b)| a != b).collect();
            Multigraph::from_edge_list(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn handshake(g in multigraph()) {
        let total: usize = g.vertices().iter().map(|&v| g.degree(v)).sum();
        prop_assert_eq!(total, 2 * g.edge_count());
        prop_assert_eq!(g.darts().len(), 2 * g.edge_count());
    }

    #[test]
    fn cosets_partition(gi in 0usize..64, picks in prop::collection::vec(0usize..1000, 0..3)) {
        let groups = small_groups();
        let g = &groups[gi % groups.len()];
        let table = g.elements().unwrap();
        let gens: Vec<_> = picks.iter().map(|&i| table.element(i % table.len()).clone()).collect();
        let h = Subgroup::new(g, gens).unwrap();
        let cosets = left_cosets(g, &h).unwrap();
        let members = h.member_indices().unwrap();
        prop_assert_eq!(cosets.len() * members.len(), table.len());
        // oracle: gH computed by multiplying out
        for x in 0..table.len() {
            let coset: BTreeSet<usize> = members.iter().map(|&m| table.mul(x, m)).collect();
            let rep = cosets.representatives[cosets.coset_of[x]];
            prop_assert_eq!(rep, *coset.iter().next().unwrap());
            for &y in &coset {
                prop_assert!(cosets.same_coset(x, y));
            }
        }
    }

    #[test]
    fn fundamental_identity(seed in any::<u64>()) {
        let c = random_cover(seed, 5);
        let order = c.group().order();
        for (x, p) in c.ramification_profile().unwrap().vertices {
            prop_assert_eq!(p.m * p.f * p.n, order, "vertex {}", x);
            prop_assert_eq!(p.v, p.m * p.w);
        }
    }

    #[test]
    fn connected_iff_generated(seed in any::<u64>()) {
        let c = random_cover(seed, 4);
        let mut gens = Vec::new();
        for i in c.inertia().values() {
            gens.extend(i.generators().iter().cloned());
        }
        for s in c.multisets().values() {
            gens.extend(s.elements().cloned());
        }
        prop_assert_eq!(c.graph().is_connected(), c.group().generates(&gens).unwrap());
        prop_assert_eq!(c.is_connected(), c.graph().is_connected());
    }

    #[test]
    fn unflip_flip_round_trip(seed in any::<u64>()) {
        let c = random_cover(seed, 4);
        // from the fully flipped model: unflip, then fold back
        let a = if c.is_flipped() { c.total().clone() } else { c.total().flip_all().unwrap() };
        let flipped = a.flipped_edges();
        let u = a.unflip().unwrap();
        prop_assert!(u.flipped_edges().is_empty());
        prop_assert!(u.is_harmonic_action().harmonic);
        prop_assert_eq!(u.graph().edge_count(), a.graph().edge_count() + flipped.len());
        prop_assert_eq!(u.graph().vertex_count(), a.graph().vertex_count());
        let back = u.flip_all().unwrap();
        prop_assert!(is_isomorphic(back.graph(), a.graph()));
        prop_assert_eq!(back.flipped_edges().len(), flipped.len());
        // from an unflipped model: fold, then unflip
        let again = back.unflip().unwrap();
        prop_assert!(is_isomorphic(again.graph(), u.graph()));
    }

    #[test]
    fn degree_is_multiplicative(seed in any::<u64>(), pick in any::<usize>()) {
        let c = random_cover(seed, 4);
        prop_assume!(c.is_connected() && c.base().edge_count() > 0);
        let a = c.total();
        let subs = all_subgroups(c.group()).unwrap();
        let h = Subgroup::from_indices(c.group(), &subs[pick % subs.len()]).unwrap();
        let to_h = a.quotient(&h).unwrap();
        let to_g = a.full_quotient().unwrap();
        let between = GraphMorphism::induced(&to_h.projection, &to_g.projection).unwrap();
        let composed = to_h.projection.then(&between).unwrap();
        prop_assert_eq!(composed.vertex_map(), to_g.projection.vertex_map());
        let d_h = to_h.projection.degree().unwrap();
        let d_between = between.degree().unwrap();
        let d_g = to_g.projection.degree().unwrap();
        prop_assert_eq!(d_g, d_h * d_between);
        prop_assert_eq!(d_g as u64, c.group().order());
    }

    #[test]
    fn lht_orbits_partition_darts(seed in any::<u64>(), half in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_cubic_graph(2 * half, &mut rng).unwrap();
        let og = OrientedGraph::random(g, &mut rng).unwrap();
        let orbits = og.lht_decomposition().orbits;
        let mut seen = BTreeMap::new();
        for (i, o) in orbits.iter().enumerate() {
            for &d in o {
                prop_assert!(seen.insert(d, i).is_none());
            }
        }
        prop_assert_eq!(seen.len(), 3 * og.graph().vertex_count());
        for &d in seen.keys() {
            prop_assert_eq!(og.lht_predecessor(og.lht_successor(d)), d);
        }
        let report = og.surface_genus().unwrap();
        // Euler characteristic of the traced surface
        let (v, e, f) = (report.vertex_count as i64, og.graph().edge_count() as i64, report.l as i64);
        prop_assert_eq!(v - e + f, 2 - 2 * report.surface_genus);
    }
}
