use harmonic_core::galois::{BranchCase, CoverSpec};
use harmonic_core::harmonic::ActionJson;
use harmonic_core::multigraph::{is_isomorphic, EdgeId, Multigraph, MorphismJson, VertexId};
use harmonic_core::permgroup::catalog::Catalog;
use harmonic_core::permgroup::Permutation;
use num_rational::Ratio;

fn example(name: &str) -> String {
    let path = format!("{}/../cli/examples/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn cover(name: &str) -> harmonic_core::galois::HarmonicCover {
    let spec: CoverSpec = serde_json::from_str(&example(name)).unwrap();
    spec.build(&Catalog::shipped().unwrap()).unwrap()
}

fn action(name: &str) -> harmonic_core::harmonic::GraphAction {
    let a: ActionJson = serde_json::from_str(&example(name)).unwrap();
    a.build(&Catalog::shipped().unwrap()).unwrap()
}

#[test]
fn figure1_phi1_fails_at_y() {
    let m: MorphismJson = serde_json::from_str(&example("fig1_phi1.json")).unwrap();
    let r = m.build().unwrap().is_harmonic().unwrap();
    assert!(!r.harmonic);
    // y is vertex 4: two edges over e' and one over e''
    let w = r.witness.unwrap();
    assert_eq!(w.vertex, VertexId(4));
    assert_eq!((w.first_count, w.second_count), (2, 1));
}

#[test]
fn figure1_phi2_harmonic() {
    let m: MorphismJson = serde_json::from_str(&example("fig1_phi2.json")).unwrap();
    let phi = m.build().unwrap();
    assert!(phi.is_harmonic().unwrap().harmonic);
    // counted directly: three source edges over each target edge
    for t in [EdgeId(0), EdgeId(1)] {
        let over = phi
            .edge_map()
            .values()
            .filter(|&&img| img == harmonic_core::multigraph::EdgeImage::Edge(t))
            .count();
        assert_eq!(over, 3);
    }
    assert_eq!(phi.degree().unwrap(), 3);
}

#[test]
fn figure2_quotient_not_harmonic() {
    let a = action("fig2.json");
    assert!(a.is_faithful());
    let rep = a.is_harmonic_action();
    assert!(!rep.harmonic);
    // the generator fixes the third edge and both of its ends
    assert_eq!(rep.witness.unwrap().dart.edge, EdgeId(2));
    let q = a.full_quotient().unwrap();
    assert_eq!((q.quotient.vertex_count(), q.quotient.edge_count()), (2, 2));
    assert!(!q.projection.is_harmonic().unwrap().harmonic);
}

#[test]
fn figure3_actions_harmonic() {
    for name in ["fig3_z6.json", "fig3_s3.json"] {
        let a = action(name);
        assert!(a.is_faithful(), "{name}");
        assert!(a.is_harmonic_action().harmonic, "{name}");
        assert!(a.harmonic_by_subgroups().unwrap(), "{name}");
        let q = a.full_quotient().unwrap();
        assert_eq!(q.quotient, Multigraph::point());
    }
    let s3 = action("fig3_s3.json");
    let tau = Permutation::from_images(vec![1, 0, 2]).unwrap();
    assert_eq!(s3.flipping_involutions(EdgeId(0)).unwrap(), vec![tau]);
}

#[test]
fn figure_cover_counts() {
    for (name, v, e, g) in [("fig4.json", 12, 18, 7), ("fig5.json", 12, 15, 4), ("fig6.json", 8, 9, 2)] {
        let c = cover(name);
        let graph = c.graph();
        assert_eq!((graph.vertex_count(), graph.edge_count()), (v, e), "{name}");
        assert_eq!(graph.genus().unwrap(), g, "{name}");
        assert!(c.projection().is_harmonic().unwrap().harmonic, "{name}");
        assert_eq!(c.morphism_degree().unwrap(), 6, "{name}");
    }
}

#[test]
fn figure5_is_figure4_folded() {
    let f4 = cover("fig4.json");
    let f5 = cover("fig5.json");
    let folded = f4.total().flip_all().unwrap();
    assert!(is_isomorphic(folded.graph(), f5.graph()));
}

#[test]
fn figure6_maximal() {
    let c = cover("fig6.json");
    let locus = c.classify_branch_locus().unwrap();
    assert_eq!(locus.r, Ratio::new(7, 3));
    assert!(locus.maximal);
    assert_eq!(locus.case, BranchCase::III);
    // |G| = 6(g - 1) with g = 2
    assert_eq!(c.group().order(), 6 * (c.graph().genus().unwrap() as u64 - 1));
    assert!(c.riemann_hurwitz(false).unwrap().holds);
    assert!(!c.riemann_hurwitz(true).unwrap().holds);
}
