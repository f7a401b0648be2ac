//! Rotation systems on 3-regular multigraphs, left-hand-turn paths and the
//! genus of the associated surface.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maximal::MaximalCover;
use crate::multigraph::{Dart, EdgeJson, GraphJson, Multigraph, VertexId};

/// A 3-regular multigraph with a cyclic order of the darts at each vertex.
#[derive(Clone, Debug)]
pub struct OrientedGraph {
    graph: Multigraph,
    rotation: BTreeMap<VertexId, [Dart; 3]>,
    next: HashMap<Dart, Dart>,
}

impl OrientedGraph {
    /// `rotation[v]` lists the three darts based at `v` in cyclic order.
    pub fn new(graph: Multigraph, rotation: BTreeMap<VertexId, Vec<Dart>>) -> Result<Self> {
        let mut rot = BTreeMap::new();
        let mut next = HashMap::new();
        for &v in graph.vertices() {
            let at: BTreeSet<Dart> = graph.darts_at(v).into_iter().collect();
            if at.len() != 3 {
                return Err(Error::InvalidRotation(format!("vertex {v} has degree {}, not 3", at.len())));
            }
            let given = rotation
                .get(&v)
                .ok_or_else(|| Error::InvalidRotation(format!("no rotation at vertex {v}")))?;
            let given_set: BTreeSet<Dart> = given.iter().copied().collect();
            if given.len() != 3 || given_set != at {
                return Err(Error::InvalidRotation(format!(
                    "rotation at {v} must list exactly the darts {at:?}"
                )));
            }
            for i in 0..3 {
                next.insert(given[i], given[(i + 1) % 3]);
            }
            rot.insert(v, [given[0], given[1], given[2]]);
        }
        if let Some(v) = rotation.keys().find(|v| !graph.has_vertex(**v)) {
            return Err(Error::InvalidRotation(format!("rotation given at unknown vertex {v}")));
        }
        Ok(OrientedGraph {
            graph,
            rotation: rot,
            next,
        })
    }

    /// A uniformly random rotation at every vertex.
    pub fn random<R: Rng + ?Sized>(graph: Multigraph, rng: &mut R) -> Result<Self> {
        let rotation = graph
            .vertices()
            .iter()
            .map(|&v| {
                let mut darts = graph.darts_at(v);
                darts.shuffle(rng);
                (v, darts)
            })
            .collect();
        OrientedGraph::new(graph, rotation)
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn rotation(&self) -> &BTreeMap<VertexId, [Dart; 3]> {
        &self.rotation
    }

    /// Successor of `d` in the cyclic order at its base vertex.
    pub fn rotate(&self, d: Dart) -> Dart {
        self.next[&d]
    }

    /// Arrive along `d`, then leave along the rotation-successor of the
    /// arriving end.
    pub fn lht_successor(&self, d: Dart) -> Dart {
        self.rotate(d.reverse())
    }

    pub fn lht_predecessor(&self, d: Dart) -> Dart {
        let at = self.graph.dart_base(d).unwrap();
        let r = self.rotation[&at];
        let i = r.iter().position(|&x| x == d).unwrap();
        r[(i + 2) % 3].reverse()
    }

    /// Cycles of the successor map, each starting at its least dart, in
    /// order of those starting darts.
    pub fn lht_decomposition(&self) -> LhtDecomposition {
        let darts = self.graph.darts();
        let mut seen: BTreeSet<Dart> = BTreeSet::new();
        let mut orbits = Vec::new();
        for &d in &darts {
            if seen.contains(&d) {
                continue;
            }
            let mut orbit = vec![d];
            seen.insert(d);
            let mut cur = self.lht_successor(d);
            while cur != d {
                seen.insert(cur);
                orbit.push(cur);
                cur = self.lht_successor(cur);
            }
            orbits.push(orbit);
        }
        LhtDecomposition { orbits }
    }

    /// `g = 1 + (|V| − 2L)/4`, rejecting data for which this is not a
    /// non-negative integer.
    pub fn surface_genus(&self) -> Result<SurfaceGenusReport> {
        let components = self.graph.connected_components().len();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        let l = self.lht_decomposition().len();
        let v = self.graph.vertex_count() as i64;
        let num = v - 2 * l as i64;
        if num % 4 != 0 {
            return Err(Error::InvalidRotation(format!("|V| - 2L = {num} is not divisible by 4")));
        }
        let genus = 1 + num / 4;
        if genus < 0 {
            return Err(Error::InvalidRotation(format!("negative surface genus {genus}")));
        }
        Ok(SurfaceGenusReport {
            vertex_count: v as usize,
            l,
            surface_genus: genus,
        })
    }

    pub fn to_json(&self) -> OrientedJson {
        let g = self.graph.to_json();
        OrientedJson {
            vertices: g.vertices,
            edges: g.edges,
            rotation: self.rotation.iter().map(|(&v, r)| (v, r.to_vec())).collect(),
        }
    }

    /// DOT with each edge end labeled by the position of its dart in the
    /// rotation at that end.
    pub fn to_dot(&self, name: &str) -> String {
        let pos = |d: Dart| -> usize {
            let v = self.graph.dart_base(d).unwrap();
            self.rotation[&v].iter().position(|&x| x == d).unwrap()
        };
        let mut out = format!("graph \"{name}\" {{\n");
        for v in self.graph.vertices() {
            let _ = writeln!(out, "  {v};");
        }
        for (e, [a, b]) in self.graph.edges() {
            let _ = writeln!(
                out,
                "  {a} -- {b} [label=\"e{e}\", taillabel=\"{}\", headlabel=\"{}\"];",
                pos(Dart::new(e, 0)),
                pos(Dart::new(e, 1))
            );
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LhtDecomposition {
    pub orbits: Vec<Vec<Dart>>,
}

impl LhtDecomposition {
    /// Number of minimal left-hand-turn paths.
    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn total_length(&self) -> usize {
        self.orbits.iter().map(Vec::len).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceGenusReport {
    pub vertex_count: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub surface_genus: i64,
}

/// Graph JSON plus `{"rotation": {v: [dart, dart, dart]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrientedJson {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeJson>,
    pub rotation: BTreeMap<VertexId, Vec<Dart>>,
}

impl OrientedJson {
    pub fn build(&self) -> Result<OrientedGraph> {
        let graph = GraphJson {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
        }
        .build()?;
        OrientedGraph::new(graph, self.rotation.clone())
    }
}

/// The orientation induced by the inertia generators: at the vertex γ⟨σ⟩
/// the dart labeled `h` is followed by the dart labeled (γσγ⁻¹)h. Checked
/// to be independent of γ and preserved by the group.
pub fn canonical_orientation(mc: &MaximalCover) -> Result<OrientedGraph> {
    let group = mc.group();
    let table = group.elements()?;
    let s = table.index_of(mc.sigma()).unwrap();
    let graph = mc.graph();
    let labels = mc.vertex_labels();
    let mut rotation = BTreeMap::new();
    for (vi, gamma) in labels.iter().enumerate() {
        let v = VertexId(vi as u32);
        let gamma = table.index_of(gamma).unwrap();
        let coset: Vec<usize> = (0..3)
            .scan(gamma, |g, _| {
                let cur = *g;
                *g = table.mul(*g, s);
                Some(cur)
            })
            .collect();
        let start = graph.darts_at(v)[0];
        let mut order = vec![start];
        for _ in 0..2 {
            let h = mc.label_index_of(*order.last().unwrap());
            let mut images = coset.iter().map(|&c| {
                let conj = table.mul(table.mul(c, s), table.inverse(c));
                mc.dart_of_index(table.mul(conj, h))
            });
            let first = images.next().unwrap();
            if images.any(|d| d != first) {
                return Err(Error::Invariant(format!("rotation at {v} depends on the coset representative")));
            }
            order.push(first);
        }
        rotation.insert(v, order);
    }
    let og = OrientedGraph::new(graph.clone(), rotation)?;
    let action = mc.action();
    for gen in group.generators() {
        let g = table.index_of(gen).unwrap();
        for d in graph.darts() {
            if action.act_dart_index(g, og.rotate(d)) != og.rotate(action.act_dart_index(g, d)) {
                return Err(Error::Invariant(format!("{gen} does not preserve the rotation at dart {d:?}")));
            }
        }
    }
    Ok(og)
}

#[derive(Clone, Debug, Serialize)]
pub struct LhtCheckReport {
    pub order: u64,
    /// Order of τσ.
    pub k: u64,
    /// Traced number of minimal left-hand-turn paths.
    #[serde(rename = "L")]
    pub l: usize,
    pub surface_genus: i64,
    /// `|G|·(k − 6)`
    pub lhs: i64,
    /// `12·k·(g − 1)`
    pub rhs: i64,
    pub holds: bool,
    pub hurwitz: bool,
    /// The path through the dart labeled ε visits exactly the labels (τσ)^j.
    pub identity_orbit_is_coset: bool,
}

/// Traces the left-hand-turn paths of the canonical orientation and checks
/// `|G|(k − 6) = 12k(g − 1)`, with `|G| = 84(g − 1)` when `k = 7`.
pub fn surface_genus_check(mc: &MaximalCover) -> Result<LhtCheckReport> {
    let og = canonical_orientation(mc)?;
    let report = og.surface_genus()?;
    let order = mc.group().order();
    let tau_sigma = mc.tau().compose(mc.sigma());
    let k = tau_sigma.order();
    if !order.is_multiple_of(k) || report.l as u64 != order / k {
        return Err(Error::Invariant(format!(
            "traced L = {} but |G|/|tau sigma| = {order}/{k}",
            report.l
        )));
    }
    let table = mc.group().elements()?;
    let start = mc.dart_of_index(table.identity());
    let decomposition = og.lht_decomposition();
    let orbit = decomposition.orbits.iter().find(|o| o.contains(&start)).unwrap();
    let labels: BTreeSet<_> = orbit.iter().map(|&d| mc.label_of(d)).collect();
    let coset: BTreeSet<_> = (0..k).map(|j| tau_sigma.pow(j)).collect();
    let g = report.surface_genus;
    let lhs = order as i64 * (k as i64 - 6);
    let rhs = 12 * k as i64 * (g - 1);
    let hurwitz = k == 7;
    let holds = lhs == rhs && (!hurwitz || order as i64 == 84 * (g - 1));
    Ok(LhtCheckReport {
        order,
        k,
        l: report.l,
        surface_genus: g,
        lhs,
        rhs,
        holds,
        hurwitz,
        identity_orbit_is_coset: labels == coset,
    })
}

/// A random connected 3-regular loopless multigraph on `n` vertices (`n`
/// even), by pairing half-edges and retrying until the result qualifies.
pub fn random_cubic_graph<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Multigraph> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidGraph(format!("no 3-regular graph on {n} vertices")));
    }
    for _ in 0..10_000 {
        let mut stubs: Vec<u32> = (0..n as u32).flat_map(|v| [v, v, v]).collect();
        stubs.shuffle(rng);
        let pairs: Vec<(u32, u32)> = stubs.chunks(2).map(|c| (c[0], c[1])).collect();
        if pairs.iter().any(|(a, b)| a == b) {
            continue;
        }
        let g = Multigraph::from_edge_list(n as u32, &pairs)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::InvalidGraph("could not sample a connected cubic graph".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maximal::build_maximal;
    use crate::multigraph::EdgeId;
    use crate::permgroup::families::{alternating, cyclic, symmetric};
    use crate::permgroup::search::search_23_pairs;
    use crate::permgroup::Permutation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s3_cover() -> MaximalCover {
        let g = symmetric(3).unwrap();
        let t = Permutation::from_images(vec![1, 0, 2]).unwrap();
        let s = Permutation::from_images(vec![1, 2, 0]).unwrap();
        build_maximal(&g, &t, &s).unwrap()
    }

    #[test]
    fn k4_planar() {
        let k4 = Multigraph::from_edge_list(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (3, 1)]).unwrap();
        // outer triangle 1,2,3 drawn counterclockwise with 0 in the middle;
        // each rotation lists neighbors counterclockwise
        let d = |e: u32, end: u8| Dart::new(EdgeId(e), end);
        let rotation = BTreeMap::from([
            (VertexId(0), vec![d(0, 0), d(1, 0), d(2, 0)]),
            (VertexId(1), vec![d(0, 1), d(5, 1), d(3, 0)]),
            (VertexId(2), vec![d(1, 1), d(3, 1), d(4, 0)]),
            (VertexId(3), vec![d(2, 1), d(4, 1), d(5, 0)]),
        ]);
        let og = OrientedGraph::new(k4, rotation).unwrap();
        let dec = og.lht_decomposition();
        assert_eq!(dec.len(), 4);
        assert_eq!(og.surface_genus().unwrap().surface_genus, 0);
    }

    #[test]
    fn theta_s3_orientation() {
        let mc = s3_cover();
        let og = canonical_orientation(&mc).unwrap();
        let dec = og.lht_decomposition();
        assert_eq!(dec.len(), 3);
        assert!(dec.orbits.iter().all(|o| o.len() == 2));
        assert_eq!(og.surface_genus().unwrap().surface_genus, 0);
        // the two vertices see the three edges in opposite cyclic orders
        let edges = |v: u32| og.rotation()[&VertexId(v)].map(|d| d.edge);
        let (a, b) = (edges(0), edges(1));
        let reversed = [b[2], b[1], b[0]];
        assert!((0..3).any(|i| (0..3).all(|j| a[j] == reversed[(i + j) % 3])));
    }

    #[test]
    fn successor_is_h_tau_sigma() {
        let mc = s3_cover();
        let og = canonical_orientation(&mc).unwrap();
        let ts = mc.tau().compose(mc.sigma());
        for h in mc.group().elements().unwrap().iter() {
            let d = mc.dart_of(h).unwrap();
            assert_eq!(og.lht_successor(d), mc.dart_of(&h.compose(&ts)).unwrap());
        }
    }

    #[test]
    fn surface_genus_check_small() {
        let r = surface_genus_check(&s3_cover()).unwrap();
        assert_eq!((r.k, r.l, r.surface_genus), (2, 3, 0));
        assert!(r.holds && r.identity_orbit_is_coset);
        let a4 = alternating(4).unwrap();
        for p in search_23_pairs(&a4, &Default::default()).unwrap().pairs {
            let r = surface_genus_check(&build_maximal(&a4, &p.tau, &p.sigma).unwrap()).unwrap();
            assert!(r.holds);
            if r.k == 3 {
                assert_eq!((r.l, r.surface_genus), (4, 0));
            }
        }
        let z6 = cyclic(6).unwrap();
        let x = z6.generators()[0].clone();
        let mc = build_maximal(&z6, &x.pow(3), &x.pow(2)).unwrap();
        assert!(surface_genus_check(&mc).unwrap().holds);
    }

    #[test]
    fn random_rotations_partition_darts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = 2 * rng.gen_range(1..=8);
            let og = OrientedGraph::random(random_cubic_graph(n, &mut rng).unwrap(), &mut rng).unwrap();
            let dec = og.lht_decomposition();
            assert_eq!(dec.total_length(), 3 * n);
            for d in og.graph().darts() {
                assert_eq!(og.lht_predecessor(og.lht_successor(d)), d);
            }
            assert!(og.surface_genus().is_ok());
        }
    }

    #[test]
    fn rejects_bad_rotation() {
        let theta = Multigraph::from_edge_list(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let d = |e: u32, end: u8| Dart::new(EdgeId(e), end);
        let rotation = BTreeMap::from([
            (VertexId(0), vec![d(0, 0), d(1, 0), d(1, 0)]),
            (VertexId(1), vec![d(0, 1), d(1, 1), d(2, 1)]),
        ]);
        assert!(OrientedGraph::new(theta, rotation).is_err());
    }

    #[test]
    fn json_round_trip() {
        let og = canonical_orientation(&s3_cover()).unwrap();
        let text = serde_json::to_string(&og.to_json()).unwrap();
        let back: OrientedJson = serde_json::from_str(&text).unwrap();
        let og2 = back.build().unwrap();
        assert_eq!(og2.rotation(), og.rotation());
        assert!(og.to_dot("theta").contains("taillabel"));
    }
}
