//! Finite multigraphs without loop edges, their darts and morphisms.
//!
//! Vertex and edge ids are opaque integers fixed at construction. Every
//! derived structure (quotients, covers, morphism maps) is keyed by id, never
//! by position, so ids survive unchanged through the constructions built on
//! top of this module.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A directed edge-end: the half of `edge` based at `ends[end]`, pointing
/// away from that vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "(u32, u8)", from = "(u32, u8)")]
pub struct Dart {
    pub edge: EdgeId,
    pub end: u8,
}

impl Dart {
    pub fn new(edge: EdgeId, end: u8) -> Self {
        debug_assert!(end < 2);
        Dart { edge, end }
    }

    pub fn reverse(self) -> Dart {
        Dart {
            edge: self.edge,
            end: 1 - self.end,
        }
    }
}

impl From<Dart> for (u32, u8) {
    fn from(d: Dart) -> Self {
        (d.edge.0, d.end)
    }
}

impl From<(u32, u8)> for Dart {
    fn from((e, end): (u32, u8)) -> Self {
        Dart {
            edge: EdgeId(e),
            end: end.min(1),
        }
    }
}

/// The edges incident to a vertex, with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexStar {
    pub center: VertexId,
    pub incident_edges: Vec<EdgeId>,
}

impl VertexStar {
    pub fn degree(&self) -> usize {
        self.incident_edges.len()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertices: Vec<VertexId>,
    edges: Vec<(EdgeId, [VertexId; 2])>,
    /// Edge indices incident to each vertex index.
    incidence: Vec<Vec<usize>>,
}

impl Multigraph {
    /// Builds a graph; ids need not be given sorted but must be unique, and
    /// no edge may be a loop.
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (EdgeId, [VertexId; 2])>,
    ) -> Result<Self> {
        let mut vertices: Vec<VertexId> = vertices.into_iter().collect();
        vertices.sort();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("duplicate vertex id".into()));
        }
        let mut edges: Vec<(EdgeId, [VertexId; 2])> = edges.into_iter().collect();
        edges.sort_by_key(|(e, _)| *e);
        if let Some(w) = edges.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidGraph(format!("duplicate edge id {}", w[0].0)));
        }
        let mut incidence = vec![Vec::new(); vertices.len()];
        for (i, (e, ends)) in edges.iter().enumerate() {
            if ends[0] == ends[1] {
                return Err(Error::LoopEdge {
                    edge: e.0,
                    vertex: ends[0].0,
                });
            }
            for v in ends {
                let vi = vertices.binary_search(v).map_err(|_| {
                    Error::InvalidGraph(format!("edge {e} has unknown endpoint {v}"))
                })?;
                incidence[vi].push(i);
            }
        }
        Ok(Multigraph {
            vertices,
            edges,
            incidence,
        })
    }

    /// The graph with one vertex and no edges.
    pub fn point() -> Self {
        Multigraph::new([VertexId(0)], []).unwrap()
    }

    pub fn empty() -> Self {
        Multigraph::new([], []).unwrap()
    }

    /// Convenience constructor with ids `0..n` and edges numbered in order.
    pub fn from_edge_list(n: u32, edges: &[(u32, u32)]) -> Result<Self> {
        Multigraph::new(
            (0..n).map(VertexId),
            edges
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| (EdgeId(i as u32), [VertexId(a), VertexId(b)])),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, [VertexId; 2])> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().map(|(e, _)| *e)
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edge_index(e).is_some()
    }

    pub fn vertex_index(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn edge_index(&self, e: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&e, |(id, _)| *id).ok()
    }

    pub fn vertex_at(&self, i: usize) -> VertexId {
        self.vertices[i]
    }

    pub fn edge_at(&self, i: usize) -> (EdgeId, [VertexId; 2]) {
        self.edges[i]
    }

    pub fn endpoints(&self, e: EdgeId) -> Option<[VertexId; 2]> {
        self.edge_index(e).map(|i| self.edges[i].1)
    }

    pub fn max_vertex_id(&self) -> Option<VertexId> {
        self.vertices.last().copied()
    }

    pub fn max_edge_id(&self) -> Option<EdgeId> {
        self.edges.last().map(|(e, _)| *e)
    }

    /// Edge indices incident to the vertex at index `vi`.
    pub(crate) fn incident_indices(&self, vi: usize) -> &[usize] {
        &self.incidence[vi]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.vertex_index(v).map_or(0, |i| self.incidence[i].len())
    }

    pub fn star(&self, v: VertexId) -> Option<VertexStar> {
        let vi = self.vertex_index(v)?;
        Some(VertexStar {
            center: v,
            incident_edges: self.incidence[vi].iter().map(|&i| self.edges[i].0).collect(),
        })
    }

    pub fn dart_base(&self, d: Dart) -> Option<VertexId> {
        self.endpoints(d.edge).map(|ends| ends[d.end as usize])
    }

    pub fn dart_head(&self, d: Dart) -> Option<VertexId> {
        self.dart_base(d.reverse())
    }

    /// All darts, two per edge, in (edge, end) order.
    pub fn darts(&self) -> Vec<Dart> {
        self.edges
            .iter()
            .flat_map(|(e, _)| [Dart::new(*e, 0), Dart::new(*e, 1)])
            .collect()
    }

    /// Darts based at `v`, in incidence order.
    pub fn darts_at(&self, v: VertexId) -> Vec<Dart> {
        let Some(vi) = self.vertex_index(v) else {
            return Vec::new();
        };
        self.incidence[vi]
            .iter()
            .map(|&i| {
                let (e, ends) = self.edges[i];
                Dart::new(e, if ends[0] == v { 0 } else { 1 })
            })
            .collect()
    }

    /// Partition of the vertices under edge-reachability; each component is
    /// sorted and components are ordered by their smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let c = out.len();
            let mut members = vec![start];
            comp[start] = c;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &ei in &self.incidence[v] {
                    for w in self.edges[ei].1 {
                        let wi = self.vertex_index(w).unwrap();
                        if comp[wi] == usize::MAX {
                            comp[wi] = c;
                            members.push(wi);
                            queue.push_back(wi);
                        }
                    }
                }
            }
            members.sort();
            out.push(members.into_iter().map(|i| self.vertices[i]).collect());
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// First Betti number `|E| - |V| + 1` of a connected graph.
    pub fn genus(&self) -> Result<i64> {
        let components = self.connected_components().len();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(self.edges.len() as i64 - self.vertices.len() as i64 + 1)
    }

    pub fn is_tree(&self) -> bool {
        matches!(self.genus(), Ok(0))
    }

    /// Number of edges joining `a` and `b`.
    pub fn multiplicity(&self, a: VertexId, b: VertexId) -> usize {
        let Some(ai) = self.vertex_index(a) else {
            return 0;
        };
        self.incidence[ai]
            .iter()
            .filter(|&&i| {
                let ends = self.edges[i].1;
                (ends[0] == a && ends[1] == b) || (ends[0] == b && ends[1] == a)
            })
            .count()
    }

    /// Removes a degree-2 vertex and merges its two edges into one, keeping
    /// the smaller edge id. Fails if the merge would create a loop.
    pub fn smooth_vertex(&self, v: VertexId) -> Result<Multigraph> {
        let star = self
            .star(v)
            .ok_or_else(|| Error::InvalidGraph(format!("no vertex {v}")))?;
        if star.degree() != 2 {
            return Err(Error::InvalidGraph(format!("vertex {v} has degree {}", star.degree())));
        }
        let other = |e: EdgeId| {
            let ends = self.endpoints(e).unwrap();
            if ends[0] == v {
                ends[1]
            } else {
                ends[0]
            }
        };
        let (e1, e2) = (star.incident_edges[0], star.incident_edges[1]);
        let (a, b) = (other(e1), other(e2));
        if a == b {
            return Err(Error::LoopEdge { edge: e1.min(e2).0, vertex: a.0 });
        }
        let keep = e1.min(e2);
        Multigraph::new(
            self.vertices.iter().copied().filter(|&w| w != v),
            self.edges
                .iter()
                .filter(|(e, _)| *e != e1 && *e != e2)
                .copied()
                .chain([(keep, [a, b])]),
        )
    }

    /// DOT text with one `--` line per edge. Vertices are named by id and
    /// carry `labels[v]` when given.
    pub fn to_dot(&self, name: &str, labels: Option<&BTreeMap<VertexId, String>>) -> String {
        use std::fmt::Write as _;
        let mut out = format!("graph \"{name}\" {{\n");
        for v in &self.vertices {
            match labels.and_then(|l| l.get(v)) {
                Some(l) => writeln!(out, "  {v} [label=\"{}\"];", l.replace('"', "\\\"")),
                None => writeln!(out, "  {v};"),
            }
            .unwrap();
        }
        for (e, [a, b]) in &self.edges {
            writeln!(out, "  {a} -- {b} [label=\"e{e}\"];").unwrap();
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|(e, ends)| EdgeJson { id: *e, ends: *ends })
                .collect(),
        }
    }
}

impl fmt::Debug for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multigraph(V={:?}, E=[", self.vertices)?;
        for (i, (e, [a, b])) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}:{a}-{b}")?;
        }
        write!(f, "])")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: EdgeId,
    pub ends: [VertexId; 2],
}

/// `{"vertices":[int...],"edges":[{"id":int,"ends":[int,int]}...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeJson>,
}

impl GraphJson {
    pub fn build(&self) -> Result<Multigraph> {
        Multigraph::new(
            self.vertices.iter().copied(),
            self.edges.iter().map(|e| (e.id, e.ends)),
        )
    }
}

impl TryFrom<GraphJson> for Multigraph {
    type Error = Error;
    fn try_from(j: GraphJson) -> Result<Self> {
        j.build()
    }
}

/// Image of an edge under a morphism: an edge, or a vertex when the edge is
/// collapsed (vertical).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeImage {
    Edge(EdgeId),
    Vertex(VertexId),
}

/// A graph morphism, validated at construction.
#[derive(Clone, Debug)]
pub struct GraphMorphism {
    source: Multigraph,
    target: Multigraph,
    vertex_map: BTreeMap<VertexId, VertexId>,
    edge_map: BTreeMap<EdgeId, EdgeImage>,
}

/// Why a morphism fails to be harmonic at a vertex `y`: the target edges
/// `first` and `second` at `φ(y)` have different preimage counts at `y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HarmonicWitness {
    pub vertex: VertexId,
    pub first: EdgeId,
    pub first_count: usize,
    pub second: EdgeId,
    pub second_count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct HarmonicityReport {
    pub harmonic: bool,
    pub witness: Option<HarmonicWitness>,
    /// Vertices whose whole neighborhood collapses to their image.
    pub degenerate: Vec<VertexId>,
    /// Common preimage count at each vertex where it is defined.
    pub multiplicities: BTreeMap<VertexId, usize>,
}

impl GraphMorphism {
    pub fn new(
        source: Multigraph,
        target: Multigraph,
        vertex_map: BTreeMap<VertexId, VertexId>,
        edge_map: BTreeMap<EdgeId, EdgeImage>,
    ) -> Result<Self> {
        for &v in source.vertices() {
            let w = vertex_map
                .get(&v)
                .ok_or_else(|| Error::InvalidMorphism(format!("vertex {v} has no image")))?;
            if !target.has_vertex(*w) {
                return Err(Error::InvalidMorphism(format!("vertex {v} maps to unknown {w}")));
            }
        }
        if vertex_map.len() != source.vertex_count() {
            return Err(Error::InvalidMorphism("vertex map has extra keys".into()));
        }
        if edge_map.len() != source.edge_count() {
            return Err(Error::InvalidMorphism("edge map does not cover the edges".into()));
        }
        for (e, [a, b]) in source.edges() {
            let (fa, fb) = (vertex_map[&a], vertex_map[&b]);
            match edge_map.get(&e) {
                None => return Err(Error::InvalidMorphism(format!("edge {e} has no image"))),
                Some(EdgeImage::Edge(t)) => {
                    let ends = target.endpoints(*t).ok_or_else(|| {
                        Error::InvalidMorphism(format!("edge {e} maps to unknown edge {t}"))
                    })?;
                    let matches = (ends[0] == fa && ends[1] == fb) || (ends[0] == fb && ends[1] == fa);
                    if fa == fb || !matches {
                        return Err(Error::InvalidMorphism(format!(
                            "edge {e} ({a}-{b}) maps to edge {t} but its endpoints map to {fa},{fb}"
                        )));
                    }
                }
                Some(EdgeImage::Vertex(w)) => {
                    if fa != *w || fb != *w {
                        return Err(Error::InvalidMorphism(format!(
                            "edge {e} collapses to {w} but its endpoints map to {fa},{fb}"
                        )));
                    }
                }
            }
        }
        Ok(GraphMorphism {
            source,
            target,
            vertex_map,
            edge_map,
        })
    }

    pub fn identity(g: &Multigraph) -> Self {
        GraphMorphism {
            source: g.clone(),
            target: g.clone(),
            vertex_map: g.vertices().iter().map(|&v| (v, v)).collect(),
            edge_map: g.edge_ids().map(|e| (e, EdgeImage::Edge(e))).collect(),
        }
    }

    pub fn source(&self) -> &Multigraph {
        &self.source
    }

    pub fn target(&self) -> &Multigraph {
        &self.target
    }

    pub fn vertex_map(&self) -> &BTreeMap<VertexId, VertexId> {
        &self.vertex_map
    }

    pub fn edge_map(&self) -> &BTreeMap<EdgeId, EdgeImage> {
        &self.edge_map
    }

    pub fn to_json(&self) -> MorphismJson {
        MorphismJson {
            source: self.source.to_json(),
            target: self.target.to_json(),
            vertex_map: self.vertex_map.clone(),
            edge_map: self.edge_map.clone(),
        }
    }

    pub fn map_vertex(&self, v: VertexId) -> VertexId {
        self.vertex_map[&v]
    }

    pub fn map_edge(&self, e: EdgeId) -> EdgeImage {
        self.edge_map[&e]
    }

    pub fn vertical_edges(&self) -> Vec<EdgeId> {
        self.edge_map
            .iter()
            .filter(|(_, img)| matches!(img, EdgeImage::Vertex(_)))
            .map(|(e, _)| *e)
            .collect()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GraphMorphism) -> Result<GraphMorphism> {
        if self.target != other.source {
            return Err(Error::InvalidMorphism("composition: target/source mismatch".into()));
        }
        let vertex_map = self
            .vertex_map
            .iter()
            .map(|(&v, &w)| (v, other.map_vertex(w)))
            .collect();
        let edge_map = self
            .edge_map
            .iter()
            .map(|(&e, &img)| {
                let out = match img {
                    EdgeImage::Edge(t) => other.map_edge(t),
                    EdgeImage::Vertex(w) => EdgeImage::Vertex(other.map_vertex(w)),
                };
                (e, out)
            })
            .collect();
        GraphMorphism::new(self.source.clone(), other.target.clone(), vertex_map, edge_map)
    }

    /// Given a surjective `quotient: Y → Q` and `phi: Y → X` that is constant
    /// on the fibers of `quotient`, the induced morphism `Q → X`.
    pub fn induced(quotient: &GraphMorphism, phi: &GraphMorphism) -> Result<GraphMorphism> {
        if quotient.source != phi.source {
            return Err(Error::InvalidMorphism("induced: different sources".into()));
        }
        let mut vertex_map = BTreeMap::new();
        for (&y, &q) in &quotient.vertex_map {
            let x = phi.map_vertex(y);
            if let Some(prev) = vertex_map.insert(q, x) {
                if prev != x {
                    return Err(Error::InvalidMorphism(format!(
                        "phi is not constant on the quotient fiber over {q}"
                    )));
                }
            }
        }
        let mut edge_map = BTreeMap::new();
        for (&e, &img) in &quotient.edge_map {
            if let EdgeImage::Edge(qe) = img {
                let x = phi.map_edge(e);
                if let Some(prev) = edge_map.insert(qe, x) {
                    if prev != x {
                        return Err(Error::InvalidMorphism(format!(
                            "phi is not constant on the quotient fiber over edge {qe}"
                        )));
                    }
                }
            }
        }
        GraphMorphism::new(quotient.target.clone(), phi.target.clone(), vertex_map, edge_map)
    }

    /// Harmonicity: at every source vertex `y`, the number of edges at `y`
    /// over a target edge `e′` at `φ(y)` must not depend on `e′`.
    pub fn is_harmonic(&self) -> Result<HarmonicityReport> {
        let components = self.target.connected_components().len();
        if components > 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(self.local_harmonicity())
    }

    /// The vertex-local harmonicity test without the connectivity
    /// precondition on the target.
    pub fn local_harmonicity(&self) -> HarmonicityReport {
        let mut witness = None;
        let mut degenerate = Vec::new();
        let mut multiplicities = BTreeMap::new();
        for &y in self.source.vertices() {
            let x = self.map_vertex(y);
            let mut counts: BTreeMap<EdgeId, usize> = self
                .target
                .star(x)
                .unwrap()
                .incident_edges
                .into_iter()
                .map(|e| (e, 0))
                .collect();
            let star = self.source.star(y).unwrap();
            let mut horizontal = 0;
            for e in &star.incident_edges {
                if let EdgeImage::Edge(t) = self.map_edge(*e) {
                    *counts.get_mut(&t).unwrap() += 1;
                    horizontal += 1;
                }
            }
            if horizontal == 0 {
                degenerate.push(y);
            }
            let mut iter = counts.iter();
            if let Some((&first, &c0)) = iter.next() {
                match iter.find(|(_, &c)| c != c0) {
                    Some((&second, &c1)) => {
                        if witness.is_none() {
                            witness = Some(HarmonicWitness {
                                vertex: y,
                                first,
                                first_count: c0,
                                second,
                                second_count: c1,
                            });
                        }
                    }
                    None => {
                        multiplicities.insert(y, c0);
                    }
                }
            }
        }
        HarmonicityReport {
            harmonic: witness.is_none(),
            witness,
            degenerate,
            multiplicities,
        }
    }

    /// Degree: preimage count of any target edge, or `|V(source)|` when the
    /// target is the point graph.
    pub fn degree(&self) -> Result<usize> {
        let report = self.is_harmonic()?;
        if let Some(w) = report.witness {
            return Err(Error::NotHarmonic(format!(
                "at vertex {}: edge {} has {} preimages there, edge {} has {}",
                w.vertex, w.first, w.first_count, w.second, w.second_count
            )));
        }
        if self.target.vertex_count() <= 1 {
            return Ok(self.source.vertex_count());
        }
        let mut counts: BTreeMap<EdgeId, usize> = self.target.edge_ids().map(|e| (e, 0)).collect();
        for img in self.edge_map.values() {
            if let EdgeImage::Edge(t) = img {
                *counts.get_mut(t).unwrap() += 1;
            }
        }
        let distinct: BTreeSet<usize> = counts.values().copied().collect();
        if distinct.len() != 1 {
            return Err(Error::NotHarmonic(format!(
                "edge preimage counts differ across target edges: {counts:?}"
            )));
        }
        Ok(*distinct.iter().next().unwrap())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorphismJson {
    pub source: GraphJson,
    pub target: GraphJson,
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub edge_map: BTreeMap<EdgeId, EdgeImage>,
}

impl MorphismJson {
    pub fn build(&self) -> Result<GraphMorphism> {
        GraphMorphism::new(
            self.source.build()?,
            self.target.build()?,
            self.vertex_map.clone(),
            self.edge_map.clone(),
        )
    }
}

/// Searches for a vertex bijection preserving edge multiplicities.
/// Backtracking with color refinement; meant for small graphs.
pub fn find_isomorphism(a: &Multigraph, b: &Multigraph) -> Option<BTreeMap<VertexId, VertexId>> {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return None;
    }
    let n = a.vertex_count();
    let adj = |g: &Multigraph| -> Vec<HashMap<usize, usize>> {
        let mut m = vec![HashMap::new(); g.vertex_count()];
        for (_, [x, y]) in g.edges() {
            let (xi, yi) = (g.vertex_index(x).unwrap(), g.vertex_index(y).unwrap());
            *m[xi].entry(yi).or_insert(0) += 1;
            *m[yi].entry(xi).or_insert(0) += 1;
        }
        m
    };
    let (adj_a, adj_b) = (adj(a), adj(b));

    // joint color refinement on the disjoint union
    let mut colors: Vec<usize> = (0..n)
        .map(|i| a.incident_indices(i).len())
        .chain((0..n).map(|i| b.incident_indices(i).len()))
        .collect();
    loop {
        let mut signatures: Vec<(usize, Vec<(usize, usize)>)> = Vec::with_capacity(2 * n);
        for i in 0..2 * n {
            let (adj, off) = if i < n { (&adj_a[i], 0) } else { (&adj_b[i - n], n) };
            let mut sig: Vec<(usize, usize)> = adj.iter().map(|(&j, &m)| (colors[j + off], m)).collect();
            sig.sort();
            signatures.push((colors[i], sig));
        }
        let mut distinct: Vec<&(usize, Vec<(usize, usize)>)> = signatures.iter().collect();
        distinct.sort();
        distinct.dedup();
        let new_colors: Vec<usize> = signatures
            .iter()
            .map(|s| distinct.binary_search(&s).unwrap())
            .collect();
        let count_old = colors.iter().collect::<BTreeSet<_>>().len();
        colors = new_colors;
        if distinct.len() == count_old {
            break;
        }
    }
    let mut hist_a: BTreeMap<usize, usize> = BTreeMap::new();
    let mut hist_b: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..n {
        *hist_a.entry(colors[i]).or_insert(0) += 1;
        *hist_b.entry(colors[i + n]).or_insert(0) += 1;
    }
    if hist_a != hist_b {
        return None;
    }

    // BFS order on `a` so that each vertex after the first in its component
    // has an already-placed neighbor
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    for start in 0..n {
        if placed[start] {
            continue;
        }
        placed[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adj_a[v].keys().copied().collect();
            nbrs.sort();
            for w in nbrs {
                if !placed[w] {
                    placed[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }

    struct Search<'s> {
        order: Vec<usize>,
        adj_a: &'s [HashMap<usize, usize>],
        adj_b: &'s [HashMap<usize, usize>],
        colors: &'s [usize],
        n: usize,
        map: Vec<usize>,
        used: Vec<bool>,
    }
    impl Search<'_> {
        fn consistent(&self, u: usize, c: usize) -> bool {
            if self.colors[u] != self.colors[c + self.n] || self.used[c] {
                return false;
            }
            let mut mapped_nbrs = 0;
            for (&w, &m) in &self.adj_a[u] {
                let img = self.map[w];
                if img != usize::MAX {
                    mapped_nbrs += 1;
                    if self.adj_b[c].get(&img).copied().unwrap_or(0) != m {
                        return false;
                    }
                }
            }
            let mapped_b = self.adj_b[c].keys().filter(|&&x| self.used[x]).count();
            mapped_b == mapped_nbrs
        }

        fn go(&mut self, k: usize) -> bool {
            if k == self.order.len() {
                return true;
            }
            let u = self.order[k];
            let anchor = self.adj_a[u].keys().copied().find(|&w| self.map[w] != usize::MAX);
            let candidates: Vec<usize> = match anchor {
                Some(w) => {
                    let mut c: Vec<usize> = self.adj_b[self.map[w]].keys().copied().collect();
                    c.sort();
                    c
                }
                None => (0..self.n).collect(),
            };
            for c in candidates {
                if self.consistent(u, c) {
                    self.map[u] = c;
                    self.used[c] = true;
                    if self.go(k + 1) {
                        return true;
                    }
                    self.map[u] = usize::MAX;
                    self.used[c] = false;
                }
            }
            false
        }
    }

    let mut search = Search {
        order,
        adj_a: &adj_a,
        adj_b: &adj_b,
        colors: &colors,
        n,
        map: vec![usize::MAX; n],
        used: vec![false; n],
    };
    if !search.go(0) {
        return None;
    }
    Some(
        (0..n)
            .map(|i| (a.vertex_at(i), b.vertex_at(search.map[i])))
            .collect(),
    )
}

pub fn is_isomorphic(a: &Multigraph, b: &Multigraph) -> bool {
    find_isomorphism(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> Multigraph {
        Multigraph::from_edge_list(2, &[(0, 1), (0, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn theta_genus() {
        assert_eq!(theta().genus().unwrap(), 2);
        assert_eq!(Multigraph::point().genus().unwrap(), 0);
    }

    #[test]
    fn genus_rejects_disconnected() {
        let g = Multigraph::from_edge_list(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(g.genus(), Err(Error::Disconnected { components: 2 })));
    }

    #[test]
    fn loops_rejected_with_edge_id() {
        let err = Multigraph::new(
            [VertexId(0), VertexId(1)],
            [(EdgeId(7), [VertexId(1), VertexId(1)])],
        )
        .unwrap_err();
        assert!(matches!(err, Error::LoopEdge { edge: 7, vertex: 1 }));
        assert!(err.to_string().contains("edge 7"));
    }

    #[test]
    fn components() {
        assert_eq!(theta().connected_components().len(), 1);
        assert!(Multigraph::empty().connected_components().is_empty());
        let g = Multigraph::from_edge_list(5, &[(3, 4), (0, 2)]).unwrap();
        let comps = g.connected_components();
        assert_eq!(comps, vec![vec![VertexId(0), VertexId(2)], vec![VertexId(1)], vec![VertexId(3), VertexId(4)]]);
    }

    #[test]
    fn darts_and_stars() {
        let g = theta();
        assert_eq!(g.darts().len(), 6);
        for d in g.darts() {
            assert_eq!(d.reverse().reverse(), d);
            assert_ne!(d.reverse(), d);
            assert_ne!(g.dart_base(d), g.dart_head(d));
        }
        assert_eq!(g.star(VertexId(0)).unwrap().degree(), 3);
        assert_eq!(g.darts_at(VertexId(1)).len(), 3);
        assert_eq!(g.multiplicity(VertexId(0), VertexId(1)), 3);
    }

    #[test]
    fn smoothing_preserves_genus() {
        // theta with one edge subdivided
        let g = Multigraph::from_edge_list(3, &[(0, 1), (0, 1), (0, 2), (2, 1)]).unwrap();
        assert_eq!(g.genus().unwrap(), 2);
        let s = g.smooth_vertex(VertexId(2)).unwrap();
        assert_eq!(s.genus().unwrap(), 2);
        assert!(is_isomorphic(&s, &theta()));
        // smoothing the middle of a 2-cycle would leave a loop
        let c = Multigraph::from_edge_list(2, &[(0, 1), (1, 0)]).unwrap();
        assert!(c.smooth_vertex(VertexId(0)).is_err());
    }

    #[test]
    fn identity_is_harmonic_degree_one() {
        let id = GraphMorphism::identity(&theta());
        assert!(id.is_harmonic().unwrap().harmonic);
        assert_eq!(id.degree().unwrap(), 1);
    }

    #[test]
    fn invalid_morphism_rejected() {
        let src = Multigraph::from_edge_list(2, &[(0, 1)]).unwrap();
        let tgt = Multigraph::from_edge_list(2, &[(0, 1)]).unwrap();
        let vmap: BTreeMap<_, _> = [(VertexId(0), VertexId(0)), (VertexId(1), VertexId(0))].into();
        let emap: BTreeMap<_, _> = [(EdgeId(0), EdgeImage::Edge(EdgeId(0)))].into();
        assert!(GraphMorphism::new(src.clone(), tgt.clone(), vmap.clone(), emap).is_err());
        let emap: BTreeMap<_, _> = [(EdgeId(0), EdgeImage::Vertex(VertexId(0)))].into();
        assert!(GraphMorphism::new(src, tgt, vmap, emap).is_ok());
    }

    #[test]
    fn degree_over_point_graph_counts_vertices() {
        let g = theta();
        let vmap = g.vertices().iter().map(|&v| (v, VertexId(0))).collect();
        let emap = g.edge_ids().map(|e| (e, EdgeImage::Vertex(VertexId(0)))).collect();
        let m = GraphMorphism::new(g, Multigraph::point(), vmap, emap).unwrap();
        let rep = m.is_harmonic().unwrap();
        assert!(rep.harmonic);
        assert_eq!(rep.degenerate.len(), 2);
        assert_eq!(m.degree().unwrap(), 2);
    }

    #[test]
    fn isomorphism_search() {
        let k4 = Multigraph::from_edge_list(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let k4b = Multigraph::from_edge_list(4, &[(3, 1), (2, 0), (0, 3), (1, 2), (1, 0), (2, 3)]).unwrap();
        assert!(is_isomorphic(&k4, &k4b));
        let c4 = Multigraph::from_edge_list(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 1), (2, 3)]).unwrap();
        assert!(!is_isomorphic(&k4, &c4));
        let two_triangles = Multigraph::from_edge_list(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let hexagon = Multigraph::from_edge_list(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        assert!(!is_isomorphic(&two_triangles, &hexagon));
    }

    #[test]
    fn dot_has_one_line_per_edge() {
        let labels = BTreeMap::from([(VertexId(0), "<s>".to_string())]);
        let dot = theta().to_dot("theta", Some(&labels));
        assert_eq!(dot.matches(" -- ").count(), 3);
        assert!(dot.contains("0 [label=\"<s>\"]"));
    }

    #[test]
    fn json_round_trip() {
        let g = theta();
        let text = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(text, r#"{"vertices":[0,1],"edges":[{"id":0,"ends":[0,1]},{"id":1,"ends":[0,1]},{"id":2,"ends":[0,1]}]}"#);
        let back: GraphJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.build().unwrap(), g);
    }
}
