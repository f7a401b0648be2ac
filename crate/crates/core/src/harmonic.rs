//! Group actions on multigraphs: faithfulness, quotients, harmonicity, and
//! conversion between the flipped and unflipped models.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::{
    Dart, EdgeId, EdgeImage, EdgeJson, GraphJson, GraphMorphism, Multigraph, VertexId,
};
use crate::permgroup::catalog::{Catalog, GroupRef, InlineGroup};
use crate::permgroup::{all_subgroups, left_cosets, ElementTable, Permutation, PermutationGroup, Subgroup};

/// A group acting on a graph, given by the images of the group's generators.
/// The action of every element is derived once and kept.
#[derive(Clone)]
pub struct GraphAction {
    group: PermutationGroup,
    graph: Multigraph,
    gen_vertex: Vec<Vec<u32>>,
    gen_edge: Vec<Vec<u32>>,
    // element-major: vertex[g * |V| + v]
    vertex: Vec<u32>,
    edge: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DartWitness {
    pub dart: Dart,
    pub element: Permutation,
}

#[derive(Clone, Debug, Serialize)]
pub struct HarmonicActionReport {
    pub harmonic: bool,
    pub witness: Option<DartWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FaithfulnessReport {
    pub faithful: bool,
    /// A component (by smallest vertex) and a non-identity element of its
    /// stabilizer acting trivially on it.
    pub witness: Option<(VertexId, Permutation)>,
}

/// An edge orbit that became a loop in the quotient and was dropped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopOrbit {
    pub edges: Vec<EdgeId>,
    pub vertex: VertexId,
}

#[derive(Clone, Debug)]
pub struct QuotientResult {
    pub quotient: Multigraph,
    pub projection: GraphMorphism,
    pub removed_loops: Vec<LoopOrbit>,
}

fn invert(map: &[u32]) -> Option<Vec<u32>> {
    let mut inv = vec![u32::MAX; map.len()];
    for (i, &j) in map.iter().enumerate() {
        let slot = inv.get_mut(j as usize)?;
        if *slot != u32::MAX {
            return None;
        }
        *slot = i as u32;
    }
    Some(inv)
}

impl GraphAction {
    /// Builds an action from generator images keyed by id. Checks that each
    /// generator acts by a graph automorphism and that the assignment
    /// extends to a homomorphism of the whole group.
    pub fn new(
        group: PermutationGroup,
        graph: Multigraph,
        vertex_images: &[BTreeMap<VertexId, VertexId>],
        edge_images: &[BTreeMap<EdgeId, EdgeId>],
    ) -> Result<Self> {
        let k = group.generators().len();
        if vertex_images.len() != k || edge_images.len() != k {
            return Err(Error::InvalidAction(format!(
                "expected images for {k} generators, got {} vertex and {} edge maps",
                vertex_images.len(),
                edge_images.len()
            )));
        }
        let mut gen_vertex = Vec::with_capacity(k);
        let mut gen_edge = Vec::with_capacity(k);
        for i in 0..k {
            let mut vmap = Vec::with_capacity(graph.vertex_count());
            for &v in graph.vertices() {
                let w = vertex_images[i].get(&v).copied().unwrap_or(v);
                let wi = graph.vertex_index(w).ok_or_else(|| {
                    Error::InvalidAction(format!("generator {i} sends vertex {v} to unknown {w}"))
                })?;
                vmap.push(wi as u32);
            }
            let mut emap = Vec::with_capacity(graph.edge_count());
            for e in graph.edge_ids() {
                let f = edge_images[i].get(&e).copied().unwrap_or(e);
                let fi = graph.edge_index(f).ok_or_else(|| {
                    Error::InvalidAction(format!("generator {i} sends edge {e} to unknown {f}"))
                })?;
                emap.push(fi as u32);
            }
            gen_vertex.push(vmap);
            gen_edge.push(emap);
        }
        Self::from_index_maps(group, graph, gen_vertex, gen_edge)
    }

    /// The coset graph with vertices `G/A` and, for each `(t, B)`, an edge
    /// orbit `G/B` whose edge `gB` joins `gA` and `gtA`. Needs
    /// `B ≤ A ∩ tAt⁻¹` so the ends are well defined, and `t ∉ A`.
    /// The dart stabilizers are the groups `B`.
    pub fn coset_graph(group: &PermutationGroup, a: &Subgroup, edges: &[(Permutation, Subgroup)]) -> Result<Self> {
        let table = group.elements()?;
        let vc = left_cosets(group, a)?;
        let mut ends = Vec::new();
        let mut orbits = Vec::new();
        for (t, b) in edges {
            let ti = table
                .index_of(t)
                .ok_or_else(|| Error::NotAMember(t.to_string()))?;
            let conj = |x: &Permutation| t.inverse().compose(x).compose(t);
            if let Some(x) = b.generators().iter().find(|x| !a.contains(x) || !a.contains(&conj(x))) {
                return Err(Error::InvalidAction(format!("{x} does not fix both ends of edge orbit {t}")));
            }
            let ec = left_cosets(group, b)?;
            for &g in &ec.representatives {
                ends.push((vc.coset_of[g] as u32, vc.coset_of[table.mul(g, ti)] as u32));
            }
            orbits.push(ec);
        }
        let graph = Multigraph::from_edge_list(vc.len() as u32, &ends)?;
        let mut gen_vertex = Vec::new();
        let mut gen_edge = Vec::new();
        for h in group.generators() {
            let h = table.index_of(h).unwrap();
            gen_vertex.push(
                vc.representatives
                    .iter()
                    .map(|&r| vc.coset_of[table.mul(h, r)] as u32)
                    .collect(),
            );
            let mut emap = Vec::new();
            let mut offset = 0;
            for ec in &orbits {
                emap.extend(
                    ec.representatives
                        .iter()
                        .map(|&r| (offset + ec.coset_of[table.mul(h, r)]) as u32),
                );
                offset += ec.len();
            }
            gen_edge.push(emap);
        }
        Self::from_index_maps(group.clone(), graph, gen_vertex, gen_edge)
    }

    /// Same as [`GraphAction::new`] with maps given on vertex and edge indices.
    pub(crate) fn from_index_maps(
        group: PermutationGroup,
        graph: Multigraph,
        gen_vertex: Vec<Vec<u32>>,
        gen_edge: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let (nv, ne) = (graph.vertex_count(), graph.edge_count());
        for (i, (vm, em)) in gen_vertex.iter().zip(&gen_edge).enumerate() {
            if vm.len() != nv || em.len() != ne || invert(vm).is_none() || invert(em).is_none() {
                return Err(Error::InvalidAction(format!("generator {i} does not act bijectively")));
            }
            for ei in 0..ne {
                let (e, [a, b]) = graph.edge_at(ei);
                let (_, [c, d]) = graph.edge_at(em[ei] as usize);
                let ga = graph.vertex_at(vm[graph.vertex_index(a).unwrap()] as usize);
                let gb = graph.vertex_at(vm[graph.vertex_index(b).unwrap()] as usize);
                if !((ga == c && gb == d) || (ga == d && gb == c)) {
                    return Err(Error::InvalidAction(format!(
                        "generator {i} moves edge {e} but not compatibly with its endpoints"
                    )));
                }
            }
        }

        let table = group.elements()?;
        let n = table.len();
        let gens: Vec<usize> = group
            .generators()
            .iter()
            .map(|g| table.index_of(g).unwrap())
            .collect();
        let mut vertex = vec![u32::MAX; n * nv];
        let mut edge = vec![u32::MAX; n * ne];
        let mut known = vec![false; n];
        let id = table.identity();
        for v in 0..nv {
            vertex[id * nv + v] = v as u32;
        }
        for e in 0..ne {
            edge[id * ne + e] = e as u32;
        }
        known[id] = true;
        let mut queue = std::collections::VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for (k, &g) in gens.iter().enumerate() {
                let y = table.mul(g, x);
                let vy: Vec<u32> = (0..nv)
                    .map(|v| gen_vertex[k][vertex[x * nv + v] as usize])
                    .collect();
                let ey: Vec<u32> = (0..ne)
                    .map(|e| gen_edge[k][edge[x * ne + e] as usize])
                    .collect();
                if known[y] {
                    if vertex[y * nv..(y + 1) * nv] != vy[..] || edge[y * ne..(y + 1) * ne] != ey[..] {
                        return Err(Error::InvalidAction(format!(
                            "generator images do not respect the group law at {}",
                            table.element(y)
                        )));
                    }
                } else {
                    vertex[y * nv..(y + 1) * nv].copy_from_slice(&vy);
                    edge[y * ne..(y + 1) * ne].copy_from_slice(&ey);
                    known[y] = true;
                    queue.push_back(y);
                }
            }
        }
        Ok(GraphAction {
            group,
            graph,
            gen_vertex,
            gen_edge,
            vertex,
            edge,
        })
    }

    pub fn group(&self) -> &PermutationGroup {
        &self.group
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn table(&self) -> &ElementTable {
        self.group.elements().expect("element table built at construction")
    }

    /// Image of the vertex at index `v` under the element at table index `g`.
    pub fn vertex_index_image(&self, g: usize, v: usize) -> usize {
        self.vertex[g * self.graph.vertex_count() + v] as usize
    }

    pub fn edge_index_image(&self, g: usize, e: usize) -> usize {
        self.edge[g * self.graph.edge_count() + e] as usize
    }

    fn element_index(&self, g: &Permutation) -> Result<usize> {
        self.table()
            .index_of(g)
            .ok_or_else(|| Error::NotAMember(g.to_string()))
    }

    pub fn act_vertex(&self, g: &Permutation, v: VertexId) -> Result<VertexId> {
        let gi = self.element_index(g)?;
        let vi = self
            .graph
            .vertex_index(v)
            .ok_or_else(|| Error::InvalidGraph(format!("no vertex {v}")))?;
        Ok(self.graph.vertex_at(self.vertex_index_image(gi, vi)))
    }

    pub fn act_edge(&self, g: &Permutation, e: EdgeId) -> Result<EdgeId> {
        let gi = self.element_index(g)?;
        let ei = self
            .graph
            .edge_index(e)
            .ok_or_else(|| Error::InvalidGraph(format!("no edge {e}")))?;
        Ok(self.graph.edge_at(self.edge_index_image(gi, ei)).0)
    }

    /// Image of a dart under the element at table index `g`.
    pub fn act_dart_index(&self, g: usize, d: Dart) -> Dart {
        let ei = self.graph.edge_index(d.edge).expect("dart on graph edge");
        let (_, ends) = self.graph.edge_at(ei);
        let base = self.graph.vertex_index(ends[d.end as usize]).unwrap();
        let gb = self.graph.vertex_at(self.vertex_index_image(g, base));
        let (ge, gends) = self.graph.edge_at(self.edge_index_image(g, ei));
        Dart::new(ge, if gends[0] == gb { 0 } else { 1 })
    }

    pub fn act_dart(&self, g: &Permutation, d: Dart) -> Result<Dart> {
        let gi = self.element_index(g)?;
        if !self.graph.has_edge(d.edge) {
            return Err(Error::InvalidGraph(format!("no edge {}", d.edge)));
        }
        Ok(self.act_dart_index(gi, d))
    }

    /// Table indices of the elements fixing the edge at index `ei`.
    pub fn edge_stabilizer(&self, ei: usize) -> Vec<usize> {
        (0..self.table().len())
            .filter(|&g| self.edge_index_image(g, ei) == ei)
            .collect()
    }

    pub fn vertex_stabilizer(&self, vi: usize) -> Vec<usize> {
        (0..self.table().len())
            .filter(|&g| self.vertex_index_image(g, vi) == vi)
            .collect()
    }

    /// Faithfulness per component: every non-identity element that maps a
    /// component to itself must move some vertex or edge of it.
    pub fn faithfulness(&self) -> FaithfulnessReport {
        let table = self.table();
        for comp in self.graph.connected_components() {
            let vis: Vec<usize> = comp.iter().map(|&v| self.graph.vertex_index(v).unwrap()).collect();
            let members: BTreeSet<usize> = vis.iter().copied().collect();
            let eis: Vec<usize> = (0..self.graph.edge_count())
                .filter(|&ei| {
                    let a = self.graph.edge_at(ei).1[0];
                    members.contains(&self.graph.vertex_index(a).unwrap())
                })
                .collect();
            for g in 0..table.len() {
                if g == table.identity() {
                    continue;
                }
                // components are mapped to components, so testing one vertex suffices
                if !members.contains(&self.vertex_index_image(g, vis[0])) {
                    continue;
                }
                let trivial = vis.iter().all(|&v| self.vertex_index_image(g, v) == v)
                    && eis.iter().all(|&e| self.edge_index_image(g, e) == e);
                if trivial {
                    return FaithfulnessReport {
                        faithful: false,
                        witness: Some((comp[0], table.element(g).clone())),
                    };
                }
            }
        }
        FaithfulnessReport {
            faithful: true,
            witness: None,
        }
    }

    pub fn is_faithful(&self) -> bool {
        self.faithfulness().faithful
    }

    fn require_faithful(&self) -> Result<()> {
        match self.faithfulness().witness {
            None => Ok(()),
            Some((v, g)) => Err(Error::NotFaithful(format!(
                "{g} acts trivially on the component of vertex {v}"
            ))),
        }
    }

    /// Quotient by a subgroup: orbits become vertices and edges (each named by
    /// its smallest member id), edge orbits with merged endpoints are dropped.
    pub fn quotient(&self, subgroup: &Subgroup) -> Result<QuotientResult> {
        self.require_faithful()?;
        if subgroup.parent().generators() != self.group.generators() {
            for g in subgroup.generators() {
                self.group.check_member(g)?;
            }
        }
        let table = self.table();
        let members: Vec<usize> = subgroup
            .generators()
            .iter()
            .map(|g| table.index_of(g).ok_or_else(|| Error::NotAMember(g.to_string())))
            .collect::<Result<Vec<_>>>()
            .map(|gens| table.closure(&gens))?;
        Ok(self.quotient_by_indices(&members))
    }

    pub fn full_quotient(&self) -> Result<QuotientResult> {
        self.quotient(&Subgroup::whole(&self.group))
    }

    pub(crate) fn quotient_by_indices(&self, members: &[usize]) -> QuotientResult {
        let g = &self.graph;
        let vertex_orbit: Vec<VertexId> = (0..g.vertex_count())
            .map(|v| {
                members
                    .iter()
                    .map(|&h| g.vertex_at(self.vertex_index_image(h, v)))
                    .min()
                    .unwrap()
            })
            .collect();
        let edge_orbit: Vec<EdgeId> = (0..g.edge_count())
            .map(|e| {
                members
                    .iter()
                    .map(|&h| g.edge_at(self.edge_index_image(h, e)).0)
                    .min()
                    .unwrap()
            })
            .collect();
        let vmap: BTreeMap<VertexId, VertexId> = (0..g.vertex_count())
            .map(|v| (g.vertex_at(v), vertex_orbit[v]))
            .collect();
        let mut emap = BTreeMap::new();
        let mut qedges: BTreeMap<EdgeId, [VertexId; 2]> = BTreeMap::new();
        let mut loops: BTreeMap<EdgeId, LoopOrbit> = BTreeMap::new();
        for ei in 0..g.edge_count() {
            let (e, [a, b]) = g.edge_at(ei);
            let (qa, qb) = (vmap[&a], vmap[&b]);
            let orbit = edge_orbit[ei];
            if qa == qb {
                emap.insert(e, EdgeImage::Vertex(qa));
                loops
                    .entry(orbit)
                    .or_insert_with(|| LoopOrbit {
                        edges: Vec::new(),
                        vertex: qa,
                    })
                    .edges
                    .push(e);
            } else {
                emap.insert(e, EdgeImage::Edge(orbit));
                if orbit == e {
                    qedges.insert(orbit, [qa.min(qb), qa.max(qb)]);
                }
            }
        }
        let qvertices: BTreeSet<VertexId> = vertex_orbit.iter().copied().collect();
        let quotient = Multigraph::new(qvertices, qedges).expect("quotient is loopless by construction");
        let projection = GraphMorphism::new(g.clone(), quotient.clone(), vmap, emap)
            .expect("orbit map is a morphism");
        QuotientResult {
            quotient,
            projection,
            removed_loops: loops.into_values().collect(),
        }
    }

    /// Dart criterion: harmonic iff no non-identity element fixes a dart.
    pub fn is_harmonic_action(&self) -> HarmonicActionReport {
        let table = self.table();
        for ei in 0..self.graph.edge_count() {
            let (e, [a, _]) = self.graph.edge_at(ei);
            let ai = self.graph.vertex_index(a).unwrap();
            for g in self.edge_stabilizer(ei) {
                if g != table.identity() && self.vertex_index_image(g, ai) == ai {
                    return HarmonicActionReport {
                        harmonic: false,
                        witness: Some(DartWitness {
                            dart: Dart::new(e, 0),
                            element: table.element(g).clone(),
                        }),
                    };
                }
            }
        }
        HarmonicActionReport {
            harmonic: true,
            witness: None,
        }
    }

    /// Harmonicity by definition: every subgroup's quotient morphism is
    /// harmonic. Enumerates all subgroups, so only for small groups.
    pub fn harmonic_by_subgroups(&self) -> Result<bool> {
        self.require_faithful()?;
        use rayon::prelude::*;
        let subgroups = all_subgroups(&self.group)?;
        let results: Vec<bool> = subgroups
            .par_iter()
            .map(|members| {
                let q = self.quotient_by_indices(members);
                q.projection.local_harmonicity().harmonic
            })
            .collect();
        Ok(results.into_iter().all(|h| h))
    }

    /// Edges whose stabilizer has order two (an involution swapping the ends).
    pub fn flipped_edges(&self) -> BTreeSet<EdgeId> {
        (0..self.graph.edge_count())
            .filter(|&ei| {
                let stab = self.edge_stabilizer(ei);
                let a = self.graph.vertex_index(self.graph.edge_at(ei).1[0]).unwrap();
                stab.len() == 2 && stab.iter().any(|&g| self.vertex_index_image(g, a) != a)
            })
            .map(|ei| self.graph.edge_at(ei).0)
            .collect()
    }

    /// Elements that fix `e` and swap its endpoints.
    pub fn flipping_involutions(&self, e: EdgeId) -> Result<Vec<Permutation>> {
        let ei = self
            .graph
            .edge_index(e)
            .ok_or_else(|| Error::InvalidGraph(format!("no edge {e}")))?;
        let a = self.graph.vertex_index(self.graph.edge_at(ei).1[0]).unwrap();
        let table = self.table();
        Ok(self
            .edge_stabilizer(ei)
            .into_iter()
            .filter(|&g| self.vertex_index_image(g, a) != a)
            .map(|g| table.element(g).clone())
            .collect())
    }

    fn require_harmonic(&self) -> Result<()> {
        match self.is_harmonic_action().witness {
            None => Ok(()),
            Some(w) => Err(Error::NotHarmonic(format!(
                "{} fixes dart ({}, {})",
                w.element, w.dart.edge, w.dart.end
            ))),
        }
    }

    /// Replaces each flipped edge by two parallel edges, one per dart, which
    /// its flipping involution interchanges. The copy for end 0 keeps the id;
    /// the copies for end 1 get fresh ids above the current maximum, in
    /// order of the flipped edges.
    pub fn unflip(&self) -> Result<GraphAction> {
        self.require_harmonic()?;
        let flipped = self.flipped_edges();
        if flipped.is_empty() {
            return Ok(self.clone());
        }
        let g = &self.graph;
        let next = g.max_edge_id().map_or(0, |e| e.0 + 1);
        let fresh: BTreeMap<EdgeId, EdgeId> = flipped
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, EdgeId(next + i as u32)))
            .collect();
        let copy_id = |d: Dart| -> EdgeId {
            if d.end == 1 {
                fresh[&d.edge]
            } else {
                d.edge
            }
        };
        let mut edges: Vec<(EdgeId, [VertexId; 2])> = g.edges().collect();
        for (&e, &f) in &fresh {
            edges.push((f, g.endpoints(e).unwrap()));
        }
        let graph = Multigraph::new(g.vertices().iter().copied(), edges)?;
        let table = self.table();
        let mut gen_edge = Vec::new();
        for gen in self.group.generators() {
            let gi = table.index_of(gen).unwrap();
            let mut emap = vec![0u32; graph.edge_count()];
            for ei in 0..graph.edge_count() {
                let (e, _) = graph.edge_at(ei);
                let (orig, end) = match fresh.iter().find(|(_, &f)| f == e) {
                    Some((&o, _)) => (o, 1u8),
                    None => (e, 0u8),
                };
                let image = if flipped.contains(&orig) {
                    copy_id(self.act_dart_index(gi, Dart::new(orig, end)))
                } else {
                    g.edge_at(self.edge_index_image(gi, g.edge_index(orig).unwrap())).0
                };
                emap[ei] = graph.edge_index(image).unwrap() as u32;
            }
            gen_edge.push(emap);
        }
        GraphAction::from_index_maps(self.group.clone(), graph, self.gen_vertex.clone(), gen_edge)
    }

    /// Collapses every orbit of flippable parallel pairs into flipped edges.
    pub fn flip_all(&self) -> Result<GraphAction> {
        self.flip_all_except(&BTreeSet::new())
    }

    /// Like [`GraphAction::flip_all`], leaving untouched every orbit that
    /// contains an edge of `skip`.
    ///
    /// Within an orbit, take its smallest edge `e` and, among involutions
    /// swapping the ends of `e`, the one `t` sending `e` to the smallest id;
    /// then `g·e` is paired with `g·t·e` and the pair keeps the smaller id.
    pub fn flip_all_except(&self, skip: &BTreeSet<EdgeId>) -> Result<GraphAction> {
        self.require_harmonic()?;
        if let Some(e) = self.flipped_edges().into_iter().next() {
            return Err(Error::InvalidAction(format!("edge {e} is already flipped")));
        }
        let g = &self.graph;
        let table = self.table();
        let n = table.len();
        let ne = g.edge_count();
        // partner[ei] = index of the edge it is paired with
        let mut partner: Vec<Option<usize>> = vec![None; ne];
        let mut seen = vec![false; ne];
        for ei in 0..ne {
            if seen[ei] {
                continue;
            }
            let orbit: Vec<(usize, usize)> = {
                let mut by_edge = BTreeMap::new();
                for x in 0..n {
                    by_edge.entry(self.edge_index_image(x, ei)).or_insert(x);
                }
                by_edge.into_iter().collect()
            };
            for &(f, _) in &orbit {
                seen[f] = true;
            }
            if orbit.iter().any(|&(f, _)| skip.contains(&g.edge_at(f).0)) {
                continue;
            }
            // ei is the smallest index in its orbit, hence the smallest id
            let a = g.vertex_index(g.edge_at(ei).1[0]).unwrap();
            let b = g.vertex_index(g.edge_at(ei).1[1]).unwrap();
            let best = (0..n)
                .filter(|&t| table.mul(t, t) == table.identity())
                .filter(|&t| self.vertex_index_image(t, a) == b && self.vertex_index_image(t, b) == a)
                .map(|t| (self.edge_index_image(t, ei), t))
                .min();
            let Some((_, t)) = best else {
                continue;
            };
            // with trivial edge stabilizers, the element carrying ei to f is unique
            for &(f, x) in &orbit {
                let p = self.edge_index_image(table.mul(x, t), ei);
                partner[f] = Some(p);
            }
        }
        if partner.iter().all(Option::is_none) {
            return Ok(self.clone());
        }
        let keep = |ei: usize| -> usize { partner[ei].map_or(ei, |p| p.min(ei)) };
        let kept: Vec<usize> = (0..ne).filter(|&ei| keep(ei) == ei).collect();
        let graph = Multigraph::new(g.vertices().iter().copied(), kept.iter().map(|&ei| g.edge_at(ei)))?;
        let mut gen_edge = Vec::new();
        for gen in self.group.generators() {
            let gi = table.index_of(gen).unwrap();
            let emap: Vec<u32> = kept
                .iter()
                .map(|&ei| {
                    let image = keep(self.edge_index_image(gi, ei));
                    graph.edge_index(g.edge_at(image).0).unwrap() as u32
                })
                .collect();
            gen_edge.push(emap);
        }
        GraphAction::from_index_maps(self.group.clone(), graph, self.gen_vertex.clone(), gen_edge)
    }

    pub fn to_json(&self) -> ActionJson {
        let gj = self.graph.to_json();
        let g = &self.graph;
        let vertex_images = self
            .gen_vertex
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let moved = m
                    .iter()
                    .enumerate()
                    .filter(|(v, &w)| *v != w as usize)
                    .map(|(v, &w)| (g.vertex_at(v), g.vertex_at(w as usize)))
                    .collect();
                (i, moved)
            })
            .collect();
        let edge_images = self
            .gen_edge
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let moved = m
                    .iter()
                    .enumerate()
                    .filter(|(e, &f)| *e != f as usize)
                    .map(|(e, &f)| (g.edge_at(e).0, g.edge_at(f as usize).0))
                    .collect();
                (i, moved)
            })
            .collect();
        ActionJson {
            vertices: gj.vertices,
            edges: gj.edges,
            group: GroupRef::Inline(InlineGroup::from_group(&self.group)),
            vertex_images,
            edge_images,
        }
    }
}

impl std::fmt::Debug for GraphAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphAction")
            .field("group", &self.group.name())
            .field("graph", &self.graph)
            .finish()
    }
}

/// Graph JSON plus the group and the generator images. Unlisted vertices
/// and edges are fixed by that generator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionJson {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeJson>,
    pub group: GroupRef,
    #[serde(default)]
    pub vertex_images: BTreeMap<usize, BTreeMap<VertexId, VertexId>>,
    #[serde(default)]
    pub edge_images: BTreeMap<usize, BTreeMap<EdgeId, EdgeId>>,
}

impl ActionJson {
    pub fn build(&self, catalog: &Catalog) -> Result<GraphAction> {
        let group = self.group.resolve(catalog)?;
        let graph = GraphJson {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
        }
        .build()?;
        let k = group.generators().len();
        if let Some(&i) = self.vertex_images.keys().chain(self.edge_images.keys()).find(|&&i| i >= k) {
            return Err(Error::InvalidAction(format!("generator index {i} out of range (group has {k})")));
        }
        let vmaps: Vec<_> = (0..k)
            .map(|i| self.vertex_images.get(&i).cloned().unwrap_or_default())
            .collect();
        let emaps: Vec<_> = (0..k)
            .map(|i| self.edge_images.get(&i).cloned().unwrap_or_default())
            .collect();
        GraphAction::new(group, graph, &vmaps, &emaps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::is_isomorphic;
    use crate::permgroup::families::{cyclic, symmetric};

    fn theta() -> Multigraph {
        Multigraph::from_edge_list(2, &[(0, 1), (0, 1), (0, 1)]).unwrap()
    }

    fn vmap(pairs: &[(u32, u32)]) -> BTreeMap<VertexId, VertexId> {
        pairs.iter().map(|&(a, b)| (VertexId(a), VertexId(b))).collect()
    }

    fn emap(pairs: &[(u32, u32)]) -> BTreeMap<EdgeId, EdgeId> {
        pairs.iter().map(|&(a, b)| (EdgeId(a), EdgeId(b))).collect()
    }

    /// Z/2 swapping e0, e1 and fixing e2 and both vertices.
    fn fig2() -> GraphAction {
        GraphAction::new(cyclic(2).unwrap(), theta(), &[vmap(&[])], &[emap(&[(0, 1), (1, 0)])]).unwrap()
    }

    /// Z/6: generator swaps the vertices and cycles the edges.
    fn z6_theta() -> GraphAction {
        GraphAction::new(
            cyclic(6).unwrap(),
            theta(),
            &[vmap(&[(0, 1), (1, 0)])],
            &[emap(&[(0, 1), (1, 2), (2, 0)])],
        )
        .unwrap()
    }

    /// S3 = <(0 1), (0 1 2)>: τ flips e0 and swaps e1, e2; σ cycles edges.
    fn s3_theta() -> GraphAction {
        GraphAction::new(
            symmetric(3).unwrap(),
            theta(),
            &[vmap(&[(0, 1), (1, 0)]), vmap(&[])],
            &[emap(&[(1, 2), (2, 1)]), emap(&[(0, 1), (1, 2), (2, 0)])],
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_homomorphism() {
        // a generator of Z/3 cannot swap two vertices
        let g = Multigraph::from_edge_list(2, &[(0, 1)]).unwrap();
        let r = GraphAction::new(cyclic(3).unwrap(), g, &[vmap(&[(0, 1), (1, 0)])], &[emap(&[])]);
        assert!(matches!(r, Err(Error::InvalidAction(_))));
    }

    #[test]
    fn rejects_endpoint_mismatch() {
        let g = Multigraph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
        let r = GraphAction::new(cyclic(2).unwrap(), g, &[vmap(&[])], &[emap(&[(0, 1), (1, 0)])]);
        assert!(r.is_err());
    }

    #[test]
    fn figure2_not_harmonic() {
        let a = fig2();
        assert!(a.is_faithful());
        let rep = a.is_harmonic_action();
        assert!(!rep.harmonic);
        assert_eq!(rep.witness.unwrap().dart.edge, EdgeId(2));
        let q = a.full_quotient().unwrap();
        assert_eq!(q.quotient.vertex_count(), 2);
        assert_eq!(q.quotient.edge_count(), 2);
        assert!(!q.projection.is_harmonic().unwrap().harmonic);
        assert!(!a.harmonic_by_subgroups().unwrap());
    }

    #[test]
    fn coset_graphs() {
        let g = symmetric(3).unwrap();
        let tau = Permutation::from_images(vec![1, 0, 2]).unwrap();
        let sigma = Permutation::from_images(vec![1, 2, 0]).unwrap();
        let a = Subgroup::new(&g, vec![sigma.clone()]).unwrap();
        let free = GraphAction::coset_graph(&g, &a, &[(tau.clone(), Subgroup::trivial(&g))]).unwrap();
        assert_eq!((free.graph().vertex_count(), free.graph().edge_count()), (2, 6));
        assert!(free.is_harmonic_action().harmonic);
        let fixed = GraphAction::coset_graph(&g, &a, &[(tau.clone(), a.clone())]).unwrap();
        assert_eq!(fixed.graph().edge_count(), 2);
        assert!(!fixed.is_harmonic_action().harmonic);
        let b = Subgroup::new(&g, vec![tau.clone()]).unwrap();
        assert!(GraphAction::coset_graph(&g, &a, &[(tau, b)]).is_err());
    }

    #[test]
    fn pointwise_fixed_edge_is_not_flipped() {
        assert!(fig2().flipped_edges().is_empty());
    }

    #[test]
    fn z6_theta_harmonic() {
        let a = z6_theta();
        assert!(a.is_harmonic_action().harmonic);
        assert!(a.harmonic_by_subgroups().unwrap());
        // g^3 swaps the vertices and fixes each edge
        assert_eq!(a.flipped_edges().len(), 3);
        let q = a.full_quotient().unwrap();
        assert_eq!(q.quotient, Multigraph::point());
    }

    #[test]
    fn s3_theta_flips() {
        let a = s3_theta();
        assert!(a.is_harmonic_action().harmonic);
        assert!(a.harmonic_by_subgroups().unwrap());
        let tau = Permutation::from_images(vec![1, 0, 2]).unwrap();
        assert_eq!(a.flipping_involutions(EdgeId(0)).unwrap(), vec![tau]);
        assert_eq!(a.flipped_edges().len(), 3);
        let q = a.full_quotient().unwrap();
        assert_eq!(q.quotient, Multigraph::point());
        assert_eq!(q.removed_loops.len(), 1);
    }

    #[test]
    fn unflip_and_flip_back() {
        let a = s3_theta();
        let u = a.unflip().unwrap();
        assert_eq!(u.graph().vertex_count(), 2);
        assert_eq!(u.graph().edge_count(), 6);
        assert!(u.is_harmonic_action().harmonic);
        assert!(u.flipped_edges().is_empty());
        assert_eq!(u.graph().genus().unwrap(), a.graph().genus().unwrap() + 3);
        let f = u.flip_all().unwrap();
        assert!(is_isomorphic(f.graph(), a.graph()));
        assert_eq!(f.flipped_edges().len(), 3);
        // skipping the only orbit leaves the action unchanged
        let skipped = u.flip_all_except(&[EdgeId(0)].into()).unwrap();
        assert_eq!(skipped.graph(), u.graph());
    }

    #[test]
    fn trivial_subgroup_quotient_is_identity() {
        let a = s3_theta();
        let q = a.quotient(&Subgroup::trivial(a.group())).unwrap();
        assert_eq!(&q.quotient, a.graph());
        assert!(q.removed_loops.is_empty());
    }

    #[test]
    fn free_action_has_no_flips() {
        // Z/6 rotating a hexagon
        let hex = Multigraph::from_edge_list(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let a = GraphAction::new(
            cyclic(6).unwrap(),
            hex,
            &[vmap(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])],
            &[emap(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])],
        )
        .unwrap();
        assert!(a.flipped_edges().is_empty());
        assert_eq!(a.flip_all().unwrap().graph(), a.graph());
        assert_eq!(a.unflip().unwrap().graph(), a.graph());
    }

    #[test]
    fn json_round_trip() {
        let a = s3_theta();
        let text = serde_json::to_string(&a.to_json()).unwrap();
        let back: ActionJson = serde_json::from_str(&text).unwrap();
        let b = back.build(&Catalog::shipped().unwrap()).unwrap();
        assert_eq!(b.graph(), a.graph());
        assert_eq!(b.flipped_edges(), a.flipped_edges());
    }
}
