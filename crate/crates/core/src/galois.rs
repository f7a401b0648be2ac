//! Harmonic G-covers of trees built from Cayley fibers and inertia
//! collapse, with their ramification data.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::harmonic::GraphAction;
use crate::multigraph::{EdgeId, EdgeImage, GraphJson, GraphMorphism, Multigraph, VertexId};
use crate::permgroup::catalog::{Catalog, GroupRef, InlineGroup};
use crate::permgroup::{left_cosets, Cosets, ElementTable, Permutation, PermutationGroup, Subgroup};

pub type Rational = Ratio<i64>;

pub(crate) fn serialize_ratio<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// A finite multiset of non-identity elements, closed under inversion with
/// matching multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymmetricMultiset {
    entries: BTreeMap<Permutation, u32>,
}

impl SymmetricMultiset {
    pub fn new(
        group: &PermutationGroup,
        entries: impl IntoIterator<Item = (Permutation, u32)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Permutation, u32> = BTreeMap::new();
        for (p, k) in entries {
            group.check_member(&p)?;
            if p.is_identity() {
                return Err(Error::InvalidMultiset("contains the identity".into()));
            }
            if k > 0 {
                *map.entry(p).or_insert(0) += k;
            }
        }
        for (p, &k) in &map {
            let inv = p.inverse();
            let ki = map.get(&inv).copied().unwrap_or(0);
            if ki != k {
                return Err(Error::InvalidMultiset(format!(
                    "{p} has multiplicity {k} but its inverse {inv} has {ki}"
                )));
            }
        }
        Ok(SymmetricMultiset { entries: map })
    }

    /// Each given element together with its inverse, multiplicity one each.
    pub fn symmetrized(group: &PermutationGroup, elements: &[Permutation]) -> Result<Self> {
        let mut list = Vec::new();
        for p in elements {
            list.push((p.clone(), 1));
            if p.order() != 2 {
                list.push((p.inverse(), 1));
            }
        }
        Self::new(group, list)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Size counted with multiplicity.
    pub fn len(&self) -> usize {
        self.entries.values().map(|&k| k as usize).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Permutation, u32)> {
        self.entries.iter().map(|(p, &k)| (p, k))
    }

    pub fn elements(&self) -> impl Iterator<Item = &Permutation> {
        self.entries.keys()
    }

    /// Splits off the entries lying in `subgroup`.
    pub fn without(&self, subgroup: &Subgroup) -> (SymmetricMultiset, Vec<Permutation>) {
        let mut kept = BTreeMap::new();
        let mut dropped = Vec::new();
        for (p, &k) in &self.entries {
            if subgroup.contains(p) {
                dropped.push(p.clone());
            } else {
                kept.insert(p.clone(), k);
            }
        }
        (SymmetricMultiset { entries: kept }, dropped)
    }

    /// One slot per Cayley edge emitted by each vertex: every involution
    /// `k` times, and for each pair {ρ, ρ⁻¹} the lesser of the two `k` times.
    fn slots(&self) -> Vec<Permutation> {
        let mut out = Vec::new();
        for (p, &k) in &self.entries {
            let inv = p.inverse();
            if inv == *p || *p < inv {
                out.extend(std::iter::repeat_n(p.clone(), k as usize));
            }
        }
        out
    }

    pub fn to_json(&self) -> Vec<(Permutation, u32)> {
        self.entries.iter().map(|(p, &k)| (p.clone(), k)).collect()
    }
}

/// Fiber data before ids are assigned: vertex `c` is the `c`-th left coset
/// of the inertia group, and Cayley edge `g * slots + s` runs from `g` to
/// `g·ρ_s`.
struct Fiber {
    cosets: Cosets,
    slot_elems: Vec<usize>,
    /// Surviving Cayley edges as (cayley number, coset, coset).
    edges: Vec<(usize, usize, usize)>,
}

impl Fiber {
    fn build(group: &PermutationGroup, inertia: &Subgroup, s: &SymmetricMultiset) -> Result<Fiber> {
        let table = group.elements()?;
        let cosets = left_cosets(group, inertia)?;
        let slot_elems: Vec<usize> = s.slots().iter().map(|p| table.index_of(p).unwrap()).collect();
        let ns = slot_elems.len();
        let mut edges = Vec::new();
        for g in 0..table.len() {
            for (slot, &rho) in slot_elems.iter().enumerate() {
                let (a, b) = (cosets.coset_of[g], cosets.coset_of[table.mul(g, rho)]);
                if a != b {
                    edges.push((g * ns + slot, a, b));
                }
            }
        }
        Ok(Fiber {
            cosets,
            slot_elems,
            edges,
        })
    }

    fn slots(&self) -> usize {
        self.slot_elems.len()
    }

    /// Image of Cayley edge number `id` under left multiplication by `h`.
    fn act_cayley(&self, table: &ElementTable, h: usize, id: usize) -> usize {
        let ns = self.slots();
        table.mul(h, id / ns) * ns + id % ns
    }
}

/// The Cayley graph: a vertex per element (id = position in the sorted
/// element list) and `k` edges from `g` to `g·ρ` per slot, acted on by
/// left multiplication.
pub fn cayley(group: &PermutationGroup, s: &SymmetricMultiset) -> Result<GraphAction> {
    let fiber = Fiber::build(group, &Subgroup::trivial(group), s)?;
    let table = group.elements()?;
    let n = table.len();
    let graph = Multigraph::new(
        (0..n as u32).map(VertexId),
        fiber
            .edges
            .iter()
            .map(|&(id, a, b)| (EdgeId(id as u32), [VertexId(a as u32), VertexId(b as u32)])),
    )?;
    let gens = generator_indices(group)?;
    let gen_vertex = gens
        .iter()
        .map(|&h| (0..n).map(|g| table.mul(h, g) as u32).collect())
        .collect();
    // every Cayley edge survives, so edge index = cayley number
    let gen_edge = gens
        .iter()
        .map(|&h| {
            fiber
                .edges
                .iter()
                .map(|&(id, _, _)| fiber.act_cayley(table, h, id) as u32)
                .collect()
        })
        .collect();
    GraphAction::from_index_maps(group.clone(), graph, gen_vertex, gen_edge)
}

fn generator_indices(group: &PermutationGroup) -> Result<Vec<usize>> {
    let table = group.elements()?;
    Ok(group
        .generators()
        .iter()
        .map(|g| table.index_of(g).unwrap())
        .collect())
}

#[derive(Clone, Debug)]
pub struct CollapseResult {
    /// Vertex `c` is the `c`-th left coset (cosets ordered by their least
    /// element); surviving edges keep their ids.
    pub action: GraphAction,
    pub representatives: Vec<Permutation>,
    pub removed: Vec<EdgeId>,
}

/// Collapses a graph whose vertices are labeled by the group elements and
/// acted on by left multiplication onto the left cosets of `inertia`,
/// removing the edges that become loops.
pub fn collapse(action: &GraphAction, inertia: &Subgroup) -> Result<CollapseResult> {
    let group = action.group();
    let table = group.elements()?;
    let n = table.len();
    let graph = action.graph();
    let labeled = graph.vertex_count() == n && graph.vertices().iter().enumerate().all(|(i, v)| v.0 as usize == i);
    if !labeled {
        return Err(Error::InvalidAction("vertices must be labeled by the group elements".into()));
    }
    for h in 0..n {
        for g in 0..n {
            if action.vertex_index_image(h, g) != table.mul(h, g) {
                return Err(Error::InvalidAction("action on vertices is not left multiplication".into()));
            }
        }
    }
    let cosets = left_cosets(group, inertia)?;
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for (e, [a, b]) in graph.edges() {
        let (ca, cb) = (cosets.coset_of[a.0 as usize], cosets.coset_of[b.0 as usize]);
        if ca == cb {
            removed.push(e);
        } else {
            kept.push((e, [VertexId(ca as u32), VertexId(cb as u32)]));
        }
    }
    let collapsed = Multigraph::new((0..cosets.len() as u32).map(VertexId), kept)?;
    let gens = generator_indices(group)?;
    let gen_vertex = gens
        .iter()
        .map(|&h| {
            cosets
                .representatives
                .iter()
                .map(|&r| cosets.coset_of[table.mul(h, r)] as u32)
                .collect()
        })
        .collect();
    let gen_edge = gens
        .iter()
        .map(|&h| {
            collapsed
                .edge_ids()
                .map(|e| {
                    let src = graph.edge_index(e).unwrap();
                    let img = graph.edge_at(action.edge_index_image(h, src)).0;
                    collapsed.edge_index(img).expect("loops map to loops") as u32
                })
                .collect()
        })
        .collect();
    let representatives = cosets.representatives.iter().map(|&r| table.element(r).clone()).collect();
    Ok(CollapseResult {
        action: GraphAction::from_index_maps(group.clone(), collapsed, gen_vertex, gen_edge)?,
        representatives,
        removed,
    })
}

/// A harmonic G-cover of a tree, verified at construction.
#[derive(Clone, Debug)]
pub struct HarmonicCover {
    base: Multigraph,
    group: PermutationGroup,
    inertia: BTreeMap<VertexId, Subgroup>,
    multisets: BTreeMap<VertexId, SymmetricMultiset>,
    total: GraphAction,
    projection: GraphMorphism,
    fiber_index: BTreeMap<VertexId, Vec<VertexId>>,
    flipped: bool,
    connected: bool,
    diagnostics: Vec<String>,
}

/// Glues the fibers `G/I_x` (carrying the collapsed Cayley edges of `S_x`)
/// along the tree: one edge per group element `g` and tree edge {x, x′},
/// joining `gI_x` and `gI_{x′}`.
pub fn build_cover(
    group: &PermutationGroup,
    base: &Multigraph,
    inertia: &BTreeMap<VertexId, Subgroup>,
    multisets: &BTreeMap<VertexId, SymmetricMultiset>,
    flipped: bool,
) -> Result<HarmonicCover> {
    if !base.is_tree() {
        return Err(Error::InvalidCover("base graph must be a tree".into()));
    }
    for x in inertia.keys().chain(multisets.keys()) {
        if !base.has_vertex(*x) {
            return Err(Error::InvalidCover(format!("base has no vertex {x}")));
        }
    }
    let table = group.elements()?;
    let n = table.len();
    let mut diagnostics = Vec::new();
    let mut used_inertia = BTreeMap::new();
    let mut used_multisets = BTreeMap::new();
    for &x in base.vertices() {
        let i = inertia.get(&x).cloned().unwrap_or_else(|| Subgroup::trivial(group));
        if i.parent().generators() != group.generators() {
            for g in i.generators() {
                group.check_member(g)?;
            }
        }
        let s = multisets.get(&x).cloned().unwrap_or_default();
        let (s, dropped) = s.without(&i);
        for p in dropped {
            let msg = format!("dropped {p} from the multiset at vertex {x}: it lies in the inertia group");
            log::warn!("{msg}");
            diagnostics.push(msg);
        }
        used_inertia.insert(x, i);
        used_multisets.insert(x, s);
    }

    let fibers: Vec<Fiber> = base
        .vertices()
        .iter()
        .map(|x| Fiber::build(group, &used_inertia[x], &used_multisets[x]))
        .collect::<Result<_>>()?;

    let mut vertex_offset = Vec::new();
    let mut vertex_base = Vec::new();
    for (xi, f) in fibers.iter().enumerate() {
        vertex_offset.push(vertex_base.len());
        vertex_base.extend(std::iter::repeat_n(base.vertex_at(xi), f.cosets.len()));
    }
    let mut edges: Vec<(EdgeId, [VertexId; 2])> = Vec::new();
    // cayley number -> edge index, per fiber
    let mut vertical_index: Vec<HashMap<usize, usize>> = Vec::new();
    for (xi, f) in fibers.iter().enumerate() {
        let mut idx = HashMap::new();
        for &(id, a, b) in &f.edges {
            idx.insert(id, edges.len());
            let ends = [
                VertexId((vertex_offset[xi] + a) as u32),
                VertexId((vertex_offset[xi] + b) as u32),
            ];
            edges.push((EdgeId(edges.len() as u32), ends));
        }
        vertical_index.push(idx);
    }
    let horizontal_offset = edges.len();
    for (_, [x, y]) in base.edges() {
        let (xi, yi) = (base.vertex_index(x).unwrap(), base.vertex_index(y).unwrap());
        for g in 0..n {
            let a = vertex_offset[xi] + fibers[xi].cosets.coset_of[g];
            let b = vertex_offset[yi] + fibers[yi].cosets.coset_of[g];
            edges.push((EdgeId(edges.len() as u32), [VertexId(a as u32), VertexId(b as u32)]));
        }
    }
    let total_graph = Multigraph::new((0..vertex_base.len() as u32).map(VertexId), edges)?;

    let mut gen_vertex = Vec::new();
    let mut gen_edge = Vec::new();
    for h in generator_indices(group)? {
        let mut vm = Vec::with_capacity(total_graph.vertex_count());
        for (xi, f) in fibers.iter().enumerate() {
            for &r in &f.cosets.representatives {
                vm.push((vertex_offset[xi] + f.cosets.coset_of[table.mul(h, r)]) as u32);
            }
        }
        let mut em = Vec::with_capacity(total_graph.edge_count());
        for (xi, f) in fibers.iter().enumerate() {
            for &(id, _, _) in &f.edges {
                em.push(vertical_index[xi][&f.act_cayley(table, h, id)] as u32);
            }
        }
        for b in 0..base.edge_count() {
            for g in 0..n {
                em.push((horizontal_offset + b * n + table.mul(h, g)) as u32);
            }
        }
        gen_vertex.push(vm);
        gen_edge.push(em);
    }
    let mut total = GraphAction::from_index_maps(group.clone(), total_graph, gen_vertex, gen_edge)?;
    if flipped {
        total = total.flip_all()?;
    }
    let vertex_base: BTreeMap<VertexId, VertexId> = vertex_base
        .into_iter()
        .enumerate()
        .map(|(i, x)| (VertexId(i as u32), x))
        .collect();
    HarmonicCover::assemble(
        base.clone(),
        used_inertia,
        used_multisets,
        total,
        &vertex_base,
        flipped,
        diagnostics,
    )
}

impl HarmonicCover {
    /// Wraps a total action and its vertex projection onto a tree as a
    /// cover, checking harmonicity, edge fibers of size |G|, that the
    /// quotient by G is the base, and that connectivity matches generation.
    pub fn assemble(
        base: Multigraph,
        inertia: BTreeMap<VertexId, Subgroup>,
        multisets: BTreeMap<VertexId, SymmetricMultiset>,
        total: GraphAction,
        vertex_base: &BTreeMap<VertexId, VertexId>,
        flipped: bool,
        diagnostics: Vec<String>,
    ) -> Result<HarmonicCover> {
        if !base.is_tree() {
            return Err(Error::InvalidCover("base graph must be a tree".into()));
        }
        let group = total.group().clone();
        let order = group.order() as usize;
        let y = total.graph();
        let mut base_edge: HashMap<(VertexId, VertexId), EdgeId> = HashMap::new();
        for (e, [a, b]) in base.edges() {
            base_edge.insert((a, b), e);
            base_edge.insert((b, a), e);
        }
        let mut edge_map = BTreeMap::new();
        for (e, [a, b]) in y.edges() {
            let (xa, xb) = (vertex_base[&a], vertex_base[&b]);
            let img = if xa == xb {
                EdgeImage::Vertex(xa)
            } else {
                EdgeImage::Edge(*base_edge.get(&(xa, xb)).ok_or_else(|| {
                    Error::InvalidCover(format!("edge {e} joins fibers over non-adjacent {xa}, {xb}"))
                })?)
            };
            edge_map.insert(e, img);
        }
        let projection = GraphMorphism::new(y.clone(), base.clone(), vertex_base.clone(), edge_map)?;

        if let Some(w) = total.is_harmonic_action().witness {
            return Err(Error::Invariant(format!(
                "cover action is not harmonic: {} fixes dart ({}, {})",
                w.element, w.dart.edge, w.dart.end
            )));
        }
        let mut counts: BTreeMap<EdgeId, usize> = base.edge_ids().map(|e| (e, 0)).collect();
        for img in projection.edge_map().values() {
            if let EdgeImage::Edge(b) = img {
                *counts.get_mut(b).unwrap() += 1;
            }
        }
        if let Some((e, c)) = counts.iter().find(|(_, &c)| c != order) {
            return Err(Error::Invariant(format!("base edge {e} has {c} preimages, expected {order}")));
        }
        if let Some(w) = projection.is_harmonic()?.witness {
            return Err(Error::Invariant(format!(
                "projection is not harmonic at vertex {}",
                w.vertex
            )));
        }
        let all: Vec<usize> = (0..total.table().len()).collect();
        let q = total.quotient_by_indices(&all);
        let induced = GraphMorphism::induced(&q.projection, &projection)?;
        let vertex_images: BTreeSet<VertexId> = induced.vertex_map().values().copied().collect();
        let edge_images: BTreeSet<EdgeImage> = induced.edge_map().values().copied().collect();
        if q.quotient.vertex_count() != base.vertex_count()
            || vertex_images.len() != base.vertex_count()
            || q.quotient.edge_count() != base.edge_count()
            || edge_images.len() != base.edge_count()
        {
            return Err(Error::Invariant("quotient by the group is not the base tree".into()));
        }

        let mut fiber_index: BTreeMap<VertexId, Vec<VertexId>> =
            base.vertices().iter().map(|&x| (x, Vec::new())).collect();
        for (&v, &x) in vertex_base {
            fiber_index.get_mut(&x).unwrap().push(v);
        }
        let connected = y.is_connected();
        let mut gens: Vec<Permutation> = Vec::new();
        for i in inertia.values() {
            gens.extend(i.generators().iter().cloned());
        }
        for s in multisets.values() {
            gens.extend(s.elements().cloned());
        }
        let generated = group.generates(&gens)?;
        if connected != generated {
            return Err(Error::Invariant(format!(
                "total graph connected = {connected} but inertia and multisets generate G = {generated}"
            )));
        }
        Ok(HarmonicCover {
            base,
            group,
            inertia,
            multisets,
            total,
            projection,
            fiber_index,
            flipped,
            connected,
            diagnostics,
        })
    }

    pub fn base(&self) -> &Multigraph {
        &self.base
    }

    pub fn group(&self) -> &PermutationGroup {
        &self.group
    }

    pub fn total(&self) -> &GraphAction {
        &self.total
    }

    pub fn graph(&self) -> &Multigraph {
        self.total.graph()
    }

    pub fn projection(&self) -> &GraphMorphism {
        &self.projection
    }

    pub fn inertia(&self) -> &BTreeMap<VertexId, Subgroup> {
        &self.inertia
    }

    pub fn multisets(&self) -> &BTreeMap<VertexId, SymmetricMultiset> {
        &self.multisets
    }

    pub fn fiber(&self, x: VertexId) -> &[VertexId] {
        self.fiber_index.get(&x).map_or(&[], Vec::as_slice)
    }

    pub fn fiber_index(&self) -> &BTreeMap<VertexId, Vec<VertexId>> {
        &self.fiber_index
    }

    pub fn is_flipped(&self) -> bool {
        self.flipped
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    /// Edges lying over a vertex of the base.
    pub fn vertical_edges(&self) -> Vec<EdgeId> {
        self.projection.vertical_edges()
    }

    /// Degree in the sense of preimage counts: the point-graph convention
    /// gives `|V|`, otherwise the common edge-fiber size.
    pub fn morphism_degree(&self) -> Result<usize> {
        self.projection.degree()
    }

    fn vertex_index(&self, y: VertexId) -> Result<usize> {
        self.graph()
            .vertex_index(y)
            .ok_or_else(|| Error::InvalidGraph(format!("no vertex {y}")))
    }

    /// Stabilizer of a cover vertex.
    pub fn inertia_group(&self, y: VertexId) -> Result<Subgroup> {
        let yi = self.vertex_index(y)?;
        Subgroup::from_indices(&self.group, &self.total.vertex_stabilizer(yi))
    }

    /// Vertices of the fiber component containing `y` (vertical edges only).
    pub fn fiber_component(&self, y: VertexId) -> Result<Vec<VertexId>> {
        self.vertex_index(y)?;
        let x = self.projection.map_vertex(y);
        Ok(self
            .fiber_components(x)
            .into_iter()
            .find(|c| c.contains(&y))
            .unwrap())
    }

    fn fiber_components(&self, x: VertexId) -> Vec<Vec<VertexId>> {
        let vertical: Vec<(EdgeId, [VertexId; 2])> = self
            .graph()
            .edges()
            .filter(|(e, _)| self.projection.map_edge(*e) == EdgeImage::Vertex(x))
            .collect();
        Multigraph::new(self.fiber(x).iter().copied(), vertical)
            .expect("fiber subgraph")
            .connected_components()
    }

    /// Setwise stabilizer of the fiber component containing `y`.
    pub fn decomposition_group(&self, y: VertexId) -> Result<Subgroup> {
        let yi = self.vertex_index(y)?;
        let comp: BTreeSet<VertexId> = self.fiber_component(y)?.into_iter().collect();
        let g = self.graph();
        let members: Vec<usize> = (0..self.total.table().len())
            .filter(|&h| comp.contains(&g.vertex_at(self.total.vertex_index_image(h, yi))))
            .collect();
        Subgroup::from_indices(&self.group, &members)
    }

    /// Local invariants at every base vertex, checked to be independent of
    /// the fiber vertex and to satisfy `m·f·n = |G|` and `m | v`.
    pub fn ramification_profile(&self) -> Result<RamificationProfile> {
        let order = self.group.order();
        let g = self.graph();
        let mut vertices = BTreeMap::new();
        for &x in self.base.vertices() {
            let comps = self.fiber_components(x);
            let n = comps.len() as u64;
            let mut local: Option<LocalProfile> = None;
            for comp in &comps {
                for &y in comp {
                    let yi = g.vertex_index(y).unwrap();
                    let m = self.total.vertex_stabilizer(yi).len() as u64;
                    let v = g
                        .star(y)
                        .unwrap()
                        .incident_edges
                        .iter()
                        .filter(|e| self.projection.map_edge(**e) == EdgeImage::Vertex(x))
                        .count() as u64;
                    if !v.is_multiple_of(m) {
                        return Err(Error::Invariant(format!(
                            "vertical degree {v} at {y} is not a multiple of m = {m}"
                        )));
                    }
                    let here = LocalProfile {
                        m,
                        f: comp.len() as u64,
                        n,
                        v,
                        w: v / m,
                    };
                    match &local {
                        None => local = Some(here),
                        Some(prev) if *prev != here => {
                            return Err(Error::Invariant(format!(
                                "profile over {x} depends on the fiber vertex: {prev:?} vs {here:?} at {y}"
                            )))
                        }
                        _ => {}
                    }
                }
            }
            let local = local.ok_or_else(|| Error::Invariant(format!("empty fiber over {x}")))?;
            if local.m * local.f * local.n != order {
                return Err(Error::Invariant(format!(
                    "m·f·n = {}·{}·{} differs from |G| = {order} over {x}",
                    local.m, local.f, local.n
                )));
            }
            vertices.insert(x, local);
        }
        Ok(RamificationProfile {
            group_order: order,
            vertices,
        })
    }

    /// Checks `2g(Y) − 2 = |G|(2g(X) − 2 + R)`, or with `−R` when `strict`.
    pub fn riemann_hurwitz(&self, strict: bool) -> Result<RiemannHurwitz> {
        let genus_total = self.graph().genus()?;
        let genus_base = self.base.genus()?;
        let r = self.ramification_profile()?.ramification_number();
        let order = self.group.order() as i64;
        let signed = if strict { -r } else { r };
        let rhs = Rational::from_integer(order) * (Rational::from_integer(2 * genus_base - 2) + signed);
        let lhs = 2 * genus_total - 2;
        Ok(RiemannHurwitz {
            r,
            lhs,
            rhs,
            holds: rhs == Rational::from_integer(lhs),
            strict,
            genus_total,
            genus_base,
            group_order: order as u64,
        })
    }

    pub fn classify_branch_locus(&self) -> Result<BranchLocus> {
        let profile = self.ramification_profile()?;
        let r = profile.ramification_number();
        let points: Vec<BranchPoint> = profile
            .vertices
            .iter()
            .filter(|(_, p)| p.m > 1 || p.v > 0)
            .map(|(&x, p)| BranchPoint { vertex: x, m: p.m, w: p.w })
            .collect();
        let mut shape: Vec<(u64, u64)> = points.iter().map(|p| (p.m, p.w)).collect();
        shape.sort();
        let case = match shape.as_slice() {
            [(3, 1)] => BranchCase::I,
            [(2, 0), (3, 0)] => BranchCase::II,
            [(1, 1), (3, 0)] => BranchCase::III,
            _ => BranchCase::Other,
        };
        let tree = self.base.is_tree();
        let maximal = tree && self.connected && r == Rational::new(7, 3);
        let order_identity = if self.connected {
            let genus = self.graph().genus()?;
            let by_order = self.group.order() as i64 == 6 * (genus - 1);
            if by_order != maximal {
                return Err(Error::Invariant(format!(
                    "R = {r} gives maximal = {maximal} but |G| = 6(g-1) is {by_order}"
                )));
            }
            Some(by_order)
        } else {
            None
        };
        Ok(BranchLocus {
            points,
            case,
            r,
            maximal,
            order_identity,
        })
    }

    /// The spec this cover is built from, with the total graph attached.
    pub fn to_spec(&self) -> CoverSpec {
        CoverSpec {
            group: GroupRef::Inline(InlineGroup::from_group(&self.group)),
            base: BaseSpec {
                tree: self.base.to_json(),
            },
            inertia: self
                .inertia
                .iter()
                .filter(|(_, i)| !i.generators().is_empty())
                .map(|(&x, i)| (x, i.generators().to_vec()))
                .collect(),
            multisets: self
                .multisets
                .iter()
                .filter(|(_, s)| !s.is_empty())
                .map(|(&x, s)| (x, s.to_json()))
                .collect(),
            flipped: self.flipped,
            total: Some(self.graph().to_json()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LocalProfile {
    pub m: u64,
    pub f: u64,
    pub n: u64,
    pub v: u64,
    pub w: u64,
}

impl LocalProfile {
    pub fn contribution(&self) -> Rational {
        Rational::from_integer(2) * (Rational::from_integer(1) - Rational::new(1, self.m as i64))
            + Rational::from_integer(self.w as i64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamificationProfile {
    pub group_order: u64,
    pub vertices: BTreeMap<VertexId, LocalProfile>,
}

impl RamificationProfile {
    /// `R = Σ_x [2(1 − 1/m_x) + w_x]`.
    pub fn ramification_number(&self) -> Rational {
        self.vertices.values().map(LocalProfile::contribution).sum()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RiemannHurwitz {
    #[serde(rename = "R", serialize_with = "serialize_ratio")]
    pub r: Rational,
    pub lhs: i64,
    #[serde(serialize_with = "serialize_ratio")]
    pub rhs: Rational,
    pub holds: bool,
    pub strict: bool,
    pub genus_total: i64,
    pub genus_base: i64,
    pub group_order: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BranchCase {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
    #[serde(rename = "other")]
    Other,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchPoint {
    pub vertex: VertexId,
    pub m: u64,
    pub w: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchLocus {
    pub points: Vec<BranchPoint>,
    pub case: BranchCase,
    #[serde(rename = "R", serialize_with = "serialize_ratio")]
    pub r: Rational,
    pub maximal: bool,
    /// Whether `|G| = 6(g(Y) − 1)`; absent for disconnected covers.
    pub order_identity: Option<bool>,
}

/// `{x: {"m","f","n","v","w"}, "R": "p/q", "maximal": bool, "case": ..}`
pub fn profile_json(cover: &HarmonicCover) -> Result<serde_json::Value> {
    let profile = cover.ramification_profile()?;
    let locus = cover.classify_branch_locus()?;
    let mut map = serde_json::Map::new();
    for (x, p) in &profile.vertices {
        map.insert(x.to_string(), serde_json::to_value(p)?);
    }
    map.insert("R".into(), profile.ramification_number().to_string().into());
    map.insert("maximal".into(), locus.maximal.into());
    map.insert("case".into(), serde_json::to_value(locus.case)?);
    Ok(serde_json::Value::Object(map))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaseSpec {
    pub tree: GraphJson,
}

/// Cover spec JSON. A built cover serializes to the same shape with
/// `total` filled in, so build output can be fed back in.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverSpec {
    pub group: GroupRef,
    pub base: BaseSpec,
    #[serde(default)]
    pub inertia: BTreeMap<VertexId, Vec<Permutation>>,
    #[serde(default)]
    pub multisets: BTreeMap<VertexId, Vec<(Permutation, u32)>>,
    #[serde(default)]
    pub flipped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<GraphJson>,
}

impl CoverSpec {
    pub fn build(&self, catalog: &Catalog) -> Result<HarmonicCover> {
        let group = self.group.resolve(catalog)?;
        self.build_with(&group)
    }

    pub fn build_with(&self, group: &PermutationGroup) -> Result<HarmonicCover> {
        let base = self.base.tree.build()?;
        let inertia = self
            .inertia
            .iter()
            .map(|(&x, gens)| Ok((x, Subgroup::new(group, gens.clone())?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let multisets = self
            .multisets
            .iter()
            .map(|(&x, entries)| Ok((x, SymmetricMultiset::new(group, entries.iter().cloned())?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let cover = build_cover(group, &base, &inertia, &multisets, self.flipped)?;
        if let Some(expected) = &self.total {
            if expected.build()? != *cover.graph() {
                return Err(Error::InvalidCover(
                    "attached total graph does not match the rebuilt cover".into(),
                ));
            }
        }
        Ok(cover)
    }
}

/// A random cover spec: a random tree on at most `max_base_vertices`
/// vertices, inertia groups generated by up to two random elements, and
/// symmetric multisets of up to two random elements with their inverses.
pub fn random_cover_spec<R: Rng + ?Sized>(
    group: &PermutationGroup,
    rng: &mut R,
    max_base_vertices: usize,
) -> Result<CoverSpec> {
    let table = group.elements()?;
    let n = table.len();
    let nv = rng.gen_range(1..=max_base_vertices.max(1));
    let edges: Vec<(u32, u32)> = (1..nv as u32).map(|i| (rng.gen_range(0..i), i)).collect();
    let tree = Multigraph::from_edge_list(nv as u32, &edges)?;
    let mut inertia = BTreeMap::new();
    let mut multisets = BTreeMap::new();
    for x in 0..nv as u32 {
        let k = rng.gen_range(0..=2);
        let gens: Vec<Permutation> = (0..k)
            .map(|_| table.element(rng.gen_range(0..n)).clone())
            .filter(|p| !p.is_identity())
            .collect();
        if !gens.is_empty() {
            inertia.insert(VertexId(x), gens);
        }
        let mut entries: BTreeMap<Permutation, u32> = BTreeMap::new();
        for _ in 0..rng.gen_range(0..=2) {
            let p = table.element(rng.gen_range(0..n)).clone();
            if p.is_identity() {
                continue;
            }
            let k = rng.gen_range(1..=2);
            let inv = p.inverse();
            *entries.entry(p.clone()).or_insert(0) += k;
            if inv != p {
                *entries.entry(inv).or_insert(0) += k;
            }
        }
        if !entries.is_empty() {
            multisets.insert(VertexId(x), entries.into_iter().collect());
        }
    }
    Ok(CoverSpec {
        group: GroupRef::Inline(InlineGroup::from_group(group)),
        base: BaseSpec { tree: tree.to_json() },
        inertia,
        multisets,
        flipped: rng.gen_bool(0.5),
        total: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::families::{cyclic, symmetric};

    fn s3() -> (PermutationGroup, Permutation, Permutation) {
        let g = symmetric(3).unwrap();
        let tau = Permutation::from_images(vec![1, 0, 2]).unwrap();
        let sigma = Permutation::from_images(vec![1, 2, 0]).unwrap();
        (g, tau, sigma)
    }

    fn segment() -> Multigraph {
        Multigraph::from_edge_list(2, &[(0, 1)]).unwrap()
    }

    #[test]
    fn multiset_validation() {
        let (g, tau, sigma) = s3();
        assert!(SymmetricMultiset::new(&g, [(sigma.clone(), 1)]).is_err());
        assert!(SymmetricMultiset::new(&g, [(g.identity(), 1)]).is_err());
        let s = SymmetricMultiset::new(&g, [(sigma.clone(), 2), (sigma.inverse(), 2), (tau, 1)]).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.slots().len(), 3);
    }

    #[test]
    fn cayley_shapes() {
        let (g, tau, sigma) = s3();
        let c = cayley(&g, &SymmetricMultiset::symmetrized(&g, &[sigma]).unwrap()).unwrap();
        assert_eq!((c.graph().vertex_count(), c.graph().edge_count()), (6, 6));
        let comps = c.graph().connected_components();
        assert_eq!(comps.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 3]);
        let c = cayley(&g, &SymmetricMultiset::symmetrized(&g, &[tau]).unwrap()).unwrap();
        assert_eq!(c.graph().edge_count(), 6);
        assert_eq!(c.graph().connected_components().len(), 3);
        let z6 = cyclic(6).unwrap();
        let g3 = z6.generators()[0].pow(3);
        let c = cayley(&z6, &SymmetricMultiset::symmetrized(&z6, &[g3]).unwrap()).unwrap();
        assert_eq!(c.graph().edge_count(), 6);
        assert_eq!(c.graph().connected_components().len(), 3);
        assert!(c.is_harmonic_action().harmonic);
    }

    #[test]
    fn collapse_examples() {
        let (g, tau, sigma) = s3();
        let i = Subgroup::new(&g, vec![sigma.clone()]).unwrap();
        let c = cayley(&g, &SymmetricMultiset::symmetrized(&g, &[tau]).unwrap()).unwrap();
        let r = collapse(&c, &i).unwrap();
        assert_eq!((r.action.graph().vertex_count(), r.action.graph().edge_count()), (2, 6));
        assert!(r.removed.is_empty());
        let c = cayley(&g, &SymmetricMultiset::symmetrized(&g, &[sigma]).unwrap()).unwrap();
        let r = collapse(&c, &i).unwrap();
        assert_eq!((r.action.graph().vertex_count(), r.action.graph().edge_count()), (2, 0));
        assert_eq!(r.removed.len(), 6);
        let r = collapse(&c, &Subgroup::trivial(&g)).unwrap();
        assert_eq!(r.action.graph(), c.graph());
    }

    fn fig4(flipped: bool) -> HarmonicCover {
        let (g, tau, sigma) = s3();
        let multisets = BTreeMap::from([
            (VertexId(0), SymmetricMultiset::symmetrized(&g, &[sigma]).unwrap()),
            (VertexId(1), SymmetricMultiset::symmetrized(&g, &[tau]).unwrap()),
        ]);
        build_cover(&g, &segment(), &BTreeMap::new(), &multisets, flipped).unwrap()
    }

    fn fig6() -> HarmonicCover {
        let (g, tau, sigma) = s3();
        let inertia = BTreeMap::from([(VertexId(0), Subgroup::new(&g, vec![sigma]).unwrap())]);
        let multisets = BTreeMap::from([(VertexId(1), SymmetricMultiset::symmetrized(&g, &[tau]).unwrap())]);
        build_cover(&g, &segment(), &inertia, &multisets, true).unwrap()
    }

    fn counts(c: &HarmonicCover) -> (usize, usize, i64) {
        let g = c.graph();
        (g.vertex_count(), g.edge_count(), g.genus().unwrap())
    }

    #[test]
    fn figure_covers() {
        assert_eq!(counts(&fig4(false)), (12, 18, 7));
        assert_eq!(counts(&fig4(true)), (12, 15, 4));
        assert_eq!(counts(&fig6()), (8, 9, 2));
        assert_eq!(fig4(true).morphism_degree().unwrap(), 6);
    }

    #[test]
    fn profiles() {
        let p = fig6().ramification_profile().unwrap();
        assert_eq!(p.vertices[&VertexId(0)], LocalProfile { m: 3, f: 1, n: 2, v: 0, w: 0 });
        assert_eq!(p.vertices[&VertexId(1)], LocalProfile { m: 1, f: 2, n: 3, v: 1, w: 1 });
        assert_eq!(p.ramification_number(), Rational::new(7, 3));
        let p4 = fig4(false).ramification_profile().unwrap();
        assert_eq!(p4.vertices[&VertexId(0)], LocalProfile { m: 1, f: 3, n: 2, v: 2, w: 2 });
        assert_eq!(p4.ramification_number(), Rational::from_integer(4));
        assert_eq!(fig4(true).ramification_profile().unwrap().ramification_number(), Rational::from_integer(3));
    }

    #[test]
    fn decomposition_groups() {
        let c = fig6();
        let y0 = c.fiber(VertexId(0))[0];
        assert_eq!(c.decomposition_group(y0).unwrap().order(), 3);
        assert_eq!(c.inertia_group(y0).unwrap().order(), 3);
        let y1 = c.fiber(VertexId(1))[0];
        let d = c.decomposition_group(y1).unwrap();
        assert_eq!(d.order(), 2);
        assert_eq!(d.generators()[0].order(), 2);
    }

    #[test]
    fn riemann_hurwitz_signs() {
        for c in [fig4(false), fig4(true), fig6()] {
            assert!(c.riemann_hurwitz(false).unwrap().holds);
        }
        let strict = fig6().riemann_hurwitz(true).unwrap();
        assert!(!strict.holds);
    }

    #[test]
    fn branch_cases() {
        let l = fig6().classify_branch_locus().unwrap();
        assert_eq!(l.case, BranchCase::III);
        assert!(l.maximal);
        let l = fig4(true).classify_branch_locus().unwrap();
        assert_eq!(l.case, BranchCase::Other);
        assert!(!l.maximal);
    }

    #[test]
    fn intersecting_entries_dropped() {
        let (g, tau, sigma) = s3();
        let inertia = BTreeMap::from([(VertexId(0), Subgroup::new(&g, vec![sigma.clone()]).unwrap())]);
        let multisets = BTreeMap::from([(
            VertexId(0),
            SymmetricMultiset::symmetrized(&g, &[sigma, tau]).unwrap(),
        )]);
        let c = build_cover(&g, &Multigraph::point(), &inertia, &multisets, true).unwrap();
        assert_eq!(c.diagnostics().len(), 2);
        assert_eq!(counts(&c), (2, 3, 2));
        assert_eq!(c.classify_branch_locus().unwrap().case, BranchCase::I);
        // degree over the point graph is |V|, not |G|
        assert_eq!(c.morphism_degree().unwrap(), 2);
    }

    #[test]
    fn disconnected_cover_reported() {
        let (g, _, sigma) = s3();
        let multisets = BTreeMap::from([(VertexId(0), SymmetricMultiset::symmetrized(&g, &[sigma]).unwrap())]);
        let c = build_cover(&g, &segment(), &BTreeMap::new(), &multisets, false).unwrap();
        assert!(!c.is_connected());
        assert!(c.riemann_hurwitz(false).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let c = fig6();
        let spec = c.to_spec();
        let text = serde_json::to_string(&spec).unwrap();
        let back: CoverSpec = serde_json::from_str(&text).unwrap();
        let rebuilt = back.build(&Catalog::shipped().unwrap()).unwrap();
        assert_eq!(rebuilt.graph(), c.graph());
    }
}
