//! Maximal graphs from (2,3)-generating pairs and the classification of
//! maximal graph groups by genus.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{build_cover, BranchCase, HarmonicCover, SymmetricMultiset};
use crate::harmonic::GraphAction;
use crate::multigraph::{is_isomorphic, Dart, EdgeId, Multigraph, VertexId};
use crate::permgroup::catalog::Catalog;
use crate::permgroup::families::{alternating, symmetric};
use crate::permgroup::search::{search_23_pairs, GeneratingPair, PairSearchOptions};
use crate::permgroup::{left_cosets, Cosets, Permutation, PermutationGroup, Subgroup};

/// Largest genus classified without an explicit completeness assertion.
pub const DEFAULT_GENUS_CAP: u64 = 12;

/// The flipped cover of the point graph with inertia ⟨σ⟩ and multiset {τ}:
/// vertices are the cosets g⟨σ⟩, edges the cosets g⟨τ⟩, and edge g⟨τ⟩
/// joins g⟨σ⟩ to gτ⟨σ⟩.
#[derive(Clone, Debug)]
pub struct MaximalCover {
    tau: Permutation,
    sigma: Permutation,
    cover: HarmonicCover,
    sigma_cosets: Cosets,
    tau_cosets: Cosets,
}

pub fn build_maximal(group: &PermutationGroup, tau: &Permutation, sigma: &Permutation) -> Result<MaximalCover> {
    group.check_member(tau)?;
    group.check_member(sigma)?;
    if tau.order() != 2 {
        return Err(Error::InvalidGroup(format!("tau = {tau} has order {}, not 2", tau.order())));
    }
    if sigma.order() != 3 {
        return Err(Error::InvalidGroup(format!("sigma = {sigma} has order {}, not 3", sigma.order())));
    }
    let order = group.order();
    if order < 6 {
        return Err(Error::InvalidGroup(format!("|G| = {order} < 6")));
    }
    if !group.generates(&[tau.clone(), sigma.clone()])? {
        return Err(Error::InvalidGroup(format!("{tau} and {sigma} do not generate {}", group.name())));
    }
    let table = group.elements()?;
    let i_sigma = Subgroup::new(group, vec![sigma.clone()])?;
    let i_tau = Subgroup::new(group, vec![tau.clone()])?;
    let sc = left_cosets(group, &i_sigma)?;
    let tc = left_cosets(group, &i_tau)?;
    let t = table.index_of(tau).unwrap();
    let graph = Multigraph::new(
        (0..sc.len() as u32).map(VertexId),
        tc.representatives.iter().enumerate().map(|(c, &g)| {
            let a = sc.coset_of[g];
            let b = sc.coset_of[table.mul(g, t)];
            (EdgeId(c as u32), [VertexId(a as u32), VertexId(b as u32)])
        }),
    )?;
    let mut gen_vertex = Vec::new();
    let mut gen_edge = Vec::new();
    for h in group.generators() {
        let h = table.index_of(h).unwrap();
        gen_vertex.push(
            sc.representatives
                .iter()
                .map(|&r| sc.coset_of[table.mul(h, r)] as u32)
                .collect(),
        );
        gen_edge.push(
            tc.representatives
                .iter()
                .map(|&r| tc.coset_of[table.mul(h, r)] as u32)
                .collect(),
        );
    }
    let total = GraphAction::from_index_maps(group.clone(), graph, gen_vertex, gen_edge)?;
    let point = VertexId(0);
    let vertex_base = total.graph().vertices().iter().map(|&v| (v, point)).collect();
    let cover = HarmonicCover::assemble(
        Multigraph::point(),
        BTreeMap::from([(point, i_sigma)]),
        BTreeMap::from([(point, SymmetricMultiset::new(group, [(tau.clone(), 1)])?)]),
        total,
        &vertex_base,
        true,
        Vec::new(),
    )?;
    let mc = MaximalCover {
        tau: tau.clone(),
        sigma: sigma.clone(),
        cover,
        sigma_cosets: sc,
        tau_cosets: tc,
    };
    mc.verify()?;
    Ok(mc)
}

impl MaximalCover {
    fn verify(&self) -> Result<()> {
        let g = self.graph();
        let order = self.group().order() as i64;
        let genus = g.genus()?;
        if order != 6 * (genus - 1) {
            return Err(Error::Invariant(format!("|G| = {order} but genus is {genus}")));
        }
        if g.vertex_count() as i64 * 3 != order || g.edge_count() as i64 * 2 != order {
            return Err(Error::Invariant("vertex or edge count differs from |G|/3, |G|/2".into()));
        }
        if let Some(v) = g.vertices().iter().find(|&&v| g.degree(v) != 3) {
            return Err(Error::Invariant(format!("vertex {v} does not have degree 3")));
        }
        if self.cover.total().flipped_edges().len() != g.edge_count() {
            return Err(Error::Invariant("not every edge is flipped".into()));
        }
        let locus = self.cover.classify_branch_locus()?;
        if locus.case != BranchCase::I || !locus.maximal {
            return Err(Error::Invariant(format!("branch locus is {:?}, maximal = {}", locus.case, locus.maximal)));
        }
        Ok(())
    }

    pub fn group(&self) -> &PermutationGroup {
        self.cover.group()
    }

    pub fn tau(&self) -> &Permutation {
        &self.tau
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn cover(&self) -> &HarmonicCover {
        &self.cover
    }

    pub fn graph(&self) -> &Multigraph {
        self.cover.graph()
    }

    pub fn action(&self) -> &GraphAction {
        self.cover.total()
    }

    pub fn genus(&self) -> i64 {
        self.graph().genus().expect("maximal graphs are connected")
    }

    /// Least element of each vertex coset g⟨σ⟩, indexed by vertex id.
    pub fn vertex_labels(&self) -> Vec<Permutation> {
        let table = self.group().elements().unwrap();
        self.sigma_cosets.representatives.iter().map(|&r| table.element(r).clone()).collect()
    }

    /// Least element of each edge coset g⟨τ⟩, indexed by edge id.
    pub fn edge_labels(&self) -> Vec<Permutation> {
        let table = self.group().elements().unwrap();
        self.tau_cosets.representatives.iter().map(|&r| table.element(r).clone()).collect()
    }

    /// The dart labeled `h`: the end of edge h⟨τ⟩ at vertex h⟨σ⟩. Every
    /// element labels exactly one dart.
    pub fn dart_of(&self, h: &Permutation) -> Result<Dart> {
        let table = self.group().elements()?;
        let hi = table.index_of(h).ok_or_else(|| Error::NotAMember(h.to_string()))?;
        Ok(self.dart_of_index(hi))
    }

    pub(crate) fn dart_of_index(&self, h: usize) -> Dart {
        let e = EdgeId(self.tau_cosets.coset_of[h] as u32);
        let v = VertexId(self.sigma_cosets.coset_of[h] as u32);
        let ends = self.graph().endpoints(e).unwrap();
        Dart::new(e, if ends[0] == v { 0 } else { 1 })
    }

    /// Element index labeling a dart.
    pub(crate) fn label_index_of(&self, d: Dart) -> usize {
        let table = self.group().elements().unwrap();
        let base = self.graph().dart_base(d).unwrap();
        let g = self.tau_cosets.representatives[d.edge.0 as usize];
        let gt = table.mul(g, table.index_of(&self.tau).unwrap());
        if self.sigma_cosets.coset_of[g] == base.0 as usize {
            g
        } else {
            gt
        }
    }

    pub fn label_of(&self, d: Dart) -> Permutation {
        self.group().elements().unwrap().element(self.label_index_of(d)).clone()
    }

    /// A (2,3)-pair read back from the cover: the inertia generator at the
    /// vertex ⟨σ⟩ and the involution flipping the edge ⟨τ⟩.
    pub fn recovered_pair(&self) -> Result<(Permutation, Permutation)> {
        let inertia = self.cover.inertia_group(VertexId(0))?;
        let sigma = inertia
            .member_indices()?
            .into_iter()
            .map(|i| self.group().elements().unwrap().element(i).clone())
            .find(|p| p.order() == 3)
            .ok_or_else(|| Error::Invariant("inertia at the base vertex has no element of order 3".into()))?;
        let tau = self
            .action()
            .flipping_involutions(EdgeId(0))?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Invariant("edge 0 is not flipped".into()))?;
        if !self.group().generates(&[tau.clone(), sigma.clone()])? {
            return Err(Error::Invariant("recovered pair does not generate the group".into()));
        }
        Ok((tau, sigma))
    }

    pub fn summary(&self) -> MaximalSummary {
        MaximalSummary {
            group: self.group().name().to_string(),
            order: self.group().order(),
            tau: self.tau.clone(),
            sigma: self.sigma.clone(),
            product_order: self.tau.compose(&self.sigma).order(),
            vertices: self.graph().vertex_count(),
            edges: self.graph().edge_count(),
            genus: self.genus(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximalSummary {
    pub group: String,
    pub order: u64,
    pub tau: Permutation,
    pub sigma: Permutation,
    pub product_order: u64,
    pub vertices: usize,
    pub edges: usize,
    pub genus: i64,
}

/// The cover built the general way, with multiset {ρ, ρ⁻¹} for some
/// ρ ∈ τ⟨σ⟩ in place of {τ}.
pub fn build_rho_variant(
    group: &PermutationGroup,
    tau: &Permutation,
    sigma: &Permutation,
    rho: &Permutation,
) -> Result<HarmonicCover> {
    let in_coset = (0..3).any(|j| tau.compose(&sigma.pow(j)) == *rho);
    if !in_coset {
        return Err(Error::InvalidGroup(format!("{rho} is not in the coset tau<sigma>")));
    }
    let point = VertexId(0);
    build_cover(
        group,
        &Multigraph::point(),
        &BTreeMap::from([(point, Subgroup::new(group, vec![sigma.clone()])?)]),
        &BTreeMap::from([(point, SymmetricMultiset::symmetrized(group, std::slice::from_ref(rho))?)]),
        true,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoComparison {
    pub rho: Permutation,
    pub vertices: usize,
    pub edges: usize,
    pub isomorphic: bool,
}

/// Builds every ρ-variant and compares it with the direct construction.
pub fn compare_rho_variants(mc: &MaximalCover) -> Result<Vec<RhoComparison>> {
    (0..3)
        .map(|j| {
            let rho = mc.tau.compose(&mc.sigma.pow(j));
            let c = build_rho_variant(mc.group(), &mc.tau, &mc.sigma, &rho)?;
            Ok(RhoComparison {
                vertices: c.graph().vertex_count(),
                edges: c.graph().edge_count(),
                isomorphic: is_isomorphic(c.graph(), mc.graph()),
                rho,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Default)]
pub struct ClassifyOptions {
    /// Accept sections whose completeness cannot be checked, and genera
    /// above [`DEFAULT_GENUS_CAP`].
    pub assume_complete: bool,
    /// Report every generating pair rather than one witness per group.
    pub all_pairs: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub group: String,
    pub pairs: Vec<GeneratingPair>,
    pub total_pairs: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationRow {
    pub genus: u64,
    pub order: u64,
    pub maximal_groups: Vec<String>,
    pub witnesses: Vec<Witness>,
    /// Groups of this order with no (2,3)-generating pair.
    pub excluded: Vec<String>,
}

pub fn classify_genus(genus: u64, catalog: &Catalog, opts: &ClassifyOptions) -> Result<ClassificationRow> {
    if genus < 2 {
        return Err(Error::Unsupported(format!("genus {genus} < 2")));
    }
    if genus > DEFAULT_GENUS_CAP && !opts.assume_complete {
        return Err(Error::Unsupported(format!(
            "genus {genus} is above {DEFAULT_GENUS_CAP}; supply a complete catalog and assert completeness"
        )));
    }
    let order = 6 * (genus - 1);
    let section = catalog
        .section(order)
        .ok_or_else(|| Error::Catalog(format!("catalog has no groups of order {order}")))?;
    if !section.complete && !opts.assume_complete {
        return Err(Error::Catalog(format!("catalog section for order {order} is not known to be complete")));
    }
    let results: Vec<(String, Result<_>)> = section
        .groups
        .par_iter()
        .map(|g| (g.name().to_string(), search_23_pairs(g, &PairSearchOptions::default())))
        .collect();
    let mut row = ClassificationRow {
        genus,
        order,
        maximal_groups: Vec::new(),
        witnesses: Vec::new(),
        excluded: Vec::new(),
    };
    for (name, r) in results {
        let r = r?;
        if r.is_empty() {
            row.excluded.push(name);
        } else {
            let pairs = if opts.all_pairs { r.pairs } else { r.pairs.into_iter().take(1).collect() };
            row.maximal_groups.push(name.clone());
            row.witnesses.push(Witness {
                group: name,
                pairs,
                total_pairs: r.total_count,
            });
        }
    }
    Ok(row)
}

pub fn classify_range(from: u64, to: u64, catalog: &Catalog, opts: &ClassifyOptions) -> Result<Vec<ClassificationRow>> {
    (from..=to).map(|g| classify_genus(g, catalog, opts)).collect()
}

/// Rows as an aligned text table.
pub fn format_table(rows: &[ClassificationRow]) -> String {
    let cells: Vec<[String; 3]> = rows
        .iter()
        .map(|r| {
            let groups = if r.maximal_groups.is_empty() {
                "none".to_string()
            } else {
                r.maximal_groups.join(", ")
            };
            [r.genus.to_string(), r.order.to_string(), groups]
        })
        .collect();
    let header = ["genus".to_string(), "|G|".to_string(), "maximal graph groups".to_string()];
    let w0 = cells.iter().map(|c| c[0].len()).chain([header[0].len()]).max().unwrap();
    let w1 = cells.iter().map(|c| c[1].len()).chain([header[1].len()]).max().unwrap();
    let mut out = String::new();
    for c in std::iter::once(&header).chain(cells.iter()) {
        out.push_str(&format!("{:>w0$}  {:>w1$}  {}\n", c[0], c[1], c[2]));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MillerFamily {
    Alternating,
    Symmetric,
}

/// Whether A_n or S_n is generated by an element of order 2 and one of
/// order 3, by exhaustive search.
pub fn miller_check(family: MillerFamily, n: usize) -> Result<bool> {
    if !(3..=8).contains(&n) {
        return Err(Error::Unsupported(format!("n = {n} outside 3..=8")));
    }
    let group = match family {
        MillerFamily::Alternating => alternating(n)?,
        MillerFamily::Symmetric => symmetric(n)?,
    };
    Ok(!search_23_pairs(&group, &PairSearchOptions::default())?.is_empty())
}

/// True when no group of order 66 is a maximal graph group.
pub fn genus12_check(catalog: &Catalog) -> Result<bool> {
    Ok(classify_genus(12, catalog, &ClassifyOptions::default())?
        .maximal_groups
        .is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::families::{cyclic, psl2};

    fn s3_pair() -> (PermutationGroup, Permutation, Permutation) {
        (
            symmetric(3).unwrap(),
            Permutation::from_images(vec![1, 0, 2]).unwrap(),
            Permutation::from_images(vec![1, 2, 0]).unwrap(),
        )
    }

    #[test]
    fn s3_theta() {
        let (g, t, s) = s3_pair();
        let mc = build_maximal(&g, &t, &s).unwrap();
        assert_eq!((mc.graph().vertex_count(), mc.graph().edge_count(), mc.genus()), (2, 3, 2));
        let (rt, rs) = mc.recovered_pair().unwrap();
        assert_eq!((rt.order(), rs.order()), (2, 3));
    }

    #[test]
    fn z6_theta() {
        let g = cyclic(6).unwrap();
        let x = g.generators()[0].clone();
        let mc = build_maximal(&g, &x.pow(3), &x.pow(2)).unwrap();
        assert_eq!(mc.genus(), 2);
    }

    #[test]
    fn psl27_counts() {
        let g = psl2(7).unwrap();
        let p = &search_23_pairs(&g, &PairSearchOptions { product_order: Some(7), ..Default::default() })
            .unwrap()
            .pairs[0];
        let mc = build_maximal(&g, &p.tau, &p.sigma).unwrap();
        assert_eq!((mc.graph().vertex_count(), mc.graph().edge_count(), mc.genus()), (56, 84, 29));
    }

    #[test]
    fn rejects_bad_pairs() {
        let (g, t, s) = s3_pair();
        assert!(build_maximal(&g, &s, &t).is_err());
        assert!(build_maximal(&g, &t, &t).is_err());
        let z6 = cyclic(6).unwrap();
        let x = z6.generators()[0].clone();
        assert!(build_maximal(&z6, &x.pow(3), &x.pow(3)).is_err());
    }

    #[test]
    fn darts_are_labeled_bijectively() {
        let g = alternating(4).unwrap();
        let p = &search_23_pairs(&g, &Default::default()).unwrap().pairs[0];
        let mc = build_maximal(&g, &p.tau, &p.sigma).unwrap();
        let table = g.elements().unwrap();
        let darts: std::collections::BTreeSet<Dart> = (0..table.len()).map(|h| mc.dart_of_index(h)).collect();
        assert_eq!(darts.len(), table.len());
        for h in 0..table.len() {
            assert_eq!(mc.label_index_of(mc.dart_of_index(h)), h);
        }
    }

    #[test]
    fn rho_variants_isomorphic_on_small_groups() {
        let (g, t, s) = s3_pair();
        let mc = build_maximal(&g, &t, &s).unwrap();
        for c in compare_rho_variants(&mc).unwrap() {
            assert!(c.isomorphic, "rho = {}", c.rho);
        }
    }

    #[test]
    fn miller_small() {
        assert!(miller_check(MillerFamily::Symmetric, 3).unwrap());
        assert!(!miller_check(MillerFamily::Alternating, 3).unwrap());
        assert!(miller_check(MillerFamily::Alternating, 4).unwrap());
        assert!(miller_check(MillerFamily::Alternating, 9).is_err());
    }

    #[test]
    fn classify_small_genera() {
        let cat = Catalog::shipped().unwrap();
        let opts = ClassifyOptions::default();
        assert_eq!(classify_genus(2, &cat, &opts).unwrap().maximal_groups, vec!["Z/6", "S3"]);
        assert_eq!(classify_genus(3, &cat, &opts).unwrap().maximal_groups, vec!["A4"]);
        assert!(classify_genus(6, &cat, &opts).unwrap().maximal_groups.is_empty());
        assert!(classify_genus(7, &cat, &opts).is_err());
        assert!(classify_genus(13, &cat, &opts).is_err());
    }
}
