//! Finite permutation groups.
//!
//! A [`PermutationGroup`] is given by generators; its order and membership
//! come from a Schreier–Sims stabilizer chain, and for groups of moderate
//! size the full element list is enumerated by closure and kept sorted
//! lexicographically by image list. That sort order is the fixed total order
//! used for canonical coset representatives and for deterministic search.

mod chain;
pub mod catalog;
pub mod families;
mod perm;
pub mod search;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

pub use chain::StabilizerChain;
pub use perm::Permutation;
pub(crate) use perm::gcd;

use crate::error::{Error, Result};

/// Groups larger than this are never enumerated element by element.
pub const ELEMENT_LIMIT: u64 = 100_000;

/// Multiplication tables are cached only up to this order.
const TABLE_LIMIT: usize = 1200;

#[derive(Clone)]
pub struct PermutationGroup {
    inner: Arc<Inner>,
}

struct Inner {
    name: String,
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabilizerChain>,
    elements: OnceLock<ElementTable>,
}

impl PermutationGroup {
    pub fn new(name: impl Into<String>, degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::InvalidGroup(format!(
                    "generator {g} has degree {}, expected {degree}",
                    g.degree()
                )));
            }
        }
        Ok(PermutationGroup {
            inner: Arc::new(Inner {
                name: name.into(),
                degree,
                generators,
                chain: OnceLock::new(),
                elements: OnceLock::new(),
            }),
        })
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        PermutationGroup::new(name, self.degree(), self.generators().to_vec()).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.inner.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.inner.generators
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree())
    }

    pub fn chain(&self) -> &StabilizerChain {
        self.inner
            .chain
            .get_or_init(|| StabilizerChain::new(self.degree(), self.generators()))
    }

    /// Exact order from the stabilizer chain.
    pub fn order(&self) -> u64 {
        self.chain().order()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.chain().contains(p)
    }

    pub fn check_member(&self, p: &Permutation) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::NotAMember(format!("{p} (in {})", self.name())))
        }
    }

    /// Order of a member element.
    pub fn element_order(&self, p: &Permutation) -> Result<u64> {
        self.check_member(p)?;
        Ok(p.order())
    }

    /// Sorted element table, built by closure on first use.
    pub fn elements(&self) -> Result<&ElementTable> {
        if let Some(t) = self.inner.elements.get() {
            return Ok(t);
        }
        let order = self.order();
        if order > ELEMENT_LIMIT {
            return Err(Error::Unsupported(format!(
                "{} has order {order}; element enumeration is limited to {ELEMENT_LIMIT}",
                self.name()
            )));
        }
        let table = ElementTable::by_closure(self.degree(), self.generators());
        if table.len() as u64 != order {
            return Err(Error::Invariant(format!(
                "closure of {} has {} elements but the stabilizer chain reports {order}",
                self.name(),
                table.len()
            )));
        }
        Ok(self.inner.elements.get_or_init(|| table))
    }

    /// True iff `elems` (all members) generate the whole group.
    pub fn generates(&self, elems: &[Permutation]) -> Result<bool> {
        for e in elems {
            self.check_member(e)?;
        }
        Ok(StabilizerChain::new(self.degree(), elems).order() == self.order())
    }

    /// Conjugacy class of a member, sorted.
    pub fn conjugacy_class(&self, x: &Permutation) -> Result<Vec<Permutation>> {
        self.check_member(x)?;
        let mut seen: HashSet<Permutation> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(x.clone());
        queue.push_back(x.clone());
        while let Some(y) = queue.pop_front() {
            for g in self.generators() {
                let z = g.conjugate(&y);
                if seen.insert(z.clone()) {
                    queue.push_back(z);
                }
            }
        }
        let mut out: Vec<Permutation> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    /// Conjugacy classes of the whole group, each sorted, ordered by their
    /// least element.
    pub fn conjugacy_classes(&self) -> Result<Vec<Vec<Permutation>>> {
        let table = self.elements()?;
        let mut assigned = vec![false; table.len()];
        let mut classes = Vec::new();
        for i in 0..table.len() {
            if assigned[i] {
                continue;
            }
            let class = self.conjugacy_class(table.element(i))?;
            for c in &class {
                assigned[table.index_of(c).unwrap()] = true;
            }
            classes.push(class);
        }
        Ok(classes)
    }

    /// Number of elements of each order.
    pub fn order_spectrum(&self) -> Result<std::collections::BTreeMap<u64, u64>> {
        let table = self.elements()?;
        let mut spectrum = std::collections::BTreeMap::new();
        for i in 0..table.len() {
            *spectrum.entry(table.element_order(i)).or_insert(0) += 1;
        }
        Ok(spectrum)
    }

    /// Disjoint-union action of `self × other` on `deg(self) + deg(other)` points.
    pub fn direct_product(&self, other: &PermutationGroup) -> PermutationGroup {
        families::direct_product(self, other)
    }
}

impl fmt::Debug for PermutationGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermutationGroup")
            .field("name", &self.name())
            .field("degree", &self.degree())
            .field("generators", &self.generators())
            .finish()
    }
}

/// All elements of a group in lexicographic order, with index lookup.
pub struct ElementTable {
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    identity: usize,
    inverses: Vec<usize>,
    table: OnceLock<Vec<u32>>,
}

impl ElementTable {
    fn by_closure(degree: usize, generators: &[Permutation]) -> Self {
        let id = Permutation::identity(degree);
        let mut seen: HashSet<Permutation> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(id.clone());
        queue.push_back(id);
        while let Some(x) = queue.pop_front() {
            for g in generators {
                let y = g.compose(&x);
                if !seen.contains(&y) {
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<Permutation> = seen.into_iter().collect();
        elements.sort();
        Self::from_sorted(elements)
    }

    fn from_sorted(elements: Vec<Permutation>) -> Self {
        let index: HashMap<Permutation, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let identity = elements.iter().position(|p| p.is_identity()).unwrap();
        let inverses = elements.iter().map(|p| index[&p.inverse()]).collect();
        ElementTable {
            elements,
            index,
            identity,
            inverses,
            table: OnceLock::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Permutation> {
        self.elements.iter()
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverses[i]
    }

    /// Index of `elements[a] * elements[b]`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        let n = self.len();
        if n <= TABLE_LIMIT {
            let table = self.table.get_or_init(|| {
                let mut t = vec![0u32; n * n];
                for x in 0..n {
                    for y in 0..n {
                        t[x * n + y] = self.index[&self.elements[x].compose(&self.elements[y])] as u32;
                    }
                }
                t
            });
            table[a * n + b] as usize
        } else {
            self.index[&self.elements[a].compose(&self.elements[b])]
        }
    }

    pub fn element_order(&self, i: usize) -> u64 {
        self.elements[i].order()
    }

    /// Sorted indices of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.len()];
        member[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(g, x);
                if !member[y] {
                    member[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.len()).filter(|&i| member[i]).collect()
    }
}

/// A subgroup of a [`PermutationGroup`] given by member generators.
#[derive(Clone)]
pub struct Subgroup {
    parent: PermutationGroup,
    group: PermutationGroup,
}

impl Subgroup {
    pub fn new(parent: &PermutationGroup, generators: Vec<Permutation>) -> Result<Self> {
        for g in &generators {
            parent.check_member(g)?;
        }
        let name = if generators.is_empty() {
            "1".to_string()
        } else {
            format!(
                "<{}>",
                generators.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
            )
        };
        Ok(Subgroup {
            parent: parent.clone(),
            group: PermutationGroup::new(name, parent.degree(), generators)?,
        })
    }

    pub fn trivial(parent: &PermutationGroup) -> Self {
        Subgroup::new(parent, Vec::new()).unwrap()
    }

    pub fn whole(parent: &PermutationGroup) -> Self {
        Subgroup::new(parent, parent.generators().to_vec()).unwrap()
    }

    /// Subgroup generated by the given element indices of the parent table,
    /// keeping only generators that enlarge the running closure.
    pub fn from_indices(parent: &PermutationGroup, indices: &[usize]) -> Result<Self> {
        let table = parent.elements()?;
        let mut gens: Vec<usize> = Vec::new();
        let mut members: HashSet<usize> = HashSet::from([table.identity()]);
        for &i in indices {
            if !members.contains(&i) {
                gens.push(i);
                members = table.closure(&gens).into_iter().collect();
            }
        }
        Subgroup::new(
            parent,
            gens.into_iter().map(|i| table.element(i).clone()).collect(),
        )
    }

    pub fn parent(&self) -> &PermutationGroup {
        &self.parent
    }

    pub fn as_group(&self) -> &PermutationGroup {
        &self.group
    }

    pub fn generators(&self) -> &[Permutation] {
        self.group.generators()
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.group.contains(p)
    }

    /// Sorted indices of the members in the parent's element table.
    pub fn member_indices(&self) -> Result<Vec<usize>> {
        Ok(self.member_indices_in(self.parent.elements()?))
    }

    pub fn left_cosets(&self) -> Result<Cosets> {
        left_cosets(&self.parent, self)
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup({} of {})", self.group.name(), self.parent.name())
    }
}

/// Left cosets `gH`, each represented by its lexicographically least member.
#[derive(Clone, Debug)]
pub struct Cosets {
    /// Representative element index per coset, in increasing order.
    pub representatives: Vec<usize>,
    /// Coset number of every element index.
    pub coset_of: Vec<usize>,
    pub subgroup_order: usize,
}

impl Cosets {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn same_coset(&self, a: usize, b: usize) -> bool {
        self.coset_of[a] == self.coset_of[b]
    }
}

pub fn left_cosets(group: &PermutationGroup, subgroup: &Subgroup) -> Result<Cosets> {
    for g in subgroup.generators() {
        group.check_member(g)?;
    }
    let table = group.elements()?;
    let members = subgroup.member_indices_in(table);
    let mut coset_of = vec![usize::MAX; table.len()];
    let mut representatives = Vec::new();
    // elements are sorted, so the first unassigned element is its coset's minimum
    for g in 0..table.len() {
        if coset_of[g] != usize::MAX {
            continue;
        }
        let c = representatives.len();
        representatives.push(g);
        for &h in &members {
            coset_of[table.mul(g, h)] = c;
        }
    }
    Ok(Cosets {
        representatives,
        coset_of,
        subgroup_order: members.len(),
    })
}

impl Subgroup {
    fn member_indices_in(&self, table: &ElementTable) -> Vec<usize> {
        let gens: Vec<usize> = self
            .generators()
            .iter()
            .map(|g| table.index_of(g).expect("subgroup generator in parent"))
            .collect();
        table.closure(&gens)
    }
}

/// Every subgroup of a small group, as sorted element-index sets, ordered by
/// size and then lexicographically.
pub fn all_subgroups(group: &PermutationGroup) -> Result<Vec<Vec<usize>>> {
    let table = group.elements()?;
    let n = table.len();
    let mut found: HashSet<Vec<usize>> = HashSet::new();
    let mut cyclic: Vec<(usize, Vec<usize>)> = Vec::new();
    for g in 0..n {
        let members = table.closure(&[g]);
        if found.insert(members.clone()) {
            cyclic.push((g, members));
        }
    }
    let mut frontier: Vec<Vec<usize>> = found.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for sub in &frontier {
            let in_sub: HashSet<usize> = sub.iter().copied().collect();
            for (g, _) in &cyclic {
                if in_sub.contains(g) {
                    continue;
                }
                let mut gens = sub.clone();
                gens.push(*g);
                let joined = table.closure(&gens);
                if found.insert(joined.clone()) {
                    next.push(joined);
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<Vec<usize>> = found.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    #[test]
    fn s3_basics() {
        let s3 = symmetric(3).unwrap();
        assert_eq!(s3.order(), 6);
        let table = s3.elements().unwrap();
        assert_eq!(table.len(), 6);
        assert!(table.element(0).is_identity());
        let tau = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        let sigma = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        assert!(s3.generates(&[tau.clone(), sigma.clone()]).unwrap());
        assert!(!s3.generates(std::slice::from_ref(&sigma)).unwrap());
        assert_eq!(s3.element_order(&tau.compose(&sigma)).unwrap(), 2);
    }

    #[test]
    fn element_order_rejects_non_members() {
        let a4 = alternating(4).unwrap();
        let t = Permutation::from_cycles(4, &[&[0, 1]]).unwrap();
        assert!(matches!(a4.element_order(&t), Err(Error::NotAMember(_))));
    }

    #[test]
    fn cosets_of_rotation_subgroup() {
        let s3 = symmetric(3).unwrap();
        let sigma = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let h = Subgroup::new(&s3, vec![sigma]).unwrap();
        let cosets = left_cosets(&s3, &h).unwrap();
        assert_eq!(cosets.len(), 2);
        assert_eq!(cosets.representatives[0], s3.elements().unwrap().identity());
        let trivial = left_cosets(&s3, &Subgroup::trivial(&s3)).unwrap();
        assert_eq!(trivial.len(), 6);
    }

    #[test]
    fn cosets_reject_foreign_subgroup() {
        let a4 = alternating(4).unwrap();
        let s4 = symmetric(4).unwrap();
        let t = Permutation::from_cycles(4, &[&[0, 1]]).unwrap();
        let h = Subgroup::new(&s4, vec![t]).unwrap();
        assert!(left_cosets(&a4, &h).is_err());
        assert!(Subgroup::new(&a4, vec![Permutation::from_cycles(4, &[&[0, 1]]).unwrap()]).is_err());
    }

    #[test]
    fn subgroup_lattice_sizes() {
        // S3: 1, three of order 2, one of order 3, itself
        assert_eq!(all_subgroups(&symmetric(3).unwrap()).unwrap().len(), 6);
        // A4 has 10 subgroups, S4 has 30
        assert_eq!(all_subgroups(&alternating(4).unwrap()).unwrap().len(), 10);
        assert_eq!(all_subgroups(&symmetric(4).unwrap()).unwrap().len(), 30);
        assert_eq!(all_subgroups(&cyclic(12).unwrap()).unwrap().len(), 6);
    }

    #[test]
    fn conjugacy_classes_of_s4() {
        let classes = symmetric(4).unwrap().conjugacy_classes().unwrap();
        let mut sizes: Vec<usize> = classes.iter().map(|c| c.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3, 6, 6, 8]);
    }
}
