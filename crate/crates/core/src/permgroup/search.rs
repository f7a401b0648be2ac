//! Search for generating pairs `(τ, σ)` with `|τ| = 2`, `|σ| = 3`.

use rayon::prelude::*;
use serde::Serialize;

use super::{Permutation, PermutationGroup};
use crate::error::Result;

#[derive(Clone, Debug, Default)]
pub struct PairSearchOptions {
    /// Keep only pairs whose product `τσ` has exactly this order.
    pub product_order: Option<u64>,
    /// Iterate every involution instead of one per conjugacy class.
    pub all_involutions: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratingPair {
    pub tau: Permutation,
    pub sigma: Permutation,
    /// Order of `τσ` (σ applied first).
    pub product_order: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairSearch {
    /// Pairs in canonical order: involution class representatives by least
    /// element, then σ in lexicographic order.
    pub pairs: Vec<GeneratingPair>,
    /// Number of pairs over all involutions (class sizes folded in).
    pub total_count: u64,
    pub involution_classes: usize,
}

impl PairSearch {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Conjugacy classes of involutions, each sorted; classes ordered by their
/// least element (which is the class representative).
pub fn involution_classes(group: &PermutationGroup) -> Result<Vec<Vec<Permutation>>> {
    let table = group.elements()?;
    let mut done = vec![false; table.len()];
    let mut classes = Vec::new();
    for i in 0..table.len() {
        if done[i] || table.element_order(i) != 2 {
            continue;
        }
        let class = group.conjugacy_class(table.element(i))?;
        for c in &class {
            done[table.index_of(c).unwrap()] = true;
        }
        classes.push(class);
    }
    Ok(classes)
}

pub fn elements_of_order(group: &PermutationGroup, k: u64) -> Result<Vec<Permutation>> {
    let table = group.elements()?;
    Ok(table
        .iter()
        .filter(|p| p.order() == k)
        .cloned()
        .collect())
}

/// All `(τ, σ)` generating `G` with `|τ| = 2`, `|σ| = 3`, up to conjugating
/// τ (unless `all_involutions`). σ ranges over every element of order 3, so
/// the result is closed under `σ ↦ σ⁻¹`.
pub fn search_23_pairs(group: &PermutationGroup, opts: &PairSearchOptions) -> Result<PairSearch> {
    let classes = involution_classes(group)?;
    let sigmas = elements_of_order(group, 3)?;
    let order = group.order();

    let mut pairs = Vec::new();
    let mut total = 0u64;
    let taus: Vec<(Permutation, u64)> = if opts.all_involutions {
        classes
            .iter()
            .flat_map(|c| c.iter().map(|t| (t.clone(), 1)))
            .collect()
    } else {
        classes.iter().map(|c| (c[0].clone(), c.len() as u64)).collect()
    };
    for (tau, weight) in taus {
        let found: Vec<GeneratingPair> = sigmas
            .par_iter()
            .filter_map(|sigma| {
                let product_order = tau.compose(sigma).order();
                if let Some(k) = opts.product_order {
                    if product_order != k {
                        return None;
                    }
                }
                let chain = super::StabilizerChain::new(group.degree(), &[tau.clone(), sigma.clone()]);
                (chain.order() == order).then(|| GeneratingPair {
                    tau: tau.clone(),
                    sigma: sigma.clone(),
                    product_order,
                })
            })
            .collect();
        total += weight * found.len() as u64;
        pairs.extend(found);
    }
    Ok(PairSearch {
        pairs,
        total_count: total,
        involution_classes: classes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::families::*;
    use super::*;

    #[test]
    fn s3_has_pairs() {
        let r = search_23_pairs(&symmetric(3).unwrap(), &Default::default()).unwrap();
        assert!(!r.is_empty());
        // one class of 3 transpositions, 2 three-cycles each
        assert_eq!(r.pairs.len(), 2);
        assert_eq!(r.total_count, 6);
    }

    #[test]
    fn z12_has_none() {
        let r = search_23_pairs(&cyclic(12).unwrap(), &Default::default()).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.total_count, 0);
    }

    #[test]
    fn psl2_7_has_hurwitz_pair() {
        let g = psl2(7).unwrap();
        let opts = PairSearchOptions {
            product_order: Some(7),
            ..Default::default()
        };
        let r = search_23_pairs(&g, &opts).unwrap();
        assert!(!r.is_empty());
        for p in &r.pairs {
            assert_eq!(p.tau.compose(&p.sigma).order(), 7);
        }
    }

    #[test]
    fn sigma_inverse_symmetry() {
        for g in [symmetric(4).unwrap(), alternating(5).unwrap(), psl2(7).unwrap()] {
            let r = search_23_pairs(&g, &PairSearchOptions { all_involutions: true, ..Default::default() }).unwrap();
            for p in &r.pairs {
                let inv = p.sigma.inverse();
                assert!(r.pairs.iter().any(|q| q.tau == p.tau && q.sigma == inv));
            }
            assert_eq!(r.total_count, r.pairs.len() as u64);
            let reduced = search_23_pairs(&g, &Default::default()).unwrap();
            assert_eq!(reduced.total_count, r.total_count);
        }
    }
}
