//! Catalog of small groups, one section per order.
//!
//! The shipped catalog lists every isomorphism type of order 6, 12, 18, 24,
//! 30 and 66. Completeness is checked against published group counts; each
//! entry carries its order spectrum (number of elements of each order), and
//! entries of the same order must have pairwise distinct fingerprints, which
//! witnesses that no two of them are isomorphic.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::families::*;
use super::{Permutation, PermutationGroup};
use crate::error::{Error, Result};

/// Number of groups of each order, for the orders the catalog covers.
pub const KNOWN_GROUP_COUNTS: &[(u64, usize)] = &[(6, 2), (12, 5), (18, 5), (24, 15), (30, 4), (66, 4)];

/// The catalog file shipped with the crate.
pub const SHIPPED_CATALOG: &str = include_str!("../../data/catalog.json");

pub fn known_count(order: u64) -> Option<usize> {
    KNOWN_GROUP_COUNTS
        .iter()
        .find(|(o, _)| *o == order)
        .map(|(_, c)| *c)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupEntry {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Permutation>,
    pub order_spectrum: BTreeMap<u64, u64>,
    /// Number of conjugacy classes; disambiguates equal order spectra.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_count: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SectionJson {
    pub order: u64,
    pub groups: Vec<GroupEntry>,
}

#[derive(Clone, Debug)]
pub struct CatalogSection {
    pub order: u64,
    pub groups: Vec<PermutationGroup>,
    /// True when the group count matches [`KNOWN_GROUP_COUNTS`].
    pub complete: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    sections: BTreeMap<u64, CatalogSection>,
}

impl Catalog {
    pub fn shipped() -> Result<Catalog> {
        Catalog::from_json(SHIPPED_CATALOG)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Catalog> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Catalog::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Catalog> {
        let schema = |e: serde_json::Error| Error::Catalog(format!("schema violation: {e}"));
        let value: serde_json::Value = serde_json::from_str(text).map_err(schema)?;
        // a file holds either one section or an array of sections
        let sections: Vec<SectionJson> = if value.is_array() {
            serde_json::from_value(value).map_err(schema)?
        } else {
            vec![serde_json::from_value(value).map_err(schema)?]
        };
        Catalog::from_sections(sections)
    }

    pub fn from_sections(sections: Vec<SectionJson>) -> Result<Catalog> {
        let mut names = BTreeSet::new();
        let mut out = BTreeMap::new();
        for section in sections {
            if out.contains_key(&section.order) {
                return Err(Error::Catalog(format!("duplicate section for order {}", section.order)));
            }
            let mut groups = Vec::new();
            let mut fingerprints = BTreeSet::new();
            for entry in &section.groups {
                if !names.insert(entry.name.clone()) {
                    return Err(Error::Catalog(format!("duplicate group name {:?}", entry.name)));
                }
                let group = PermutationGroup::new(entry.name.clone(), entry.degree, entry.generators.clone())
                    .map_err(|e| Error::Catalog(format!("{}: {e}", entry.name)))?;
                let order = group.order();
                if order != section.order {
                    return Err(Error::Catalog(format!(
                        "{} has order {order} but sits in the order-{} section",
                        entry.name, section.order
                    )));
                }
                let spectrum = group.order_spectrum()?;
                if spectrum != entry.order_spectrum {
                    return Err(Error::Catalog(format!(
                        "{}: declared order spectrum {:?} differs from computed {:?}",
                        entry.name, entry.order_spectrum, spectrum
                    )));
                }
                if let Some(declared) = entry.class_count {
                    let classes = group.conjugacy_classes()?.len();
                    if classes != declared {
                        return Err(Error::Catalog(format!(
                            "{}: declared {declared} conjugacy classes, computed {classes}",
                            entry.name
                        )));
                    }
                }
                if !fingerprints.insert((spectrum, entry.class_count)) {
                    return Err(Error::Catalog(format!(
                        "{}: fingerprint repeats within order {}, no non-isomorphism witness",
                        entry.name, section.order
                    )));
                }
                groups.push(group);
            }
            let complete = match known_count(section.order) {
                Some(expected) if expected == groups.len() => true,
                Some(expected) => {
                    return Err(Error::Catalog(format!(
                        "order {} section lists {} groups, but there are exactly {expected}",
                        section.order,
                        groups.len()
                    )))
                }
                None => false,
            };
            out.insert(
                section.order,
                CatalogSection {
                    order: section.order,
                    groups,
                    complete,
                },
            );
        }
        Ok(Catalog { sections: out })
    }

    pub fn section(&self, order: u64) -> Option<&CatalogSection> {
        self.sections.get(&order)
    }

    pub fn sections(&self) -> impl Iterator<Item = &CatalogSection> {
        self.sections.values()
    }

    pub fn groups(&self) -> impl Iterator<Item = &PermutationGroup> {
        self.sections.values().flat_map(|s| s.groups.iter())
    }

    pub fn find(&self, name: &str) -> Option<&PermutationGroup> {
        self.groups().find(|g| g.name() == name)
    }
}

fn named(group: PermutationGroup, name: &str) -> PermutationGroup {
    group.renamed(name)
}

/// Builds the catalog groups from the constructors in [`super::families`].
/// The shipped JSON is this list serialized by [`catalog_json`].
pub fn builtin_groups() -> Result<Vec<(u64, Vec<PermutationGroup>)>> {
    let z = |n| cyclic(n);
    let s3 = symmetric(3)?;
    Ok(vec![
        (6, vec![z(6)?, s3.clone()]),
        (
            12,
            vec![
                named(dicyclic(3)?, "Dic3"),
                z(12)?,
                alternating(4)?,
                dihedral(6)?,
                direct_product(&z(6)?, &z(2)?),
            ],
        ),
        (
            18,
            vec![
                dihedral(9)?,
                z(18)?,
                direct_product(&s3, &z(3)?),
                generalized_dihedral_3x3()?,
                direct_product(&z(6)?, &z(3)?),
            ],
        ),
        (
            24,
            vec![
                named(metacyclic(3, 8, 2)?, "Z/3:Z/8"),
                z(24)?,
                sl2_3()?,
                named(dicyclic(6)?, "Dic6"),
                direct_product(&z(4)?, &s3),
                dihedral(12)?,
                direct_product(&z(2)?, &named(dicyclic(3)?, "Dic3")),
                z3_semidirect_dih4()?,
                direct_product(&z(12)?, &z(2)?),
                direct_product(&z(3)?, &dihedral(4)?),
                direct_product(&z(3)?, &named(dicyclic(2)?, "Q8")),
                symmetric(4)?,
                direct_product(&alternating(4)?, &z(2)?),
                direct_product(&direct_product(&z(2)?, &z(2)?), &s3),
                direct_product(&direct_product(&z(6)?, &z(2)?), &z(2)?),
            ],
        ),
        (
            30,
            vec![
                direct_product(&z(5)?, &s3),
                direct_product(&z(3)?, &dihedral(5)?),
                dihedral(15)?,
                z(30)?,
            ],
        ),
        (
            66,
            vec![
                direct_product(&z(11)?, &s3),
                direct_product(&z(3)?, &dihedral(11)?),
                dihedral(33)?,
                z(66)?,
            ],
        ),
    ])
}

/// Serializes groups into catalog sections, computing fingerprints. A class
/// count is recorded only for groups whose order spectrum is shared with
/// another group of the same order.
pub fn catalog_sections(groups: &[(u64, Vec<PermutationGroup>)]) -> Result<Vec<SectionJson>> {
    let mut sections = Vec::new();
    for (order, list) in groups {
        let spectra = list
            .iter()
            .map(|g| g.order_spectrum())
            .collect::<Result<Vec<_>>>()?;
        let mut entries = Vec::new();
        for (g, spectrum) in list.iter().zip(&spectra) {
            let shared = spectra.iter().filter(|s| *s == spectrum).count() > 1;
            let class_count = if shared {
                Some(g.conjugacy_classes()?.len())
            } else {
                None
            };
            entries.push(GroupEntry {
                name: g.name().to_string(),
                degree: g.degree(),
                generators: g.generators().to_vec(),
                order_spectrum: spectrum.clone(),
                class_count,
            });
        }
        sections.push(SectionJson {
            order: *order,
            groups: entries,
        });
    }
    Ok(sections)
}

pub fn catalog_json(groups: &[(u64, Vec<PermutationGroup>)]) -> Result<String> {
    Ok(serde_json::to_string_pretty(&catalog_sections(groups)?)?)
}

/// Inline group JSON: `{"name": .., "degree": .., "generators": [[..], ..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InlineGroup {
    #[serde(default)]
    pub name: Option<String>,
    pub degree: usize,
    pub generators: Vec<Permutation>,
}

impl InlineGroup {
    pub fn into_group(self) -> Result<PermutationGroup> {
        PermutationGroup::new(self.name.unwrap_or_else(|| "G".into()), self.degree, self.generators)
    }

    pub fn from_group(g: &PermutationGroup) -> Self {
        InlineGroup {
            name: Some(g.name().to_string()),
            degree: g.degree(),
            generators: g.generators().to_vec(),
        }
    }
}

/// A group reference in a JSON document: a name or an inline group.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Name(String),
    Inline(InlineGroup),
}

impl GroupRef {
    pub fn resolve(&self, catalog: &Catalog) -> Result<PermutationGroup> {
        match self {
            GroupRef::Name(n) => resolve_group(n, catalog, false),
            GroupRef::Inline(g) => g.clone().into_group(),
        }
    }
}

/// Resolves a group by family spec (`psl2:7`, `alt:5`, ..), catalog name,
/// short names `S<n>` / `A<n>`, or a path to an inline-group JSON file.
pub fn resolve_group(spec: &str, catalog: &Catalog, allow_large: bool) -> Result<PermutationGroup> {
    if let Some(g) = catalog.find(spec) {
        return Ok(g.clone());
    }
    if let Some(g) = parse_family(spec, allow_large) {
        return g;
    }
    if let Some(rest) = spec.strip_prefix('S').or_else(|| spec.strip_prefix('A')) {
        if let Ok(n) = rest.parse::<usize>() {
            return if spec.starts_with('S') { symmetric(n) } else { alternating(n) };
        }
    }
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        let inline: InlineGroup = serde_json::from_str(&text)?;
        return inline.into_group();
    }
    Err(Error::InvalidGroup(format!("unknown group {spec:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_catalog_loads_complete() {
        let cat = Catalog::shipped().unwrap();
        for (order, count) in KNOWN_GROUP_COUNTS {
            let s = cat.section(*order).unwrap();
            assert_eq!(s.groups.len(), *count, "order {order}");
            assert!(s.complete);
        }
        assert_eq!(cat.section(30).unwrap().groups.len(), 4);
        assert_eq!(cat.section(6).unwrap().groups.len(), 2);
        assert_eq!(cat.section(24).unwrap().groups.len(), 15);
    }

    #[test]
    fn shipped_catalog_matches_builtin_construction() {
        let regenerated = catalog_json(&builtin_groups().unwrap()).unwrap();
        let shipped: serde_json::Value = serde_json::from_str(SHIPPED_CATALOG).unwrap();
        let rebuilt: serde_json::Value = serde_json::from_str(&regenerated).unwrap();
        assert_eq!(shipped, rebuilt);
    }

    #[test]
    fn incomplete_section_rejected() {
        let mut sections = catalog_sections(&builtin_groups().unwrap()[..1]).unwrap();
        sections[0].groups.pop();
        let err = Catalog::from_sections(sections).unwrap_err();
        assert!(err.to_string().contains("exactly 2"));
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut sections = catalog_sections(&builtin_groups().unwrap()[..2]).unwrap();
        sections[1].groups[0].name = "S3".into();
        let err = Catalog::from_sections(sections).unwrap_err();
        assert!(err.to_string().contains("duplicate group name"));
    }

    #[test]
    fn wrong_spectrum_rejected() {
        let mut sections = catalog_sections(&builtin_groups().unwrap()[..1]).unwrap();
        sections[0].groups[0].order_spectrum.insert(2, 5);
        assert!(Catalog::from_sections(sections).is_err());
    }

    #[test]
    fn schema_violation_rejected() {
        assert!(Catalog::from_json(r#"{"order": 6}"#).is_err());
        assert!(Catalog::from_json(r#"{"order": 6, "groups": [{"name": "x", "degree": 2, "generators": [[0, 0]], "order_spectrum": {}}]}"#).is_err());
    }

    #[test]
    fn resolves_names() {
        let cat = Catalog::shipped().unwrap();
        assert_eq!(resolve_group("psl2:7", &cat, false).unwrap().order(), 168);
        assert_eq!(resolve_group("A4xZ/2", &cat, false).unwrap().order(), 24);
        assert_eq!(resolve_group("S5", &cat, false).unwrap().order(), 120);
        assert_eq!(resolve_group("(Z/3xZ/3):Z/2", &cat, false).unwrap().order(), 18);
        assert_eq!(resolve_group("Z/3:Z/8", &cat, false).unwrap().order(), 24);
        assert!(resolve_group("nonsense", &cat, false).is_err());
    }
}
