//! JSON carrier for the taxonomy table.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::types::{Category, ClassId, ContactType, LimbClass, RestingTier, SupportClass, SupportSpec};
use super::validate::Violation;
use super::{TaxonomyError, TaxonomyGraph};

pub const DEFAULT_TAXONOMY: &str = include_str!("../../data/taxonomy.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaxonomyFile {
    pub classes: Vec<ClassRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassRecord {
    pub id: String,
    pub category: Category,
    pub supports: Vec<SupportRecord>,
    #[serde(default)]
    pub torso_contact: bool,
    #[serde(default)]
    pub neighbors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier: Option<RestingTier>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportRecord {
    pub limb: LimbClass,
    pub contact: ContactType,
}

impl TaxonomyFile {
    pub fn parse(source: &str) -> Result<Self, TaxonomyError> {
        serde_json::from_str(source).map_err(|e| TaxonomyError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Builds a graph without checking the table invariants.
    ///
    /// Records that cannot be represented at all (malformed or duplicate ids,
    /// inadmissible supports, the reserved flight id) are skipped and
    /// reported as violations alongside the graph.
    pub fn build(&self) -> (TaxonomyGraph, Vec<Violation>) {
        let mut violations = Vec::new();
        let mut classes: BTreeMap<ClassId, SupportClass> = BTreeMap::new();
        let mut declared: BTreeMap<ClassId, Vec<String>> = BTreeMap::new();

        for rec in &self.classes {
            let id: ClassId = match rec.id.parse() {
                Ok(id) => id,
                Err(_) => {
                    violations.push(Violation::MalformedId { raw: rec.id.clone() });
                    continue;
                }
            };
            if id.is_flight() {
                violations.push(Violation::ReservedId { id: id.to_string() });
                continue;
            }
            if classes.contains_key(&id) {
                violations.push(Violation::DuplicateId { id: id.to_string() });
                continue;
            }
            let spec = match SupportSpec::new(
                rec.supports.iter().map(|s| (s.limb, s.contact)),
                rec.torso_contact,
            ) {
                Ok(spec) => spec,
                Err(e) => {
                    violations.push(Violation::Inadmissible {
                        id: id.to_string(),
                        reason: e.to_string(),
                    });
                    continue;
                }
            };
            declared.insert(id.clone(), rec.neighbors.clone());
            classes.insert(
                id.clone(),
                SupportClass {
                    id,
                    category: rec.category,
                    spec,
                    neighbors: Vec::new(),
                    cross_category: Vec::new(),
                    tier: rec.tier,
                },
            );
        }

        let mut dangling = Vec::new();
        for (id, raw_neighbors) in &declared {
            let mut set = BTreeSet::new();
            for raw in raw_neighbors {
                match raw.parse::<ClassId>() {
                    Ok(n) if n.is_flight() || classes.contains_key(&n) => {
                        set.insert(n);
                    }
                    _ => dangling.push(Violation::UnknownNeighbor {
                        id: id.to_string(),
                        neighbor: raw.clone(),
                    }),
                }
            }
            // flight adjacency is implicit for every single-support class
            let class = &classes[id];
            if class.category != Category::Resting && class.spec.len() == 1 && !class.spec.torso_contact() {
                set.insert(ClassId::flight());
            }
            let class_category = class.category;
            let cross: Vec<ClassId> = set
                .iter()
                .filter(|n| {
                    classes
                        .get(*n)
                        .map(|c| c.category != class_category)
                        .unwrap_or(false)
                })
                .cloned()
                .collect();
            let class = classes.get_mut(id).expect("declared ids are inserted");
            class.neighbors = set.into_iter().collect();
            class.cross_category = cross;
        }
        violations.extend(dangling);

        (TaxonomyGraph { classes }, violations)
    }

    pub fn from_graph(graph: &TaxonomyGraph) -> Self {
        let classes = graph
            .classes()
            .map(|c| ClassRecord {
                id: c.id.to_string(),
                category: c.category,
                // legs first
                supports: c
                    .spec
                    .entries()
                    .iter()
                    .rev()
                    .map(|&(limb, contact)| SupportRecord { limb, contact })
                    .collect(),
                torso_contact: c.spec.torso_contact(),
                neighbors: c
                    .neighbors
                    .iter()
                    .filter(|n| !n.is_flight())
                    .map(|n| n.to_string())
                    .collect(),
                tier: c.tier,
            })
            .collect();
        TaxonomyFile { classes }
    }

    /// One class per line, matching the layout of the shipped data file.
    pub fn to_json(&self) -> String {
        let lines: Vec<String> = self
            .classes
            .iter()
            .map(|c| format!("    {}", serde_json::to_string(c).expect("records serialize")))
            .collect();
        format!("{{\n  \"classes\": [\n{}\n  ]\n}}\n", lines.join(",\n"))
    }
}
