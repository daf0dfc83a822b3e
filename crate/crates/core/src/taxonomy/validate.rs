use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::types::{Category, ContactType, RestingTier, SupportSpec};
use super::TaxonomyGraph;

pub const EXPECTED_COUNTS: [(Category, usize); 3] = [
    (Category::Standing, 18),
    (Category::Kneeling, 18),
    (Category::Resting, 10),
];

/// A broken table invariant. Every variant names the offending ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    MalformedId { raw: String },
    ReservedId { id: String },
    DuplicateId { id: String },
    Inadmissible { id: String, reason: String },
    UnknownNeighbor { id: String, neighbor: String },
    Category { id: String, reason: String },
    RowMismatch { id: String, row: u32, supports: usize },
    SelfLoop { id: String },
    Asymmetric { from: String, to: String },
    OneChange { a: String, b: String },
    RestingEdge { a: String, b: String },
    DuplicateSpec { a: String, b: String },
    Tier { id: String, expected: Option<RestingTier>, found: Option<RestingTier> },
    CategoryCount { category: Category, expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MalformedId { raw } => write!(f, "malformed class id `{raw}`"),
            Violation::ReservedId { id } => write!(f, "`{id}` is reserved for the flight pseudo-class"),
            Violation::DuplicateId { id } => write!(f, "duplicate class id {id}"),
            Violation::Inadmissible { id, reason } => write!(f, "{id}: {reason}"),
            Violation::UnknownNeighbor { id, neighbor } => {
                write!(f, "{id} lists unknown neighbor `{neighbor}`")
            }
            Violation::Category { id, reason } => write!(f, "{id}: {reason}"),
            Violation::RowMismatch { id, row, supports } => {
                write!(f, "{id}: row {row} but {supports} supports")
            }
            Violation::SelfLoop { id } => write!(f, "{id} lists itself as a neighbor"),
            Violation::Asymmetric { from, to } => {
                write!(f, "{from} lists {to} but {to} does not list {from}")
            }
            Violation::OneChange { a, b } => write!(
                f,
                "edge {a} -- {b} breaks the one-change rule (specs must differ by exactly one contact)"
            ),
            Violation::RestingEdge { a, b } => {
                write!(f, "edge {a} -- {b} touches a resting class, which has no transitions")
            }
            Violation::DuplicateSpec { a, b } => write!(f, "{a} and {b} share the same support spec"),
            Violation::Tier { id, expected, found } => {
                write!(f, "{id}: tier {found:?}, expected {expected:?}")
            }
            Violation::CategoryCount {
                category,
                expected,
                found,
            } => write!(f, "{category:?}: {found} classes, expected {expected}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub counts: BTreeMap<Category, usize>,
    pub total: usize,
    /// Undirected declared edges, flight edges included.
    pub edge_count: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} classes, {} violations", self.total, self.violations.len())
    }
}

pub fn validate(graph: &TaxonomyGraph) -> ValidationReport {
    let mut violations = Vec::new();
    let mut counts: BTreeMap<Category, usize> = BTreeMap::new();

    for class in graph.classes() {
        *counts.entry(class.category).or_default() += 1;
        let id = class.id.to_string();
        let spec = &class.spec;
        let feet = spec.count(ContactType::Foot);
        let knees = spec.count(ContactType::Knee);

        let category_problem = match class.category {
            Category::Standing if feet == 0 => Some("standing pose without a foot support"),
            Category::Standing if knees > 0 => Some("standing pose with a knee support"),
            Category::Kneeling if knees == 0 => Some("kneeling pose without a knee support"),
            Category::Standing | Category::Kneeling if spec.torso_contact() => {
                Some("torso contact outside the resting category")
            }
            Category::Resting if !spec.torso_contact() => Some("resting pose without torso contact"),
            _ => None,
        };
        if let Some(reason) = category_problem {
            violations.push(Violation::Category {
                id: id.clone(),
                reason: reason.to_string(),
            });
        }

        match (class.category, class.id.row(), class.id.resting_index()) {
            (Category::Resting, _, Some(n)) => {
                let expected = RestingTier::for_index(n);
                if class.tier != expected || expected.is_none() {
                    violations.push(Violation::Tier {
                        id: id.clone(),
                        expected,
                        found: class.tier,
                    });
                }
            }
            (Category::Resting, _, None) => violations.push(Violation::Category {
                id: id.clone(),
                reason: "resting class needs an `r.<n>` id".into(),
            }),
            (_, Some(row), _) => {
                if row as usize != spec.len() {
                    violations.push(Violation::RowMismatch {
                        id: id.clone(),
                        row,
                        supports: spec.len(),
                    });
                }
                if class.tier.is_some() {
                    violations.push(Violation::Tier {
                        id: id.clone(),
                        expected: None,
                        found: class.tier,
                    });
                }
            }
            (_, None, _) => violations.push(Violation::Category {
                id: id.clone(),
                reason: "`r.<n>` ids are reserved for resting classes".into(),
            }),
        }
    }

    for (category, expected) in EXPECTED_COUNTS {
        let found = counts.get(&category).copied().unwrap_or(0);
        if found != expected {
            violations.push(Violation::CategoryCount {
                category,
                expected,
                found,
            });
        }
    }

    let classes: Vec<_> = graph.classes().collect();
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            if a.spec == b.spec {
                violations.push(Violation::DuplicateSpec {
                    a: a.id.to_string(),
                    b: b.id.to_string(),
                });
            }
        }
    }

    let mut edge_count = 0;
    let flight_spec = SupportSpec::empty();
    for class in graph.classes() {
        for n in &class.neighbors {
            if *n == class.id {
                violations.push(Violation::SelfLoop {
                    id: class.id.to_string(),
                });
                continue;
            }
            let other = graph.class(n);
            let back = match other {
                Some(o) => o.neighbors.contains(&class.id),
                None => n.is_flight() && graph.flight_neighbors().contains(&class.id),
            };
            if !back {
                violations.push(Violation::Asymmetric {
                    from: class.id.to_string(),
                    to: n.to_string(),
                });
            }
            // each undirected edge is checked from its smaller endpoint, or
            // from the only endpoint that declares it
            if back && other.is_some() && *n < class.id {
                continue;
            }
            edge_count += 1;
            let other_category = other.map(|o| o.category);
            if class.category == Category::Resting || other_category == Some(Category::Resting) {
                violations.push(Violation::RestingEdge {
                    a: class.id.to_string(),
                    b: n.to_string(),
                });
                continue;
            }
            let other_spec = other.map(|o| &o.spec).unwrap_or(&flight_spec);
            if !class.spec.one_change_from(other_spec) {
                violations.push(Violation::OneChange {
                    a: class.id.to_string(),
                    b: n.to_string(),
                });
            }
        }
    }

    ValidationReport {
        total: counts.values().sum(),
        counts,
        edge_count,
        violations,
    }
}
