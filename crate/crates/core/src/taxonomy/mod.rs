//! The support-pose taxonomy: 18 standing, 18 kneeling and 10 resting
//! classes, plus the flight pseudo-class `0.0`.
//!
//! Standing and kneeling classes are linked when their support multisets
//! differ by a single contact change. Resting classes carry no transitions.
//! The graph is immutable once loaded and can be shared freely across threads.

mod file;
mod types;
mod validate;

use std::collections::{BTreeMap, VecDeque};
use std::sync::OnceLock;

use thiserror::Error;

pub use file::{ClassRecord, SupportRecord, TaxonomyFile, DEFAULT_TAXONOMY};
pub use types::{
    Category, ClassId, ContactModel, ContactType, LimbClass, RestingTier, Side, SupportClass,
    SupportSpec, FLIGHT_ID, MAX_PER_LIMB,
};
pub use validate::{validate, ValidationReport, Violation, EXPECTED_COUNTS};

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("taxonomy parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("taxonomy validation failed: {}", join_violations(.0))]
    Validation(Vec<Violation>),
    #[error("malformed class id `{0}`")]
    MalformedId(String),
    #[error("unknown class id `{0}`")]
    UnknownId(String),
    #[error("invalid support spec: {0}")]
    InvalidSpec(String),
    #[error("support spec {0} matches no class of the taxonomy")]
    UnknownPose(String),
    #[error("no transition path from {from} to {to}")]
    NoPath { from: String, to: String },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyGraph {
    classes: BTreeMap<ClassId, SupportClass>,
}

impl TaxonomyGraph {
    /// Parses and validates a taxonomy file.
    pub fn load(source: &str) -> Result<Self, TaxonomyError> {
        let file = TaxonomyFile::parse(source)?;
        let (graph, mut violations) = file.build();
        violations.extend(validate(&graph).violations);
        if violations.is_empty() {
            Ok(graph)
        } else {
            Err(TaxonomyError::Validation(violations))
        }
    }

    /// The shipped table, parsed once.
    pub fn builtin() -> &'static TaxonomyGraph {
        static BUILTIN: OnceLock<TaxonomyGraph> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            TaxonomyGraph::load(DEFAULT_TAXONOMY).expect("shipped taxonomy is valid")
        })
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    pub fn classes(&self) -> impl Iterator<Item = &SupportClass> {
        self.classes.values()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, id: &ClassId) -> Option<&SupportClass> {
        self.classes.get(id)
    }

    pub fn get(&self, id: &str) -> Result<&SupportClass, TaxonomyError> {
        let parsed: ClassId = id.parse()?;
        self.classes
            .get(&parsed)
            .ok_or_else(|| TaxonomyError::UnknownId(id.to_string()))
    }

    pub fn contains(&self, id: &ClassId) -> bool {
        id.is_flight() || self.classes.contains_key(id)
    }

    /// Classes adjacent to the flight phase: every non-resting single-support class.
    pub fn flight_neighbors(&self) -> Vec<ClassId> {
        self.classes
            .values()
            .filter(|c| c.neighbors.iter().any(ClassId::is_flight))
            .map(|c| c.id.clone())
            .collect()
    }

    /// Support count of a class; zero for flight.
    pub fn support_count(&self, id: &ClassId) -> Result<usize, TaxonomyError> {
        if id.is_flight() {
            return Ok(0);
        }
        self.class(id)
            .map(SupportClass::support_count)
            .ok_or_else(|| TaxonomyError::UnknownId(id.to_string()))
    }

    /// Id of the class whose spec equals `spec`; the empty spec is flight.
    pub fn classify(&self, spec: &SupportSpec) -> Result<ClassId, TaxonomyError> {
        if spec.is_empty() {
            return Ok(ClassId::flight());
        }
        self.classes
            .values()
            .find(|c| c.spec == *spec)
            .map(|c| c.id.clone())
            .ok_or_else(|| TaxonomyError::UnknownPose(spec.to_string()))
    }

    pub fn neighbors_of(&self, id: &ClassId) -> Result<Vec<ClassId>, TaxonomyError> {
        if id.is_flight() {
            return Ok(self.flight_neighbors());
        }
        self.class(id)
            .map(|c| c.neighbors.clone())
            .ok_or_else(|| TaxonomyError::UnknownId(id.to_string()))
    }

    pub fn neighbors(&self, id: &str) -> Result<Vec<ClassId>, TaxonomyError> {
        self.neighbors_of(&id.parse()?)
    }

    pub fn are_neighbors(&self, a: &ClassId, b: &ClassId) -> bool {
        self.neighbors_of(a).map(|n| n.contains(b)).unwrap_or(false)
    }

    /// Shortest transition path by edge count.
    ///
    /// Among equally short paths the one whose successive hops are smallest
    /// in id order wins, which makes the result independent of traversal order.
    pub fn transition_path(&self, from: &str, to: &str) -> Result<Vec<ClassId>, TaxonomyError> {
        let from: ClassId = from.parse()?;
        let to: ClassId = to.parse()?;
        for id in [&from, &to] {
            if !self.contains(id) {
                return Err(TaxonomyError::UnknownId(id.to_string()));
            }
        }
        let no_path = || TaxonomyError::NoPath {
            from: from.to_string(),
            to: to.to_string(),
        };
        if self.neighbors_of(&from)?.is_empty() || self.neighbors_of(&to)?.is_empty() {
            return Err(no_path());
        }

        // distances to the target, then walk greedily downhill from the source
        let mut dist: BTreeMap<ClassId, usize> = BTreeMap::new();
        dist.insert(to.clone(), 0);
        let mut queue = VecDeque::from([to.clone()]);
        while let Some(cur) = queue.pop_front() {
            let d = dist[&cur];
            for n in self.neighbors_of(&cur)? {
                if !dist.contains_key(&n) {
                    dist.insert(n.clone(), d + 1);
                    queue.push_back(n);
                }
            }
        }

        let mut remaining = *dist.get(&from).ok_or_else(no_path)?;
        let mut path = vec![from.clone()];
        let mut cur = from;
        while remaining > 0 {
            let next = self
                .neighbors_of(&cur)?
                .into_iter()
                .find(|n| dist.get(n) == Some(&(remaining - 1)))
                .expect("a node at distance d has a neighbour at distance d - 1");
            path.push(next.clone());
            cur = next;
            remaining -= 1;
        }
        Ok(path)
    }

    /// Number of undirected edges, flight edges included.
    pub fn edge_count(&self) -> usize {
        self.validate().edge_count
    }
}
