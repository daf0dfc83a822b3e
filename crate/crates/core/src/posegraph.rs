//! Order-labelled pose-transition multigraph built from a segment report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::motion_model::BodySegment;
use crate::segmentation::{support_spec, SegmentReport, SupportSet, UNCLASSIFIED};
use crate::taxonomy::{ClassId, ContactType, TaxonomyGraph};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("report has no segments")]
    EmptyReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeKind {
    Added,
    Removed,
    Retyped,
    Multi,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub from: String,
    pub to: String,
    /// 1-based position in the motion.
    pub order: usize,
    /// Body segments whose support changed.
    pub changed: Vec<BodySegment>,
    pub kind: ChangeKind,
}

impl Transition {
    /// The single changed segment, if only one changed.
    pub fn changed_segment(&self) -> Option<BodySegment> {
        match self.changed.as_slice() {
            [one] => Some(*one),
            _ => None,
        }
    }
}

/// One visited segment: class id plus which feet were supporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Visit {
    pub class_id: String,
    pub supports: Vec<BodySegment>,
    /// True when the support set has exactly one foot and no knee.
    pub single_foot: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionGraph {
    /// Visited classes, in id order.
    pub nodes: Vec<String>,
    pub edges: Vec<Transition>,
    pub visits: Vec<Visit>,
}

fn class_label(id: &Option<String>) -> String {
    id.clone().unwrap_or_else(|| UNCLASSIFIED.to_string())
}

fn node_order(a: &str, b: &str) -> std::cmp::Ordering {
    match (a.parse::<ClassId>(), b.parse::<ClassId>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        (Ok(_), Err(_)) => std::cmp::Ordering::Less,
        (Err(_), Ok(_)) => std::cmp::Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

fn diff(a: &SupportSet, b: &SupportSet) -> (Vec<BodySegment>, ChangeKind) {
    let keys: BTreeSet<_> = a.keys().chain(b.keys()).copied().collect();
    let changed: Vec<BodySegment> = keys.into_iter().filter(|k| a.get(k) != b.get(k)).collect();
    let kind = match changed.as_slice() {
        [one] => match (a.contains_key(one), b.contains_key(one)) {
            (false, true) => ChangeKind::Added,
            (true, false) => ChangeKind::Removed,
            _ => ChangeKind::Retyped,
        },
        _ => ChangeKind::Multi,
    };
    (changed, kind)
}

fn is_single_foot(set: &SupportSet) -> bool {
    let Ok(spec) = support_spec(set) else {
        return false;
    };
    spec.count(ContactType::Foot) == 1 && spec.count(ContactType::Knee) == 0
}

pub fn build_graph(report: &SegmentReport) -> Result<TransitionGraph, GraphError> {
    if report.segments.is_empty() {
        return Err(GraphError::EmptyReport);
    }
    let visits: Vec<Visit> = report
        .segments
        .iter()
        .map(|s| Visit {
            class_id: class_label(&s.class_id),
            supports: s.supports.keys().copied().collect(),
            single_foot: is_single_foot(&s.supports),
        })
        .collect();
    let edges = report
        .segments
        .windows(2)
        .enumerate()
        .map(|(i, pair)| {
            let (changed, kind) = diff(&pair[0].supports, &pair[1].supports);
            Transition {
                from: class_label(&pair[0].class_id),
                to: class_label(&pair[1].class_id),
                order: i + 1,
                changed,
                kind,
            }
        })
        .collect();
    let mut nodes: Vec<String> = visits
        .iter()
        .map(|v| v.class_id.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    nodes.sort_by(|a, b| node_order(a, b));
    Ok(TransitionGraph { nodes, edges, visits })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DotOptions {
    pub graph_name: Option<String>,
}

fn edge_color(t: &Transition) -> Option<&'static str> {
    match t.changed_segment()? {
        BodySegment::LeftFoot => Some("blue"),
        BodySegment::RightFoot => Some("red"),
        _ => None,
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph with one statement per visited class and one per transition.
/// Left-foot transitions are blue, right-foot transitions red.
pub fn to_dot(graph: &TransitionGraph, options: &DotOptions) -> String {
    let name = options.graph_name.as_deref().unwrap_or("pose_transitions");
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(name)).unwrap();
    for node in &graph.nodes {
        writeln!(out, "    {};", quote(node)).unwrap();
    }
    for e in &graph.edges {
        let mut attrs = format!("label={}", quote(&e.order.to_string()));
        if let Some(color) = edge_color(e) {
            write!(attrs, ", color={color}").unwrap();
        }
        writeln!(out, "    {} -> {} [{}];", quote(&e.from), quote(&e.to), attrs).unwrap();
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FootVisits {
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub visit_counts: BTreeMap<String, usize>,
    /// Entries into single-foot classes.
    pub step_count: usize,
    pub single_foot_visits: FootVisits,
    /// Fraction of transitions that are declared taxonomy edges (1 with no transitions).
    pub compliance: f64,
    /// Orders of transitions that are not taxonomy edges.
    pub non_compliant: Vec<usize>,
}

pub fn stats(graph: &TransitionGraph, taxonomy: &TaxonomyGraph) -> GraphStats {
    let mut visit_counts = BTreeMap::new();
    for v in &graph.visits {
        *visit_counts.entry(v.class_id.clone()).or_insert(0) += 1;
    }
    let mut feet = FootVisits { left: 0, right: 0 };
    for v in graph.visits.iter().filter(|v| v.single_foot) {
        if v.supports.contains(&BodySegment::LeftFoot) {
            feet.left += 1;
        } else if v.supports.contains(&BodySegment::RightFoot) {
            feet.right += 1;
        }
    }
    let non_compliant: Vec<usize> = graph
        .edges
        .iter()
        .filter(|e| match (e.from.parse::<ClassId>(), e.to.parse::<ClassId>()) {
            (Ok(a), Ok(b)) => !taxonomy.are_neighbors(&a, &b),
            _ => true,
        })
        .map(|e| e.order)
        .collect();
    let compliance = if graph.edges.is_empty() {
        1.0
    } else {
        1.0 - non_compliant.len() as f64 / graph.edges.len() as f64
    };
    GraphStats {
        visit_counts,
        step_count: graph.visits.iter().filter(|v| v.single_foot).count(),
        single_foot_visits: feet,
        compliance,
        non_compliant,
    }
}
