//! Manipulation contact detection and action classification.
//!
//! Segments are grouped into spans of three kinds:
//!
//! * type I, manipulation inside one support class,
//! * type II, support transitions with no manipulation,
//! * type III, manipulation that doubles as support or persists across a
//!   support transition.

use serde::{Deserialize, Serialize};

use crate::contact::probe_where;
use crate::motion_model::{BodySegment, MotionSequence, ObjectRole, Scene};
use crate::segmentation::{detect_supports, PipelineConfig, SegmentReport};
use crate::Result;

/// A run of frames where a body segment touches a manipulable object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManipulationContact {
    /// Inclusive.
    pub start: usize,
    /// Exclusive.
    pub end: usize,
    pub segment: BodySegment,
    pub object: String,
    /// The same contact also passed the support test.
    pub dual_use: bool,
}

impl ManipulationContact {
    pub fn overlaps(&self, start: usize, end: usize) -> bool {
        self.start < end && start < self.end
    }
}

/// Frames where a tracked body segment lies within the contact tolerance of a
/// manipulable object, split into runs by object and by dual-use status.
pub fn detect_manipulation_contacts(
    motion: &MotionSequence,
    scene: &Scene,
    config: &PipelineConfig,
) -> Result<Vec<ManipulationContact>> {
    if !scene.objects().iter().any(|o| o.role == ObjectRole::Manipulable) {
        return Ok(Vec::new());
    }
    let supports = detect_supports(motion, scene, config)?;
    let mut contacts = Vec::new();
    for seg in motion.segments().filter(|s| *s != BodySegment::CoM) {
        let track = motion.trajectory(seg).expect("listed segment");
        let mut open: Option<ManipulationContact> = None;
        for (frame, p) in track.iter().enumerate() {
            let state = probe_where(p, scene, config.contact_epsilon, |r| r == ObjectRole::Manipulable).map(|hit| {
                let dual = supports[frame]
                    .supports
                    .get(&seg)
                    .is_some_and(|s| s.hit.object == hit.object);
                (hit.object, dual)
            });
            match (&mut open, state) {
                (Some(c), Some((object, dual))) if c.object == object && c.dual_use == dual => c.end = frame + 1,
                (current, state) => {
                    contacts.extend(current.take());
                    *current = state.map(|(object, dual_use)| ManipulationContact {
                        start: frame,
                        end: frame + 1,
                        segment: seg,
                        object,
                        dual_use,
                    });
                }
            }
        }
        contacts.extend(open);
    }
    contacts.sort_by(|a, b| (a.start, a.segment, &a.object).cmp(&(b.start, b.segment, &b.object)));
    Ok(contacts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionType {
    /// Changes the environment without changing support.
    I,
    /// Relocates the body.
    II,
    /// Loco-manipulation.
    III,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub contacts: Vec<ManipulationContact>,
    /// Support transitions inside the span.
    pub transitions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpan {
    /// First segment index.
    pub first_segment: usize,
    /// Last segment index, inclusive.
    pub last_segment: usize,
    pub start_frame: usize,
    pub end_frame: usize,
    pub action_type: ActionType,
    pub evidence: Evidence,
}

fn segment_type(report: &SegmentReport, index: usize, contacts: &[ManipulationContact]) -> Option<ActionType> {
    let seg = &report.segments[index];
    let touching: Vec<&ManipulationContact> = contacts.iter().filter(|c| c.overlaps(seg.start, seg.end)).collect();
    if touching.is_empty() {
        return None;
    }
    let spans_transition = |c: &ManipulationContact| {
        report
            .segments
            .iter()
            .filter(|s| c.overlaps(s.start, s.end))
            .nth(1)
            .is_some()
    };
    if touching.iter().any(|c| c.dual_use || spans_transition(c)) {
        Some(ActionType::III)
    } else {
        Some(ActionType::I)
    }
}

/// Partitions the segments of `report` into action spans.
///
/// Adjacent segments without manipulation form one type II span and adjacent
/// type III segments are merged; each type I segment is its own span.
pub fn classify_actions(report: &SegmentReport, contacts: &[ManipulationContact]) -> Vec<ActionSpan> {
    let types: Vec<ActionType> = (0..report.segments.len())
        .map(|i| segment_type(report, i, contacts).unwrap_or(ActionType::II))
        .collect();
    let mut spans: Vec<ActionSpan> = Vec::new();
    for (i, ty) in types.iter().enumerate() {
        match spans.last_mut() {
            Some(last) if last.action_type == *ty && *ty != ActionType::I => last.last_segment = i,
            _ => spans.push(ActionSpan {
                first_segment: i,
                last_segment: i,
                start_frame: 0,
                end_frame: 0,
                action_type: *ty,
                evidence: Evidence {
                    contacts: Vec::new(),
                    transitions: 0,
                },
            }),
        }
    }
    for span in &mut spans {
        span.start_frame = report.segments[span.first_segment].start;
        span.end_frame = report.segments[span.last_segment].end;
        span.evidence.transitions = span.last_segment - span.first_segment;
        span.evidence.contacts = contacts
            .iter()
            .filter(|c| c.overlaps(span.start_frame, span.end_frame))
            .cloned()
            .collect();
    }
    spans
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionsFile {
    pub contacts: Vec<ManipulationContact>,
    pub spans: Vec<ActionSpan>,
}

impl ActionsFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("actions serialize");
        s.push('\n');
        s
    }
}
