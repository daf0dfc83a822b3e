//! Support detection and motion segmentation.
//!
//! A segment is supported at a frame when its filtered speed is below the
//! threshold and its raw position lies within the contact tolerance of a
//! scene object. Consecutive frames with the same set of
//! (segment, object) pairs form one segment, which is then labelled with
//! the taxonomy class of its side-collapsed support multiset.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::contact::{probe, ContactHit, DEFAULT_CONTACT_EPSILON};
use crate::motion_model::{BodySegment, MotionSequence, Scene};
use crate::signal::{FilterSpec, SpeedTrace, DEFAULT_CUTOFF_HZ};
use crate::taxonomy::{ContactType, SupportSpec, TaxonomyError, TaxonomyGraph};
use crate::{Error, Result};

pub const DEFAULT_SPEED_THRESHOLD: f64 = 0.15;
pub const UNCLASSIFIED: &str = "unclassified";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub cutoff_hz: f64,
    /// m/s
    pub speed_threshold: f64,
    /// m
    pub contact_epsilon: f64,
    pub min_segment_frames: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            cutoff_hz: DEFAULT_CUTOFF_HZ,
            speed_threshold: DEFAULT_SPEED_THRESHOLD,
            contact_epsilon: DEFAULT_CONTACT_EPSILON,
            min_segment_frames: 1,
        }
    }
}

impl PipelineConfig {
    pub fn check(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {x}")))
            }
        };
        positive("cutoff_hz", self.cutoff_hz)?;
        positive("speed_threshold", self.speed_threshold)?;
        positive("contact_epsilon", self.contact_epsilon)?;
        if self.min_segment_frames < 1 {
            return Err(Error::Config("min_segment_frames must be at least 1".into()));
        }
        Ok(())
    }

    pub fn filter(&self) -> FilterSpec {
        FilterSpec::new(self.cutoff_hz)
    }
}

/// Confirmed supports at one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSupport {
    pub frame: usize,
    pub supports: BTreeMap<BodySegment, ContactHit>,
}

impl FrameSupport {
    /// The (segment, object) pairs that define segment boundaries.
    pub fn key(&self) -> BTreeSet<(BodySegment, &str)> {
        self.supports
            .iter()
            .map(|(seg, hit)| (*seg, hit.hit.object.as_str()))
            .collect()
    }

    pub fn support_set(&self) -> SupportSet {
        self.supports
            .iter()
            .map(|(seg, hit)| {
                (
                    *seg,
                    SupportEntry {
                        object: hit.hit.object.clone(),
                        contact_type: hit.contact_type,
                    },
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SupportEntry {
    pub object: String,
    pub contact_type: ContactType,
}

pub type SupportSet = BTreeMap<BodySegment, SupportEntry>;

/// Side-collapsed spec of a support set. A knee support on a leg subsumes a
/// foot support on the same leg.
pub fn support_spec(set: &SupportSet) -> std::result::Result<SupportSpec, TaxonomyError> {
    let knee_sides: BTreeSet<_> = set.keys().filter(|s| s.is_knee()).filter_map(|s| s.side()).collect();
    SupportSpec::from_contacts(
        set.iter()
            .filter(|(seg, _)| !(seg.is_foot() && seg.side().is_some_and(|s| knee_sides.contains(&s))))
            .map(|(_, e)| e.contact_type),
        false,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// Inclusive.
    pub start: usize,
    /// Exclusive.
    pub end: usize,
    pub middle: usize,
    pub length: usize,
    pub supports: SupportSet,
    pub class_id: Option<String>,
}

impl Segment {
    pub fn new(start: usize, end: usize, supports: SupportSet) -> Self {
        debug_assert!(start < end);
        Segment {
            start,
            end,
            middle: (start + end - 1) / 2,
            length: end - start,
            supports,
            class_id: None,
        }
    }

    fn extend_to(&mut self, end: usize) {
        self.end = end;
        self.length = self.end - self.start;
        self.middle = (self.start + self.end - 1) / 2;
    }

    fn extend_back_to(&mut self, start: usize) {
        self.start = start;
        self.length = self.end - self.start;
        self.middle = (self.start + self.end - 1) / 2;
    }

    pub fn contains(&self, frame: usize) -> bool {
        (self.start..self.end).contains(&frame)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningKind {
    /// More than one support changed at a single boundary.
    MultiChange,
    /// A segment shorter than `min_segment_frames` was merged away.
    ShortSegment,
    /// The support set matches no taxonomy class.
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub kind: WarningKind,
    pub frame: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub config: PipelineConfig,
    pub segments: Vec<Segment>,
    pub warnings: Vec<Warning>,
}

impl SegmentReport {
    pub fn frame_count(&self) -> usize {
        self.segments.last().map(|s| s.end).unwrap_or(0)
    }

    pub fn segment_at(&self, frame: usize) -> Option<usize> {
        self.segments.iter().position(|s| s.contains(frame))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(content: &str) -> Result<Self> {
        serde_json::from_str(content).map_err(|e| Error::Config(format!("report file: {e}")))
    }
}

/// Segments that take part in support detection: the four end-effectors,
/// plus the knees when the motion tracks them.
pub fn support_candidates(motion: &MotionSequence) -> Vec<BodySegment> {
    BodySegment::ALL
        .into_iter()
        .filter(|s| s.limb().is_some() && motion.trajectory(*s).is_some())
        .collect()
}

/// Per-frame support sets from speed hypotheses validated by contact probes.
pub fn detect_supports(motion: &MotionSequence, scene: &Scene, config: &PipelineConfig) -> Result<Vec<FrameSupport>> {
    config.check()?;
    let candidates = support_candidates(motion);
    let speeds = SpeedTrace::compute(motion, &config.filter(), &candidates)?;
    let n = motion.frame_count();

    let decide = |frame: usize| -> Result<BTreeMap<BodySegment, ContactHit>> {
        let mut supports = BTreeMap::new();
        for &seg in &candidates {
            let speed = speeds.get(seg).expect("speed computed for every candidate")[frame];
            if speed >= config.speed_threshold {
                continue;
            }
            let position = motion.trajectory(seg).expect("candidate is tracked")[frame];
            if let Some(hit) = probe(&position, scene, config.contact_epsilon) {
                supports.insert(seg, ContactHit::new(seg, hit)?);
            }
        }
        Ok(supports)
    };

    let mut interior: Vec<BTreeMap<BodySegment, ContactHit>> = Vec::with_capacity(n);
    for frame in 0..n {
        // end frames reuse the nearest interior decision
        if n >= 3 && (frame == 0 || frame == n - 1) {
            interior.push(BTreeMap::new());
        } else {
            interior.push(decide(frame)?);
        }
    }
    if n >= 3 {
        interior[0] = interior[1].clone();
        interior[n - 1] = interior[n - 2].clone();
    }
    Ok(interior
        .into_iter()
        .enumerate()
        .map(|(frame, supports)| FrameSupport { frame, supports })
        .collect())
}

fn changed_segments(a: &SupportSet, b: &SupportSet) -> Vec<BodySegment> {
    let keys: BTreeSet<_> = a.keys().chain(b.keys()).copied().collect();
    keys.into_iter().filter(|k| a.get(k) != b.get(k)).collect()
}

/// Splits frames into maximal runs of identical support sets.
///
/// With `min_segment_frames > 1`, shorter runs are absorbed by the preceding
/// segment (the following one for a short first run), with a warning.
pub fn segment(frames: &[FrameSupport], config: &PipelineConfig) -> SegmentReport {
    let mut warnings = Vec::new();
    let mut runs: Vec<Segment> = Vec::new();
    let mut start = 0;
    for i in 1..=frames.len() {
        if i == frames.len() || frames[i].key() != frames[i - 1].key() {
            runs.push(Segment::new(start, i, frames[start].support_set()));
            start = i;
        }
    }

    let min = config.min_segment_frames.max(1);
    let mut segments: Vec<Segment> = Vec::with_capacity(runs.len());
    for run in runs {
        match segments.last_mut() {
            Some(last) if last.supports == run.supports => last.extend_to(run.end),
            Some(last) if run.length < min => {
                warnings.push(Warning {
                    kind: WarningKind::ShortSegment,
                    frame: run.start,
                    detail: format!(
                        "{}-frame segment [{}, {}) merged into the preceding segment",
                        run.length, run.start, run.end
                    ),
                });
                last.extend_to(run.end);
            }
            _ => segments.push(run),
        }
    }
    if segments.len() > 1 && segments[0].length < min {
        let first = segments.remove(0);
        warnings.push(Warning {
            kind: WarningKind::ShortSegment,
            frame: first.start,
            detail: format!(
                "{}-frame segment [{}, {}) merged into the following segment",
                first.length, first.start, first.end
            ),
        });
        segments[0].extend_back_to(first.start);
    }

    for pair in segments.windows(2) {
        let changed = changed_segments(&pair[0].supports, &pair[1].supports);
        if changed.len() > 1 {
            warnings.push(Warning {
                kind: WarningKind::MultiChange,
                frame: pair[1].start,
                detail: format!(
                    "{} supports changed at once: {}",
                    changed.len(),
                    changed.iter().map(|s| s.abbrev()).collect::<Vec<_>>().join(", ")
                ),
            });
        }
    }
    warnings.sort_by_key(|w| w.frame);

    SegmentReport {
        config: *config,
        segments,
        warnings,
    }
}

/// Assigns each segment its taxonomy class; unknown combinations become
/// `unclassified` with a warning.
pub fn label(mut report: SegmentReport, graph: &TaxonomyGraph) -> SegmentReport {
    let mut extra = Vec::new();
    for seg in &mut report.segments {
        let class = support_spec(&seg.supports).and_then(|spec| graph.classify(&spec));
        seg.class_id = Some(match class {
            Ok(id) => id.to_string(),
            Err(e) => {
                extra.push(Warning {
                    kind: WarningKind::Unclassified,
                    frame: seg.start,
                    detail: e.to_string(),
                });
                UNCLASSIFIED.to_string()
            }
        });
    }
    report.warnings.extend(extra);
    report.warnings.sort_by_key(|w| w.frame);
    report
}

/// Filter, differentiate, threshold, probe, segment and label.
pub fn run_pipeline(
    motion: &MotionSequence,
    scene: &Scene,
    config: &PipelineConfig,
    graph: &TaxonomyGraph,
) -> Result<SegmentReport> {
    let frames = detect_supports(motion, scene, config)?;
    Ok(label(segment(&frames, config), graph))
}
