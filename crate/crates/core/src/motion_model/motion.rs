use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ComEstimate, MotionError};
use crate::taxonomy::{LimbClass, Side};
use crate::Point3;

/// Tracked body segment. Declaration order fixes the column order of exports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BodySegment {
    RightFoot,
    LeftFoot,
    RightHand,
    LeftHand,
    Torso,
    CoM,
    RightKnee,
    LeftKnee,
}

impl BodySegment {
    pub const ALL: [BodySegment; 8] = [
        BodySegment::RightFoot,
        BodySegment::LeftFoot,
        BodySegment::RightHand,
        BodySegment::LeftHand,
        BodySegment::Torso,
        BodySegment::CoM,
        BodySegment::RightKnee,
        BodySegment::LeftKnee,
    ];

    /// Segments that must be present in every motion file.
    pub const END_EFFECTORS: [BodySegment; 4] = [
        BodySegment::RightFoot,
        BodySegment::LeftFoot,
        BodySegment::RightHand,
        BodySegment::LeftHand,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BodySegment::RightFoot => "RightFoot",
            BodySegment::LeftFoot => "LeftFoot",
            BodySegment::RightHand => "RightHand",
            BodySegment::LeftHand => "LeftHand",
            BodySegment::Torso => "Torso",
            BodySegment::CoM => "CoM",
            BodySegment::RightKnee => "RightKnee",
            BodySegment::LeftKnee => "LeftKnee",
        }
    }

    /// Short label as used in segmentation figures (RF, LF, RH, LH, ...).
    pub fn abbrev(self) -> &'static str {
        match self {
            BodySegment::RightFoot => "RF",
            BodySegment::LeftFoot => "LF",
            BodySegment::RightHand => "RH",
            BodySegment::LeftHand => "LH",
            BodySegment::Torso => "T",
            BodySegment::CoM => "CoM",
            BodySegment::RightKnee => "RK",
            BodySegment::LeftKnee => "LK",
        }
    }

    pub fn is_end_effector(self) -> bool {
        Self::END_EFFECTORS.contains(&self)
    }

    pub fn is_required(self) -> bool {
        self.is_end_effector()
    }

    /// Segments able to provide a limb support (end-effectors and knees).
    pub fn limb(self) -> Option<LimbClass> {
        match self {
            BodySegment::RightFoot
            | BodySegment::LeftFoot
            | BodySegment::RightKnee
            | BodySegment::LeftKnee => Some(LimbClass::Leg),
            BodySegment::RightHand | BodySegment::LeftHand => Some(LimbClass::Arm),
            BodySegment::Torso | BodySegment::CoM => None,
        }
    }

    pub fn side(self) -> Option<Side> {
        match self {
            BodySegment::RightFoot | BodySegment::RightHand | BodySegment::RightKnee => Some(Side::Right),
            BodySegment::LeftFoot | BodySegment::LeftHand | BodySegment::LeftKnee => Some(Side::Left),
            BodySegment::Torso | BodySegment::CoM => None,
        }
    }

    pub fn is_knee(self) -> bool {
        matches!(self, BodySegment::RightKnee | BodySegment::LeftKnee)
    }

    pub fn is_foot(self) -> bool {
        matches!(self, BodySegment::RightFoot | BodySegment::LeftFoot)
    }
}

impl fmt::Display for BodySegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BodySegment {
    type Err = MotionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BodySegment::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| MotionError::UnknownSegment(s.to_string()))
    }
}

/// Named 3D trajectories sampled at a fixed frame rate, in meters and Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionSequence {
    frame_rate: f64,
    frame_count: usize,
    trajectories: BTreeMap<BodySegment, Vec<Point3>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MotionFile {
    frame_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frame_count: Option<usize>,
    trajectories: BTreeMap<String, Vec<Point3>>,
}

pub const MIN_FRAMES: usize = 2;

impl MotionSequence {
    pub fn new(
        frame_rate: f64,
        trajectories: BTreeMap<BodySegment, Vec<Point3>>,
    ) -> Result<Self, MotionError> {
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(MotionError::InvalidFrameRate(frame_rate));
        }
        let missing: Vec<&str> = BodySegment::END_EFFECTORS
            .iter()
            .filter(|s| !trajectories.contains_key(s))
            .map(|s| s.as_str())
            .collect();
        if !missing.is_empty() {
            return Err(MotionError::Schema(format!(
                "missing required trajectories {}; required: RightFoot, LeftFoot, RightHand, LeftHand",
                missing.join(", ")
            )));
        }
        let frame_count = trajectories[&BodySegment::RightFoot].len();
        for (seg, track) in &trajectories {
            if track.len() != frame_count {
                return Err(MotionError::LengthMismatch {
                    name: seg.to_string(),
                    expected: frame_count,
                    found: track.len(),
                });
            }
            if let Some(frame) = track.iter().position(|p| p.iter().any(|v| !v.is_finite())) {
                return Err(MotionError::NonFinite {
                    name: seg.to_string(),
                    frame,
                });
            }
        }
        if frame_count < MIN_FRAMES {
            return Err(MotionError::TooFewFrames(frame_count));
        }
        Ok(Self {
            frame_rate,
            frame_count,
            trajectories,
        })
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn frame_count(&self) -> usize {
        self.frame_count
    }

    pub fn duration(&self) -> f64 {
        self.frame_count as f64 / self.frame_rate
    }

    pub fn trajectory(&self, segment: BodySegment) -> Option<&[Point3]> {
        self.trajectories.get(&segment).map(Vec::as_slice)
    }

    pub fn trajectories(&self) -> &BTreeMap<BodySegment, Vec<Point3>> {
        &self.trajectories
    }

    pub fn segments(&self) -> impl Iterator<Item = BodySegment> + '_ {
        self.trajectories.keys().copied()
    }

    /// CoM at `frame`, falling back to the torso track, else unknown.
    pub fn com_at(&self, frame: usize) -> ComEstimate {
        self.trajectory(BodySegment::CoM)
            .or_else(|| self.trajectory(BodySegment::Torso))
            .and_then(|t| t.get(frame))
            .map(|p| ComEstimate::Known(*p))
            .unwrap_or(ComEstimate::Unknown)
    }

    /// Serialises to the motion file format, one trajectory per line.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!(
            "  \"frame_rate\": {},\n  \"frame_count\": {},\n  \"trajectories\": {{\n",
            serde_json::to_string(&self.frame_rate).expect("finite"),
            self.frame_count
        ));
        let lines: Vec<String> = self
            .trajectories
            .iter()
            .map(|(seg, track)| {
                format!(
                    "    \"{}\": {}",
                    seg.as_str(),
                    serde_json::to_string(track).expect("finite coordinates")
                )
            })
            .collect();
        out.push_str(&lines.join(",\n"));
        out.push_str("\n  }\n}\n");
        out
    }
}

pub fn parse_motion(content: &str) -> Result<MotionSequence, MotionError> {
    let file: MotionFile = serde_json::from_str(content).map_err(MotionError::from_json)?;
    let mut trajectories = BTreeMap::new();
    for (name, track) in file.trajectories {
        let seg: BodySegment = name.parse().map_err(|_| {
            MotionError::Schema(format!(
                "unknown trajectory `{name}`; allowed: {}",
                BodySegment::ALL.map(|s| s.as_str()).join(", ")
            ))
        })?;
        trajectories.insert(seg, track);
    }
    let motion = MotionSequence::new(file.frame_rate, trajectories)?;
    if let Some(declared) = file.frame_count {
        if declared != motion.frame_count {
            return Err(MotionError::LengthMismatch {
                name: "frame_count".into(),
                expected: declared,
                found: motion.frame_count,
            });
        }
    }
    Ok(motion)
}
