//! Motion and scene ingestion, plus the contact and pose-instance types.

mod motion;
mod scene;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use motion::{parse_motion, BodySegment, MotionSequence, MIN_FRAMES};
pub use scene::{parse_scene, ObjectRole, Primitive, Scene, SceneObject, ShapeKind, UNIT_TOLERANCE};

use crate::taxonomy::{ClassId, ContactModel, ContactType, TaxonomyError, TaxonomyGraph};
use crate::Point3;

#[derive(Debug, Error)]
pub enum MotionError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("trajectory `{name}` has {found} frames, expected {expected}")]
    LengthMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("trajectory `{name}` has a non-finite coordinate at frame {frame}")]
    NonFinite { name: String, frame: usize },
    #[error("frame rate must be positive and finite, got {0}")]
    InvalidFrameRate(f64),
    #[error("motion needs at least {min} frames, got {0}", min = MIN_FRAMES)]
    TooFewFrames(usize),
    #[error("unknown body segment `{0}`")]
    UnknownSegment(String),
    #[error("duplicate scene object name `{0}`")]
    DuplicateName(String),
    #[error("invalid primitive for `{name}`: {reason}")]
    InvalidPrimitive { name: String, reason: String },
    #[error("contact normal must be a unit vector, got length {0}")]
    NonUnitNormal(f64),
    #[error("class {class_id} has {expected} supports but {found} contacts were given")]
    ContactCount {
        class_id: String,
        expected: usize,
        found: usize,
    },
    #[error("contact models {found:?} do not match class {class_id} ({expected:?})")]
    ContactModels {
        class_id: String,
        expected: Vec<ContactModel>,
        found: Vec<ContactModel>,
    },
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
}

impl MotionError {
    fn from_json(e: serde_json::Error) -> Self {
        match e.classify() {
            serde_json::error::Category::Data => MotionError::Schema(e.to_string()),
            _ => MotionError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
        }
    }
}

/// A single contact: link, contact model, location and surface normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub link: BodySegment,
    pub model: ContactModel,
    pub position: Point3,
    pub normal: Point3,
}

impl Contact {
    /// The contact model follows from the support type.
    pub fn new(
        link: BodySegment,
        contact_type: ContactType,
        position: Point3,
        normal: Point3,
    ) -> Result<Self, MotionError> {
        let len = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !len.is_finite() || (len - 1.0).abs() > UNIT_TOLERANCE {
            return Err(MotionError::NonUnitNormal(len));
        }
        Ok(Contact {
            link,
            model: contact_type.model(),
            position,
            normal,
        })
    }
}

/// Centre of mass as consumed from the motion data; never computed here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComEstimate {
    Known(Point3),
    Unknown,
}

/// Instantiation of a taxonomy class: id, CoM, contacts, and neighbour classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportPoseInstance {
    pub class_id: ClassId,
    pub com: ComEstimate,
    pub contacts: Vec<Contact>,
    pub neighbor_ids: Vec<ClassId>,
}

pub fn instantiate_pose(
    class_id: &str,
    com: ComEstimate,
    contacts: Vec<Contact>,
    graph: &TaxonomyGraph,
) -> Result<SupportPoseInstance, MotionError> {
    let id: ClassId = class_id.parse()?;
    if !graph.contains(&id) {
        return Err(TaxonomyError::UnknownId(class_id.to_string()).into());
    }
    let expected = graph.support_count(&id)?;
    if contacts.len() != expected {
        return Err(MotionError::ContactCount {
            class_id: class_id.to_string(),
            expected,
            found: contacts.len(),
        });
    }
    if let Some(class) = graph.class(&id) {
        let mut want: Vec<ContactModel> = class.spec.entries().iter().map(|(_, c)| c.model()).collect();
        if class.spec.torso_contact() {
            want.push(ContactModel::Plane);
        }
        want.sort();
        let mut got: Vec<ContactModel> = contacts.iter().map(|c| c.model).collect();
        got.sort();
        if want != got {
            return Err(MotionError::ContactModels {
                class_id: class_id.to_string(),
                expected: want,
                found: got,
            });
        }
    }
    Ok(SupportPoseInstance {
        neighbor_ids: graph.neighbors_of(&id)?,
        class_id: id,
        com,
        contacts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn track(n: usize, z: f64) -> Vec<Point3> {
        (0..n).map(|i| [i as f64 * 0.01, 0.0, z]).collect()
    }

    fn motion_json(lens: [usize; 4], with_right_foot: bool) -> String {
        let names = ["RightFoot", "LeftFoot", "RightHand", "LeftHand"];
        let mut map = serde_json::Map::new();
        for (name, n) in names.iter().zip(lens) {
            if *name == "RightFoot" && !with_right_foot {
                continue;
            }
            map.insert(name.to_string(), serde_json::to_value(track(n, 0.0)).unwrap());
        }
        serde_json::json!({"frame_rate": 100.0, "trajectories": map}).to_string()
    }

    #[test]
    fn parse_valid_motion() {
        let m = parse_motion(&motion_json([550; 4], true)).unwrap();
        assert_eq!(m.frame_count(), 550);
        assert_eq!(m.frame_rate(), 100.0);
        assert!((m.duration() - 5.5).abs() < 1e-12);
        assert_eq!(m.com_at(3), ComEstimate::Unknown);
    }

    #[test]
    fn short_left_hand_is_length_mismatch() {
        let err = parse_motion(&motion_json([550, 550, 550, 549], true)).unwrap_err();
        match err {
            MotionError::LengthMismatch { name, expected, found } => {
                assert_eq!((name.as_str(), expected, found), ("LeftHand", 550, 549))
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_right_foot_lists_required_names() {
        let err = parse_motion(&motion_json([10; 4], false)).unwrap_err();
        let MotionError::Schema(msg) = err else { panic!("{err}") };
        for name in ["RightFoot", "LeftFoot", "RightHand", "LeftHand"] {
            assert!(msg.contains(name), "{msg}");
        }
    }

    #[test]
    fn unknown_trajectory_rejected() {
        let s = r#"{"frame_rate": 100, "trajectories": {"Tail": [[0,0,0],[0,0,0]]}}"#;
        assert!(matches!(parse_motion(s), Err(MotionError::Schema(_))));
    }

    #[test]
    fn non_finite_reports_frame() {
        let mut t = BTreeMap::new();
        for seg in BodySegment::END_EFFECTORS {
            t.insert(seg, track(5, 0.0));
        }
        t.get_mut(&BodySegment::LeftFoot).unwrap()[3][1] = f64::NAN;
        match MotionSequence::new(100.0, t).unwrap_err() {
            MotionError::NonFinite { name, frame } => assert_eq!((name.as_str(), frame), ("LeftFoot", 3)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn com_falls_back_to_torso() {
        let mut t = BTreeMap::new();
        for seg in BodySegment::END_EFFECTORS {
            t.insert(seg, track(3, 0.0));
        }
        t.insert(BodySegment::Torso, track(3, 1.2));
        let m = MotionSequence::new(50.0, t.clone()).unwrap();
        assert_eq!(m.com_at(1), ComEstimate::Known([0.01, 0.0, 1.2]));
        t.insert(BodySegment::CoM, track(3, 0.9));
        let m = MotionSequence::new(50.0, t).unwrap();
        assert_eq!(m.com_at(1), ComEstimate::Known([0.01, 0.0, 0.9]));
    }

    const STAIR_SCENE: &str = r#"{"objects": [
        {"name": "floor", "role": "environment", "shape": {"type": "plane", "point": [0,0,0], "normal": [0,0,1]}},
        {"name": "stair1", "role": "environment", "shape": {"type": "box", "center": [0.44,0,0.085], "half_extents": [0.14,0.6,0.085]}},
        {"name": "stair2", "role": "environment", "shape": {"type": "box", "center": [0.72,0,0.17], "half_extents": [0.14,0.6,0.17]}},
        {"name": "handle", "role": "environment", "shape": {"type": "capsule", "p0": [0,-0.45,0.9], "p1": [1.2,-0.45,1.6], "radius": 0.02}}
    ]}"#;

    #[test]
    fn parse_stair_scene() {
        let scene = parse_scene(STAIR_SCENE).unwrap();
        assert_eq!(scene.objects().len(), 4);
        assert!(scene.objects().iter().all(|o| o.role == ObjectRole::Environment));
        assert_eq!(scene.object("handle").unwrap().shape.kind(), ShapeKind::Capsule);
    }

    #[test]
    fn zero_radius_sphere_rejected() {
        let s = r#"{"objects": [{"name": "ball", "role": "manipulable", "shape": {"type": "sphere", "center": [0,0,0], "radius": 0}}]}"#;
        assert!(matches!(parse_scene(s), Err(MotionError::InvalidPrimitive { .. })));
    }

    #[test]
    fn duplicate_object_name_rejected() {
        let s = r#"{"objects": [
            {"name": "floor", "role": "environment", "shape": {"type": "plane", "point": [0,0,0], "normal": [0,0,1]}},
            {"name": "floor", "role": "environment", "shape": {"type": "plane", "point": [0,0,1], "normal": [0,0,1]}}]}"#;
        match parse_scene(s) {
            Err(MotionError::DuplicateName(n)) => assert_eq!(n, "floor"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_unit_plane_normal_rejected() {
        let s = r#"{"objects": [{"name": "floor", "role": "environment", "shape": {"type": "plane", "point": [0,0,0], "normal": [0,0,2]}}]}"#;
        assert!(parse_scene(s).is_err());
    }

    fn foot(link: BodySegment) -> Contact {
        Contact::new(link, ContactType::Foot, [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn instantiate_double_support() {
        let g = TaxonomyGraph::builtin();
        let p = ComEstimate::Known([0.0, 0.0, 0.9]);
        let inst = instantiate_pose(
            "2.3",
            p,
            vec![foot(BodySegment::RightFoot), foot(BodySegment::LeftFoot)],
            g,
        )
        .unwrap();
        assert_eq!(inst.neighbor_ids, g.neighbors("2.3").unwrap());
        assert!(inst.contacts.iter().all(|c| c.model == ContactModel::Plane));
    }

    #[test]
    fn instantiate_count_mismatch() {
        let g = TaxonomyGraph::builtin();
        let err = instantiate_pose("2.3", ComEstimate::Unknown, vec![foot(BodySegment::RightFoot)], g)
            .unwrap_err();
        assert!(matches!(err, MotionError::ContactCount { expected: 2, found: 1, .. }));
        let err = instantiate_pose("7.7", ComEstimate::Unknown, vec![], g).unwrap_err();
        assert!(matches!(err, MotionError::Taxonomy(TaxonomyError::UnknownId(_))));
    }

    #[test]
    fn instantiate_flight() {
        let g = TaxonomyGraph::builtin();
        let inst = instantiate_pose("0.0", ComEstimate::Known([0.0; 3]), vec![], g).unwrap();
        let single: Vec<ClassId> = g
            .classes()
            .filter(|c| c.category != crate::taxonomy::Category::Resting && c.spec.len() == 1)
            .map(|c| c.id.clone())
            .collect();
        assert_eq!(inst.neighbor_ids, single);
    }

    #[test]
    fn instantiate_rejects_wrong_models() {
        let g = TaxonomyGraph::builtin();
        let hold = Contact::new(BodySegment::RightHand, ContactType::Hold, [0.0; 3], [1.0, 0.0, 0.0]).unwrap();
        let err = instantiate_pose("2.3", ComEstimate::Unknown, vec![foot(BodySegment::RightFoot), hold], g);
        assert!(matches!(err, Err(MotionError::ContactModels { .. })));
    }

    #[test]
    fn contact_requires_unit_normal() {
        assert!(Contact::new(BodySegment::LeftFoot, ContactType::Foot, [0.0; 3], [0.0, 0.0, 0.5]).is_err());
    }
}
