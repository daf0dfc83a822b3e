use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::MotionError;
use crate::Point3;

pub const UNIT_TOLERANCE: f64 = 1e-6;

/// Geometric primitive in world coordinates.
///
/// Planes bound a half-space: points behind the normal count as inside.
/// Box orientation is a unit quaternion `[w, x, y, z]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Primitive {
    Plane {
        point: Point3,
        normal: Point3,
    },
    Box {
        center: Point3,
        half_extents: Point3,
        #[serde(default = "identity_quaternion")]
        orientation: [f64; 4],
    },
    Sphere {
        center: Point3,
        radius: f64,
    },
    Capsule {
        p0: Point3,
        p1: Point3,
        radius: f64,
    },
}

fn identity_quaternion() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl Primitive {
    pub fn kind(&self) -> ShapeKind {
        match self {
            Primitive::Plane { .. } => ShapeKind::Plane,
            Primitive::Box { .. } => ShapeKind::Box,
            Primitive::Sphere { .. } => ShapeKind::Sphere,
            Primitive::Capsule { .. } => ShapeKind::Capsule,
        }
    }

    pub fn check(&self) -> Result<(), String> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let unit = |v: &[f64], what: &str| {
            if (norm(v) - 1.0).abs() > UNIT_TOLERANCE {
                Err(format!("{what} must have unit length, got {}", norm(v)))
            } else {
                Ok(())
            }
        };
        match self {
            Primitive::Plane { point, normal } => {
                if !finite(point) || !finite(normal) {
                    return Err("non-finite plane parameters".into());
                }
                unit(normal, "plane normal")
            }
            Primitive::Box {
                center,
                half_extents,
                orientation,
            } => {
                if !finite(center) || !finite(half_extents) || !finite(orientation) {
                    return Err("non-finite box parameters".into());
                }
                if half_extents.iter().any(|h| *h <= 0.0) {
                    return Err("box half extents must be positive".into());
                }
                unit(orientation, "box orientation quaternion")
            }
            Primitive::Sphere { center, radius } => {
                if !finite(center) || !radius.is_finite() {
                    return Err("non-finite sphere parameters".into());
                }
                if *radius <= 0.0 {
                    return Err(format!("sphere radius must be positive, got {radius}"));
                }
                Ok(())
            }
            Primitive::Capsule { p0, p1, radius } => {
                if !finite(p0) || !finite(p1) || !radius.is_finite() {
                    return Err("non-finite capsule parameters".into());
                }
                if *radius <= 0.0 {
                    return Err(format!("capsule radius must be positive, got {radius}"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Plane,
    Box,
    Sphere,
    Capsule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectRole {
    /// Static surroundings available for support.
    Environment,
    /// Objects the subject may act on.
    Manipulable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneObject {
    pub name: String,
    pub role: ObjectRole,
    pub shape: Primitive,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub objects: Vec<SceneObject>,
}

impl Scene {
    pub fn new(objects: Vec<SceneObject>) -> Result<Self, MotionError> {
        let mut seen = BTreeSet::new();
        for obj in &objects {
            if !seen.insert(obj.name.as_str()) {
                return Err(MotionError::DuplicateName(obj.name.clone()));
            }
            obj.shape.check().map_err(|reason| MotionError::InvalidPrimitive {
                name: obj.name.clone(),
                reason,
            })?;
        }
        Ok(Scene { objects })
    }

    pub fn objects(&self) -> &[SceneObject] {
        &self.objects
    }

    pub fn object(&self, name: &str) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Copy of the scene without manipulable objects.
    pub fn environment_only(&self) -> Scene {
        Scene {
            objects: self
                .objects
                .iter()
                .filter(|o| o.role == ObjectRole::Environment)
                .cloned()
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let lines: Vec<String> = self
            .objects
            .iter()
            .map(|o| format!("    {}", serde_json::to_string(o).expect("finite scene")))
            .collect();
        format!("{{\n  \"objects\": [\n{}\n  ]\n}}\n", lines.join(",\n"))
    }
}

pub fn parse_scene(content: &str) -> Result<Scene, MotionError> {
    let raw: Scene = serde_json::from_str(content).map_err(MotionError::from_json)?;
    Scene::new(raw.objects)
}
