//! Point-to-primitive proximity queries and contact-type inference.

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::motion_model::{BodySegment, ObjectRole, Primitive, Scene, ShapeKind};
use crate::taxonomy::ContactType;
use crate::Point3;

pub const DEFAULT_CONTACT_EPSILON: f64 = 0.02;

#[derive(Debug, Error, PartialEq)]
pub enum ContactError {
    #[error("segment {0} cannot provide a support contact")]
    UnknownSegment(String),
    #[error("contact epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
}

/// Closest surface point of a primitive, with the outward normal there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    /// Unsigned distance; zero for points inside a solid.
    pub distance: f64,
    pub closest_point: Point3,
    pub normal: Point3,
}

fn v(p: &Point3) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

fn arr(v: &Vector3<f64>) -> Point3 {
    [v.x, v.y, v.z]
}

/// Unit vector orthogonal to `axis`, preferring the world +z direction.
fn perpendicular(axis: &Vector3<f64>) -> Vector3<f64> {
    let z = Vector3::z();
    let candidate = if axis.cross(&z).norm() > 1e-9 { z } else { Vector3::x() };
    (candidate - axis * candidate.dot(axis)).normalize()
}

/// Closest point on segment `[a, b]` to `p`.
fn closest_on_segment(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return *a;
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

/// Surface query for a shape made of all points within `radius` of `core`,
/// where `core` is the core point nearest to `p`.
fn rounded(p: &Vector3<f64>, core: Vector3<f64>, radius: f64, fallback: Vector3<f64>) -> SurfacePoint {
    let d = p - core;
    let len = d.norm();
    let dir = if len > 0.0 { d / len } else { fallback };
    SurfacePoint {
        distance: (len - radius).max(0.0),
        closest_point: arr(&(core + dir * radius)),
        normal: arr(&dir),
    }
}

pub fn distance_to(point: &Point3, primitive: &Primitive) -> SurfacePoint {
    let p = v(point);
    match primitive {
        Primitive::Plane { point: origin, normal } => {
            let n = v(normal).normalize();
            let s = (p - v(origin)).dot(&n);
            SurfacePoint {
                distance: s.max(0.0),
                closest_point: arr(&(p - n * s)),
                normal: arr(&n),
            }
        }
        Primitive::Sphere { center, radius } => rounded(&p, v(center), *radius, Vector3::z()),
        Primitive::Capsule { p0, p1, radius } => {
            let (a, b) = (v(p0), v(p1));
            let axis = b - a;
            let fallback = if axis.norm() > 0.0 {
                perpendicular(&axis.normalize())
            } else {
                Vector3::z()
            };
            rounded(&p, closest_on_segment(&p, &a, &b), *radius, fallback)
        }
        Primitive::Box {
            center,
            half_extents,
            orientation,
        } => {
            let [w, x, y, z] = *orientation;
            let rot = UnitQuaternion::from_quaternion(Quaternion::new(w, x, y, z));
            let c = v(center);
            let h = v(half_extents);
            let local = rot.inverse_transform_vector(&(p - c));
            let clamped = Vector3::new(
                local.x.clamp(-h.x, h.x),
                local.y.clamp(-h.y, h.y),
                local.z.clamp(-h.z, h.z),
            );
            let outside = local - clamped;
            let (surface, n_local, distance) = if outside.norm() > 0.0 {
                (clamped, outside.normalize(), outside.norm())
            } else {
                // inside: push out through the nearest face
                let gaps = h - local.abs();
                let axis = gaps.imin();
                let sign = if local[axis] >= 0.0 { 1.0 } else { -1.0 };
                let mut surface = local;
                surface[axis] = sign * h[axis];
                let mut n = Vector3::zeros();
                n[axis] = sign;
                (surface, n, 0.0)
            };
            SurfacePoint {
                distance,
                closest_point: arr(&(c + rot.transform_vector(&surface))),
                normal: arr(&rot.transform_vector(&n_local)),
            }
        }
    }
}

/// Nearest scene object within the contact tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceHit {
    pub object: String,
    pub object_index: usize,
    pub role: ObjectRole,
    pub shape: ShapeKind,
    pub distance: f64,
    pub closest_point: Point3,
    pub normal: Point3,
}

/// Probes every object; returns the closest one within `epsilon`.
/// Ties go to the object declared first.
pub fn probe(point: &Point3, scene: &Scene, epsilon: f64) -> Option<SurfaceHit> {
    probe_where(point, scene, epsilon, |_| true)
}

pub fn probe_where<F>(point: &Point3, scene: &Scene, epsilon: f64, accept: F) -> Option<SurfaceHit>
where
    F: Fn(ObjectRole) -> bool,
{
    let mut best: Option<(usize, SurfacePoint)> = None;
    for (i, obj) in scene.objects().iter().enumerate() {
        if !accept(obj.role) {
            continue;
        }
        let sp = distance_to(point, &obj.shape);
        if best.as_ref().is_none_or(|(_, b)| sp.distance < b.distance) {
            best = Some((i, sp));
        }
    }
    let (i, sp) = best?;
    if sp.distance > epsilon {
        return None;
    }
    let obj = &scene.objects()[i];
    Some(SurfaceHit {
        object: obj.name.clone(),
        object_index: i,
        role: obj.role,
        shape: obj.shape.kind(),
        distance: sp.distance,
        closest_point: sp.closest_point,
        normal: sp.normal,
    })
}

/// Feet give foot supports and knees knee supports; a hand holds a capsule
/// (a graspable bar) and rests its palm on anything else.
pub fn infer_contact_type(segment: BodySegment, hit: &SurfaceHit) -> Result<ContactType, ContactError> {
    match segment {
        BodySegment::RightFoot | BodySegment::LeftFoot => Ok(ContactType::Foot),
        BodySegment::RightKnee | BodySegment::LeftKnee => Ok(ContactType::Knee),
        BodySegment::RightHand | BodySegment::LeftHand => Ok(if hit.shape == ShapeKind::Capsule {
            ContactType::Hold
        } else {
            ContactType::Palm
        }),
        BodySegment::Torso | BodySegment::CoM => Err(ContactError::UnknownSegment(segment.to_string())),
    }
}

/// A validated surface hit together with the support type it implies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactHit {
    #[serde(flatten)]
    pub hit: SurfaceHit,
    pub contact_type: ContactType,
}

impl ContactHit {
    pub fn new(segment: BodySegment, hit: SurfaceHit) -> Result<Self, ContactError> {
        let contact_type = infer_contact_type(segment, &hit)?;
        Ok(ContactHit { hit, contact_type })
    }
}
