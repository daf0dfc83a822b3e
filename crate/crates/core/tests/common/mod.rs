#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::Rng;
use wbpose::contact::{ContactHit, SurfaceHit};
use wbpose::motion_model::{BodySegment, ObjectRole, Primitive, ShapeKind};
use wbpose::segmentation::FrameSupport;
use wbpose::taxonomy::ContactType;
use wbpose::Point3;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"))
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixtures_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

// ---------------------------------------------------------------------------
// Brute-force segmentation oracle

pub type PairSet = BTreeSet<(BodySegment, String)>;

/// Indices where the support set differs from the previous frame.
pub fn brute_force_boundaries(sets: &[PairSet]) -> Vec<usize> {
    (1..sets.len()).filter(|&i| sets[i] != sets[i - 1]).collect()
}

fn contact_for(seg: BodySegment) -> ContactType {
    match seg {
        BodySegment::RightHand | BodySegment::LeftHand => ContactType::Palm,
        _ => ContactType::Foot,
    }
}

pub fn frames_from_sets(sets: &[PairSet]) -> Vec<FrameSupport> {
    sets.iter()
        .enumerate()
        .map(|(frame, set)| FrameSupport {
            frame,
            supports: set
                .iter()
                .map(|(seg, obj)| {
                    let hit = SurfaceHit {
                        object: obj.clone(),
                        object_index: 0,
                        role: ObjectRole::Environment,
                        shape: ShapeKind::Plane,
                        distance: 0.0,
                        closest_point: [0.0; 3],
                        normal: [0.0, 0.0, 1.0],
                    };
                    (
                        *seg,
                        ContactHit {
                            hit,
                            contact_type: contact_for(*seg),
                        },
                    )
                })
                .collect(),
        })
        .collect()
}

/// Random toggle sequence: each end-effector flips on/off or switches object
/// with small probability per frame.
pub fn random_support_sequence<R: Rng>(rng: &mut R, frames: usize) -> Vec<PairSet> {
    let objects = ["floor", "stair", "table"];
    let mut state: Vec<Option<&str>> = vec![None; 4];
    let mut out = Vec::with_capacity(frames);
    let p_change = rng.random_range(0.02..0.3);
    for _ in 0..frames {
        for s in state.iter_mut() {
            if rng.random_bool(p_change) {
                *s = if rng.random_bool(0.4) {
                    None
                } else {
                    Some(objects[rng.random_range(0..objects.len())])
                };
            }
        }
        out.push(
            BodySegment::END_EFFECTORS
                .iter()
                .zip(&state)
                .filter_map(|(seg, o)| o.map(|o| (*seg, o.to_string())))
                .collect(),
        );
    }
    out
}

// ---------------------------------------------------------------------------
// Dense-sampling geometry oracle
//
// Each primitive is described as a union of parametric surface patches. The
// oracle samples every patch on a grid, then refines the best sample with a
// shrinking pattern search in parameter space.

type Vec3 = [f64; 3];

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}
fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}
fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}
fn unit(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// Rotates `v` by the unit quaternion `[w, x, y, z]`.
pub fn rotate(q: [f64; 4], v: Vec3) -> Vec3 {
    let u = [q[1], q[2], q[3]];
    let t = scale(cross(u, v), 2.0);
    add(add(v, scale(t, q[0])), cross(u, t))
}

fn conj(q: [f64; 4]) -> [f64; 4] {
    [q[0], -q[1], -q[2], -q[3]]
}

/// Two unit vectors spanning the plane orthogonal to `n`.
fn tangents(n: Vec3) -> (Vec3, Vec3) {
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let t1 = unit(cross(n, helper));
    (t1, cross(n, t1))
}

struct Patch {
    u: (f64, f64),
    v: (f64, f64),
    f: Box<dyn Fn(f64, f64) -> Vec3>,
}

fn sphere_patch(c: Vec3, r: f64) -> Patch {
    Patch {
        u: (0.0, std::f64::consts::PI),
        v: (0.0, 2.0 * std::f64::consts::PI),
        f: Box::new(move |t, p| add(c, scale([t.sin() * p.cos(), t.sin() * p.sin(), t.cos()], r))),
    }
}

fn patches(primitive: &Primitive, query: Vec3) -> Vec<Patch> {
    match primitive {
        Primitive::Plane { point, normal } => {
            let (t1, t2) = tangents(*normal);
            let o = *point;
            let reach = norm(sub(query, o)) + 1.0;
            vec![Patch {
                u: (-reach, reach),
                v: (-reach, reach),
                f: Box::new(move |a, b| add(o, add(scale(t1, a), scale(t2, b)))),
            }]
        }
        Primitive::Sphere { center, radius } => vec![sphere_patch(*center, *radius)],
        Primitive::Capsule { p0, p1, radius } => {
            let (a, b, r) = (*p0, *p1, *radius);
            let axis = sub(b, a);
            let mut out = vec![sphere_patch(a, r), sphere_patch(b, r)];
            if norm(axis) > 0.0 {
                let (t1, t2) = tangents(unit(axis));
                out.push(Patch {
                    u: (0.0, 1.0),
                    v: (0.0, 2.0 * std::f64::consts::PI),
                    f: Box::new(move |s, phi| {
                        add(add(a, scale(axis, s)), add(scale(t1, r * phi.cos()), scale(t2, r * phi.sin())))
                    }),
                });
            }
            out
        }
        Primitive::Box {
            center,
            half_extents: h,
            orientation: q,
        } => {
            let (c, h, q) = (*center, *h, *q);
            let mut out = Vec::new();
            for axis in 0..3 {
                let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
                for sign in [-1.0, 1.0] {
                    out.push(Patch {
                        u: (-h[i], h[i]),
                        v: (-h[j], h[j]),
                        f: Box::new(move |a, b| {
                            let mut local = [0.0; 3];
                            local[axis] = sign * h[axis];
                            local[i] = a;
                            local[j] = b;
                            add(c, rotate(q, local))
                        }),
                    });
                }
            }
            out
        }
    }
}

/// Membership by definition of each solid.
fn inside(primitive: &Primitive, p: Vec3) -> bool {
    match primitive {
        Primitive::Plane { point, normal } => dot(sub(p, *point), *normal) <= 0.0,
        Primitive::Sphere { center, radius } => norm(sub(p, *center)) <= *radius,
        Primitive::Capsule { p0, p1, radius } => {
            // sample the axis densely
            (0..=2000).any(|k| {
                let s = k as f64 / 2000.0;
                norm(sub(p, add(*p0, scale(sub(*p1, *p0), s)))) <= *radius
            })
        }
        Primitive::Box {
            center,
            half_extents,
            orientation,
        } => {
            let local = rotate(conj(*orientation), sub(p, *center));
            (0..3).all(|k| local[k].abs() <= half_extents[k])
        }
    }
}

/// Distance from `p` to the primitive by dense sampling (about 10^4 samples)
/// plus local refinement.
pub fn sampled_distance(p: Point3, primitive: &Primitive) -> f64 {
    if inside(primitive, p) {
        return 0.0;
    }
    let ps = patches(primitive, p);
    let per_patch = 10_000 / ps.len();
    let side = (per_patch as f64).sqrt().ceil() as usize;
    let mut best = f64::INFINITY;
    for patch in &ps {
        let (du, dv) = (patch.u.1 - patch.u.0, patch.v.1 - patch.v.0);
        let dist = |u: f64, v: f64| norm(sub((patch.f)(u, v), p));
        let mut arg = (patch.u.0, patch.v.0);
        let mut local = f64::INFINITY;
        for a in 0..=side {
            for b in 0..=side {
                let u = patch.u.0 + du * a as f64 / side as f64;
                let v = patch.v.0 + dv * b as f64 / side as f64;
                let d = dist(u, v);
                if d < local {
                    local = d;
                    arg = (u, v);
                }
            }
        }
        let (mut su, mut sv) = (du / side as f64, dv / side as f64);
        while su > 1e-9 * du.max(1.0) || sv > 1e-9 * dv.max(1.0) {
            let mut moved = false;
            for (eu, ev) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
                let u = (arg.0 + eu * su).clamp(patch.u.0, patch.u.1);
                let v = (arg.1 + ev * sv).clamp(patch.v.0, patch.v.1);
                let d = dist(u, v);
                if d < local {
                    local = d;
                    arg = (u, v);
                    moved = true;
                }
            }
            if !moved {
                su /= 2.0;
                sv /= 2.0;
            }
        }
        best = best.min(local);
    }
    best
}

fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n = norm(v);
        if n > 0.1 && n <= 1.0 {
            return scale(v, 1.0 / n);
        }
    }
}

fn random_point<R: Rng>(rng: &mut R, extent: f64) -> Vec3 {
    [0, 1, 2].map(|_| rng.random_range(-extent..extent))
}

pub fn random_quaternion<R: Rng>(rng: &mut R) -> [f64; 4] {
    loop {
        let q: [f64; 4] = [0, 1, 2, 3].map(|_| rng.random_range(-1.0..1.0));
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return q.map(|x| x / n);
        }
    }
}

pub fn random_primitive<R: Rng>(rng: &mut R, kind: ShapeKind) -> Primitive {
    match kind {
        ShapeKind::Plane => Primitive::Plane {
            point: random_point(rng, 1.0),
            normal: random_unit(rng),
        },
        ShapeKind::Sphere => Primitive::Sphere {
            center: random_point(rng, 1.0),
            radius: rng.random_range(0.02..0.6),
        },
        ShapeKind::Capsule => Primitive::Capsule {
            p0: random_point(rng, 1.0),
            p1: random_point(rng, 1.0),
            radius: rng.random_range(0.01..0.3),
        },
        ShapeKind::Box => Primitive::Box {
            center: random_point(rng, 1.0),
            half_extents: [0, 1, 2].map(|_| rng.random_range(0.02..0.6)),
            orientation: random_quaternion(rng),
        },
    }
}

pub fn random_query<R: Rng>(rng: &mut R) -> Point3 {
    random_point(rng, 1.8)
}

/// Query point outside the solid, so the distance is non-trivial.
pub fn outside_query<R: Rng>(rng: &mut R, primitive: &Primitive) -> Point3 {
    loop {
        let q = random_query(rng);
        if !inside(primitive, q) {
            return q;
        }
    }
}

pub fn is_inside(primitive: &Primitive, p: Point3) -> bool {
    inside(primitive, p)
}
