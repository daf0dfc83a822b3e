//! Synthetic scenarios shipped under `fixtures/`.
//!
//! Each scenario is a keyframed motion with minimum-jerk moves, seeded
//! millimetre noise, and a scene. `expected` is the support-set sequence the
//! scenario was built to produce.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::motion_model::{BodySegment, MotionSequence, ObjectRole, Primitive, Scene, SceneObject};
use crate::Point3;

pub const FRAME_RATE: f64 = 100.0;
/// Standard deviation of the added position noise, m.
pub const NOISE_SD: f64 = 0.001;
/// Height of a resting foot or palm above the surface, m.
const CLEARANCE: f64 = 0.005;

pub type SupportSequence = Vec<Vec<(BodySegment, &'static str)>>;

pub struct Fixture {
    pub name: &'static str,
    pub motion: MotionSequence,
    pub scene: Scene,
    pub expected: SupportSequence,
}

impl Fixture {
    pub fn motion_file(&self) -> String {
        format!("{}.motion.json", self.name)
    }

    pub fn scene_file(&self) -> String {
        format!("{}.scene.json", self.name)
    }
}

struct Move {
    start: usize,
    end: usize,
    to: Point3,
    lift: f64,
}

/// Piecewise trajectory: rest, then minimum-jerk moves with a vertical arc.
struct Track {
    origin: Point3,
    moves: Vec<Move>,
}

fn min_jerk(t: f64) -> f64 {
    t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

impl Track {
    fn at(origin: Point3) -> Self {
        Track {
            origin,
            moves: Vec::new(),
        }
    }

    fn to(mut self, start: usize, end: usize, to: Point3, lift: f64) -> Self {
        debug_assert!(start < end);
        debug_assert!(self.moves.last().is_none_or(|m| m.end <= start));
        self.moves.push(Move { start, end, to, lift });
        self
    }

    fn position(&self, frame: usize) -> Point3 {
        let mut p = self.origin;
        for m in &self.moves {
            if frame >= m.end {
                p = m.to;
                continue;
            }
            if frame > m.start {
                let t = (frame - m.start) as f64 / (m.end - m.start) as f64;
                let s = min_jerk(t);
                let mut q = [0.0; 3];
                for k in 0..3 {
                    q[k] = p[k] + (m.to[k] - p[k]) * s;
                }
                q[2] += m.lift * (std::f64::consts::PI * t).sin();
                return q;
            }
            break;
        }
        p
    }

    fn sample(&self, n: usize) -> Vec<Point3> {
        (0..n).map(|f| self.position(f)).collect()
    }
}

fn round(x: f64) -> f64 {
    (x * 1e5).round() / 1e5
}

fn build_motion(n: usize, seed: u64, tracks: Vec<(BodySegment, Track)>) -> MotionSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, NOISE_SD).expect("valid sd");
    let mut clean: BTreeMap<BodySegment, Vec<Point3>> =
        tracks.into_iter().map(|(s, t)| (s, t.sample(n))).collect();
    let rf = &clean[&BodySegment::RightFoot];
    let lf = &clean[&BodySegment::LeftFoot];
    let pelvis: Vec<Point3> = rf
        .iter()
        .zip(lf)
        .map(|(r, l)| [(r[0] + l[0]) / 2.0, (r[1] + l[1]) / 2.0, (r[2] + l[2]) / 2.0])
        .collect();
    clean.insert(BodySegment::CoM, pelvis.iter().map(|p| [p[0], p[1], p[2] + 0.95]).collect());
    clean.insert(BodySegment::Torso, pelvis.iter().map(|p| [p[0], p[1], p[2] + 1.25]).collect());
    let noisy = clean
        .into_iter()
        .map(|(seg, track)| {
            let track = track
                .into_iter()
                .map(|p| p.map(|v| round(v + noise.sample(&mut rng))))
                .collect();
            (seg, track)
        })
        .collect();
    MotionSequence::new(FRAME_RATE, noisy).expect("fixture motion is valid")
}

fn object(name: &str, role: ObjectRole, shape: Primitive) -> SceneObject {
    SceneObject {
        name: name.to_string(),
        role,
        shape,
    }
}

fn floor() -> SceneObject {
    object(
        "floor",
        ObjectRole::Environment,
        Primitive::Plane {
            point: [0.0, 0.0, 0.0],
            normal: [0.0, 0.0, 1.0],
        },
    )
}

fn aabb(name: &str, role: ObjectRole, min: Point3, max: Point3) -> SceneObject {
    object(
        name,
        role,
        Primitive::Box {
            center: std::array::from_fn(|k| round((min[k] + max[k]) / 2.0)),
            half_extents: std::array::from_fn(|k| round((max[k] - min[k]) / 2.0)),
            orientation: [1.0, 0.0, 0.0, 0.0],
        },
    )
}

use BodySegment::{LeftFoot as LF, LeftHand as LH, RightFoot as RF, RightHand as RH};

const STAIR_X0: f64 = 0.3;
const STAIR_RISE: f64 = 0.17;
const STAIR_TREAD: f64 = 0.28;
const HANDLE_Y: f64 = -0.45;
const HANDLE_HEIGHT: f64 = 0.9;
const HANDLE_RADIUS: f64 = 0.02;
/// Hand centre distance from the handle axis while gripping.
const GRIP_OFFSET: f64 = 0.025;

fn stair_foot(step: usize, y: f64) -> Point3 {
    if step == 0 {
        [0.0, y, CLEARANCE]
    } else {
        let x = STAIR_X0 + (step as f64 - 0.5) * STAIR_TREAD;
        [x, y, step as f64 * STAIR_RISE + CLEARANCE]
    }
}

fn handle_z(x: f64) -> f64 {
    HANDLE_HEIGHT + (x - STAIR_X0) * STAIR_RISE / STAIR_TREAD
}

fn grip(x: f64) -> Point3 {
    [x, HANDLE_Y + GRIP_OFFSET, handle_z(x)]
}

fn stair_scene() -> Scene {
    let mut objects = vec![floor()];
    for k in 1..=3 {
        let x0 = STAIR_X0 + (k - 1) as f64 * STAIR_TREAD;
        objects.push(aabb(
            &format!("stair{k}"),
            ObjectRole::Environment,
            [x0, -0.6, 0.0],
            [x0 + STAIR_TREAD, 0.6, k as f64 * STAIR_RISE],
        ));
    }
    let (xa, xb) = (-0.2, 1.4);
    objects.push(object(
        "handle",
        ObjectRole::Environment,
        Primitive::Capsule {
            p0: [xa, HANDLE_Y, round(handle_z(xa))],
            p1: [xb, HANDLE_Y, round(handle_z(xb))],
            radius: HANDLE_RADIUS,
        },
    ));
    Scene::new(objects).expect("stair scene is valid")
}

/// Four steps up three stairs, right hand on the handle during right-foot
/// stances; with `final_hold` the hand also stays on the handle through the
/// last right-foot swing.
fn stair_scenario(name: &'static str, final_hold: bool) -> Fixture {
    let (n, last_swing, release) = if final_hold {
        (550, (435, 490), (525, 548))
    } else {
        (600, (490, 545), (450, 465))
    };
    let rf = Track::at(stair_foot(0, -0.1))
        .to(215, 285, stair_foot(2, -0.1), 0.15)
        .to(last_swing.0, last_swing.1, stair_foot(3, -0.1), 0.1);
    let lf = Track::at(stair_foot(0, 0.1))
        .to(95, 165, stair_foot(1, 0.1), 0.12)
        .to(335, 400, stair_foot(3, 0.1), 0.15);
    let rh = Track::at([0.0, -0.3, 0.85])
        .to(25, 60, grip(0.2), 0.0)
        .to(190, 310, grip(0.75), 0.12)
        .to(release.0, release.1, [1.0, -0.3, 0.55 + 0.85], 0.0);
    let lh = Track::at([0.0, 0.35, 0.85])
        .to(95, 165, [0.2, 0.35, 0.95], 0.0)
        .to(215, 285, [0.55, 0.35, 1.1], 0.0)
        .to(335, 400, [0.85, 0.35, 1.3], 0.0)
        .to(last_swing.0, last_swing.1, [1.0, 0.35, 1.4], 0.0);
    let motion = build_motion(n, if final_hold { 11 } else { 12 }, vec![(RF, rf), (LF, lf), (RH, rh), (LH, lh)]);

    let mut expected: SupportSequence = vec![
        vec![(RF, "floor"), (LF, "floor")],
        vec![(RF, "floor"), (LF, "floor"), (RH, "handle")],
        vec![(RF, "floor"), (RH, "handle")],
        vec![(RF, "floor"), (LF, "stair1"), (RH, "handle")],
        vec![(RF, "floor"), (LF, "stair1")],
        vec![(LF, "stair1")],
        vec![(RF, "stair2"), (LF, "stair1")],
        vec![(RF, "stair2"), (LF, "stair1"), (RH, "handle")],
        vec![(RF, "stair2"), (RH, "handle")],
        vec![(RF, "stair2"), (LF, "stair3"), (RH, "handle")],
    ];
    if final_hold {
        expected.extend([
            vec![(LF, "stair3"), (RH, "handle")],
            vec![(RF, "stair3"), (LF, "stair3"), (RH, "handle")],
            vec![(RF, "stair3"), (LF, "stair3")],
        ]);
    } else {
        expected.extend([
            vec![(RF, "stair2"), (LF, "stair3")],
            vec![(LF, "stair3")],
            vec![(RF, "stair3"), (LF, "stair3")],
        ]);
    }
    Fixture {
        name,
        motion,
        scene: stair_scene(),
        expected,
    }
}

/// 5.5 s stair ascent: four steps, handle holds during right-foot stances and
/// a final left-foot plus hand phase.
pub fn stair_walk() -> Fixture {
    stair_scenario("stair_walk", true)
}

/// Like [`stair_walk`] but the hand lets go before the last right-foot swing,
/// so every handle hold coincides with right-foot support.
pub fn stair_walk_right_holds() -> Fixture {
    stair_scenario("stair_walk_right_holds", false)
}

/// Both palms pressed on a manipulable crate while the feet step in place.
pub fn crate_push() -> Fixture {
    let n = 500;
    let face = 0.4;
    let scene = Scene::new(vec![
        floor(),
        aabb("crate", ObjectRole::Manipulable, [face, -0.35, 0.0], [face + 0.5, 0.35, 0.9]),
    ])
    .expect("crate scene is valid");
    let palm = |y: f64| [face - CLEARANCE, y, 0.8];
    let foot = |x: f64, y: f64| [x, y, CLEARANCE];
    let rf = Track::at(foot(-0.35, -0.12))
        .to(60, 110, foot(-0.25, -0.12), 0.08)
        .to(260, 310, foot(-0.15, -0.12), 0.08);
    let lf = Track::at(foot(-0.35, 0.12))
        .to(160, 210, foot(-0.25, 0.12), 0.08)
        .to(360, 410, foot(-0.15, 0.12), 0.08);
    let motion = build_motion(
        n,
        21,
        vec![(RF, rf), (LF, lf), (RH, Track::at(palm(-0.2))), (LH, Track::at(palm(0.2)))],
    );
    let hands = [(RH, "crate"), (LH, "crate")];
    let with = |feet: &[(BodySegment, &'static str)]| {
        let mut v = feet.to_vec();
        v.extend(hands);
        v
    };
    let both = [(RF, "floor"), (LF, "floor")];
    let expected = vec![
        with(&both),
        with(&[(LF, "floor")]),
        with(&both),
        with(&[(RF, "floor")]),
        with(&both),
        with(&[(LF, "floor")]),
        with(&both),
        with(&[(RF, "floor")]),
        with(&both),
    ];
    Fixture {
        name: "crate_push",
        motion,
        scene,
        expected,
    }
}

/// Right foot swings forward through a small manipulable box and lands past it.
pub fn kick() -> Fixture {
    let n = 300;
    let scene = Scene::new(vec![
        floor(),
        aabb("redbox", ObjectRole::Manipulable, [0.15, -0.16, 0.0], [0.35, -0.04, 0.12]),
    ])
    .expect("kick scene is valid");
    let rf = Track::at([0.0, -0.1, CLEARANCE]).to(100, 160, [0.5, -0.1, CLEARANCE], 0.12);
    let lf = Track::at([0.0, 0.1, CLEARANCE]);
    let rh = Track::at([0.05, -0.3, 0.85]).to(100, 160, [-0.1, -0.3, 0.9], 0.0);
    let lh = Track::at([0.05, 0.3, 0.85]).to(100, 160, [0.25, 0.3, 0.9], 0.0);
    let motion = build_motion(n, 31, vec![(RF, rf), (LF, lf), (RH, rh), (LH, lh)]);
    let both = vec![(RF, "floor"), (LF, "floor")];
    Fixture {
        name: "kick",
        motion,
        scene,
        expected: vec![both.clone(), vec![(LF, "floor")], both],
    }
}

/// The committed scenarios.
pub fn all() -> Vec<Fixture> {
    vec![stair_walk(), crate_push(), kick()]
}

/// Writes `<name>.motion.json` and `<name>.scene.json` for every committed
/// scenario into `dir`.
pub fn write_all(dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for f in all() {
        std::fs::write(dir.join(f.motion_file()), f.motion.to_json())?;
        std::fs::write(dir.join(f.scene_file()), f.scene.to_json())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_jerk_endpoints() {
        assert_eq!(min_jerk(0.0), 0.0);
        assert_eq!(min_jerk(1.0), 1.0);
        assert!((min_jerk(0.5) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn track_rests_between_moves() {
        let t = Track::at([0.0; 3]).to(10, 20, [1.0, 0.0, 0.0], 0.5);
        assert_eq!(t.position(5), [0.0; 3]);
        assert_eq!(t.position(10), [0.0; 3]);
        assert_eq!(t.position(25), [1.0, 0.0, 0.0]);
        let mid = t.position(15);
        assert!((mid[0] - 0.5).abs() < 1e-12);
        assert!((mid[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fixtures_are_deterministic() {
        assert_eq!(stair_walk().motion, stair_walk().motion);
        assert_eq!(kick().motion.to_json(), kick().motion.to_json());
    }

    #[test]
    fn stair_walk_shape() {
        let f = stair_walk();
        assert_eq!(f.motion.frame_count(), 550);
        assert_eq!(f.motion.duration(), 5.5);
        assert_eq!(f.expected.len(), 13);
    }
}
