use wbpose::motion_model::{parse_motion, parse_scene, MotionError};
use wbpose::segmentation::SegmentReport;

fn motion(body: &str) -> Result<wbpose::motion_model::MotionSequence, MotionError> {
    parse_motion(body)
}

fn tracks(n: usize) -> String {
    let t = vec!["[0,0,0]"; n].join(",");
    ["RightFoot", "LeftFoot", "RightHand", "LeftHand"]
        .map(|s| format!("\"{s}\":[{t}]"))
        .join(",")
}

#[test]
fn truncated_json_reports_position() {
    match motion("{\n  \"frame_rate\": 100,\n  \"trajectories\": {") {
        Err(MotionError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn schema_violations() {
    let ok = format!("{{\"frame_rate\":100,\"trajectories\":{{{}}}}}", tracks(3));
    assert_eq!(motion(&ok).unwrap().frame_count(), 3);

    let cases = [
        (format!("{{\"frame_rate\":0,\"trajectories\":{{{}}}}}", tracks(3)), "frame rate"),
        (format!("{{\"frame_rate\":100,\"trajectories\":{{{}}}}}", tracks(1)), "at least"),
        (format!("{{\"frame_rate\":100,\"frame_count\":4,\"trajectories\":{{{}}}}}", tracks(3)), "frame_count"),
        (format!("{{\"frame_rate\":100,\"extra\":1,\"trajectories\":{{{}}}}}", tracks(3)), "extra"),
        (format!("{{\"frame_rate\":100,\"trajectories\":{{{},\"Tail\":[[0,0,0]]}}}}", tracks(3)), "Tail"),
        ("{\"frame_rate\":100,\"trajectories\":{\"RightFoot\":[[0,0,0],[0,0,0]]}}".to_string(), "LeftFoot"),
        (
            format!("{{\"frame_rate\":100,\"trajectories\":{{{},\"Torso\":[[0,0,0]]}}}}", tracks(2)),
            "Torso",
        ),
    ];
    for (body, needle) in cases {
        let e = motion(&body).unwrap_err().to_string();
        assert!(e.contains(needle), "{needle}: {e}");
    }
}

#[test]
fn scene_errors() {
    let sphere = |name: &str, r: f64| {
        format!("{{\"name\":\"{name}\",\"role\":\"environment\",\"shape\":{{\"type\":\"sphere\",\"center\":[0,0,0],\"radius\":{r}}}}}")
    };
    assert_eq!(parse_scene(&format!("{{\"objects\":[{}]}}", sphere("a", 1.0))).unwrap().objects().len(), 1);
    let dup = parse_scene(&format!("{{\"objects\":[{},{}]}}", sphere("a", 1.0), sphere("a", 2.0)));
    assert!(matches!(dup, Err(MotionError::DuplicateName(n)) if n == "a"));
    let bad = parse_scene(&format!("{{\"objects\":[{}]}}", sphere("a", -1.0)));
    assert!(matches!(bad, Err(MotionError::InvalidPrimitive { .. })));
    let plane = r#"{"objects":[{"name":"p","role":"environment","shape":{"type":"plane","point":[0,0,0],"normal":[0,0,2]}}]}"#;
    assert!(matches!(parse_scene(plane), Err(MotionError::InvalidPrimitive { .. })));
    let cone = r#"{"objects":[{"name":"c","role":"environment","shape":{"type":"cone"}}]}"#;
    assert!(matches!(parse_scene(cone), Err(MotionError::Schema(_))));
}

#[test]
fn report_rejects_garbage() {
    assert!(SegmentReport::from_json("[]").is_err());
    assert!(SegmentReport::from_json("{").is_err());
}
