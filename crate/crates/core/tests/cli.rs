mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::fixtures_dir;
use wbpose::segmentation::SegmentReport;

fn wbpose(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wbpose"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn wbpose")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    fixtures_dir().join(name).to_str().unwrap().to_string()
}

#[test]
fn validate_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let o = wbpose(&["taxonomy", "validate"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "46 classes, 0 violations\n");
}

#[test]
fn broken_taxonomy_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = wbpose::taxonomy::DEFAULT_TAXONOMY.replacen(r#""neighbors":["2.1","#, r#""neighbors":["#, 1);
    assert_ne!(text, wbpose::taxonomy::DEFAULT_TAXONOMY);
    std::fs::write(dir.path().join("t.json"), text).unwrap();
    let o = wbpose(&["--taxonomy-file", "t.json", "taxonomy", "validate"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("46 classes, 1 violation"), "{out}");
    assert!(out.contains("1.1") && out.contains("2.1"), "{out}");
}

#[test]
fn export_round_trips_through_custom_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = wbpose(&["taxonomy", "export", "--out", "t.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let o = wbpose(
        &["--taxonomy-file", "t.json", "taxonomy", "classify", "--supports", "Leg:Foot,Leg:Foot"],
        dir.path(),
    );
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "2.3\n"));
}

#[test]
fn usage_and_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [vec![], vec!["nope"], vec!["segment", "--motion", "m.json"], vec!["taxonomy", "neighbors"]] {
        let o = wbpose(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
    }
    for args in [
        vec!["taxonomy", "neighbors", "9.9"],
        vec!["taxonomy", "classify", "--supports", "Leg:Wing"],
        vec!["speeds", "--motion", "missing.json"],
        vec!["graph", "--report", "missing.json"],
    ] {
        let o = wbpose(&args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    std::fs::write(dir.path().join("bad.json"), "{\"frame_rate\": 100").unwrap();
    let o = wbpose(&["speeds", "--motion", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn version_and_help_go_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let o = wbpose(&["--version"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(env!("CARGO_PKG_VERSION")));
    let o = wbpose(&["segment", "--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("--min-frames"));
}

#[test]
fn stair_pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let motion = fixture("stair_walk.motion.json");
    let scene = fixture("stair_walk.scene.json");

    let o = wbpose(&["speeds", "--motion", &motion], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("frame,"), "{header}");
    let width = header.split(',').count();
    assert_eq!(lines.clone().count(), 550);
    assert!(lines.all(|l| l.split(',').count() == width));

    let o = wbpose(&["segment", "--motion", &motion, "--scene", &scene, "--out", "r.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report = SegmentReport::from_json(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report.segments.len(), 13);

    let o = wbpose(&["graph", "--report", "r.json", "--stats"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let (dot, json) = out.split_at(out.find("}\n").unwrap() + 2);
    assert!(dot.starts_with("digraph "));
    assert_eq!(dot.matches(" -> ").count(), 12);
    let stats: serde_json::Value = serde_json::from_str(json).unwrap();
    assert_eq!(stats["step_count"], 4);
    assert_eq!(stats["compliance"], 1.0);

    let o = wbpose(&["actions", "--report", "r.json", "--motion", &motion, "--scene", &scene], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let actions: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(actions["spans"].as_array().unwrap().len(), 1);
    assert_eq!(actions["spans"][0]["action_type"], "II");
}

#[test]
fn segment_flags_change_the_result() {
    let dir = tempfile::tempdir().unwrap();
    let motion = fixture("kick.motion.json");
    let scene = fixture("kick.scene.json");
    let run = |extra: &[&str]| {
        let mut args = vec!["segment", "--motion", &motion, "--scene", &scene];
        args.extend_from_slice(extra);
        let o = wbpose(&args, dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        SegmentReport::from_json(&stdout(&o)).unwrap()
    };
    assert_eq!(run(&[]).segments.len(), 3);
    let merged = run(&["--min-frames", "1000"]);
    assert_eq!(merged.segments.len(), 1);
    assert!(!merged.warnings.is_empty());
    assert_eq!(merged.config.min_segment_frames, 1000);
    assert_eq!(run(&["--threshold", "0.35"]).config.speed_threshold, 0.35);
}
