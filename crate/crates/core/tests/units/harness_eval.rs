use fusedet::camera::Box2D;
use fusedet::fusion::Provenance;
use fusedet::fusion::RefinedDetection;
use fusedet::harness::*;
use fusedet::harness::{FrameLog, LoggedTruth, Mode};

fn b(u: f64) -> Box2D<f64> {
    Box2D::new(u, 100.0, u + 100.0, 400.0).unwrap()
}

fn det(u: f64, id: u64) -> RefinedDetection {
    RefinedDetection {
        bbox: b(u),
        confidence: 0.9,
        keep_score: 0.9,
        provenance: Provenance::Image,
        identity: Some(id),
    }
}

fn frame(i: usize, truth: &[f64], dets: Vec<RefinedDetection>) -> FrameLog {
    FrameLog {
        frame: i,
        lighting: 1.0,
        truth: truth
            .iter()
            .enumerate()
            .map(|(k, &u)| LoggedTruth {
                id: k as u32,
                bbox: b(u),
                occlusion: 0.0,
            })
            .collect(),
        detections: dets,
    }
}

fn log(frames: Vec<FrameLog>) -> DetectionLog {
    DetectionLog {
        scene: "t".into(),
        seed: 0,
        mode: Mode::Fusion,
        frames,
    }
}

#[test]
fn perfect_log() {
    let r = evaluate(
        &log(vec![frame(
            0,
            &[0.0, 500.0],
            vec![det(0.0, 0), det(500.0, 1)],
        )]),
        0.5,
    );
    assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
}

#[test]
fn empty_detections() {
    let r = evaluate(&log(vec![frame(0, &[0.0], vec![])]), 0.5);
    assert_eq!((r.precision, r.recall), (1.0, 0.0));
    assert_eq!(r.f1, 0.0);
}

#[test]
fn one_fp_one_fn() {
    let r = evaluate(
        &log(vec![
            frame(0, &[0.0], vec![det(0.0, 0)]),
            frame(1, &[0.0], vec![det(0.0, 0), det(900.0, 5)]),
            frame(2, &[0.0], vec![]),
        ]),
        0.5,
    );
    assert_eq!(
        (r.true_positives, r.false_positives, r.false_negatives),
        (2, 1, 1)
    );
    assert!((r.precision - 2.0 / 3.0).abs() < 1e-12);
    assert!((r.recall - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn identity_switch_counted() {
    let r = evaluate(
        &log(vec![
            frame(0, &[0.0], vec![det(0.0, 0)]),
            frame(1, &[0.0], vec![det(0.0, 0)]),
            frame(2, &[0.0], vec![det(0.0, 3)]),
        ]),
        0.5,
    );
    assert_eq!(r.id_switches, 1);
}

#[test]
fn report_toml_round_trip() {
    let r = evaluate(
        &log(vec![frame(0, &[0.0], vec![det(0.0, 0), det(700.0, 1)])]),
        0.5,
    );
    let text = r.to_toml_string().unwrap();
    assert!(text.starts_with("schema_version = 1"));
    assert_eq!(EvalReport::from_toml_str(&text).unwrap(), r);
}
