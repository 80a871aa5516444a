use fusedet::camera::Box2D;
use fusedet::detector::*;
use fusedet::pointcloud::ClusterBox;
use fusedet::simulator::FrameTruth;
use fusedet::simulator::TargetTruth;

fn frame(lighting: f64, occlusion: f64) -> FrameTruth {
    FrameTruth {
        frame: 3,
        time: 0.3,
        lighting,
        targets: vec![TargetTruth {
            id: 0,
            position: [0.0, 4.0, -0.15],
            velocity: [0.0; 3],
            radial_velocity: 0.0,
            box3d: ClusterBox::from_array([0.0, 4.0, -0.15, 0.0, 0.5, 1.7, 0.3]),
            box2d: Some(Box2D::new(900.0, 400.0, 1100.0, 1000.0).unwrap()),
            depth: 4.0,
            occlusion,
            reflectivity: 1.0,
        }],
    }
}

fn perfect() -> DetectorProfile {
    DetectorProfile {
        detect_prob: vec![[0.0, 0.0], [1.0, 1.0]],
        box_jitter_std: 0.0,
        false_positive_rate: 0.0,
        ..Default::default()
    }
}

#[test]
fn perfect_detector_returns_truth() {
    let d = detect(&frame(1.0, 0.0), &perfect(), 9);
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].bbox, frame(1.0, 0.0).targets[0].box2d.unwrap());
    assert_eq!(d[0].scores.len(), 2);
    assert_eq!(d[0].source, Source::Image);
}

#[test]
fn dark_limit_is_empty() {
    assert!(detect(&frame(0.0, 0.0), &perfect(), 1).is_empty());
}

#[test]
fn occluded_targets_are_never_reported() {
    for seed in 0..50 {
        assert!(detect(&frame(1.0, 0.8), &perfect(), seed).is_empty());
    }
}

#[test]
fn interpolation_and_validation() {
    let p = DetectorProfile::default();
    assert!((p.prob_at(0.05) - 0.1).abs() < 1e-12);
    assert!((p.prob_at(0.2) - 0.4).abs() < 1e-12);
    assert_eq!(p.prob_at(2.0), 0.98);
    assert!(p.validate().is_ok());
    let bad = DetectorProfile {
        detect_prob: vec![[0.0, 0.5], [1.0, 0.2]],
        ..Default::default()
    };
    assert!(bad.validate().is_err());
}

#[test]
fn scores_respect_threshold() {
    let p = DetectorProfile {
        false_positive_rate: 2.0,
        ..Default::default()
    };
    for seed in 0..200 {
        for d in detect(&frame(0.5, 0.0), &p, seed) {
            assert!(d.confidence() >= p.confidence_threshold);
            assert!(d.bbox.is_valid());
        }
    }
}
