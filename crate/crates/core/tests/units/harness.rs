use fusedet::camera::Box2D;
use fusedet::fusion::FusionParams;
use fusedet::harness::*;
use fusedet::simulator::builtin_scene;

#[test]
fn mode_round_trip() {
    for m in Mode::ALL {
        assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
    }
    assert!("both".parse::<Mode>().is_err());
}

#[test]
fn zero_duration_scene_gives_empty_log() {
    let p = Pipeline::new(PipelineConfig::default(), FusionParams::zeros(1, 8)).unwrap();
    let mut spec = builtin_scene("single_walk").unwrap();
    spec.duration = 0;
    let log = p.run(&spec).unwrap();
    assert!(log.frames.is_empty());
}

#[test]
fn mismatched_image_sizes_rejected() {
    let mut cfg = PipelineConfig::default();
    cfg.detector.image_size = [100, 100];
    let err = Pipeline::new(cfg, FusionParams::zeros(1, 8)).unwrap_err();
    assert!(err.to_string().contains("detector.image_size"), "{err}");
}

#[test]
fn frame_period_must_match() {
    let mut cfg = PipelineConfig::default();
    cfg.tracker.dt = 0.05;
    let p = Pipeline::new(cfg, FusionParams::zeros(1, 8)).unwrap();
    let spec = builtin_scene("single_walk").unwrap();
    assert!(p.start(&spec).is_err());
}

#[test]
fn greedy_prefers_confident_detections() {
    let t = Box2D::new(0.0, 0.0, 10.0, 10.0).unwrap();
    let dets = [(t.translate(1.0, 0.0), 0.4), (t.translate(2.0, 0.0), 0.9)];
    assert_eq!(greedy_match(&dets, &[t], 0.5), vec![(1, 0)]);
}
