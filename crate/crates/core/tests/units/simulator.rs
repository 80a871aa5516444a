use fusedet::camera::{Box2D, CameraModel};
use fusedet::dsp::RadarConfig;
use fusedet::simulator::*;
use fusedet::Error;

fn walker(id: u32, from: [f64; 3], to: [f64; 3], secs: f64) -> TargetSpec {
    TargetSpec {
        id,
        extent: [0.5, 1.7, 0.3],
        reflectivity: 1.0,
        waypoints: vec![
            [0.0, from[0], from[1], from[2]],
            [secs, to[0], to[1], to[2]],
        ],
    }
}

fn scene(targets: Vec<TargetSpec>) -> SceneSpec {
    SceneSpec {
        name: "t".into(),
        duration: 20,
        targets,
        ..Default::default()
    }
}

#[test]
fn builtin_scenes_load() {
    for name in BUILTIN_SCENES {
        let s = builtin_scene(name).unwrap();
        assert_eq!(s.name, name);
    }
    assert!(builtin_scene("nope").is_err());
}

#[test]
fn static_target_constant_truth() {
    let spec = scene(vec![walker(0, [0.0, 4.0, -0.15], [0.0, 4.0, -0.15], 5.0)]);
    let cam = CameraModel::default();
    let a = generate_frame(&spec, &cam, 0).unwrap();
    let b = generate_frame(&spec, &cam, 7).unwrap();
    assert_eq!(a.targets[0].box2d, b.targets[0].box2d);
    assert_eq!(a.targets[0].occlusion, 0.0);
    assert_eq!(a.targets[0].velocity, [0.0; 3]);
}

#[test]
fn frame_out_of_range() {
    let spec = scene(vec![]);
    assert!(matches!(
        generate_frame(&spec, &CameraModel::default(), 20),
        Err(Error::Index { index: 20, len: 20 })
    ));
}

#[test]
fn finite_difference_velocity() {
    let w = walker(0, [-1.0, 4.0, 0.0], [1.0, 4.0, 0.0], 2.0);
    let v = w.velocity_at(1.0, 10.0).unwrap();
    assert!((v[0] - 1.0).abs() < 1e-12 && v[1].abs() < 1e-12);
    assert!(w.velocity_at(3.0, 10.0).is_none());
}

#[test]
fn hidden_behind_identical_box_is_fully_occluded() {
    let mut b = walker(1, [0.0, 4.0, -0.15], [0.0, 4.0, -0.15], 5.0);
    b.waypoints.iter_mut().for_each(|w| w[2] = 4.0 + 1e-9);
    let spec = scene(vec![
        walker(0, [0.0, 4.0, -0.15], [0.0, 4.0, -0.15], 5.0),
        b,
    ]);
    let truth = generate_frame(&spec, &CameraModel::default(), 0).unwrap();
    assert_eq!(truth.targets[0].occlusion, 0.0);
    assert!(truth.targets[1].occlusion > 0.999);
}

#[test]
fn union_area_handles_overlaps() {
    let a = Box2D::new(0.0, 0.0, 2.0, 2.0).unwrap();
    let b = Box2D::new(1.0, 1.0, 3.0, 3.0).unwrap();
    assert_eq!(union_area(&[a, b]), 7.0);
    assert_eq!(union_area(&[a, a]), 4.0);
    assert_eq!(union_area(&[]), 0.0);
}

#[test]
fn zero_reflectivity_no_clutter_is_empty() {
    let mut w = walker(0, [0.0, 4.0, 0.0], [0.0, 4.0, 0.0], 5.0);
    w.reflectivity = 0.0;
    let spec = scene(vec![w]);
    let truth = generate_frame(&spec, &CameraModel::default(), 3).unwrap();
    assert!(emit_points(&truth, &spec).is_empty());
}

#[test]
fn lighting_segments() {
    let mut spec = scene(vec![]);
    spec.lighting = vec![
        LightingSegment {
            start: 0,
            level: 0.2,
        },
        LightingSegment {
            start: 5,
            level: 0.9,
        },
    ];
    assert_eq!(spec.lighting_at(4), 0.2);
    assert_eq!(spec.lighting_at(5), 0.9);
    spec.lighting.clear();
    assert_eq!(spec.lighting_at(3), 1.0);
}

#[test]
fn validation_rejects_bad_specs() {
    let fast = scene(vec![walker(0, [-3.0, 4.0, 0.0], [3.0, 4.0, 0.0], 0.5)]);
    assert!(fast.validate().is_err());
    let far = scene(vec![walker(0, [0.0, 12.0, 0.0], [0.0, 12.0, 0.0], 1.0)]);
    assert!(far.validate().is_err());
    let mut back = scene(vec![walker(0, [0.0, 4.0, 0.0], [0.0, 5.0, 0.0], 1.0)]);
    back.targets[0].waypoints[1][0] = 0.0;
    assert!(back.validate().is_err());
    let mut ver = scene(vec![]);
    ver.schema_version = 9;
    assert!(ver.validate().is_err());
}

#[test]
fn adc_mode_produces_cube() {
    let spec = scene(vec![walker(0, [0.5, 4.0, -0.15], [0.5, 4.0, -0.15], 5.0)]);
    let truth = generate_frame(&spec, &CameraModel::default(), 0).unwrap();
    let cube = emit_adc(&truth, &spec, &RadarConfig::default()).unwrap();
    assert_eq!(cube.n_channels(), 4);
}
