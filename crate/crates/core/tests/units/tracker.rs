use fusedet::linalg::Matrix;
use fusedet::pointcloud::ClusterBox;
use fusedet::tracker::*;

fn det(x: f64, y: f64) -> ClusterBox<f64> {
    ClusterBox {
        x,
        y,
        z: 0.0,
        v_z: 0.0,
        w: 0.5,
        h: 1.7,
        t: 0.3,
    }
}

fn track_at(x: f64, y: f64, z: f64) -> TrackState<f64> {
    TrackState {
        track_id: 0,
        state: [x, y, z, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        cov: Matrix::identity(9),
        frames_since_update: 0,
        hits: 1,
    }
}

#[test]
fn association_cost_examples() {
    let mut d = det(1.0, 2.0);
    d.z = 3.0;
    assert_eq!(association_cost(&track_at(1.0, 2.0, 3.0), &d), 0.0);
    let d = det(3.0, 4.0);
    assert_eq!(association_cost(&track_at(0.0, 0.0, 0.0), &d), 5.0);
}

#[test]
fn gating_excludes_far_pairs() {
    let mut tr = Tracker::<f64>::new(TrackerConfig {
        gate_distance: 2.0,
        ..Default::default()
    })
    .unwrap();
    tr.step(&[det(0.0, 0.0)]).unwrap();
    let out = tr.step(&[det(3.0, 4.0)]).unwrap();
    assert_eq!(out.assignments, vec![1]);
    assert_eq!(tr.tracks().len(), 2);
}

#[test]
fn spawn_rule() {
    let mut tr = Tracker::<f64>::new(TrackerConfig::default()).unwrap();
    let out = tr
        .step(&[det(0.0, 2.0), det(2.0, 4.0), det(-2.0, 6.0)])
        .unwrap();
    assert_eq!(out.assignments, vec![0, 1, 2]);
    assert_eq!(tr.tracks().len(), 3);
    assert!(tr.tracks().iter().all(|t| t.velocity() == [0.0; 3]));
}

#[test]
fn track_removed_exactly_at_t_max() {
    let t_max = 4;
    let mut tr = Tracker::<f64>::new(TrackerConfig {
        t_max,
        ..Default::default()
    })
    .unwrap();
    tr.step(&[det(0.0, 3.0)]).unwrap();
    for miss in 1..=t_max {
        let out = tr.step(&[]).unwrap();
        if miss < t_max {
            assert_eq!(tr.tracks().len(), 1, "alive after {miss} misses");
            assert_eq!(tr.tracks()[0].frames_since_update, miss);
            assert!(out.removed.is_empty());
        } else {
            assert!(tr.tracks().is_empty());
            assert_eq!(out.removed, vec![0]);
        }
    }
}

#[test]
fn ids_are_never_reused() {
    let mut tr = Tracker::<f64>::new(TrackerConfig {
        t_max: 1,
        ..Default::default()
    })
    .unwrap();
    let mut seen = std::collections::BTreeSet::new();
    for k in 0..10 {
        let x = if k % 2 == 0 { 0.0 } else { 5.0 };
        let out = tr.step(&[det(x, 3.0)]).unwrap();
        for id in out.assignments {
            assert!(seen.insert(id), "id {id} reused");
        }
    }
}

#[test]
fn confirmation_needs_min_hits() {
    let mut tr = Tracker::<f64>::new(TrackerConfig::default()).unwrap();
    tr.step(&[det(0.0, 3.0)]).unwrap();
    assert_eq!(tr.confirmed().count(), 0);
    tr.step(&[det(0.01, 3.0)]).unwrap();
    assert_eq!(tr.confirmed().count(), 1);
    tr.step(&[]).unwrap();
    assert_eq!(tr.confirmed().count(), 0);
}

#[test]
fn history_csv_layout() {
    let mut tr = Tracker::<f64>::new(TrackerConfig::default()).unwrap();
    tr.step(&[det(1.0, 3.0)]).unwrap();
    let mut buf = Vec::new();
    write_track_history(&mut buf, &[(0, tr.tracks().to_vec())]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("frame,track_id,x,y,z,vx,vy,vz,w,h,t"));
    assert_eq!(
        lines.next(),
        Some(
            "0,0,1.000000,3.000000,0.000000,0.000000,0.000000,0.000000,0.500000,1.700000,0.300000"
        )
    );
}

#[test]
fn invalid_config() {
    let bad = TrackerConfig {
        t_max: 0,
        ..Default::default()
    };
    assert!(Tracker::<f64>::new(bad).is_err());
    let bad = TrackerConfig {
        dt: 0.0,
        ..Default::default()
    };
    assert!(Tracker::<f32>::new(bad).is_err());
}
