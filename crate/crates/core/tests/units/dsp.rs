use fusedet::dsp::*;

fn target(range: f64, az_deg: f64, v: f64) -> SynthTarget {
    SynthTarget {
        range,
        azimuth: az_deg.to_radians(),
        radial_velocity: v,
        amplitude: 1.0,
    }
}

#[test]
fn empty_cube_gives_empty_cloud() {
    let cfg = RadarConfig::default();
    let cube = AdcCube::<f64>::zeros(cfg.clone());
    let pts = cube_to_pointcloud(
        &cube,
        &ChannelCalibration::identity(4),
        &PointCloudConfig::default(),
    )
    .unwrap();
    assert!(pts.is_empty());
}

#[test]
fn single_target_recovered_within_one_bin() {
    let cfg = RadarConfig::default();
    let cube = synthesize_adc::<f64>(&[target(5.0, 0.0, 1.0)], &cfg, 0.1, 4).unwrap();
    let pts = cube_to_pointcloud(
        &cube,
        &ChannelCalibration::identity(4),
        &PointCloudConfig::default(),
    )
    .unwrap();
    assert!(!pts.is_empty());
    let dr = cfg.range_bin_width();
    let dv = cfg.velocity_bin_width();
    let strongest = pts[0];
    let r = (strongest.x * strongest.x + strongest.y * strongest.y).sqrt();
    assert!((r - 5.0).abs() <= dr, "range {r}");
    assert!((strongest.v - 1.0).abs() <= dv, "velocity {}", strongest.v);
    assert!(strongest.x.abs() < 0.2);
}

#[test]
fn two_targets_give_distinct_range_bins() {
    let cfg = RadarConfig::default();
    let cube = synthesize_adc::<f64>(
        &[target(3.0, -10.0, 0.5), target(6.0, 15.0, -1.0)],
        &cfg,
        0.1,
        5,
    )
    .unwrap();
    let pts = cube_to_pointcloud(
        &cube,
        &ChannelCalibration::identity(4),
        &PointCloudConfig::default(),
    )
    .unwrap();
    let mut bins: Vec<i64> = pts
        .iter()
        .map(|p| ((p.x * p.x + p.y * p.y).sqrt() / cfg.range_bin_width()).round() as i64)
        .collect();
    bins.sort();
    bins.dedup();
    assert!(bins.len() >= 2);
}

#[test]
fn sensor_height_is_applied() {
    let cfg = RadarConfig::default();
    let cube = synthesize_adc::<f64>(&[target(4.0, 5.0, 0.0)], &cfg, 0.05, 1).unwrap();
    let pc = PointCloudConfig {
        sensor_height: -0.4,
        ..Default::default()
    };
    let pts = cube_to_pointcloud(&cube, &ChannelCalibration::identity(4), &pc).unwrap();
    assert!(!pts.is_empty());
    assert!(pts.iter().all(|p| p.z == -0.4));
}
