use fusedet::camera::{Box2D, CameraModel};
use fusedet::fusion::*;
use fusedet::pointcloud::RadarPoint;
use fusedet::Error;

fn cam() -> CameraModel {
    CameraModel::default()
}

#[test]
fn empty_cloud_is_all_zero() {
    let hm = build_radar_heatmap::<f64>(&[], &cam(), &HeatmapConfig::default()).unwrap();
    assert_eq!((hm.rows, hm.cols), (96, 128));
    assert!(hm.values.iter().all(|&v| v == 0.0));
}

#[test]
fn single_point_single_cell() {
    let p = RadarPoint::new(0.2_f64, 4.0, -0.1, 0.5);
    let hm = build_radar_heatmap(&[p], &cam(), &HeatmapConfig::default()).unwrap();
    let plane = hm.rows * hm.cols;
    let nonzero: Vec<usize> = (0..plane).filter(|&i| hm.values[i] != 0.0).collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!(hm.values[nonzero[0]], 1.0);
    assert_eq!(hm.values[plane + nonzero[0]], 0.0);
}

#[test]
fn points_behind_camera_are_skipped() {
    let p = RadarPoint::new(0.0_f64, -4.0, 0.0, 0.0);
    let hm = build_radar_heatmap(&[p], &cam(), &HeatmapConfig::default()).unwrap();
    assert!(hm.values.iter().all(|&v| v == 0.0));
}

#[test]
fn constant_field_crops_to_constant() {
    let hm = RadarHeatmap::from_values(4, 5, 10.0, vec![0.25_f64; 60]).unwrap();
    let roi = crop_roi(&hm, &Box2D::new(3.0, 4.0, 31.0, 27.0).unwrap()).unwrap();
    assert!(roi.values.iter().all(|&v| (v - 0.25).abs() < 1e-15));
}

#[test]
fn zero_area_box_is_rejected() {
    let hm = RadarHeatmap::from_values(4, 5, 10.0, vec![0.5_f64; 60]).unwrap();
    let flat = Box2D::new(3.0, 4.0, 3.0, 27.0).unwrap();
    assert!(matches!(crop_roi(&hm, &flat), Err(Error::DegenerateBox(_))));
    let outside = Box2D::new(80.0, 4.0, 90.0, 27.0).unwrap();
    assert!(crop_roi(&hm, &outside).is_err());
}

#[test]
fn fixed_bounds_are_used() {
    let cfg = HeatmapConfig {
        depth_bounds: Some([0.0, 10.0]),
        velocity_bounds: Some([-2.0, 2.0]),
        ..Default::default()
    };
    let p = RadarPoint::new(0.0_f64, 5.0, 0.0, 1.0);
    let hm = build_radar_heatmap(&[p], &cam(), &cfg).unwrap();
    let plane = hm.rows * hm.cols;
    let i = (0..plane).find(|&i| hm.values[i] > 0.0).unwrap();
    assert!((hm.values[plane + i] - 0.5).abs() < 1e-12);
    assert!((hm.values[2 * plane + i] - 0.75).abs() < 1e-12);
}
