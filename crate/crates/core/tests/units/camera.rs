use fusedet::camera::*;
use fusedet::pointcloud::ClusterBox;
use fusedet::Error;

fn identity_extrinsic() -> [f64; 12] {
    [1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]
}

fn ideal(f: f64, c: f64) -> CameraModel {
    CameraModel {
        image_size: [100, 100],
        intrinsic: [f, 0.0, c, 0.0, f, c, 0.0, 0.0, 1.0],
        radial: [0.0; 2],
        tangential: [0.0; 2],
        extrinsic: identity_extrinsic(),
    }
}

#[test]
fn optical_axis_maps_to_principal_point() {
    let p = project_point([0.0, 0.0, 5.0], &ideal(1.0, 0.0)).unwrap();
    assert_eq!((p.u, p.v), (0.0, 0.0));
}

#[test]
fn behind_camera_is_an_error() {
    let r = project_point([0.0, 0.0, -1.0_f64], &ideal(1.0, 0.0));
    assert!(matches!(r, Err(Error::BehindCamera { .. })));
}

#[test]
fn on_axis_point_is_not_distorted() {
    let cam = CameraModel {
        extrinsic: identity_extrinsic(),
        ..CameraModel::default()
    };
    let p = project_point([0.0, 0.0, 3.0], &cam).unwrap();
    assert_eq!((p.u, p.v), (1038.8, 763.4));
}

#[test]
fn default_extrinsic_swaps_axes() {
    let cam = CameraModel::default();
    assert_eq!(cam.to_camera([1.0, 4.0, 2.0]), [1.0, -2.0, 4.0]);
    let up = project_point([0.0, 4.0, 1.0], &cam).unwrap();
    assert!(up.v < 763.4);
}

#[test]
fn validation() {
    assert!(CameraModel::default().validate().is_ok());
    let mut bad = CameraModel::default();
    bad.intrinsic[0] = -1.0;
    assert!(bad.validate().is_err());
    let mut bad = CameraModel::default();
    bad.intrinsic[3] = 0.5;
    assert!(bad.validate().is_err());
    let mut bad = CameraModel::default();
    bad.image_size = [0, 10];
    assert!(bad.validate().is_err());
}

#[test]
fn zero_extent_box_is_projected_center() {
    let cam = CameraModel::default();
    let b = ClusterBox::from_array([0.3, 4.0, -0.2, 0.0, 0.0, 0.0, 0.0]);
    let bb = project_box(&b, &cam, 16).unwrap();
    let c = project_point([0.3, 4.0, -0.2], &cam).unwrap();
    assert_eq!(
        (bb.u_min, bb.u_max, bb.v_min, bb.v_max),
        (c.u, c.u, c.v, c.v)
    );
}

#[test]
fn centred_box_is_symmetric() {
    let mut cam = CameraModel::default();
    cam.image_size = [4000, 4000];
    let b = ClusterBox::from_array([0.0_f64, 5.0, 0.0, 0.0, 0.6, 1.7, 0.4]);
    let bb = project_box(&b, &cam, 16).unwrap();
    assert!(((bb.u_min + bb.u_max) / 2.0 - 1038.8).abs() < 1e-6);
    assert!(((bb.v_min + bb.v_max) / 2.0 - 763.4).abs() < 1e-6);
}

#[test]
fn fully_behind_box_fails_partially_behind_clips() {
    let cam = CameraModel::default();
    let behind = ClusterBox::from_array([0.0, -3.0, 0.0, 0.0, 0.5, 0.5, 0.5]);
    assert!(matches!(
        project_box(&behind, &cam, 8),
        Err(Error::BehindCamera { .. })
    ));
    let straddle = ClusterBox::from_array([0.0, 0.1, 0.0, 0.0, 0.5, 0.5, 1.0]);
    let bb = project_box(&straddle, &cam, 8).unwrap();
    assert!(bb.is_valid());
}

#[test]
fn iou_cases() {
    let a = Box2D::new(0.0_f64, 0.0, 1.0, 1.0).unwrap();
    assert_eq!(a.iou(&a), 1.0);
    let far = a.translate(5.0, 0.0);
    assert_eq!(a.iou(&far), 0.0);
    let half = a.translate(0.5, 0.0);
    assert!((a.iou(&half) - 1.0 / 3.0).abs() < 1e-12);
    assert!(Box2D::new(1.0, 0.0, 0.0, 1.0).is_err());
}
