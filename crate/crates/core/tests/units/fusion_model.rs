use fusedet::fusion::*;
use fusedet::Error;

fn roi(v: f64) -> RoiFeature<f64> {
    RoiFeature {
        values: [v; N_CHANNELS * ROI_SIZE * ROI_SIZE],
    }
}

#[test]
fn neutral_inputs_give_half() {
    let p = FusionParams::<f64>::zeros(1, 8);
    assert_eq!(perceptual_fuse(0.5, &roi(0.3), &p), 0.5);
    assert_eq!(integrate(&[0.3, 0.7], &[0.2, 0.8], &p).unwrap(), 0.5);
}

#[test]
fn zero_radar_weights_keep_image_confidence() {
    let p = FusionParams::<f64>::zeros(1, 8);
    for s in [0.01, 0.3, 0.77, 0.999] {
        assert!((perceptual_fuse(s, &roi(0.9), &p) - s).abs() < 1e-12);
    }
}

#[test]
fn radar_only_closed_form() {
    let mut p = FusionParams::<f64>::zeros(1, 8);
    p.radar_b = 4.0;
    let q = perceptual_fuse(0.5, &roi(0.0), &p);
    assert!((q - 1.0 / (1.0 + (-4.0f64).exp())).abs() < 1e-15);
    assert!((q - 0.9820).abs() < 1e-4);
}

#[test]
fn integrate_rejects_bad_lengths() {
    let p = FusionParams::<f64>::zeros(1, 4);
    assert!(matches!(
        integrate(&[0.5], &[0.5, 0.5], &p),
        Err(Error::Input(_))
    ));
}

#[test]
fn pooling() {
    let mut r = roi(0.0);
    r.values[0] = 0.49;
    let f = pool(&r);
    assert!((f[0] - 0.01).abs() < 1e-15);
    assert_eq!(f[N_CHANNELS], 0.49);
}

#[test]
fn toml_roundtrip_and_flatten() {
    let p = FusionParams::<f64>::init(1, 8, 3);
    let back = FusionParams::<f64>::from_toml_str(&p.to_toml_string().unwrap()).unwrap();
    assert_eq!(back, p);
    let mut q = FusionParams::<f64>::zeros(1, 8);
    q.set_from_slice(&p.to_vec());
    assert_eq!(q.to_vec(), p.to_vec());
    assert!(FusionParams::<f64>::from_toml_str("schema_version = 7").is_err());
}

#[test]
fn fused_vector_moves_classes_against_background() {
    let v2 = fuse_vector(&[0.4_f64, 0.6], 1.0);
    assert!(v2[0] < 0.4 && v2[1] > 0.6);
    assert!((v2[1] - fuse_score(0.6, 1.0)).abs() < 1e-15);
}
