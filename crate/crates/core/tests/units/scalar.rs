use fusedet::scalar::*;

#[test]
fn sigmoid_logit_roundtrip() {
    for &p in &[0.01_f64, 0.3, 0.5, 0.77, 0.999] {
        assert!((sigmoid(logit(p)) - p).abs() < 1e-12);
    }
    assert_eq!(sigmoid(0.0_f32), 0.5);
    assert!(sigmoid(-800.0_f64) >= 0.0);
    assert!(sigmoid(800.0_f64) <= 1.0);
}
