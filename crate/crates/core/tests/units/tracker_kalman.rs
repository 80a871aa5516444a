use fusedet::linalg::Matrix;
use fusedet::tracker::*;
use fusedet::Error;

fn model() -> KalmanModel<f64> {
    KalmanModel::constant_velocity(0.5, &KalmanConfig::default())
}

#[test]
fn zero_velocity_keeps_position() {
    let s = [1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.5, 1.7, 0.3];
    let (p, _) = kalman_predict(&s, &model().p0, &model());
    assert_eq!(p, s);
}

#[test]
fn linear_motion() {
    let s = [1.0, 2.0, 3.0, 2.0, 0.0, 0.0, 0.5, 1.7, 0.3];
    let (p, _) = kalman_predict(&s, &model().p0, &model());
    assert!((p[0] - 2.0).abs() < 1e-15);
    assert_eq!(&p[1..], &s[1..]);
}

#[test]
fn trace_non_decreasing_under_prediction() {
    let m = model();
    let (_, p) = kalman_predict(&[0.0; 9], &m.p0, &m);
    assert!(p.trace() >= m.p0.trace());
}

#[test]
fn zero_innovation_is_fixpoint() {
    let m = model();
    let s = [1.0, 4.0, -0.2, 0.3, -0.1, 0.7, 0.5, 1.7, 0.3];
    let z = observe(&s);
    let (c, _) = kalman_update(&s, &m.p0, &z, &m).unwrap();
    assert_eq!(c, s);
}

#[test]
fn nonfinite_observation_is_rejected() {
    let m = model();
    let mut z = [0.0; 7];
    z[3] = f64::NAN;
    assert!(kalman_update(&[0.0; 9], &m.p0, &z, &m).is_err());
}

#[test]
fn singular_innovation_is_numeric_error() {
    let mut m = model();
    m.r = Matrix::zeros(7, 7);
    let p = Matrix::zeros(9, 9);
    let err = kalman_update(&[0.0; 9], &p, &[1.0; 7], &m).unwrap_err();
    assert!(matches!(err, Error::Numeric(_)));
}
