use fusedet::linalg::Matrix;
use fusedet::tracker::*;
use fusedet::Error;

fn m(rows: usize, cols: usize, v: &[f64]) -> Matrix<f64> {
    Matrix::from_rows(rows, cols, v.to_vec())
}

#[test]
fn zero_diagonal() {
    let a = hungarian_assign(&m(2, 2, &[0.0, 9.0, 9.0, 0.0])).unwrap();
    assert_eq!(a.pairs, vec![(0, 0), (1, 1)]);
    assert_eq!(a.total, 0.0);
}

#[test]
fn small_case() {
    let a = hungarian_assign(&m(2, 2, &[1.0, 2.0, 3.0, 1.0])).unwrap();
    assert_eq!(a.pairs, vec![(0, 0), (1, 1)]);
    assert_eq!(a.total, 2.0);
}

#[test]
fn rectangular_both_ways() {
    let wide = m(2, 3, &[5.0, 1.0, 9.0, 2.0, 8.0, 0.5]);
    let a = hungarian_assign(&wide).unwrap();
    assert_eq!(a.pairs, vec![(0, 1), (1, 2)]);
    assert_eq!(a.total, 1.5);
    let tall = wide.transpose();
    let b = hungarian_assign(&tall).unwrap();
    assert_eq!(b.pairs, vec![(1, 0), (2, 1)]);
    assert_eq!(b.total, 1.5);
}

#[test]
fn empty_matrix() {
    let a = hungarian_assign(&Matrix::<f64>::zeros(0, 3)).unwrap();
    assert!(a.pairs.is_empty());
}

#[test]
fn nan_is_rejected() {
    assert!(matches!(
        hungarian_assign(&m(2, 2, &[1.0, f64::NAN, 0.0, 1.0])),
        Err(Error::Input(_))
    ));
}
