use fusedet::linalg::*;
use fusedet::Error;

#[test]
fn inverse_of_known_matrix() {
    let m = Matrix::from_rows(3, 3, vec![4.0_f64, 7.0, 2.0, 3.0, 6.0, 1.0, 2.0, 5.0, 3.0]);
    let inv = m.inverse().unwrap();
    let prod = &m * &inv;
    for r in 0..3 {
        for c in 0..3 {
            let want = if r == c { 1.0 } else { 0.0 };
            assert!((prod[(r, c)] - want).abs() < 1e-12);
        }
    }
}

#[test]
fn singular_matrix_is_rejected() {
    let m = Matrix::from_rows(2, 2, vec![1.0_f64, 2.0, 2.0, 4.0]);
    assert!(matches!(m.inverse(), Err(Error::Numeric(_))));
}

#[test]
fn pivoting_handles_zero_leading_entry() {
    let m = Matrix::from_rows(2, 2, vec![0.0_f32, 1.0, 1.0, 0.0]);
    let inv = m.inverse().unwrap();
    assert_eq!(inv.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
}
