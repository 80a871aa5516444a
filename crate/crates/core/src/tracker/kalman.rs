//! Constant-velocity Kalman filter over the 9-dim box state
//! `(x, y, z, vx, vy, vz, w, h, t)` observed through `(x, y, z, vz, w, h, t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub const STATE_DIM: usize = 9;
pub const OBS_DIM: usize = 7;

/// State index observed by each measurement component.
pub const OBSERVED: [usize; OBS_DIM] = [0, 1, 2, 5, 6, 7, 8];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KalmanConfig {
    pub q_position: f64,
    pub q_velocity: f64,
    pub q_extent: f64,
    /// observation noise variance, one value for every observed component
    pub r: f64,
    pub p0_position: f64,
    pub p0_velocity: f64,
    pub p0_extent: f64,
}

impl Default for KalmanConfig {
    fn default() -> Self {
        Self {
            q_position: 1e-2,
            q_velocity: 1e-1,
            q_extent: 1e-2,
            r: 1e-2,
            p0_position: 1.0,
            p0_velocity: 1.0,
            p0_extent: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KalmanModel<T> {
    pub f: Matrix<T>,
    pub h: Matrix<T>,
    pub q: Matrix<T>,
    pub r: Matrix<T>,
    pub p0: Matrix<T>,
}

impl<T: Scalar> KalmanModel<T> {
    pub fn constant_velocity(dt: f64, cfg: &KalmanConfig) -> Self {
        let mut f = Matrix::identity(STATE_DIM);
        for axis in 0..3 {
            f[(axis, axis + 3)] = T::lit(dt);
        }
        let mut h = Matrix::zeros(OBS_DIM, STATE_DIM);
        for (row, &col) in OBSERVED.iter().enumerate() {
            h[(row, col)] = T::one();
        }
        let diag9 = |pos: f64, vel: f64, ext: f64| {
            Matrix::from_diagonal(&[pos, pos, pos, vel, vel, vel, ext, ext, ext].map(T::lit))
        };
        Self {
            f,
            h,
            q: diag9(cfg.q_position, cfg.q_velocity, cfg.q_extent),
            r: Matrix::from_diagonal(&[T::lit(cfg.r); OBS_DIM]),
            p0: diag9(cfg.p0_position, cfg.p0_velocity, cfg.p0_extent),
        }
    }
}

/// `s' = F s`, `P' = F P Fᵀ + Q`.
pub fn kalman_predict<T: Scalar>(
    state: &[T; STATE_DIM],
    cov: &Matrix<T>,
    model: &KalmanModel<T>,
) -> ([T; STATE_DIM], Matrix<T>) {
    let s = &model.f * &Matrix::column(state);
    let mut p = &(&(&model.f * cov) * &model.f.transpose()) + &model.q;
    p.symmetrize();
    (to_array(&s), p)
}

/// Standard correction with gain `K = P'Hᵀ(HP'Hᵀ + R)⁻¹`.
pub fn kalman_update<T: Scalar>(
    state: &[T; STATE_DIM],
    cov: &Matrix<T>,
    z: &[T; OBS_DIM],
    model: &KalmanModel<T>,
) -> Result<([T; STATE_DIM], Matrix<T>)> {
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input(format!("non-finite observation {z:?}")));
    }
    let s_col = Matrix::column(state);
    let ht = model.h.transpose();
    let innovation_cov = &(&(&model.h * cov) * &ht) + &model.r;
    let inv = innovation_cov.inverse().map_err(|e| {
        Error::Numeric(format!(
            "innovation covariance not invertible (trace {}): {e}",
            innovation_cov.trace()
        ))
    })?;
    let gain = &(cov * &ht) * &inv;
    let innovation = &Matrix::column(z) - &(&model.h * &s_col);
    let corrected = &s_col + &(&gain * &innovation);
    let i_kh = &Matrix::identity(STATE_DIM) - &(&gain * &model.h);
    let mut p = &i_kh * cov;
    p.symmetrize();
    Ok((to_array(&corrected), p))
}

fn to_array<T: Scalar>(m: &Matrix<T>) -> [T; STATE_DIM] {
    let mut out = [T::zero(); STATE_DIM];
    out.copy_from_slice(&m.as_slice()[..STATE_DIM]);
    out
}

/// Observation `H s` for a state.
pub fn observe<T: Scalar>(state: &[T; STATE_DIM]) -> [T; OBS_DIM] {
    OBSERVED.map(|i| state[i])
}
