use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::spectrum::DspScalar;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoaConfig {
    /// zero-padded length of the spatial FFT
    pub fft_size: usize,
}

impl Default for DoaConfig {
    fn default() -> Self {
        Self { fft_size: 256 }
    }
}

/// Azimuth (rad) of a single source seen by a half-wavelength uniform linear
/// array, positive towards increasing channel phase.
///
/// Spatial FFT across channels, parabolic interpolation of the magnitude
/// peak, then `asin(2 f)` where `f` is the spatial frequency in cycles per
/// element.
pub fn estimate_doa<T: DspScalar>(snapshot: &[Complex<T>], cfg: &DoaConfig) -> Result<T> {
    if snapshot.len() < 2 {
        return Err(Error::Unsupported(format!(
            "DOA needs at least 2 receive channels, got {}",
            snapshot.len()
        )));
    }
    let n = cfg.fft_size.max(snapshot.len()).next_power_of_two();
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    buf[..snapshot.len()].copy_from_slice(snapshot);
    FftPlanner::<T>::new().plan_fft_forward(n).process(&mut buf);
    let mag: Vec<f64> = buf.iter().map(|c| c.norm().as_f64()).collect();
    let k = mag
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &m)| {
            if m > best.1 {
                (i, m)
            } else {
                best
            }
        })
        .0;
    let left = mag[(k + n - 1) % n];
    let right = mag[(k + 1) % n];
    let centre = mag[k];
    let denom = left - 2.0 * centre + right;
    let delta = if denom.abs() > f64::EPSILON * centre.max(1.0) {
        (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let mut f = (k as f64 + delta) / n as f64;
    if f >= 0.5 {
        f -= 1.0;
    }
    let sin_theta = (2.0 * f).clamp(-1.0, 1.0);
    Ok(T::lit(sin_theta.asin()))
}
