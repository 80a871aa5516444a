use std::f64::consts::PI;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::config::RadarConfig;
use super::cube::AdcCube;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Point reflector for the ADC synthesizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthTarget {
    /// m
    pub range: f64,
    /// rad, positive towards +x
    pub azimuth: f64,
    /// m/s, positive receding
    pub radial_velocity: f64,
    pub amplitude: f64,
}

/// Builds an ideal dechirped ADC cube for point reflectors plus circular
/// Gaussian noise with total standard deviation `noise_std`.
pub fn synthesize_adc<T: Scalar>(
    targets: &[SynthTarget],
    cfg: &RadarConfig,
    noise_std: f64,
    seed: u64,
) -> Result<AdcCube<T>> {
    cfg.validate()?;
    if !(noise_std.is_finite() && noise_std >= 0.0) {
        return Err(Error::Input(format!(
            "noise_std must be >= 0, got {noise_std}"
        )));
    }
    for (i, t) in targets.iter().enumerate() {
        if !(t.range > 0.0 && t.range <= cfg.max_range) {
            return Err(Error::Input(format!(
                "target {i}: range {} m outside (0, {}] m",
                t.range, cfg.max_range
            )));
        }
        if !(t.radial_velocity.abs() <= cfg.max_velocity) {
            return Err(Error::Input(format!(
                "target {i}: radial velocity {} m/s beyond +/-{} m/s",
                t.radial_velocity, cfg.max_velocity
            )));
        }
        if !(t.azimuth.abs() < PI / 2.0) {
            return Err(Error::Input(format!(
                "target {i}: azimuth {} rad not in front of array",
                t.azimuth
            )));
        }
        if !t.amplitude.is_finite() {
            return Err(Error::Input(format!(
                "target {i}: amplitude must be finite"
            )));
        }
    }
    let (nk, nm, nn) = (
        cfg.n_rx_channels,
        cfg.n_chirps_per_frame,
        cfg.n_samples_per_chirp,
    );
    let mut acc = vec![Complex::new(0.0f64, 0.0); nk * nm * nn];
    let tc = cfg.chirp_period();
    let lambda = cfg.wavelength();
    for t in targets {
        let fast = 2.0 * PI * cfg.beat_frequency(t.range) / cfg.sample_rate;
        let slow = 4.0 * PI * t.radial_velocity * tc / lambda;
        let spatial = PI * t.azimuth.sin();
        // phasor recurrences drift; evaluate each chirp start exactly instead
        let step = Complex::from_polar(1.0, fast);
        for k in 0..nk {
            for m in 0..nm {
                let mut ph = Complex::from_polar(t.amplitude, slow * m as f64 + spatial * k as f64);
                let base = (k * nm + m) * nn;
                for s in &mut acc[base..base + nn] {
                    *s += ph;
                    ph *= step;
                }
            }
        }
    }
    if noise_std > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_std / 2f64.sqrt()).expect("valid normal");
        for s in &mut acc {
            s.re += normal.sample(&mut rng);
            s.im += normal.sample(&mut rng);
        }
    }
    let samples = acc
        .into_iter()
        .map(|c| Complex::new(T::lit(c.re), T::lit(c.im)))
        .collect();
    AdcCube::from_samples(cfg.clone(), samples)
}
