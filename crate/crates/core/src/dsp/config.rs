use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// FMCW chirp and receiver configuration.
///
/// Frequencies in Hz, times in seconds, lengths in metres. `bandwidth` is the
/// swept bandwidth covered by the sampled part of the ramp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarConfig {
    pub start_freq: f64,
    pub chirp_slope: f64,
    pub idle_time: f64,
    pub sample_rate: f64,
    pub rx_gain: f64,
    pub n_samples_per_chirp: usize,
    pub n_chirps_per_frame: usize,
    pub n_rx_channels: usize,
    pub bandwidth: f64,
    pub max_range: f64,
    pub range_resolution: f64,
    pub max_velocity: f64,
}

impl Default for RadarConfig {
    fn default() -> Self {
        Self::cascade_77ghz()
    }
}

impl RadarConfig {
    /// 77 GHz start, 79 MHz/µs slope, 5 µs idle, 8 Msps, 48 dB gain. 405
    /// samples per chirp sweep just under 4 GHz.
    pub fn cascade_77ghz() -> Self {
        let chirp_slope = 79.0e12;
        let sample_rate = 8.0e6;
        let n_samples = 405;
        let bandwidth = chirp_slope * n_samples as f64 / sample_rate;
        Self {
            start_freq: 77.0e9,
            chirp_slope,
            idle_time: 5.0e-6,
            sample_rate,
            rx_gain: 48.0,
            n_samples_per_chirp: n_samples,
            n_chirps_per_frame: 64,
            n_rx_channels: 4,
            bandwidth,
            max_range: 10.0,
            range_resolution: SPEED_OF_LIGHT / (2.0 * bandwidth),
            max_velocity: 26.0 / 3.6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_samples_per_chirp", self.n_samples_per_chirp),
            ("n_chirps_per_frame", self.n_chirps_per_frame),
            ("n_rx_channels", self.n_rx_channels),
        ];
        for (name, n) in counts {
            if n < 1 {
                return Err(Error::Config(format!("{name} must be >= 1")));
            }
        }
        let positive = [
            ("start_freq", self.start_freq),
            ("chirp_slope", self.chirp_slope),
            ("sample_rate", self.sample_rate),
            ("bandwidth", self.bandwidth),
            ("max_range", self.max_range),
            ("range_resolution", self.range_resolution),
            ("max_velocity", self.max_velocity),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.idle_time.is_finite() && self.idle_time >= 0.0) {
            return Err(Error::Config(format!(
                "idle_time must be >= 0, got {}",
                self.idle_time
            )));
        }
        let swept = self.chirp_slope * self.ramp_time();
        if rel_diff(swept, self.bandwidth) > 0.01 {
            return Err(Error::Config(format!(
                "bandwidth {} Hz inconsistent with slope x sampling time = {swept} Hz",
                self.bandwidth
            )));
        }
        let res = SPEED_OF_LIGHT / (2.0 * self.bandwidth);
        if rel_diff(res, self.range_resolution) > 0.01 {
            return Err(Error::Config(format!(
                "range_resolution {} m inconsistent with c/(2B) = {res} m",
                self.range_resolution
            )));
        }
        if self.max_range > self.unambiguous_range() {
            return Err(Error::Config(format!(
                "max_range {} m exceeds sampled beat-frequency limit {} m",
                self.max_range,
                self.unambiguous_range()
            )));
        }
        if self.max_velocity > self.unambiguous_velocity() {
            return Err(Error::Config(format!(
                "max_velocity {} m/s exceeds unambiguous Doppler limit {} m/s",
                self.max_velocity,
                self.unambiguous_velocity()
            )));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.start_freq
    }

    /// Duration of the sampled ramp.
    pub fn ramp_time(&self) -> f64 {
        self.n_samples_per_chirp as f64 / self.sample_rate
    }

    /// Chirp repetition interval (idle + sampled ramp).
    pub fn chirp_period(&self) -> f64 {
        self.idle_time + self.ramp_time()
    }

    pub fn range_fft_size(&self) -> usize {
        self.n_samples_per_chirp.next_power_of_two()
    }

    pub fn doppler_fft_size(&self) -> usize {
        self.n_chirps_per_frame.next_power_of_two()
    }

    pub fn beat_frequency(&self, range: f64) -> f64 {
        2.0 * self.chirp_slope * range / SPEED_OF_LIGHT
    }

    /// Metres per range-FFT bin (after zero padding).
    pub fn range_bin_width(&self) -> f64 {
        SPEED_OF_LIGHT * self.sample_rate / (2.0 * self.chirp_slope * self.range_fft_size() as f64)
    }

    /// Metres per second per Doppler-FFT bin.
    pub fn velocity_bin_width(&self) -> f64 {
        self.wavelength() / (2.0 * self.chirp_period() * self.doppler_fft_size() as f64)
    }

    /// Largest range whose beat frequency stays below the complex sample rate.
    pub fn unambiguous_range(&self) -> f64 {
        SPEED_OF_LIGHT * self.sample_rate / (2.0 * self.chirp_slope)
    }

    pub fn unambiguous_velocity(&self) -> f64 {
        self.wavelength() / (4.0 * self.chirp_period())
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
