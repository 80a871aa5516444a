use std::io::{Read, Write};

use num_complex::Complex;

use super::config::RadarConfig;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAGIC: &[u8; 4] = b"ADC1";

/// Raw complex samples indexed `[channel][chirp][sample]`, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct AdcCube<T> {
    config: RadarConfig,
    samples: Vec<Complex<T>>,
}

impl<T: Scalar> AdcCube<T> {
    pub fn zeros(config: RadarConfig) -> Self {
        let n = config.n_rx_channels * config.n_chirps_per_frame * config.n_samples_per_chirp;
        Self {
            config,
            samples: vec![Complex::new(T::zero(), T::zero()); n],
        }
    }

    pub fn from_samples(config: RadarConfig, samples: Vec<Complex<T>>) -> Result<Self> {
        let want = config.n_rx_channels * config.n_chirps_per_frame * config.n_samples_per_chirp;
        if samples.len() != want {
            return Err(Error::Input(format!(
                "cube has {} samples, config requires {want}",
                samples.len()
            )));
        }
        Ok(Self { config, samples })
    }

    pub fn config(&self) -> &RadarConfig {
        &self.config
    }

    pub fn n_channels(&self) -> usize {
        self.config.n_rx_channels
    }

    pub fn n_chirps(&self) -> usize {
        self.config.n_chirps_per_frame
    }

    pub fn n_samples(&self) -> usize {
        self.config.n_samples_per_chirp
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.samples
    }

    fn offset(&self, channel: usize, chirp: usize) -> usize {
        (channel * self.n_chirps() + chirp) * self.n_samples()
    }

    pub fn chirp(&self, channel: usize, chirp: usize) -> &[Complex<T>] {
        let o = self.offset(channel, chirp);
        &self.samples[o..o + self.n_samples()]
    }

    pub fn chirp_mut(&mut self, channel: usize, chirp: usize) -> &mut [Complex<T>] {
        let o = self.offset(channel, chirp);
        let n = self.n_samples();
        &mut self.samples[o..o + n]
    }

    pub fn channel(&self, channel: usize) -> &[Complex<T>] {
        let per = self.n_chirps() * self.n_samples();
        &self.samples[channel * per..(channel + 1) * per]
    }

    /// Writes the little-endian `ADC1` container.
    ///
    /// Layout: magic, `u32` channels/chirps/samples, the non-count config
    /// fields as `f64` in declaration order (start_freq, chirp_slope,
    /// idle_time, sample_rate, rx_gain, bandwidth, max_range,
    /// range_resolution, max_velocity), then interleaved `f32` (re, im).
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        for n in [self.n_channels(), self.n_chirps(), self.n_samples()] {
            let n = u32::try_from(n)
                .map_err(|_| Error::Input(format!("dimension {n} does not fit in u32")))?;
            w.write_all(&n.to_le_bytes())?;
        }
        for v in config_fields(&self.config) {
            w.write_all(&v.to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(self.samples.len() * 8);
        for s in &self.samples {
            buf.extend_from_slice(&(s.re.as_f64() as f32).to_le_bytes());
            buf.extend_from_slice(&(s.im.as_f64() as f32).to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Parse(format!("bad ADC magic {magic:?}")));
        }
        let mut dims = [0usize; 3];
        for d in &mut dims {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            *d = u32::from_le_bytes(b) as usize;
        }
        let mut f = [0f64; 9];
        for v in &mut f {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            *v = f64::from_le_bytes(b);
        }
        let config = RadarConfig {
            start_freq: f[0],
            chirp_slope: f[1],
            idle_time: f[2],
            sample_rate: f[3],
            rx_gain: f[4],
            n_samples_per_chirp: dims[2],
            n_chirps_per_frame: dims[1],
            n_rx_channels: dims[0],
            bandwidth: f[5],
            max_range: f[6],
            range_resolution: f[7],
            max_velocity: f[8],
        };
        let n = dims[0]
            .checked_mul(dims[1])
            .and_then(|v| v.checked_mul(dims[2]))
            .ok_or_else(|| Error::Parse("ADC dimensions overflow".into()))?;
        let mut raw = vec![0u8; n * 8];
        r.read_exact(&mut raw)?;
        let samples = raw
            .chunks_exact(8)
            .map(|c| {
                let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
                let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
                Complex::new(T::lit(re as f64), T::lit(im as f64))
            })
            .collect();
        Self::from_samples(config, samples)
    }
}

fn config_fields(c: &RadarConfig) -> [f64; 9] {
    [
        c.start_freq,
        c.chirp_slope,
        c.idle_time,
        c.sample_rate,
        c.rx_gain,
        c.bandwidth,
        c.max_range,
        c.range_resolution,
        c.max_velocity,
    ]
}

/// Per-channel affine correction: `gain[k] * (s - offset[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelCalibration<T> {
    gain: Vec<Complex<T>>,
    offset: Vec<Complex<T>>,
}

impl<T: Scalar> ChannelCalibration<T> {
    pub fn new(gain: Vec<Complex<T>>, offset: Vec<Complex<T>>) -> Result<Self> {
        if gain.len() != offset.len() {
            return Err(Error::Config(format!(
                "{} gains but {} offsets",
                gain.len(),
                offset.len()
            )));
        }
        if let Some(k) = gain.iter().position(|g| !(g.norm() > T::zero())) {
            return Err(Error::Config(format!(
                "channel {k} gain magnitude must be > 0"
            )));
        }
        Ok(Self { gain, offset })
    }

    pub fn identity(n_channels: usize) -> Self {
        Self {
            gain: vec![Complex::new(T::one(), T::zero()); n_channels],
            offset: vec![Complex::new(T::zero(), T::zero()); n_channels],
        }
    }

    pub fn n_channels(&self) -> usize {
        self.gain.len()
    }

    pub fn gain(&self) -> &[Complex<T>] {
        &self.gain
    }

    pub fn offset(&self) -> &[Complex<T>] {
        &self.offset
    }
}

pub fn calibrate_adc<T: Scalar>(
    cube: &AdcCube<T>,
    cal: &ChannelCalibration<T>,
) -> Result<AdcCube<T>> {
    if cal.n_channels() != cube.n_channels() {
        return Err(Error::Config(format!(
            "calibration has {} channels, cube has {}",
            cal.n_channels(),
            cube.n_channels()
        )));
    }
    let mut out = cube.clone();
    let per = cube.n_chirps() * cube.n_samples();
    for (k, chunk) in out.samples.chunks_mut(per).enumerate() {
        let (g, o) = (cal.gain[k], cal.offset[k]);
        for s in chunk {
            *s = g * (*s - o);
        }
    }
    Ok(out)
}
