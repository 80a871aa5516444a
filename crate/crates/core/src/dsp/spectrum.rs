use num_complex::Complex;
use rustfft::{FftNum, FftPlanner};
use serde::{Deserialize, Serialize};

use super::cube::AdcCube;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Scalars usable by the FFT stages.
pub trait DspScalar: Scalar + FftNum {}
impl<T: Scalar + FftNum> DspScalar for T {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    #[default]
    Hann,
    Rectangular,
}

impl WindowKind {
    pub fn coefficients<T: Scalar>(self, n: usize) -> Vec<T> {
        match self {
            WindowKind::Rectangular => vec![T::one(); n],
            WindowKind::Hann if n < 2 => vec![T::one(); n],
            WindowKind::Hann => {
                let denom = (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        T::lit(0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / denom).cos())
                    })
                    .collect()
            }
        }
    }
}

/// Range-FFT output indexed `[channel][chirp][range_bin]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeSpectra<T> {
    pub n_channels: usize,
    pub n_chirps: usize,
    pub n_fft: usize,
    pub range_bin_m: f64,
    pub velocity_bin_mps: f64,
    pub data: Vec<Complex<T>>,
}

impl<T> RangeSpectra<T> {
    pub fn chirp(&self, channel: usize, chirp: usize) -> &[Complex<T>] {
        let o = (channel * self.n_chirps + chirp) * self.n_fft;
        &self.data[o..o + self.n_fft]
    }
}

/// Windowed, zero-padded FFT over fast time.
pub fn range_fft<T: DspScalar>(cube: &AdcCube<T>, window: WindowKind) -> Result<RangeSpectra<T>> {
    let n = cube.n_samples();
    if n < 2 {
        return Err(Error::Config(
            "range FFT needs at least 2 samples per chirp".into(),
        ));
    }
    let cfg = cube.config();
    let n_fft = n.next_power_of_two();
    let w = window.coefficients::<T>(n);
    let fft = FftPlanner::<T>::new().plan_fft_forward(n_fft);
    let zero = Complex::new(T::zero(), T::zero());
    let mut data = vec![zero; cube.n_channels() * cube.n_chirps() * n_fft];
    for ch in 0..cube.n_channels() {
        for m in 0..cube.n_chirps() {
            let o = (ch * cube.n_chirps() + m) * n_fft;
            let buf = &mut data[o..o + n_fft];
            for (dst, (s, &wk)) in buf.iter_mut().zip(cube.chirp(ch, m).iter().zip(&w)) {
                *dst = s.scale(wk);
            }
            fft.process(buf);
        }
    }
    Ok(RangeSpectra {
        n_channels: cube.n_channels(),
        n_chirps: cube.n_chirps(),
        n_fft,
        range_bin_m: cfg.range_bin_width(),
        velocity_bin_mps: cfg.velocity_bin_width(),
        data,
    })
}

/// Complex range-Doppler cells indexed `[channel][doppler_bin][range_bin]`.
///
/// Doppler bins are FFT-shifted: bin `n_doppler / 2` is zero velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerMap<T> {
    pub n_channels: usize,
    pub n_doppler: usize,
    pub n_range: usize,
    /// metres per range bin
    pub range_bin_m: f64,
    /// m/s per Doppler bin
    pub velocity_bin_mps: f64,
    pub cells: Vec<Complex<T>>,
}

impl<T: Scalar> RangeDopplerMap<T> {
    fn index(&self, channel: usize, doppler: usize, range: usize) -> usize {
        (channel * self.n_doppler + doppler) * self.n_range + range
    }

    pub fn cell(&self, channel: usize, doppler: usize, range: usize) -> Complex<T> {
        self.cells[self.index(channel, doppler, range)]
    }

    pub fn magnitude(&self, channel: usize, doppler: usize, range: usize) -> T {
        self.cell(channel, doppler, range).norm()
    }

    /// Values of one cell across receive channels.
    pub fn snapshot(&self, doppler: usize, range: usize) -> Vec<Complex<T>> {
        (0..self.n_channels)
            .map(|k| self.cell(k, doppler, range))
            .collect()
    }

    /// Power summed over channels, as a `[doppler][range]` grid.
    pub fn integrated_power(&self) -> Grid<T> {
        let mut g = Grid::zeros(self.n_doppler, self.n_range);
        for ch in 0..self.n_channels {
            let base = ch * self.n_doppler * self.n_range;
            for (dst, c) in g
                .data
                .iter_mut()
                .zip(&self.cells[base..base + self.n_doppler * self.n_range])
            {
                *dst += c.norm_sqr();
            }
        }
        g
    }

    pub fn velocity_of_bin(&self, doppler: usize) -> f64 {
        (doppler as f64 - (self.n_doppler / 2) as f64) * self.velocity_bin_mps
    }

    pub fn range_of_bin(&self, range: usize) -> f64 {
        range as f64 * self.range_bin_m
    }
}

/// Windowed FFT across chirps for every range bin, FFT-shifted.
pub fn doppler_fft<T: DspScalar>(
    spectra: &RangeSpectra<T>,
    window: WindowKind,
) -> Result<RangeDopplerMap<T>> {
    let m = spectra.n_chirps;
    if m < 2 {
        return Err(Error::Config(
            "Doppler FFT needs at least 2 chirps per frame".into(),
        ));
    }
    let n_doppler = m.next_power_of_two();
    let w = window.coefficients::<T>(m);
    let fft = FftPlanner::<T>::new().plan_fft_forward(n_doppler);
    let zero = Complex::new(T::zero(), T::zero());
    let n_range = spectra.n_fft;
    let mut cells = vec![zero; spectra.n_channels * n_doppler * n_range];
    let mut column = vec![zero; n_doppler];
    let half = n_doppler / 2;
    for ch in 0..spectra.n_channels {
        for r in 0..n_range {
            column.fill(zero);
            for (chirp, (dst, &wk)) in column.iter_mut().zip(&w).enumerate() {
                *dst = spectra.chirp(ch, chirp)[r].scale(wk);
            }
            fft.process(&mut column);
            for (k, v) in column.iter().enumerate() {
                let shifted = (k + half) % n_doppler;
                cells[(ch * n_doppler + shifted) * n_range + r] = *v;
            }
        }
    }
    Ok(RangeDopplerMap {
        n_channels: spectra.n_channels,
        n_doppler,
        n_range,
        range_bin_m: spectra.range_bin_m,
        velocity_bin_mps: spectra.velocity_bin_mps,
        cells,
    })
}

/// Dense real grid `[row][col]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, v: T) -> Self {
        Self {
            rows,
            cols,
            data: vec![v; rows * cols],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }
}
