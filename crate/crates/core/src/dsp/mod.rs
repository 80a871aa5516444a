//! FMCW front-end: raw ADC cube to radar point cloud.
//!
//! ```text
//! calibrate -> range FFT -> Doppler FFT -> CA-CFAR -> DOA -> points
//! ```

mod cfar;
mod config;
mod cube;
mod doa;
mod spectrum;
mod synth;

use serde::{Deserialize, Serialize};

pub use cfar::{ca_cfar, cfar_detect, local_peaks, CfarConfig, CfarDetection};
pub use config::{RadarConfig, SPEED_OF_LIGHT};
pub use cube::{calibrate_adc, AdcCube, ChannelCalibration};
pub use doa::{estimate_doa, DoaConfig};
pub use spectrum::{
    doppler_fft, range_fft, DspScalar, Grid, RangeDopplerMap, RangeSpectra, WindowKind,
};
pub use synth::{synthesize_adc, SynthTarget};

use crate::error::Result;
use crate::pointcloud::RadarPoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PointCloudConfig {
    pub cfar: CfarConfig,
    pub range_window: WindowKind,
    pub doppler_window: WindowKind,
    pub doa: DoaConfig,
    /// z assigned to every point; a linear array cannot resolve elevation
    pub sensor_height: f64,
    /// keep only CFAR hits that are local maxima of the power map
    pub peak_grouping: bool,
    /// bins at and below this range are ignored (DC leakage)
    pub min_range: f64,
}

impl Default for PointCloudConfig {
    fn default() -> Self {
        Self {
            cfar: CfarConfig::default(),
            range_window: WindowKind::Hann,
            doppler_window: WindowKind::Hann,
            doa: DoaConfig::default(),
            sensor_height: 0.0,
            peak_grouping: true,
            min_range: 0.3,
        }
    }
}

/// Full front-end chain for one frame.
pub fn cube_to_pointcloud<T: DspScalar>(
    cube: &AdcCube<T>,
    cal: &ChannelCalibration<T>,
    cfg: &PointCloudConfig,
) -> Result<Vec<RadarPoint<T>>> {
    let radar = cube.config();
    radar.validate()?;
    let calibrated = calibrate_adc(cube, cal)?;
    let spectra = range_fft(&calibrated, cfg.range_window)?;
    let map = doppler_fft(&spectra, cfg.doppler_window)?;
    let power = map.integrated_power();
    let mut dets = ca_cfar(&power, &cfg.cfar)?;
    if cfg.peak_grouping {
        dets = local_peaks(&power, dets);
    }
    let mut points = Vec::with_capacity(dets.len());
    for d in dets {
        let r = map.range_of_bin(d.range_bin);
        let v = map.velocity_of_bin(d.doppler_bin);
        if r <= cfg.min_range || r > radar.max_range || v.abs() > radar.max_velocity {
            continue;
        }
        let theta = if map.n_channels >= 2 {
            estimate_doa(&map.snapshot(d.doppler_bin, d.range_bin), &cfg.doa)?.as_f64()
        } else {
            0.0
        };
        points.push(RadarPoint::new(
            T::lit(r * theta.sin()),
            T::lit(r * theta.cos()),
            T::lit(cfg.sensor_height),
            T::lit(v),
        ));
    }
    Ok(points)
}
