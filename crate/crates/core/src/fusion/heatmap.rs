use serde::{Deserialize, Serialize};

use crate::camera::{project_point, Box2D, CameraModel};
use crate::error::{Error, Result};
use crate::pointcloud::RadarPoint;
use crate::scalar::Scalar;

pub const ROI_SIZE: usize = 7;
pub const N_CHANNELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeatmapConfig {
    /// px per heatmap cell
    pub cell_size: f64,
    /// fixed `[lo, hi]` depth normalization (m); per-frame min/max when absent
    pub depth_bounds: Option<[f64; 2]>,
    /// fixed `[lo, hi]` velocity normalization (m/s)
    pub velocity_bounds: Option<[f64; 2]>,
}

impl Default for HeatmapConfig {
    fn default() -> Self {
        Self {
            cell_size: 16.0,
            depth_bounds: None,
            velocity_bounds: None,
        }
    }
}

impl HeatmapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cell_size.is_finite() && self.cell_size > 0.0) {
            return Err(Error::Config(format!(
                "cell_size must be > 0, got {}",
                self.cell_size
            )));
        }
        for b in [self.depth_bounds, self.velocity_bounds]
            .into_iter()
            .flatten()
        {
            if !(b[0] < b[1]) {
                return Err(Error::Config(format!(
                    "normalization bounds {b:?} must be increasing"
                )));
            }
        }
        Ok(())
    }
}

/// Per-channel normalization actually applied: `[lo, hi]` for depth and velocity,
/// the count divisor for channel 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBounds {
    pub max_count: f64,
    pub depth: [f64; 2],
    pub velocity: [f64; 2],
}

/// Three channels over image cells: point count, mean camera depth, mean
/// radial velocity, each scaled to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarHeatmap<T> {
    pub rows: usize,
    pub cols: usize,
    pub cell_size: f64,
    /// `[count, mean depth, mean velocity]` per cell before normalization
    pub raw: Vec<[T; N_CHANNELS]>,
    /// normalized, channel-major `[c][row][col]`
    pub values: Vec<T>,
    pub bounds: NormBounds,
}

impl<T: Scalar> RadarHeatmap<T> {
    pub fn zeros(rows: usize, cols: usize, cell_size: f64) -> Self {
        Self {
            rows,
            cols,
            cell_size,
            raw: vec![[T::zero(); N_CHANNELS]; rows * cols],
            values: vec![T::zero(); N_CHANNELS * rows * cols],
            bounds: NormBounds {
                max_count: 0.0,
                depth: [0.0; 2],
                velocity: [0.0; 2],
            },
        }
    }

    /// A heatmap from already-normalized channel-major values.
    pub fn from_values(rows: usize, cols: usize, cell_size: f64, values: Vec<T>) -> Result<Self> {
        if values.len() != N_CHANNELS * rows * cols {
            return Err(Error::Input(format!(
                "expected {} heatmap values, got {}",
                N_CHANNELS * rows * cols,
                values.len()
            )));
        }
        let mut hm = Self::zeros(rows, cols, cell_size);
        hm.values = values;
        Ok(hm)
    }

    pub fn get(&self, c: usize, r: usize, col: usize) -> T {
        self.values[(c * self.rows + r) * self.cols + col]
    }

    pub fn raw_cell(&self, r: usize, col: usize) -> [T; N_CHANNELS] {
        self.raw[r * self.cols + col]
    }

    pub fn image_bounds(&self) -> Box2D<T> {
        let cs = T::lit(self.cell_size);
        Box2D {
            u_min: T::zero(),
            v_min: T::zero(),
            u_max: T::from_usize_lossy(self.cols) * cs,
            v_max: T::from_usize_lossy(self.rows) * cs,
        }
    }

    /// Bilinear sample at pixel coordinates, clamped at the borders.
    pub fn sample(&self, c: usize, u: T, v: T) -> T {
        let half = T::lit(0.5);
        let cs = T::lit(self.cell_size);
        let gx = (u / cs - half)
            .max(T::zero())
            .min(T::from_usize_lossy(self.cols - 1));
        let gy = (v / cs - half)
            .max(T::zero())
            .min(T::from_usize_lossy(self.rows - 1));
        let x0 = gx.floor().to_usize().unwrap_or(0).min(self.cols - 1);
        let y0 = gy.floor().to_usize().unwrap_or(0).min(self.rows - 1);
        let x1 = (x0 + 1).min(self.cols - 1);
        let y1 = (y0 + 1).min(self.rows - 1);
        let fx = gx - T::from_usize_lossy(x0);
        let fy = gy - T::from_usize_lossy(y0);
        let top = self.get(c, y0, x0) * (T::one() - fx) + self.get(c, y0, x1) * fx;
        let bottom = self.get(c, y1, x0) * (T::one() - fx) + self.get(c, y1, x1) * fx;
        top * (T::one() - fy) + bottom * fy
    }
}

fn normalize(v: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Projects points into image cells and normalizes each channel.
/// Points behind the camera or outside the image are skipped.
pub fn build_radar_heatmap<T: Scalar>(
    points: &[RadarPoint<T>],
    cam: &CameraModel,
    cfg: &HeatmapConfig,
) -> Result<RadarHeatmap<T>> {
    cfg.validate()?;
    cam.validate()?;
    let rows = (cam.rows() as f64 / cfg.cell_size).ceil() as usize;
    let cols = (cam.cols() as f64 / cfg.cell_size).ceil() as usize;
    let mut hm = RadarHeatmap::zeros(rows, cols, cfg.cell_size);
    let mut acc = vec![[0.0f64; N_CHANNELS]; rows * cols];
    let (w, h) = (cam.cols() as f64, cam.rows() as f64);
    for p in points {
        let xyz = [p.x, p.y, p.z];
        let Ok(px) = project_point(xyz, cam) else {
            continue;
        };
        let (u, v) = (px.u.as_f64(), px.v.as_f64());
        if !(u >= 0.0 && u < w && v >= 0.0 && v < h) {
            continue;
        }
        let (r, c) = ((v / cfg.cell_size) as usize, (u / cfg.cell_size) as usize);
        let cell = &mut acc[r * cols + c];
        cell[0] += 1.0;
        cell[1] += cam.to_camera(xyz)[2].as_f64();
        cell[2] += p.v.as_f64();
    }
    let occupied: Vec<usize> = (0..acc.len()).filter(|&i| acc[i][0] > 0.0).collect();
    for &i in &occupied {
        let n = acc[i][0];
        acc[i][1] /= n;
        acc[i][2] /= n;
    }
    let span = |ch: usize, fixed: Option<[f64; 2]>| {
        fixed.unwrap_or_else(|| {
            occupied
                .iter()
                .fold([f64::INFINITY, f64::NEG_INFINITY], |b, &i| {
                    [b[0].min(acc[i][ch]), b[1].max(acc[i][ch])]
                })
        })
    };
    let max_count = occupied.iter().fold(0.0f64, |m, &i| m.max(acc[i][0]));
    let depth = span(1, cfg.depth_bounds);
    let velocity = span(2, cfg.velocity_bounds);
    let plane = rows * cols;
    for &i in &occupied {
        let a = acc[i];
        hm.raw[i] = [T::lit(a[0]), T::lit(a[1]), T::lit(a[2])];
        hm.values[i] = T::lit(a[0] / max_count);
        hm.values[plane + i] = T::lit(normalize(a[1], depth[0], depth[1]));
        hm.values[2 * plane + i] = T::lit(normalize(a[2], velocity[0], velocity[1]));
    }
    hm.bounds = NormBounds {
        max_count,
        depth,
        velocity,
    };
    Ok(hm)
}

/// 7x7 bilinear crop per channel, stored `[c][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiFeature<T> {
    pub values: [T; N_CHANNELS * ROI_SIZE * ROI_SIZE],
}

impl<T: Scalar> RoiFeature<T> {
    pub fn get(&self, c: usize, i: usize, j: usize) -> T {
        self.values[(c * ROI_SIZE + i) * ROI_SIZE + j]
    }

    pub fn channel(&self, c: usize) -> &[T] {
        &self.values[c * ROI_SIZE * ROI_SIZE..(c + 1) * ROI_SIZE * ROI_SIZE]
    }
}

/// Samples sit at `(i + 0.5) / 7` of the box span after clamping it to the heatmap.
pub fn crop_roi<T: Scalar>(hm: &RadarHeatmap<T>, bbox: &Box2D<T>) -> Result<RoiFeature<T>> {
    let b = bbox.clamp_to(&hm.image_bounds());
    if !(b.width() > T::zero() && b.height() > T::zero()) {
        return Err(Error::DegenerateBox(format!(
            "RoI {bbox:?} has no area inside the image"
        )));
    }
    let n = T::from_usize_lossy(ROI_SIZE);
    let half = T::lit(0.5);
    let mut values = [T::zero(); N_CHANNELS * ROI_SIZE * ROI_SIZE];
    for i in 0..ROI_SIZE {
        let v = b.v_min + (T::from_usize_lossy(i) + half) / n * b.height();
        for j in 0..ROI_SIZE {
            let u = b.u_min + (T::from_usize_lossy(j) + half) / n * b.width();
            for c in 0..N_CHANNELS {
                values[(c * ROI_SIZE + i) * ROI_SIZE + j] = hm.sample(c, u, v);
            }
        }
    }
    Ok(RoiFeature { values })
}
