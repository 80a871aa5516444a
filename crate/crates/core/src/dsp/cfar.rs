//! Two-dimensional cell-averaging CFAR over a range-Doppler power grid.

use serde::{Deserialize, Serialize};

use super::spectrum::{Grid, RangeDopplerMap};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfarConfig {
    /// guard cells on each side of the cell under test
    pub guard_cells: usize,
    /// training cells on each side, outside the guard ring
    pub training_cells: usize,
    /// detection threshold as a multiple of the training-cell mean
    pub scale_factor: f64,
}

impl Default for CfarConfig {
    fn default() -> Self {
        Self::for_pfa(2, 4, 1e-6)
    }
}

impl CfarConfig {
    /// Chooses `scale_factor` for a target false-alarm probability, assuming
    /// exponentially distributed (square-law) noise cells.
    pub fn for_pfa(guard_cells: usize, training_cells: usize, pfa: f64) -> Self {
        let n = Self::n_training_for(guard_cells, training_cells) as f64;
        Self {
            guard_cells,
            training_cells,
            scale_factor: n * (pfa.powf(-1.0 / n) - 1.0),
        }
    }

    fn n_training_for(guard: usize, training: usize) -> usize {
        let outer = 2 * (guard + training) + 1;
        let inner = 2 * guard + 1;
        outer * outer - inner * inner
    }

    pub fn n_training(&self) -> usize {
        Self::n_training_for(self.guard_cells, self.training_cells)
    }

    pub fn half_window(&self) -> usize {
        self.guard_cells + self.training_cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfarDetection<T> {
    pub range_bin: usize,
    pub doppler_bin: usize,
    /// cell value over training mean
    pub snr: T,
}

/// Runs CA-CFAR on the channel-integrated power of `map`.
pub fn cfar_detect<T: Scalar>(
    map: &RangeDopplerMap<T>,
    cfg: &CfarConfig,
) -> Result<Vec<CfarDetection<T>>> {
    ca_cfar(&map.integrated_power(), cfg)
}

/// Grid rows are Doppler bins, columns are range bins. Cells whose window
/// leaves the grid are not tested. Output is sorted by descending SNR.
pub fn ca_cfar<T: Scalar>(grid: &Grid<T>, cfg: &CfarConfig) -> Result<Vec<CfarDetection<T>>> {
    if cfg.training_cells == 0 {
        return Err(Error::Config(
            "CFAR needs at least one training cell".into(),
        ));
    }
    if !(cfg.scale_factor.is_finite() && cfg.scale_factor > 0.0) {
        return Err(Error::Config(format!(
            "CFAR scale factor must be positive, got {}",
            cfg.scale_factor
        )));
    }
    let hw = cfg.half_window();
    let span = 2 * hw + 1;
    if grid.rows < span || grid.cols < span {
        return Err(Error::Config(format!(
            "CFAR window {span}x{span} larger than {}x{} map",
            grid.rows, grid.cols
        )));
    }
    let sat = SummedArea::new(grid);
    let g = cfg.guard_cells;
    let n_train = T::from_usize_lossy(cfg.n_training());
    let scale = T::lit(cfg.scale_factor);
    let mut out = Vec::new();
    for r in hw..grid.rows - hw {
        for c in hw..grid.cols - hw {
            let outer: T = sat.sum(r - hw, c - hw, r + hw, c + hw);
            let inner: T = sat.sum(r - g, c - g, r + g, c + g);
            let noise = (outer - inner) / n_train;
            let v = grid.get(r, c);
            if v > scale * noise {
                let snr = if noise > T::zero() {
                    v / noise
                } else {
                    T::infinity()
                };
                out.push(CfarDetection {
                    range_bin: c,
                    doppler_bin: r,
                    snr,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        b.snr
            .partial_cmp(&a.snr)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.doppler_bin.cmp(&b.doppler_bin))
            .then(a.range_bin.cmp(&b.range_bin))
    });
    Ok(out)
}

/// Keeps detections that are local maxima of `grid` among their 8 neighbours.
pub fn local_peaks<T: Scalar>(
    grid: &Grid<T>,
    dets: Vec<CfarDetection<T>>,
) -> Vec<CfarDetection<T>> {
    dets.into_iter()
        .filter(|d| {
            let v = grid.get(d.doppler_bin, d.range_bin);
            let r0 = d.doppler_bin.saturating_sub(1);
            let r1 = (d.doppler_bin + 1).min(grid.rows - 1);
            let c0 = d.range_bin.saturating_sub(1);
            let c1 = (d.range_bin + 1).min(grid.cols - 1);
            (r0..=r1).all(|r| {
                (c0..=c1).all(|c| {
                    let n = grid.get(r, c);
                    (r, c) == (d.doppler_bin, d.range_bin)
                        || n < v
                        || (n == v && (r, c) > (d.doppler_bin, d.range_bin))
                })
            })
        })
        .collect()
}

// Accumulated in f64 so large grids do not lose the small training sums.
struct SummedArea {
    cols: usize,
    acc: Vec<f64>,
}

impl SummedArea {
    fn new<T: Scalar>(grid: &Grid<T>) -> Self {
        let cols = grid.cols + 1;
        let mut acc = vec![0.0; (grid.rows + 1) * cols];
        for r in 0..grid.rows {
            let mut row = 0.0;
            for c in 0..grid.cols {
                row += grid.get(r, c).as_f64();
                acc[(r + 1) * cols + c + 1] = acc[r * cols + c + 1] + row;
            }
        }
        Self { cols, acc }
    }

    /// Inclusive rectangle sum.
    fn sum<T: Scalar>(&self, r0: usize, c0: usize, r1: usize, c1: usize) -> T {
        let a = |r: usize, c: usize| self.acc[r * self.cols + c];
        T::lit(a(r1 + 1, c1 + 1) - a(r0, c1 + 1) - a(r1 + 1, c0) + a(r0, c0))
    }
}
