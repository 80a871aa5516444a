//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use fusedet::dsp::Grid;
use fusedet::pointcloud::{ClusterConfig, RadarPoint};
use num_complex::Complex;

/// Direct O(N²) forward DFT.
pub fn dft(x: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(i, &v)| v * Complex::from_polar(1.0, -2.0 * PI * (k * i) as f64 / n as f64))
                .sum()
        })
        .collect()
}

/// Largest elementwise error relative to the largest oracle magnitude.
pub fn max_rel_err(a: &[Complex<f64>], oracle: &[Complex<f64>]) -> f64 {
    let scale = oracle
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    a.iter()
        .zip(oracle)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

/// Cluster index per point (`None` for noise) from an explicit
/// density-connectivity construction: core points joined by union-find,
/// components numbered by their lowest core index, border points attached to
/// the lowest-numbered adjacent component.
pub fn dbscan_oracle(points: &[RadarPoint<f64>], cfg: &ClusterConfig) -> Vec<Option<usize>> {
    let n = points.len();
    let d = |i: usize, j: usize| {
        let (p, q) = (&points[i], &points[j]);
        let a = cfg.alpha;
        a[0] * (p.x - q.x).powi(2)
            + a[1] * (p.y - q.y).powi(2)
            + a[2] * (p.z - q.z).powi(2)
            + a[3] * (p.v - q.v).powi(2)
    };
    let adj = |i: usize, j: usize| d(i, j) <= cfg.eps;
    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| adj(i, j)).count() >= cfg.min_pts)
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in 0..n {
            if core[i] && core[j] && adj(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut component_of_root = std::collections::BTreeMap::new();
    let mut label = vec![None; n];
    for i in 0..n {
        if core[i] {
            let r = find(&mut parent, i);
            let next = component_of_root.len();
            label[i] = Some(*component_of_root.entry(r).or_insert(next));
        }
    }
    for i in 0..n {
        if !core[i] {
            label[i] = (0..n)
                .filter(|&j| core[j] && adj(i, j))
                .filter_map(|j| label[j])
                .min();
        }
    }
    label
}

/// Minimum total over every injective assignment of the shorter side.
pub fn brute_force_assignment(cost: &[Vec<f64>]) -> f64 {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let (short, long, get): (usize, usize, Box<dyn Fn(usize, usize) -> f64>) = if rows <= cols {
        (rows, cols, Box::new(|s, l| cost[s][l]))
    } else {
        (cols, rows, Box::new(|s, l| cost[l][s]))
    };
    fn rec(
        s: usize,
        short: usize,
        long: usize,
        used: &mut Vec<bool>,
        acc: f64,
        best: &mut f64,
        get: &dyn Fn(usize, usize) -> f64,
    ) {
        if s == short {
            *best = best.min(acc);
            return;
        }
        for l in 0..long {
            if !used[l] {
                used[l] = true;
                rec(s + 1, short, long, used, acc + get(s, l), best, get);
                used[l] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(
        0,
        short,
        long,
        &mut vec![false; long],
        0.0,
        &mut best,
        &*get,
    );
    best
}

/// Direct sliding-window CA-CFAR: `(doppler_bin, range_bin)` of every
/// tested cell exceeding `scale` times the mean of its training ring.
pub fn cfar_oracle(
    grid: &Grid<f64>,
    guard: usize,
    train: usize,
    scale: f64,
) -> Vec<(usize, usize)> {
    let hw = guard + train;
    let mut out = Vec::new();
    for r in hw..grid.rows - hw {
        for c in hw..grid.cols - hw {
            let (mut sum, mut count) = (0.0, 0usize);
            for rr in r - hw..=r + hw {
                for cc in c - hw..=c + hw {
                    if rr.abs_diff(r) > guard || cc.abs_diff(c) > guard {
                        sum += grid.get(rr, cc);
                        count += 1;
                    }
                }
            }
            if grid.get(r, c) > scale * sum / count as f64 {
                out.push((r, c));
            }
        }
    }
    out
}
