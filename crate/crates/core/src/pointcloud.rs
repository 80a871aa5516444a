//! Radar point clustering and 3D box extraction.
//!
//! Axis convention throughout the radar frame: `x` lateral (right), `y`
//! depth along boresight, `z` up. A cluster's width spans `x`, its
//! thickness spans `y` and its height spans `z`.

use std::collections::VecDeque;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One radar return: position (m) and radial velocity (m/s).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RadarPoint<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub v: T,
}

impl<T: Scalar> RadarPoint<T> {
    pub fn new(x: T, y: T, z: T, v: T) -> Self {
        Self { x, y, z, v }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.v.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    /// weights on (dx², dy², dz², dv²)
    pub alpha: [f64; 4],
    /// neighbourhood threshold in squared weighted units
    pub eps: f64,
    pub min_pts: usize,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            alpha: [1.0, 1.0, 1.0, 0.5],
            eps: 0.09,
            min_pts: 3,
        }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alpha.iter().any(|a| !(a.is_finite() && *a >= 0.0))
            || self.alpha.iter().all(|a| *a == 0.0)
        {
            return Err(Error::Config(format!(
                "alpha weights must be >= 0 with at least one positive, got {:?}",
                self.alpha
            )));
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::Config(format!("eps must be > 0, got {}", self.eps)));
        }
        if self.min_pts < 1 {
            return Err(Error::Config("min_pts must be >= 1".into()));
        }
        Ok(())
    }
}

/// Squared weighted distance between two returns. No square root is taken,
/// so `eps` thresholds are in the same squared units.
pub fn weighted_distance<T: Scalar>(p: &RadarPoint<T>, q: &RadarPoint<T>, alpha: &[T; 4]) -> T {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let dz = p.z - q.z;
    let dv = p.v - q.v;
    alpha[0] * dx * dx + alpha[1] * dy * dy + alpha[2] * dz * dz + alpha[3] * dv * dv
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Cluster(usize),
    Outlier,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabeling {
    pub labels: Vec<Label>,
    pub n_clusters: usize,
}

impl ClusterLabeling {
    /// Member indices of each cluster, in cluster order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_clusters];
        for (i, l) in self.labels.iter().enumerate() {
            if let Label::Cluster(c) = l {
                out[*c].push(i);
            }
        }
        out
    }

    pub fn n_outliers(&self) -> usize {
        self.labels.iter().filter(|l| **l == Label::Outlier).count()
    }
}

/// DBSCAN under [`weighted_distance`].
///
/// Neighbourhoods are inclusive (`d <= eps`) and contain the point itself.
/// Points are visited in input order and each new cluster is expanded
/// breadth-first, so a border point reachable from several clusters joins
/// the one created first.
pub fn dbscan<T: Scalar>(points: &[RadarPoint<T>], cfg: &ClusterConfig) -> ClusterLabeling {
    let alpha = cfg.alpha.map(T::lit);
    let eps = T::lit(cfg.eps);
    let n = points.len();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| weighted_distance(&points[i], &points[j], &alpha) <= eps)
                .collect()
        })
        .collect();
    let is_core = |i: usize| neighbours[i].len() >= cfg.min_pts;

    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut n_clusters = 0;
    let mut queue = VecDeque::new();
    for i in 0..n {
        if labels[i].is_some() {
            continue;
        }
        if !is_core(i) {
            labels[i] = Some(Label::Outlier);
            continue;
        }
        let cid = n_clusters;
        n_clusters += 1;
        labels[i] = Some(Label::Cluster(cid));
        queue.extend(neighbours[i].iter().copied());
        while let Some(j) = queue.pop_front() {
            match labels[j] {
                Some(Label::Cluster(_)) => continue,
                Some(Label::Outlier) => {
                    labels[j] = Some(Label::Cluster(cid));
                }
                None => {
                    labels[j] = Some(Label::Cluster(cid));
                    if is_core(j) {
                        queue.extend(neighbours[j].iter().copied());
                    }
                }
            }
        }
    }
    ClusterLabeling {
        labels: labels
            .into_iter()
            .map(|l| l.unwrap_or(Label::Outlier))
            .collect(),
        n_clusters,
    }
}

/// Axis-aligned 3D detection: centroid (m), mean radial velocity (m/s)
/// stored in the `v_z` slot, and extents (m).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClusterBox<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub v_z: T,
    /// extent along x
    pub w: T,
    /// extent along z
    pub h: T,
    /// extent along y
    pub t: T,
}

impl<T: Scalar> ClusterBox<T> {
    /// Observation order `(x, y, z, v_z, w, h, t)`.
    pub fn to_array(&self) -> [T; 7] {
        [self.x, self.y, self.z, self.v_z, self.w, self.h, self.t]
    }

    pub fn from_array(a: [T; 7]) -> Self {
        Self {
            x: a[0],
            y: a[1],
            z: a[2],
            v_z: a[3],
            w: a[4],
            h: a[5],
            t: a[6],
        }
    }

    pub fn center(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

/// Centroid, mean velocity and outermost-point extents of one cluster.
pub fn cluster_to_box<T: Scalar>(points: &[RadarPoint<T>]) -> Result<ClusterBox<T>> {
    let first = points
        .first()
        .ok_or_else(|| Error::Input("cannot build a box from an empty cluster".into()))?;
    let n = T::from_usize_lossy(points.len());
    let mut sum = [T::zero(); 4];
    let mut lo = [first.x, first.y, first.z];
    let mut hi = lo;
    for p in points {
        sum[0] += p.x;
        sum[1] += p.y;
        sum[2] += p.z;
        sum[3] += p.v;
        for (k, v) in [p.x, p.y, p.z].into_iter().enumerate() {
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    Ok(ClusterBox {
        x: sum[0] / n,
        y: sum[1] / n,
        z: sum[2] / n,
        v_z: sum[3] / n,
        w: hi[0] - lo[0],
        h: hi[2] - lo[2],
        t: hi[1] - lo[1],
    })
}

/// Clusters a frame and returns one box per cluster, in cluster order.
pub fn detect_boxes<T: Scalar>(
    points: &[RadarPoint<T>],
    cfg: &ClusterConfig,
) -> Vec<ClusterBox<T>> {
    let labeling = dbscan(points, cfg);
    labeling
        .clusters()
        .into_iter()
        .map(|members| {
            let pts: Vec<_> = members.iter().map(|&i| points[i]).collect();
            cluster_to_box(&pts).expect("dbscan clusters are non-empty")
        })
        .collect()
}

/// Writes `frame,x,y,z,v` rows.
pub fn write_points_csv<T: Scalar, W: Write>(
    w: W,
    frames: &[(usize, Vec<RadarPoint<T>>)],
) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["frame", "x", "y", "z", "v"])?;
    for (frame, pts) in frames {
        for p in pts {
            wr.write_record([
                frame.to_string(),
                format!("{:.6}", p.x.as_f64()),
                format!("{:.6}", p.y.as_f64()),
                format!("{:.6}", p.z.as_f64()),
                format!("{:.6}", p.v.as_f64()),
            ])?;
        }
    }
    wr.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct PointRow {
    frame: usize,
    x: f64,
    y: f64,
    z: f64,
    v: f64,
}

/// Reads `frame,x,y,z,v` rows, grouped by frame in ascending order.
pub fn read_points_csv<T: Scalar, R: Read>(r: R) -> Result<Vec<(usize, Vec<RadarPoint<T>>)>> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["frame", "x", "y", "z", "v"] {
        return Err(Error::Parse(format!(
            "unexpected point-cloud header {headers:?}"
        )));
    }
    let mut grouped: std::collections::BTreeMap<usize, Vec<RadarPoint<T>>> = Default::default();
    for row in rd.deserialize() {
        let row: PointRow = row?;
        grouped.entry(row.frame).or_default().push(RadarPoint::new(
            T::lit(row.x),
            T::lit(row.y),
            T::lit(row.z),
            T::lit(row.v),
        ));
    }
    Ok(grouped.into_iter().collect())
}
