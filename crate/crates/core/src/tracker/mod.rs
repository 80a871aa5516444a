//! Frame-to-frame association of radar boxes and Kalman smoothing.

mod hungarian;
mod kalman;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use hungarian::{hungarian_assign, Assignment};
pub use kalman::{
    kalman_predict, kalman_update, observe, KalmanConfig, KalmanModel, OBSERVED, OBS_DIM, STATE_DIM,
};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::pointcloud::ClusterBox;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    /// consecutive missed frames after which a track is deleted
    pub t_max: u32,
    /// m; pairs farther apart are never associated
    pub gate_distance: f64,
    /// s between frames
    pub dt: f64,
    /// updates needed before a track is reported as confirmed
    pub min_hits: u32,
    pub kalman: KalmanConfig,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            t_max: 5,
            gate_distance: 1.0,
            dt: 0.1,
            min_hits: 2,
            kalman: KalmanConfig::default(),
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_max < 1 {
            return Err(Error::Config("t_max must be >= 1".into()));
        }
        if !(self.gate_distance.is_finite() && self.gate_distance > 0.0) {
            return Err(Error::Config(format!(
                "gate_distance must be > 0, got {}",
                self.gate_distance
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackState<T> {
    pub track_id: u64,
    /// `(x, y, z, vx, vy, vz, w, h, t)`
    pub state: [T; STATE_DIM],
    pub cov: Matrix<T>,
    pub frames_since_update: u32,
    pub hits: u32,
}

impl<T: Scalar> TrackState<T> {
    pub fn center(&self) -> [T; 3] {
        [self.state[0], self.state[1], self.state[2]]
    }

    pub fn velocity(&self) -> [T; 3] {
        [self.state[3], self.state[4], self.state[5]]
    }

    /// The track as an observation-shaped box (radial velocity slot = vz).
    pub fn as_box(&self) -> ClusterBox<T> {
        ClusterBox::from_array(observe(&self.state))
    }
}

/// Euclidean distance between box centres.
pub fn association_cost<T: Scalar>(track: &TrackState<T>, det: &ClusterBox<T>) -> T {
    let c = track.center();
    let dx = c[0] - det.x;
    let dy = c[1] - det.y;
    let dz = c[2] - det.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    /// track id owning each input detection
    pub assignments: Vec<u64>,
    /// ids deleted this frame
    pub removed: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct Tracker<T> {
    cfg: TrackerConfig,
    model: KalmanModel<T>,
    tracks: Vec<TrackState<T>>,
    next_id: u64,
}

impl<T: Scalar> Tracker<T> {
    pub fn new(cfg: TrackerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            model: KalmanModel::constant_velocity(cfg.dt, &cfg.kalman),
            cfg,
            tracks: Vec::new(),
            next_id: 0,
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    pub fn model(&self) -> &KalmanModel<T> {
        &self.model
    }

    pub fn tracks(&self) -> &[TrackState<T>] {
        &self.tracks
    }

    /// Tracks with at least `min_hits` updates that were matched this frame.
    pub fn confirmed(&self) -> impl Iterator<Item = &TrackState<T>> {
        let min_hits = self.cfg.min_hits;
        self.tracks
            .iter()
            .filter(move |t| t.hits >= min_hits && t.frames_since_update == 0)
    }

    /// predict -> gate + assign -> update -> coast/kill -> spawn
    pub fn step(&mut self, detections: &[ClusterBox<T>]) -> Result<StepOutput> {
        for tr in &mut self.tracks {
            let (s, p) = kalman_predict(&tr.state, &tr.cov, &self.model);
            tr.state = s;
            tr.cov = p;
        }

        let gate = T::lit(self.cfg.gate_distance);
        let sentinel = T::lit(self.cfg.gate_distance.max(1.0) * 1e6);
        let mut cost = Matrix::zeros(self.tracks.len(), detections.len());
        for (i, tr) in self.tracks.iter().enumerate() {
            for (j, det) in detections.iter().enumerate() {
                let d = association_cost(tr, det);
                cost[(i, j)] = if d <= gate { d } else { sentinel };
            }
        }
        let assignment = hungarian_assign(&cost)?;

        let mut track_matched = vec![false; self.tracks.len()];
        let mut det_owner: Vec<Option<u64>> = vec![None; detections.len()];
        for &(i, j) in &assignment.pairs {
            if cost[(i, j)] > gate {
                continue;
            }
            let tr = &mut self.tracks[i];
            let (s, p) = kalman_update(&tr.state, &tr.cov, &detections[j].to_array(), &self.model)?;
            tr.state = s;
            clamp_extents(&mut tr.state);
            tr.cov = p;
            tr.frames_since_update = 0;
            tr.hits += 1;
            track_matched[i] = true;
            det_owner[j] = Some(tr.track_id);
        }

        let mut removed = Vec::new();
        let mut idx = 0;
        self.tracks.retain_mut(|tr| {
            let matched = track_matched[idx];
            idx += 1;
            if !matched {
                tr.frames_since_update += 1;
            }
            if tr.frames_since_update >= self.cfg.t_max {
                removed.push(tr.track_id);
                false
            } else {
                true
            }
        });

        let mut assignments = Vec::with_capacity(detections.len());
        for (j, det) in detections.iter().enumerate() {
            let id = match det_owner[j] {
                Some(id) => id,
                None => self.spawn(det),
            };
            assignments.push(id);
        }
        Ok(StepOutput {
            assignments,
            removed,
        })
    }

    fn spawn(&mut self, det: &ClusterBox<T>) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        let z = T::zero();
        let mut state = [det.x, det.y, det.z, z, z, z, det.w, det.h, det.t];
        clamp_extents(&mut state);
        self.tracks.push(TrackState {
            track_id: id,
            state,
            cov: self.model.p0.clone(),
            frames_since_update: 0,
            hits: 1,
        });
        id
    }
}

/// Writes `frame,track_id,x,y,z,vx,vy,vz,w,h,t` rows.
pub fn write_track_history<T: Scalar, W: Write>(
    w: W,
    history: &[(usize, Vec<TrackState<T>>)],
) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record([
        "frame", "track_id", "x", "y", "z", "vx", "vy", "vz", "w", "h", "t",
    ])?;
    for (frame, tracks) in history {
        for tr in tracks {
            let mut rec = vec![frame.to_string(), tr.track_id.to_string()];
            rec.extend(tr.state.iter().map(|v| format!("{:.6}", v.as_f64())));
            wr.write_record(&rec)?;
        }
    }
    wr.flush()?;
    Ok(())
}

fn clamp_extents<T: Scalar>(state: &mut [T; STATE_DIM]) {
    for v in &mut state[6..] {
        *v = v.max(T::zero());
    }
}
