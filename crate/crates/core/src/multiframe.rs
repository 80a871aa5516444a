//! Occlusion recovery across frames.
//!
//! Each detection is remembered with an image-plane velocity. Once an
//! identity has been seen `min_observations` times it is established and
//! counts towards the expected number of targets. When fewer established
//! identities are matched than memory holds, the missing ones that vanished
//! next to another detection (or at the image border) are re-emitted at
//! their extrapolated position until they have been absent for
//! `n_disappear` frames. One-frame false positives never become
//! established, so they neither mask a drop nor get recovered.

use serde::{Deserialize, Serialize};

use crate::camera::Box2D;
use crate::error::{Error, Result};
use crate::fusion::{Provenance, RefinedDetection};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MultiframeConfig {
    /// consecutive misses after which an entry is forgotten
    pub n_disappear: u32,
    /// px between extrapolated and observed box centres
    pub match_distance: f64,
    /// px/frame allowed between the stored and the implied velocity
    pub velocity_tolerance: f64,
    /// px band along the image border treated as an occluding region
    pub boundary_margin: f64,
    /// confidence factor per absent frame for recovered boxes
    pub decay: f64,
    /// weight of the newest displacement in the velocity estimate
    pub smoothing: f64,
    /// recovered boxes overlapping a current detection at this IoU are dropped
    pub suppress_iou: f64,
    /// matches needed before an entry can be recovered
    pub min_observations: u32,
    /// `[rows, cols]`
    pub image_size: [usize; 2],
}

impl Default for MultiframeConfig {
    fn default() -> Self {
        Self {
            n_disappear: 10,
            match_distance: 80.0,
            velocity_tolerance: 30.0,
            boundary_margin: 20.0,
            decay: 0.9,
            smoothing: 0.5,
            suppress_iou: 0.5,
            min_observations: 3,
            image_size: [1536, 2048],
        }
    }
}

impl MultiframeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_disappear < 1 {
            return Err(Error::Config("n_disappear must be >= 1".into()));
        }
        for (name, v) in [
            ("match_distance", self.match_distance),
            ("velocity_tolerance", self.velocity_tolerance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.boundary_margin >= 0.0
            && (0.0..=1.0).contains(&self.decay)
            && (0.0..=1.0).contains(&self.smoothing)
            && (0.0..=1.0).contains(&self.suppress_iou))
        {
            return Err(Error::Config(
                "need boundary_margin >= 0 and decay, smoothing, suppress_iou in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    fn image(&self) -> Box2D<f64> {
        Box2D {
            u_min: 0.0,
            v_min: 0.0,
            u_max: self.image_size[1] as f64,
            v_max: self.image_size[0] as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryEntry {
    pub identity: u64,
    /// last confirmed box
    pub bbox: Box2D<f64>,
    /// px/frame
    pub velocity: [f64; 2],
    pub frames_absent: u32,
    pub confidence: f64,
    pub keep_score: f64,
    /// frames in which the entry was matched
    pub observations: u32,
}

impl MemoryEntry {
    /// Box moved by `velocity * frames`.
    pub fn extrapolate(&self, frames: u32) -> Box2D<f64> {
        let k = frames as f64;
        self.bbox
            .translate(self.velocity[0] * k, self.velocity[1] * k)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameMemory {
    pub entries: Vec<MemoryEntry>,
    pub next_identity: u64,
}

fn center_distance(a: &Box2D<f64>, b: &Box2D<f64>) -> f64 {
    let (ca, cb) = (a.center(), b.center());
    (ca.u - cb.u).hypot(ca.v - cb.v)
}

/// Smallest distance between two boxes; 0 when they touch or overlap.
fn box_gap(a: &Box2D<f64>, b: &Box2D<f64>) -> f64 {
    let du = (a.u_min - b.u_max).max(b.u_min - a.u_max).max(0.0);
    let dv = (a.v_min - b.v_max).max(b.v_min - a.v_max).max(0.0);
    du.hypot(dv)
}

fn near_border(b: &Box2D<f64>, img: &Box2D<f64>, margin: f64) -> bool {
    b.u_min <= img.u_min + margin
        || b.v_min <= img.v_min + margin
        || b.u_max >= img.u_max - margin
        || b.v_max >= img.v_max - margin
}

/// One frame of recovery. Returns the augmented detections (identities set)
/// and the next memory.
pub fn recover(
    prev: &FrameMemory,
    detections: &[RefinedDetection],
    cfg: &MultiframeConfig,
) -> (Vec<RefinedDetection>, FrameMemory) {
    let mut pairs = Vec::new();
    for (ei, e) in prev.entries.iter().enumerate() {
        let gap = e.frames_absent + 1;
        let predicted = e.extrapolate(gap);
        for (di, d) in detections.iter().enumerate() {
            let dist = center_distance(&predicted, &d.bbox);
            if dist > cfg.match_distance {
                continue;
            }
            // the speed test only arbitrates re-acquisition after a gap
            if e.frames_absent > 0 && e.observations >= 2 {
                let (c0, c1) = (e.bbox.center(), d.bbox.center());
                let implied = [(c1.u - c0.u) / gap as f64, (c1.v - c0.v) / gap as f64];
                let dv = (implied[0] - e.velocity[0]).hypot(implied[1] - e.velocity[1]);
                if dv > cfg.velocity_tolerance {
                    continue;
                }
            }
            pairs.push((dist, e.identity, di, ei));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut entry_match: Vec<Option<usize>> = vec![None; prev.entries.len()];
    let mut det_match: Vec<Option<usize>> = vec![None; detections.len()];
    for &(_, _, di, ei) in &pairs {
        if entry_match[ei].is_none() && det_match[di].is_none() {
            entry_match[ei] = Some(di);
            det_match[di] = Some(ei);
        }
    }

    let mut next = FrameMemory {
        entries: Vec::with_capacity(prev.entries.len() + detections.len()),
        next_identity: prev.next_identity,
    };
    let mut out: Vec<RefinedDetection> = detections.to_vec();

    for (ei, e) in prev.entries.iter().enumerate() {
        if let Some(di) = entry_match[ei] {
            let d = &detections[di];
            let gap = (e.frames_absent + 1) as f64;
            let (c0, c1) = (e.bbox.center(), d.bbox.center());
            let disp = [(c1.u - c0.u) / gap, (c1.v - c0.v) / gap];
            let velocity = if e.observations <= 1 {
                disp
            } else {
                let s = cfg.smoothing;
                [
                    s * disp[0] + (1.0 - s) * e.velocity[0],
                    s * disp[1] + (1.0 - s) * e.velocity[1],
                ]
            };
            out[di].identity = Some(e.identity);
            next.entries.push(MemoryEntry {
                identity: e.identity,
                bbox: d.bbox,
                velocity,
                frames_absent: 0,
                confidence: d.confidence,
                keep_score: d.keep_score,
                observations: e.observations + 1,
            });
        }
    }

    let established = |e: &MemoryEntry| e.observations >= cfg.min_observations;
    let expected = prev.entries.iter().filter(|e| established(e)).count();
    let present = prev
        .entries
        .iter()
        .zip(&entry_match)
        .filter(|(e, m)| established(e) && m.is_some())
        .count();
    let count_dropped = present < expected;
    let img = cfg.image();
    let mut recovered = Vec::new();
    for (ei, e) in prev.entries.iter().enumerate() {
        if entry_match[ei].is_some() {
            continue;
        }
        let absent = e.frames_absent + 1;
        if absent >= cfg.n_disappear {
            continue;
        }
        next.entries.push(MemoryEntry {
            frames_absent: absent,
            ..e.clone()
        });
        if !count_dropped || !established(e) {
            continue;
        }
        let ghost = e.extrapolate(absent);
        let occluded = detections
            .iter()
            .any(|d| box_gap(&ghost, &d.bbox) <= cfg.match_distance)
            || near_border(&ghost, &img, cfg.boundary_margin);
        let clamped = ghost.clamp_to(&img);
        let duplicate = detections
            .iter()
            .any(|d| d.bbox.iou(&clamped) >= cfg.suppress_iou);
        if occluded && !duplicate && clamped.area() > 0.0 {
            let k = cfg.decay.powi(absent as i32);
            recovered.push(RefinedDetection {
                bbox: clamped,
                confidence: e.confidence * k,
                keep_score: e.keep_score * k,
                provenance: Provenance::Recovered,
                identity: Some(e.identity),
            });
        }
    }

    for (di, d) in detections.iter().enumerate() {
        if det_match[di].is_some() {
            continue;
        }
        let id = next.next_identity;
        next.next_identity += 1;
        out[di].identity = Some(id);
        next.entries.push(MemoryEntry {
            identity: id,
            bbox: d.bbox,
            velocity: [0.0; 2],
            frames_absent: 0,
            confidence: d.confidence,
            keep_score: d.keep_score,
            observations: 1,
        });
    }
    next.entries.sort_by_key(|e| e.identity);
    out.extend(recovered);
    (out, next)
}

/// Stateful wrapper over [`recover`].
#[derive(Debug, Clone)]
pub struct MultiframeTracker {
    cfg: MultiframeConfig,
    memory: FrameMemory,
}

impl MultiframeTracker {
    pub fn new(cfg: MultiframeConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            memory: FrameMemory::default(),
        })
    }

    pub fn memory(&self) -> &FrameMemory {
        &self.memory
    }

    pub fn step(&mut self, detections: &[RefinedDetection]) -> Vec<RefinedDetection> {
        let (out, next) = recover(&self.memory, detections, &self.cfg);
        self.memory = next;
        out
    }
}
