//! Image-branch candidate source.
//!
//! [`ImageDetector`] is the interface a real neural detector would satisfy;
//! [`SimulatedDetector`] derives candidates from simulator truth with
//! lighting-dependent reliability.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::camera::Box2D;
use crate::error::{Error, Result};
use crate::simulator::{frame_rng, FrameTruth};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Image,
    Radar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection2D {
    pub bbox: Box2D<f64>,
    /// background first, then one entry per class
    pub scores: Vec<f64>,
    pub source: Source,
}

impl Detection2D {
    /// Highest non-background score.
    pub fn confidence(&self) -> f64 {
        self.scores.iter().skip(1).copied().fold(0.0, f64::max)
    }
}

/// Anything that turns a frame into image-plane candidates.
pub trait ImageDetector {
    fn detect(&self, truth: &FrameTruth, seed: u64) -> Vec<Detection2D>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorProfile {
    /// `(lighting, probability)` control points, linearly interpolated
    pub detect_prob: Vec<[f64; 2]>,
    /// px, per box edge
    pub box_jitter_std: f64,
    /// mean person score at lighting 0 and 1
    pub score_mean_dark: f64,
    pub score_mean_bright: f64,
    pub score_std: f64,
    /// candidates scoring below this are discarded
    pub confidence_threshold: f64,
    /// targets occluded beyond this fraction are never reported
    pub occlusion_threshold: f64,
    /// mean spurious boxes per frame
    pub false_positive_rate: f64,
    pub false_positive_score_mean: f64,
    /// `[rows, cols]` of the image spurious boxes are drawn in
    pub image_size: [usize; 2],
}

impl Default for DetectorProfile {
    fn default() -> Self {
        Self {
            detect_prob: vec![
                [0.0, 0.0],
                [0.05, 0.1],
                [0.3, 0.6],
                [0.6, 0.95],
                [1.0, 0.98],
            ],
            box_jitter_std: 3.0,
            score_mean_dark: 0.55,
            score_mean_bright: 0.9,
            score_std: 0.05,
            confidence_threshold: 0.3,
            occlusion_threshold: 0.5,
            false_positive_rate: 0.05,
            false_positive_score_mean: 0.45,
            image_size: [1536, 2048],
        }
    }
}

impl DetectorProfile {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("detector profile: {m}")));
        if self.detect_prob.is_empty() {
            return bad("detect_prob needs at least one control point".into());
        }
        for w in self.detect_prob.windows(2) {
            if !(w[1][0] > w[0][0]) {
                return bad("detect_prob lighting values must strictly increase".into());
            }
            if w[1][1] < w[0][1] {
                return bad("detect_prob must be non-decreasing in lighting".into());
            }
        }
        if self
            .detect_prob
            .iter()
            .any(|p| !(0.0..=1.0).contains(&p[1]))
        {
            return bad("detect_prob values must lie in [0, 1]".into());
        }
        for (name, v) in [
            ("box_jitter_std", self.box_jitter_std),
            ("score_std", self.score_std),
            ("false_positive_rate", self.false_positive_rate),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be >= 0, got {v}"));
            }
        }
        if self.score_mean_bright < self.score_mean_dark {
            return bad("score_mean_bright must be >= score_mean_dark".into());
        }
        for (name, v) in [
            ("score_mean_dark", self.score_mean_dark),
            ("score_mean_bright", self.score_mean_bright),
            ("confidence_threshold", self.confidence_threshold),
            ("occlusion_threshold", self.occlusion_threshold),
            ("false_positive_score_mean", self.false_positive_score_mean),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        Ok(())
    }

    pub fn prob_at(&self, lighting: f64) -> f64 {
        let pts = &self.detect_prob;
        if lighting <= pts[0][0] {
            return pts[0][1];
        }
        for w in pts.windows(2) {
            if lighting <= w[1][0] {
                let f = (lighting - w[0][0]) / (w[1][0] - w[0][0]);
                return w[0][1] + f * (w[1][1] - w[0][1]);
            }
        }
        pts[pts.len() - 1][1]
    }

    pub fn score_mean_at(&self, lighting: f64) -> f64 {
        let l = lighting.clamp(0.0, 1.0);
        self.score_mean_dark + l * (self.score_mean_bright - self.score_mean_dark)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedDetector {
    pub profile: DetectorProfile,
}

impl SimulatedDetector {
    pub fn new(profile: DetectorProfile) -> Result<Self> {
        profile.validate()?;
        Ok(Self { profile })
    }
}

impl ImageDetector for SimulatedDetector {
    fn detect(&self, truth: &FrameTruth, seed: u64) -> Vec<Detection2D> {
        detect(truth, &self.profile, seed)
    }
}

fn scores(s: f64) -> Vec<f64> {
    vec![1.0 - s, s]
}

/// Simulated detections for one frame.
///
/// Every target consumes the same number of draws whether or not it is
/// reported, so runs that differ only in lighting stay paired.
pub fn detect(truth: &FrameTruth, profile: &DetectorProfile, seed: u64) -> Vec<Detection2D> {
    let mut rng = frame_rng(seed, truth.frame, 0);
    let jitter = Normal::new(0.0, profile.box_jitter_std).expect("validated std");
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let p = profile.prob_at(truth.lighting);
    let mean = profile.score_mean_at(truth.lighting);
    let bounds = Box2D {
        u_min: 0.0,
        v_min: 0.0,
        u_max: profile.image_size[1] as f64,
        v_max: profile.image_size[0] as f64,
    };
    let mut out = Vec::new();
    for tgt in &truth.targets {
        let u: f64 = rng.random();
        let d: [f64; 4] = std::array::from_fn(|_| jitter.sample(&mut rng));
        let s = (mean + profile.score_std * unit.sample(&mut rng)).clamp(0.0, 1.0);
        let Some(b) = tgt.box2d else { continue };
        if u >= p || tgt.occlusion > profile.occlusion_threshold || s < profile.confidence_threshold
        {
            continue;
        }
        let (u0, u1) = (b.u_min + d[0], b.u_max + d[2]);
        let (v0, v1) = (b.v_min + d[1], b.v_max + d[3]);
        let bbox = Box2D {
            u_min: u0.min(u1),
            v_min: v0.min(v1),
            u_max: u0.max(u1),
            v_max: v0.max(v1),
        }
        .clamp_to(&bounds);
        out.push(Detection2D {
            bbox,
            scores: scores(s),
            source: Source::Image,
        });
    }

    let mut rng = frame_rng(seed, truth.frame, 1);
    let n = if profile.false_positive_rate > 0.0 {
        Poisson::new(profile.false_positive_rate)
            .expect("positive rate")
            .sample(&mut rng) as usize
    } else {
        0
    };
    for _ in 0..n {
        let w: f64 = rng.random_range(80.0..300.0);
        let h = w * rng.random_range(2.5..3.5);
        let cu = rng.random_range(0.0..bounds.u_max);
        let cv = rng.random_range(0.0..bounds.v_max);
        let s = (profile.false_positive_score_mean + profile.score_std * unit.sample(&mut rng))
            .clamp(0.0, 1.0);
        let bbox = Box2D::from_center(cu, cv, w, h).clamp_to(&bounds);
        if s < profile.confidence_threshold || bbox.area() <= 0.0 {
            continue;
        }
        out.push(Detection2D {
            bbox,
            scores: scores(s),
            source: Source::Image,
        });
    }
    out
}
