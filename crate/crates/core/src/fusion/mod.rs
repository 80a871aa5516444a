//! Second-stage refinement: radar heatmap, RoI crops, perceptual fusion,
//! the integration classifier and its training losses.

mod heatmap;
mod loss;
mod model;
mod train;

use serde::{Deserialize, Serialize};

pub use heatmap::{
    build_radar_heatmap, crop_roi, HeatmapConfig, NormBounds, RadarHeatmap, RoiFeature, N_CHANNELS,
    ROI_SIZE,
};
pub use loss::{
    bce_loss, focal_loss, sample_loss, select_samples, total_loss, total_loss_grad, FusionSample,
    LossBreakdown, SampleSelection,
};
pub use model::{
    fuse_score, fuse_vector, integrate, perceptual_fuse, pool, FusionParams, N_POOLED,
    PARAMS_SCHEMA_VERSION,
};
pub use train::{train_refinement, TrainConfig, TrainReport};

use crate::camera::Box2D;
use crate::detector::{Detection2D, Source};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Image,
    Radar,
    Recovered,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Image => "image",
            Provenance::Radar => "radar",
            Provenance::Recovered => "recovered",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "image" => Some(Provenance::Image),
            "radar" => Some(Provenance::Radar),
            "recovered" => Some(Provenance::Recovered),
            _ => None,
        }
    }
}

impl From<Source> for Provenance {
    fn from(s: Source) -> Self {
        match s {
            Source::Image => Provenance::Image,
            Source::Radar => Provenance::Radar,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinedDetection {
    pub bbox: Box2D<f64>,
    /// fused confidence `q`
    pub confidence: f64,
    /// integration keep score `p`; radar candidates carry `q` here
    pub keep_score: f64,
    pub provenance: Provenance,
    /// identity assigned by the multi-frame stage
    pub identity: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub tau_p: f64,
    pub tau_q: f64,
    /// candidates overlapping a kept box at or above this IoU are dropped
    pub nms_iou: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            tau_p: 0.5,
            tau_q: 0.5,
            nms_iou: 0.5,
        }
    }
}

/// Pooled RoI features for a candidate box; all zeros when the box has no
/// area inside the heatmap.
pub fn candidate_features(hm: &RadarHeatmap<f64>, bbox: &Box2D<f64>) -> [f64; N_POOLED] {
    crop_roi(hm, bbox).map_or([0.0; N_POOLED], |roi| pool(&roi))
}

/// Image score vector used for fusion: the detector's for image candidates,
/// neutral for radar ones.
pub fn candidate_scores(det: &Detection2D, n_classes: usize) -> Vec<f64> {
    match det.source {
        Source::Image => det.scores.clone(),
        Source::Radar => FusionSample::<f64>::neutral_scores(n_classes),
    }
}

/// Scores every candidate, applies the keep rule, then greedy NMS by
/// descending fused confidence.
pub fn refine(
    candidates: &[Detection2D],
    hm: &RadarHeatmap<f64>,
    params: &FusionParams<f64>,
    th: &Thresholds,
) -> Result<Vec<RefinedDetection>> {
    let mut kept = Vec::new();
    for det in candidates {
        let v1 = candidate_scores(det, params.n_classes);
        let r = params.radar_score(&candidate_features(hm, &det.bbox));
        let v2 = fuse_vector(&v1, r);
        let q = v2[1..].iter().copied().fold(0.0, f64::max);
        let (p, keep) = match det.source {
            Source::Image => {
                let p = integrate(&v1, &v2, params)?;
                (p, p >= th.tau_p && q >= th.tau_q)
            }
            Source::Radar => (q, q >= th.tau_q),
        };
        if keep {
            kept.push(RefinedDetection {
                bbox: det.bbox,
                confidence: q,
                keep_score: p,
                provenance: det.source.into(),
                identity: None,
            });
        }
    }
    Ok(nms(kept, th.nms_iou))
}

/// Greedy suppression; ties in confidence keep image candidates first, then input order.
pub fn nms(mut dets: Vec<RefinedDetection>, iou: f64) -> Vec<RefinedDetection> {
    let mut idx: Vec<usize> = (0..dets.len()).collect();
    idx.sort_by(|&a, &b| {
        dets[b]
            .confidence
            .total_cmp(&dets[a].confidence)
            .then(dets[a].provenance.cmp(&dets[b].provenance))
            .then(a.cmp(&b))
    });
    let mut out: Vec<RefinedDetection> = Vec::new();
    for i in idx {
        if out.iter().all(|k| k.bbox.iou(&dets[i].bbox) < iou) {
            out.push(std::mem::replace(
                &mut dets[i],
                RefinedDetection {
                    bbox: Box2D::from_center(0.0, 0.0, 0.0, 0.0),
                    confidence: 0.0,
                    keep_score: 0.0,
                    provenance: Provenance::Image,
                    identity: None,
                },
            ));
        }
    }
    out
}
