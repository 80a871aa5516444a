//! Detection metrics over a [`DetectionLog`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{greedy_match, DetectionLog};
use crate::error::Result;
use crate::fusion::Provenance;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// `[lo, hi)` lighting ranges for per-bucket recall; the last one is closed.
pub const LIGHTING_BUCKETS: [(f64, f64); 3] = [(0.0, 0.2), (0.2, 0.6), (0.6, 1.0)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceStats {
    pub detections: usize,
    pub true_positives: usize,
    pub precision: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightingBucket {
    pub lo: f64,
    pub hi: f64,
    pub frames: usize,
    pub truth: usize,
    pub matched: usize,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub scene: String,
    pub seed: u64,
    pub mode: String,
    pub iou_threshold: f64,
    pub frames: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    /// 1 when there are no detections
    pub precision: f64,
    /// 1 when there is no truth
    pub recall: f64,
    pub f1: f64,
    pub id_switches: usize,
    pub provenance: BTreeMap<String, ProvenanceStats>,
    /// only buckets that contain at least one frame
    pub lighting: Vec<LightingBucket>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

fn bucket_of(lighting: f64) -> usize {
    LIGHTING_BUCKETS
        .iter()
        .position(|&(lo, hi)| lighting >= lo && lighting < hi)
        .unwrap_or(LIGHTING_BUCKETS.len() - 1)
}

/// Greedy per-frame matching (descending confidence) at `iou_thresh`.
pub fn evaluate(log: &DetectionLog, iou_thresh: f64) -> EvalReport {
    let (mut tp, mut n_det, mut n_truth) = (0, 0, 0);
    let mut prov: BTreeMap<Provenance, (usize, usize)> = BTreeMap::new();
    let mut buckets = [(0usize, 0usize, 0usize); LIGHTING_BUCKETS.len()];
    let mut last_identity: BTreeMap<u32, u64> = BTreeMap::new();
    let mut id_switches = 0;

    for fr in &log.frames {
        let dets: Vec<_> = fr
            .detections
            .iter()
            .map(|d| (d.bbox, d.confidence))
            .collect();
        let truth: Vec<_> = fr.truth.iter().map(|t| t.bbox).collect();
        let pairs = greedy_match(&dets, &truth, iou_thresh);
        tp += pairs.len();
        n_det += dets.len();
        n_truth += truth.len();
        let b = &mut buckets[bucket_of(fr.lighting)];
        b.0 += 1;
        b.1 += truth.len();
        b.2 += pairs.len();
        for d in &fr.detections {
            prov.entry(d.provenance).or_default().0 += 1;
        }
        let mut sorted = pairs;
        sorted.sort_by_key(|&(_, j)| j);
        for (i, j) in sorted {
            let d = &fr.detections[i];
            prov.entry(d.provenance).or_default().1 += 1;
            if let Some(id) = d.identity {
                if let Some(prev) = last_identity.insert(fr.truth[j].id, id) {
                    if prev != id {
                        id_switches += 1;
                    }
                }
            }
        }
    }

    let precision = ratio(tp, n_det);
    let recall = ratio(tp, n_truth);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        scene: log.scene.clone(),
        seed: log.seed,
        mode: log.mode.as_str().into(),
        iou_threshold: iou_thresh,
        frames: log.frames.len(),
        true_positives: tp,
        false_positives: n_det - tp,
        false_negatives: n_truth - tp,
        precision,
        recall,
        f1,
        id_switches,
        provenance: prov
            .into_iter()
            .map(|(p, (d, t))| {
                (
                    p.as_str().to_string(),
                    ProvenanceStats {
                        detections: d,
                        true_positives: t,
                        precision: ratio(t, d),
                    },
                )
            })
            .collect(),
        lighting: LIGHTING_BUCKETS
            .iter()
            .zip(buckets)
            .filter(|(_, b)| b.0 > 0)
            .map(|(&(lo, hi), (frames, truth, matched))| LightingBucket {
                lo,
                hi,
                frames,
                truth,
                matched,
                recall: ratio(matched, truth),
            })
            .collect(),
    }
}

impl EvalReport {
    pub fn to_toml_string(&self) -> Result<String> {
        crate::io::to_toml_string(self)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        crate::io::from_toml_str(text)
    }

    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} seed={} mode={} frames={}",
            self.scene, self.seed, self.mode, self.frames
        );
        let _ = writeln!(
            s,
            "precision={:.4} recall={:.4} f1={:.4} (tp={} fp={} fn={}) id_switches={}",
            self.precision,
            self.recall,
            self.f1,
            self.true_positives,
            self.false_positives,
            self.false_negatives,
            self.id_switches
        );
        for (p, st) in &self.provenance {
            let _ = writeln!(
                s,
                "  {p:<9} detections={} tp={} precision={:.4}",
                st.detections, st.true_positives, st.precision
            );
        }
        for b in &self.lighting {
            let _ = writeln!(
                s,
                "  lighting [{:.1}, {:.1}) recall={:.4} ({}/{})",
                b.lo, b.hi, b.recall, b.matched, b.truth
            );
        }
        s
    }
}
