//! Training-set collection for the refinement head.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Pipeline, PipelineConfig};
use crate::camera::Box2D;
use crate::detector::{Detection2D, Source};
use crate::error::Result;
use crate::fusion::{
    candidate_features, candidate_scores, select_samples, train_refinement, FusionParams,
    FusionSample, TrainConfig, TrainReport,
};
use crate::simulator::{builtin_scene, frame_rng, SceneSpec, BUILTIN_SCENES};

/// Training runs use seeds from here upwards, away from the scene seeds.
pub const TRAINING_SEED_BASE: u64 = 1_000_000;

const NEGATIVE_STREAM: u64 = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetConfig {
    pub scenes: Vec<String>,
    pub seeds_per_scene: usize,
    pub seed_base: u64,
    /// use every n-th frame
    pub frame_stride: usize,
    /// random background boxes added per frame
    pub extra_negatives: usize,
    pub train: TrainConfig,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            scenes: BUILTIN_SCENES.iter().map(|s| s.to_string()).collect(),
            seeds_per_scene: 2,
            seed_base: TRAINING_SEED_BASE,
            frame_stride: 2,
            extra_negatives: 4,
            train: TrainConfig::default(),
        }
    }
}

/// Background proposals: half with image-like scores, half radar-like.
fn extra_negatives(
    pipeline: &Pipeline,
    spec: &SceneSpec,
    frame: usize,
    n: usize,
) -> Vec<Detection2D> {
    let det = &pipeline.config().detector;
    let mut rng = frame_rng(spec.seed, frame, NEGATIVE_STREAM);
    let score =
        Normal::new(det.false_positive_score_mean, det.score_std.max(1e-6)).expect("finite std");
    let [rows, cols] = det.image_size;
    let bounds = Box2D {
        u_min: 0.0,
        v_min: 0.0,
        u_max: cols as f64,
        v_max: rows as f64,
    };
    (0..n)
        .filter_map(|k| {
            let w: f64 = rng.random_range(60.0..300.0);
            let h = w * rng.random_range(2.0..3.5);
            let b = Box2D::from_center(
                rng.random_range(0.0..cols as f64),
                rng.random_range(0.0..rows as f64),
                w,
                h,
            )
            .clamp_to(&bounds);
            let s: f64 = score.sample(&mut rng).clamp(det.confidence_threshold, 1.0);
            (b.area() > 1.0).then(|| {
                if k % 2 == 0 {
                    Detection2D {
                        bbox: b,
                        scores: vec![1.0 - s, s],
                        source: Source::Image,
                    }
                } else {
                    Detection2D {
                        bbox: b,
                        scores: FusionSample::<f64>::neutral_scores(1),
                        source: Source::Radar,
                    }
                }
            })
        })
        .collect()
}

/// Labelled candidates from one scene run.
pub fn collect_samples(
    pipeline: &Pipeline,
    spec: &SceneSpec,
    cfg: &DatasetConfig,
) -> Result<Vec<FusionSample<f64>>> {
    let stride = cfg.frame_stride.max(1);
    let mut run = pipeline.start(spec)?;
    let mut out = Vec::new();
    for f in 0..spec.duration {
        let c = run.candidates(f)?;
        if f % stride != 0 {
            continue;
        }
        let mut cands = c.all();
        cands.extend(extra_negatives(pipeline, spec, f, cfg.extra_negatives));
        let truth: Vec<Box2D<f64>> = c.truth.targets.iter().filter_map(|t| t.box2d).collect();
        let boxes: Vec<Box2D<f64>> = cands.iter().map(|d| d.bbox).collect();
        let sel = select_samples(&boxes, &truth);
        let mut push = |i: usize, label: bool| {
            let d = &cands[i];
            out.push(FusionSample {
                source: d.source,
                v1: candidate_scores(d, 1),
                pooled: candidate_features(&c.heatmap, &d.bbox),
                label,
            });
        };
        for &i in &sel.positives {
            push(i, true);
        }
        for &i in &sel.negatives {
            push(i, false);
        }
    }
    Ok(out)
}

/// Collects samples from the configured scenes and trains from a fixed init.
pub fn train_default_params(
    pipeline_cfg: &PipelineConfig,
    cfg: &DatasetConfig,
) -> Result<(FusionParams<f64>, TrainReport)> {
    let pipeline = Pipeline::new(
        pipeline_cfg.clone(),
        FusionParams::zeros(1, cfg.train.hidden),
    )?;
    let mut samples = Vec::new();
    for (si, name) in cfg.scenes.iter().enumerate() {
        let mut spec = builtin_scene(name)?;
        for k in 0..cfg.seeds_per_scene {
            spec.seed = cfg.seed_base + 1000 * si as u64 + k as u64;
            samples.extend(collect_samples(&pipeline, &spec, cfg)?);
        }
    }
    let init = FusionParams::init(1, cfg.train.hidden, cfg.train.seed);
    train_refinement(&samples, init, &cfg.train)
}

/// Parameters shipped with the library (produced by `train_default_params`
/// with default settings).
pub fn default_params() -> Result<FusionParams<f64>> {
    FusionParams::from_toml_str(include_str!("../../params/default.toml"))
}
