//! End-to-end pipeline, evaluation, logs and rendering.
//!
//! ```text
//! truth -> radar points (or ADC -> DSP) -> DBSCAN boxes -> tracker
//!       -> projected radar candidates + image candidates -> heatmap
//!       -> refine -> multi-frame recovery -> log
//! ```

mod dataset;
mod eval;
mod log;
mod render;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use dataset::{
    collect_samples, default_params, train_default_params, DatasetConfig, TRAINING_SEED_BASE,
};
pub use eval::{
    evaluate, EvalReport, LightingBucket, ProvenanceStats, LIGHTING_BUCKETS, REPORT_SCHEMA_VERSION,
};
pub use log::{DetectionLog, FrameLog, LoggedTruth, LOG_SCHEMA_VERSION};
pub use render::{render_frame_svg, stickman_segments, RenderOptions, Stickman};

use crate::camera::{project_box, Box2D, CameraModel};
use crate::detector::{detect, Detection2D, DetectorProfile, Source};
use crate::dsp::{cube_to_pointcloud, ChannelCalibration, PointCloudConfig, RadarConfig};
use crate::error::{Error, Result};
use crate::fusion::{
    build_radar_heatmap, nms, refine, FusionParams, FusionSample, HeatmapConfig, Provenance,
    RadarHeatmap, RefinedDetection, Thresholds,
};
use crate::multiframe::{MultiframeConfig, MultiframeTracker};
use crate::pointcloud::{detect_boxes, ClusterBox, ClusterConfig, RadarPoint};
use crate::simulator::{
    emit_radar, generate_frame, FrameTruth, RadarEmission, RadarMode, SceneSpec,
};
use crate::tracker::{KalmanConfig, Tracker, TrackerConfig};

pub const PIPELINE_SCHEMA_VERSION: u32 = 1;

/// Mixed into the scene seed for the image detector so its draws never
/// share a stream with the radar emitter.
const DETECTOR_SALT: u64 = 0x5DEE_CE66_D1CE_5EED;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Fusion,
    ImageOnly,
    RadarOnly,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Fusion, Mode::ImageOnly, Mode::RadarOnly];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Fusion => "fusion",
            Mode::ImageOnly => "image-only",
            Mode::RadarOnly => "radar-only",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::Input(format!(
                    "unknown mode '{s}' (fusion, image-only, radar-only)"
                ))
            })
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How tracked radar boxes become image-plane candidates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadarBoxConfig {
    /// lower bound on `[w, h, t]` (m); sparse clusters under-cover the body
    pub min_extent: [f64; 3],
    /// overrides the box centre height, for front-ends without elevation
    pub fixed_z: Option<f64>,
    pub n_slices: usize,
}

impl Default for RadarBoxConfig {
    fn default() -> Self {
        Self {
            min_extent: [0.45, 1.6, 0.25],
            fixed_z: None,
            n_slices: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub schema_version: u32,
    pub mode: Mode,
    pub radar_mode: RadarMode,
    pub radar: RadarConfig,
    pub pointcloud: PointCloudConfig,
    pub cluster: ClusterConfig,
    /// `cluster.min_pts` for clouds from the ADC front end, where peak
    /// grouping leaves about one point per target
    pub adc_min_pts: usize,
    pub tracker: TrackerConfig,
    pub radar_boxes: RadarBoxConfig,
    /// TOML camera model; inline `camera` when absent
    pub camera_file: Option<PathBuf>,
    pub camera: CameraModel,
    /// TOML detector profile; inline `detector` when absent
    pub detector_file: Option<PathBuf>,
    pub detector: DetectorProfile,
    /// TOML fusion parameters; the shipped defaults when absent
    pub params_file: Option<PathBuf>,
    pub heatmap: HeatmapConfig,
    pub multiframe_enabled: bool,
    pub multiframe: MultiframeConfig,
    pub thresholds: Thresholds,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            schema_version: PIPELINE_SCHEMA_VERSION,
            mode: Mode::Fusion,
            radar_mode: RadarMode::Points,
            radar: RadarConfig::default(),
            pointcloud: PointCloudConfig::default(),
            // people are tall and sparse: vertical gaps matter less than horizontal ones
            cluster: ClusterConfig {
                alpha: [1.0, 1.0, 0.1, 0.5],
                ..ClusterConfig::default()
            },
            adc_min_pts: 1,
            // heavier smoothing than the generic tracker: centroids of sparse
            // person clusters jitter by about 0.1 m
            tracker: TrackerConfig {
                kalman: KalmanConfig {
                    q_position: 3e-3,
                    q_extent: 1e-4,
                    r: 3e-2,
                    ..KalmanConfig::default()
                },
                ..TrackerConfig::default()
            },
            radar_boxes: RadarBoxConfig::default(),
            camera_file: None,
            camera: CameraModel::default(),
            detector_file: None,
            detector: DetectorProfile::default(),
            params_file: None,
            heatmap: HeatmapConfig::default(),
            multiframe_enabled: true,
            multiframe: MultiframeConfig::default(),
            thresholds: Thresholds::default(),
        }
    }
}

impl PipelineConfig {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn load(path: &Path) -> Result<Self> {
        crate::io::load_toml(path)
    }
}

/// A validated configuration with every referenced file loaded.
#[derive(Debug, Clone)]
pub struct Pipeline {
    cfg: PipelineConfig,
    params: FusionParams<f64>,
    calibration: ChannelCalibration<f64>,
}

fn cross_check(field: &str, ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("{field}: {}", msg())))
    }
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig, params: FusionParams<f64>) -> Result<Self> {
        if cfg.schema_version != PIPELINE_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported pipeline schema_version {}",
                cfg.schema_version
            )));
        }
        cfg.radar.validate()?;
        cfg.cluster.validate()?;
        cfg.tracker.validate()?;
        cfg.camera.validate()?;
        cfg.detector.validate()?;
        cfg.heatmap.validate()?;
        cfg.multiframe.validate()?;
        params.validate()?;
        let img = cfg.camera.image_size;
        cross_check(
            "detector.image_size",
            cfg.detector.image_size == img,
            || format!("{:?} differs from camera {img:?}", cfg.detector.image_size),
        )?;
        cross_check(
            "multiframe.image_size",
            cfg.multiframe.image_size == img,
            || {
                format!(
                    "{:?} differs from camera {img:?}",
                    cfg.multiframe.image_size
                )
            },
        )?;
        cross_check("params.n_classes", params.n_classes == 1, || {
            format!(
                "detector reports one class, params have {}",
                params.n_classes
            )
        })?;
        cross_check("adc_min_pts", cfg.adc_min_pts >= 1, || {
            "must be >= 1".into()
        })?;
        cross_check(
            "radar_boxes.n_slices",
            cfg.radar_boxes.n_slices >= 1,
            || "must be >= 1".into(),
        )?;
        let t = &cfg.thresholds;
        cross_check(
            "thresholds",
            [t.tau_p, t.tau_q, t.nms_iou]
                .iter()
                .all(|v| (0.0..=1.0).contains(v)),
            || format!("values must lie in [0, 1], got {t:?}"),
        )?;
        Ok(Self {
            calibration: ChannelCalibration::identity(cfg.radar.n_rx_channels),
            cfg,
            params,
        })
    }

    /// Loads a pipeline TOML and the files it references (relative paths are
    /// resolved against the config's directory).
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = PipelineConfig::load(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &Path| {
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        if let Some(p) = &cfg.camera_file {
            cfg.camera = crate::io::load_toml(&resolve(p))?;
        }
        if let Some(p) = &cfg.detector_file {
            cfg.detector = crate::io::load_toml(&resolve(p))?;
        }
        let params = match &cfg.params_file {
            Some(p) => load_params(&resolve(p))?,
            None => default_params()?,
        };
        Self::new(cfg, params).map_err(|e| match e {
            Error::Config(msg) => Error::File {
                path: path.to_path_buf(),
                field: msg.split(':').next().unwrap_or("-").trim().to_string(),
                msg,
            },
            other => other,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn params(&self) -> &FusionParams<f64> {
        &self.params
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.cfg.mode = mode;
        self
    }

    pub fn with_multiframe(mut self, enabled: bool) -> Self {
        self.cfg.multiframe_enabled = enabled;
        self
    }

    pub fn with_params(self, params: FusionParams<f64>) -> Result<Self> {
        Self::new(self.cfg, params)
    }

    pub fn start<'a>(&'a self, spec: &'a SceneSpec) -> Result<SceneRun<'a>> {
        spec.validate()?;
        let dt = 1.0 / spec.frame_rate;
        cross_check(
            "tracker.dt",
            (self.cfg.tracker.dt - dt).abs() <= 1e-9 * dt.max(1.0),
            || {
                format!(
                    "{} does not match the scene frame period {dt}",
                    self.cfg.tracker.dt
                )
            },
        )?;
        Ok(SceneRun {
            pipeline: self,
            spec,
            tracker: Tracker::new(self.cfg.tracker)?,
            multiframe: MultiframeTracker::new(self.cfg.multiframe)?,
        })
    }

    pub fn run(&self, spec: &SceneSpec) -> Result<DetectionLog> {
        self.run_inner(spec, None)
    }

    /// Runs with recorded `(frame, points)` groups instead of simulated radar;
    /// frames missing from `recorded` get an empty cloud.
    pub fn run_recorded(
        &self,
        spec: &SceneSpec,
        recorded: &[(usize, Vec<RadarPoint<f64>>)],
    ) -> Result<DetectionLog> {
        if let Some((f, _)) = recorded.iter().find(|(f, _)| *f >= spec.duration) {
            return Err(Error::Index {
                index: *f,
                len: spec.duration,
            });
        }
        self.run_inner(spec, Some(recorded))
    }

    fn run_inner(
        &self,
        spec: &SceneSpec,
        recorded: Option<&[(usize, Vec<RadarPoint<f64>>)]>,
    ) -> Result<DetectionLog> {
        let mut run = self.start(spec)?;
        let mut frames = Vec::with_capacity(spec.duration);
        for f in 0..spec.duration {
            let c = match recorded {
                None => run.candidates(f)?,
                Some(rec) => {
                    let pts = rec
                        .iter()
                        .find(|(g, _)| *g == f)
                        .map(|(_, p)| p.clone())
                        .unwrap_or_default();
                    run.candidates_with_points(f, pts)?
                }
            };
            let dets = run.finish(&c)?;
            frames.push(FrameLog::new(&c.truth, dets));
        }
        Ok(DetectionLog {
            scene: spec.name.clone(),
            seed: spec.seed,
            mode: self.cfg.mode,
            frames,
        })
    }
}

pub fn load_params(path: &Path) -> Result<FusionParams<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::File {
        path: path.to_path_buf(),
        field: "-".into(),
        msg: e.to_string(),
    })?;
    FusionParams::from_toml_str(&text).map_err(|e| Error::File {
        path: path.to_path_buf(),
        field: "tensors".into(),
        msg: e.to_string(),
    })
}

/// Runs a scene through the pipeline.
pub fn run_pipeline(pipeline: &Pipeline, spec: &SceneSpec) -> Result<DetectionLog> {
    pipeline.run(spec)
}

/// Everything produced for one frame before refinement.
#[derive(Debug, Clone)]
pub struct FrameCandidates {
    pub truth: FrameTruth,
    pub points: Vec<RadarPoint<f64>>,
    /// confirmed tracks updated this frame, after the size prior
    pub radar_boxes: Vec<ClusterBox<f64>>,
    pub image: Vec<Detection2D>,
    pub radar: Vec<Detection2D>,
    pub heatmap: RadarHeatmap<f64>,
}

impl FrameCandidates {
    /// Image candidates followed by radar candidates.
    pub fn all(&self) -> Vec<Detection2D> {
        self.image.iter().chain(&self.radar).cloned().collect()
    }
}

/// Per-scene state; frames must be fed in order.
#[derive(Debug)]
pub struct SceneRun<'a> {
    pipeline: &'a Pipeline,
    spec: &'a SceneSpec,
    tracker: Tracker<f64>,
    multiframe: MultiframeTracker,
}

impl SceneRun<'_> {
    pub fn candidates(&mut self, frame: usize) -> Result<FrameCandidates> {
        let cfg = &self.pipeline.cfg;
        let cam = &cfg.camera;
        let truth = generate_frame(self.spec, cam, frame)?;
        let (points, min_pts) = match emit_radar(&truth, self.spec, cfg.radar_mode, &cfg.radar)? {
            RadarEmission::Points(p) => (p, cfg.cluster.min_pts),
            RadarEmission::Adc(cube) => (
                cube_to_pointcloud(&cube, &self.pipeline.calibration, &cfg.pointcloud)?,
                cfg.adc_min_pts,
            ),
        };
        self.candidates_from(truth, points, min_pts)
    }

    /// Same as [`SceneRun::candidates`] but with a recorded point cloud in
    /// place of the simulated radar.
    pub fn candidates_with_points(
        &mut self,
        frame: usize,
        points: Vec<RadarPoint<f64>>,
    ) -> Result<FrameCandidates> {
        let truth = generate_frame(self.spec, &self.pipeline.cfg.camera, frame)?;
        let min_pts = self.pipeline.cfg.cluster.min_pts;
        self.candidates_from(truth, points, min_pts)
    }

    fn candidates_from(
        &mut self,
        truth: FrameTruth,
        points: Vec<RadarPoint<f64>>,
        min_pts: usize,
    ) -> Result<FrameCandidates> {
        let cfg = &self.pipeline.cfg;
        let cam = &cfg.camera;
        let cluster = ClusterConfig {
            min_pts,
            ..cfg.cluster
        };
        let boxes = detect_boxes(&points, &cluster);
        self.tracker.step(&boxes)?;
        let prior = &cfg.radar_boxes;
        let radar_boxes: Vec<ClusterBox<f64>> = self
            .tracker
            .confirmed()
            .map(|tr| {
                let mut b = tr.as_box();
                b.w = b.w.max(prior.min_extent[0]);
                b.h = b.h.max(prior.min_extent[1]);
                b.t = b.t.max(prior.min_extent[2]);
                if let Some(z) = prior.fixed_z {
                    b.z = z;
                }
                b
            })
            .collect();
        let radar = radar_boxes
            .iter()
            .filter_map(|b| project_box(b, cam, prior.n_slices).ok())
            .filter(|b| b.area() > 1.0)
            .map(|bbox| Detection2D {
                bbox,
                scores: FusionSample::<f64>::neutral_scores(1),
                source: Source::Radar,
            })
            .collect();
        let image = detect(&truth, &cfg.detector, self.spec.seed ^ DETECTOR_SALT);
        let heatmap = build_radar_heatmap(&points, cam, &cfg.heatmap)?;
        Ok(FrameCandidates {
            truth,
            points,
            radar_boxes,
            image,
            radar,
            heatmap,
        })
    }

    pub fn finish(&mut self, c: &FrameCandidates) -> Result<Vec<RefinedDetection>> {
        let p = self.pipeline;
        let th = &p.cfg.thresholds;
        let dets = match p.cfg.mode {
            Mode::Fusion => refine(&c.all(), &c.heatmap, &p.params, th)?,
            Mode::RadarOnly => refine(&c.radar, &c.heatmap, &p.params, th)?,
            Mode::ImageOnly => nms(
                c.image
                    .iter()
                    .map(|d| RefinedDetection {
                        bbox: d.bbox,
                        confidence: d.confidence(),
                        keep_score: d.confidence(),
                        provenance: Provenance::Image,
                        identity: None,
                    })
                    .collect(),
                th.nms_iou,
            ),
        };
        Ok(if p.cfg.multiframe_enabled {
            self.multiframe.step(&dets)
        } else {
            dets
        })
    }
}

/// Greedy IoU association between detections and truth boxes, highest
/// confidence first. Returns `(detection, truth)` index pairs.
pub fn greedy_match(
    dets: &[(Box2D<f64>, f64)],
    truth: &[Box2D<f64>],
    iou: f64,
) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].1.total_cmp(&dets[a].1).then(a.cmp(&b)));
    let mut taken = vec![false; truth.len()];
    let mut pairs = Vec::new();
    for i in order {
        let mut best: Option<(usize, f64)> = None;
        for (j, t) in truth.iter().enumerate() {
            if taken[j] {
                continue;
            }
            let v = dets[i].0.iou(t);
            if v >= iou && best.is_none_or(|(_, b)| v > b) {
                best = Some((j, v));
            }
        }
        if let Some((j, _)) = best {
            taken[j] = true;
            pairs.push((i, j));
        }
    }
    pairs
}
