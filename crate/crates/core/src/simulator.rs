//! Deterministic scene simulator: trajectories, lighting, occlusion and
//! radar returns with per-frame ground truth.
//!
//! Coordinates are in the radar frame (x right, y forward, z up, metres,
//! origin at the sensor). Waypoint times are seconds from scene start.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::camera::{project_box, Box2D, CameraModel};
use crate::dsp::{synthesize_adc, AdcCube, RadarConfig, SynthTarget};
use crate::error::{Error, Result};
use crate::pointcloud::{ClusterBox, RadarPoint};

pub const SCENE_SCHEMA_VERSION: u32 = 1;

/// Names of the scenes compiled into the library.
pub const BUILTIN_SCENES: [&str; 5] = [
    "single_walk",
    "crossing_pair",
    "dark_room",
    "occlusion_corridor",
    "crowd_8",
];

/// Slices used when projecting truth boxes.
pub const TRUTH_SLICES: usize = 16;

pub fn builtin_scene(name: &str) -> Result<SceneSpec> {
    let text = match name {
        "single_walk" => include_str!("../scenes/single_walk.toml"),
        "crossing_pair" => include_str!("../scenes/crossing_pair.toml"),
        "dark_room" => include_str!("../scenes/dark_room.toml"),
        "occlusion_corridor" => include_str!("../scenes/occlusion_corridor.toml"),
        "crowd_8" => include_str!("../scenes/crowd_8.toml"),
        other => {
            return Err(Error::Input(format!(
                "unknown scene '{other}'; known: {BUILTIN_SCENES:?}"
            )))
        }
    };
    let spec = SceneSpec::from_toml_str(text)?;
    spec.validate()?;
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightingSegment {
    /// first frame at this level
    pub start: usize,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub id: u32,
    /// `[w, h, t]` along x, z and y
    pub extent: [f64; 3],
    #[serde(default = "one")]
    pub reflectivity: f64,
    /// `[t, x, y, z]` rows with strictly increasing `t`
    pub waypoints: Vec<[f64; 4]>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneSpec {
    pub schema_version: u32,
    pub name: String,
    /// frames
    pub duration: usize,
    /// Hz
    pub frame_rate: f64,
    pub seed: u64,
    /// m, per-axis point jitter
    pub noise_std: f64,
    /// m/s, per-point radial velocity jitter
    pub velocity_noise_std: f64,
    /// mean clutter points per frame
    pub clutter_rate: f64,
    /// `[[x0, x1], [y0, y1], [z0, z1]]`
    pub clutter_volume: [[f64; 2]; 3],
    pub clutter_velocity_std: f64,
    /// mean points per frame for reflectivity 1
    pub points_per_target: f64,
    /// complex noise std in ADC mode
    pub adc_noise_std: f64,
    /// m/s
    pub max_speed: f64,
    /// m
    pub max_range: f64,
    pub lighting: Vec<LightingSegment>,
    pub targets: Vec<TargetSpec>,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            schema_version: SCENE_SCHEMA_VERSION,
            name: "unnamed".into(),
            duration: 0,
            frame_rate: 10.0,
            seed: 0,
            noise_std: 0.03,
            velocity_noise_std: 0.05,
            clutter_rate: 0.0,
            clutter_volume: [[-4.0, 4.0], [0.5, 10.0], [-1.0, 1.0]],
            clutter_velocity_std: 1.0,
            points_per_target: 20.0,
            adc_noise_std: 0.05,
            max_speed: 26.0 / 3.6,
            max_range: 10.0,
            lighting: Vec::new(),
            targets: Vec::new(),
        }
    }
}

impl SceneSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        crate::io::from_toml_str(text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        crate::io::to_toml_string(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("scene '{}': {msg}", self.name)));
        if self.schema_version != SCENE_SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema_version {}",
                self.schema_version
            ));
        }
        if !(self.frame_rate.is_finite() && self.frame_rate > 0.0) {
            return bad(format!("frame_rate must be > 0, got {}", self.frame_rate));
        }
        for (name, v) in [
            ("noise_std", self.noise_std),
            ("velocity_noise_std", self.velocity_noise_std),
            ("clutter_rate", self.clutter_rate),
            ("clutter_velocity_std", self.clutter_velocity_std),
            ("points_per_target", self.points_per_target),
            ("adc_noise_std", self.adc_noise_std),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be >= 0, got {v}"));
            }
        }
        if self
            .clutter_volume
            .iter()
            .any(|r| !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]))
        {
            return bad("clutter_volume ranges must be ordered".into());
        }
        if !(self.max_speed > 0.0 && self.max_range > 0.0) {
            return bad("max_speed and max_range must be > 0".into());
        }
        let mut prev = None;
        for seg in &self.lighting {
            if !(0.0..=1.0).contains(&seg.level) {
                return bad(format!("lighting level {} outside [0, 1]", seg.level));
            }
            if prev.is_some_and(|p| seg.start <= p) {
                return bad("lighting segment starts must increase".into());
            }
            prev = Some(seg.start);
        }
        let mut ids = std::collections::BTreeSet::new();
        for tgt in &self.targets {
            let tb = |msg: String| bad(format!("target {}: {msg}", tgt.id));
            if !ids.insert(tgt.id) {
                return tb("duplicate id".into());
            }
            if tgt.extent.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
                return tb("extent must be >= 0".into());
            }
            if !(tgt.reflectivity.is_finite() && tgt.reflectivity >= 0.0) {
                return tb("reflectivity must be >= 0".into());
            }
            if tgt.waypoints.is_empty() {
                return tb("needs at least one waypoint".into());
            }
            for w in &tgt.waypoints {
                if w.iter().any(|v| !v.is_finite()) {
                    return tb("waypoints must be finite".into());
                }
                let r = (w[1] * w[1] + w[2] * w[2] + w[3] * w[3]).sqrt();
                if r > self.max_range || w[2] <= 0.0 {
                    return tb(format!(
                        "waypoint at t={} is outside the sensing range",
                        w[0]
                    ));
                }
            }
            for pair in tgt.waypoints.windows(2) {
                let dt = pair[1][0] - pair[0][0];
                if !(dt > 0.0) {
                    return tb("waypoint times must strictly increase".into());
                }
                let d = ((pair[1][1] - pair[0][1]).powi(2)
                    + (pair[1][2] - pair[0][2]).powi(2)
                    + (pair[1][3] - pair[0][3]).powi(2))
                .sqrt();
                if d / dt > self.max_speed * (1.0 + 1e-9) {
                    return tb(format!(
                        "speed {:.3} m/s exceeds max_speed {}",
                        d / dt,
                        self.max_speed
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn frame_time(&self, frame: usize) -> f64 {
        frame as f64 / self.frame_rate
    }

    pub fn lighting_at(&self, frame: usize) -> f64 {
        self.lighting
            .iter()
            .take_while(|s| s.start <= frame)
            .last()
            .map_or(1.0, |s| s.level)
    }
}

impl TargetSpec {
    pub fn time_span(&self) -> (f64, f64) {
        (
            self.waypoints[0][0],
            self.waypoints[self.waypoints.len() - 1][0],
        )
    }

    /// Piecewise-linear position, `None` outside the waypoint time span.
    pub fn position_at(&self, t: f64) -> Option<[f64; 3]> {
        let (t0, t1) = self.time_span();
        if t < t0 || t > t1 {
            return None;
        }
        let w = &self.waypoints;
        let i = w.partition_point(|p| p[0] <= t).clamp(1, w.len().max(1));
        if w.len() == 1 {
            return Some([w[0][1], w[0][2], w[0][3]]);
        }
        let (a, b) = (&w[i - 1], &w[i.min(w.len() - 1)]);
        let span = b[0] - a[0];
        let f = if span > 0.0 {
            ((t - a[0]) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        Some([
            a[1] + f * (b[1] - a[1]),
            a[2] + f * (b[2] - a[2]),
            a[3] + f * (b[3] - a[3]),
        ])
    }

    /// Finite-difference velocity over half a frame either side, one-sided at the ends.
    pub fn velocity_at(&self, t: f64, frame_rate: f64) -> Option<[f64; 3]> {
        let (t0, t1) = self.time_span();
        self.position_at(t)?;
        let h = 0.5 / frame_rate;
        let (ta, tb) = ((t - h).max(t0), (t + h).min(t1));
        if tb <= ta {
            return Some([0.0; 3]);
        }
        let (a, b) = (self.position_at(ta)?, self.position_at(tb)?);
        Some([
            (b[0] - a[0]) / (tb - ta),
            (b[1] - a[1]) / (tb - ta),
            (b[2] - a[2]) / (tb - ta),
        ])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetTruth {
    pub id: u32,
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    /// m/s, positive receding
    pub radial_velocity: f64,
    /// truth box; the velocity slot holds the radial velocity
    pub box3d: ClusterBox<f64>,
    /// clamped image box, `None` when the target is not visible in the image
    pub box2d: Option<Box2D<f64>>,
    /// camera-frame depth of the centre
    pub depth: f64,
    /// fraction of `box2d` covered by nearer targets
    pub occlusion: f64,
    pub reflectivity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameTruth {
    pub frame: usize,
    pub time: f64,
    pub lighting: f64,
    pub targets: Vec<TargetTruth>,
}

pub fn generate_frame(spec: &SceneSpec, cam: &CameraModel, frame: usize) -> Result<FrameTruth> {
    if frame >= spec.duration {
        return Err(Error::Index {
            index: frame,
            len: spec.duration,
        });
    }
    let t = spec.frame_time(frame);
    let mut targets = Vec::new();
    for tgt in &spec.targets {
        let (Some(p), Some(v)) = (tgt.position_at(t), tgt.velocity_at(t, spec.frame_rate)) else {
            continue;
        };
        let range = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let radial = if range > 0.0 {
            (p[0] * v[0] + p[1] * v[1] + p[2] * v[2]) / range
        } else {
            0.0
        };
        let [w, h, th] = tgt.extent;
        let box3d = ClusterBox {
            x: p[0],
            y: p[1],
            z: p[2],
            v_z: radial,
            w,
            h,
            t: th,
        };
        let box2d = project_box(&box3d, cam, TRUTH_SLICES)
            .ok()
            .filter(|b| b.area() > 1.0);
        targets.push(TargetTruth {
            id: tgt.id,
            position: p,
            velocity: v,
            radial_velocity: radial,
            box3d,
            box2d,
            depth: cam.to_camera(p)[2],
            occlusion: 0.0,
            reflectivity: tgt.reflectivity,
        });
    }
    for i in 0..targets.len() {
        let Some(own) = targets[i].box2d else {
            continue;
        };
        let covers: Vec<Box2D<f64>> = targets
            .iter()
            .enumerate()
            .filter(|&(j, o)| {
                j != i && (o.depth < targets[i].depth || (o.depth == targets[i].depth && j < i))
            })
            .filter_map(|(_, o)| o.box2d.and_then(|b| b.intersection(&own)))
            .collect();
        targets[i].occlusion = (union_area(&covers) / own.area()).clamp(0.0, 1.0);
    }
    Ok(FrameTruth {
        frame,
        time: t,
        lighting: spec.lighting_at(frame),
        targets,
    })
}

/// Exact area of a union of axis-aligned rectangles (coordinate compression).
pub fn union_area(rects: &[Box2D<f64>]) -> f64 {
    if rects.is_empty() {
        return 0.0;
    }
    let mut xs: Vec<f64> = rects.iter().flat_map(|r| [r.u_min, r.u_max]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut area = 0.0;
    for cell in xs.windows(2) {
        let (x0, x1) = (cell[0], cell[1]);
        let mut spans: Vec<(f64, f64)> = rects
            .iter()
            .filter(|r| r.u_min <= x0 && r.u_max >= x1)
            .map(|r| (r.v_min, r.v_max))
            .collect();
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut covered = 0.0;
        let mut cur: Option<(f64, f64)> = None;
        for (a, b) in spans {
            cur = match cur {
                Some((c0, c1)) if a <= c1 => Some((c0, c1.max(b))),
                Some((c0, c1)) => {
                    covered += c1 - c0;
                    Some((a, b))
                }
                None => Some((a, b)),
            };
        }
        if let Some((c0, c1)) = cur {
            covered += c1 - c0;
        }
        area += covered * (x1 - x0);
    }
    area
}

/// Per-frame generator for one named random stream.
pub fn frame_rng(seed: u64, frame: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((frame as u64) << 8 | (stream & 0xff));
    rng
}

const STREAM_POINTS: u64 = 1;
const STREAM_CLUTTER: u64 = 2;
const STREAM_ADC: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmittedPoint {
    pub point: RadarPoint<f64>,
    /// target id, `None` for clutter
    pub source: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RadarMode {
    #[default]
    Points,
    Adc,
}

#[derive(Debug, Clone)]
pub enum RadarEmission {
    Points(Vec<RadarPoint<f64>>),
    Adc(AdcCube<f64>),
}

pub fn emit_radar(
    truth: &FrameTruth,
    spec: &SceneSpec,
    mode: RadarMode,
    radar: &RadarConfig,
) -> Result<RadarEmission> {
    Ok(match mode {
        RadarMode::Points => RadarEmission::Points(
            emit_points(truth, spec)
                .into_iter()
                .map(|e| e.point)
                .collect(),
        ),
        RadarMode::Adc => RadarEmission::Adc(emit_adc(truth, spec, radar)?),
    })
}

fn truncated(normal: &Normal<f64>, std: f64, rng: &mut ChaCha8Rng) -> f64 {
    if std == 0.0 {
        return 0.0;
    }
    loop {
        let v = normal.sample(rng);
        if v.abs() <= 3.0 * std {
            return v;
        }
    }
}

/// Point-cloud returns: Poisson count per target (no occlusion gating) plus clutter.
pub fn emit_points(truth: &FrameTruth, spec: &SceneSpec) -> Vec<EmittedPoint> {
    let mut rng = frame_rng(spec.seed, truth.frame, STREAM_POINTS);
    let pos_noise = Normal::new(0.0, spec.noise_std).expect("validated std");
    let vel_noise = Normal::new(0.0, spec.velocity_noise_std).expect("validated std");
    let mut out = Vec::new();
    for tgt in &truth.targets {
        let n = poisson(spec.points_per_target * tgt.reflectivity, &mut rng);
        let b = &tgt.box3d;
        for _ in 0..n {
            let x = b.x
                + b.w * (rng.random::<f64>() - 0.5)
                + truncated(&pos_noise, spec.noise_std, &mut rng);
            let y = b.y
                + b.t * (rng.random::<f64>() - 0.5)
                + truncated(&pos_noise, spec.noise_std, &mut rng);
            let z = b.z
                + b.h * (rng.random::<f64>() - 0.5)
                + truncated(&pos_noise, spec.noise_std, &mut rng);
            let v = tgt.radial_velocity + truncated(&vel_noise, spec.velocity_noise_std, &mut rng);
            out.push(EmittedPoint {
                point: RadarPoint::new(x, y, z, v),
                source: Some(tgt.id),
            });
        }
    }
    let mut rng = frame_rng(spec.seed, truth.frame, STREAM_CLUTTER);
    let n = poisson(spec.clutter_rate, &mut rng);
    let cv = Normal::new(0.0, spec.clutter_velocity_std).expect("validated std");
    let [rx, ry, rz] = spec.clutter_volume;
    for _ in 0..n {
        let mut u = |r: [f64; 2]| r[0] + (r[1] - r[0]) * rng.random::<f64>();
        let (x, y, z) = (u(rx), u(ry), u(rz));
        out.push(EmittedPoint {
            point: RadarPoint::new(x, y, z, cv.sample(&mut rng)),
            source: None,
        });
    }
    out
}

fn poisson(mean: f64, rng: &mut ChaCha8Rng) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as usize
}

/// ADC cube with one point reflector per target (elevation is dropped).
pub fn emit_adc(truth: &FrameTruth, spec: &SceneSpec, radar: &RadarConfig) -> Result<AdcCube<f64>> {
    let targets: Vec<SynthTarget> = truth
        .targets
        .iter()
        .filter(|t| t.reflectivity > 0.0)
        .map(|t| {
            let [x, y, _] = t.position;
            let range = x.hypot(y);
            let [vx, vy, _] = t.velocity;
            SynthTarget {
                range,
                azimuth: x.atan2(y),
                radial_velocity: (x * vx + y * vy) / range,
                amplitude: t.reflectivity,
            }
        })
        .collect();
    let seed = frame_rng(spec.seed, truth.frame, STREAM_ADC).random::<u64>();
    synthesize_adc(&targets, radar, spec.adc_noise_std, seed)
}

/// All frames of a scene.
pub fn simulate(spec: &SceneSpec, cam: &CameraModel) -> Result<Vec<FrameTruth>> {
    spec.validate()?;
    (0..spec.duration)
        .map(|f| generate_frame(spec, cam, f))
        .collect()
}
