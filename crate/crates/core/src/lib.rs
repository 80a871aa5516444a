//! Camera and mmWave radar fusion for person detection: FMCW signal
//! processing, point-cloud clustering and tracking, camera projection,
//! score-level fusion with a learned refinement head, occlusion recovery,
//! and a deterministic simulator with an evaluation harness.

pub mod camera;
pub mod detector;
pub mod dsp;
pub mod error;
pub mod fusion;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod multiframe;
pub mod pointcloud;
pub mod scalar;
pub mod simulator;
pub mod tracker;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type RadarPointF32 = pointcloud::RadarPoint<f32>;
pub type RadarPointF64 = pointcloud::RadarPoint<f64>;
pub type ClusterBoxF32 = pointcloud::ClusterBox<f32>;
pub type ClusterBoxF64 = pointcloud::ClusterBox<f64>;
pub type AdcCubeF32 = dsp::AdcCube<f32>;
pub type AdcCubeF64 = dsp::AdcCube<f64>;
pub type Box2DF32 = camera::Box2D<f32>;
pub type Box2DF64 = camera::Box2D<f64>;
pub type TrackerF32 = tracker::Tracker<f32>;
pub type TrackerF64 = tracker::Tracker<f64>;
pub type TrackStateF64 = tracker::TrackState<f64>;
pub type KalmanModelF64 = tracker::KalmanModel<f64>;
pub type RadarHeatmapF32 = fusion::RadarHeatmap<f32>;
pub type RadarHeatmapF64 = fusion::RadarHeatmap<f64>;
pub type FusionParamsF32 = fusion::FusionParams<f32>;
pub type FusionParamsF64 = fusion::FusionParams<f64>;
pub type FusionSampleF64 = fusion::FusionSample<f64>;
