mod camera;
mod detector;
mod dsp;
mod dsp_config;
mod dsp_cube;
mod dsp_spectrum;
mod fusion;
mod fusion_heatmap;
mod fusion_model;
mod fusion_train;
mod harness;
mod harness_eval;
mod harness_render;
mod linalg;
mod scalar;
mod simulator;
mod tracker;
mod tracker_hungarian;
mod tracker_kalman;
