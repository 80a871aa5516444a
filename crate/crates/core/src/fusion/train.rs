use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::loss::{total_loss, total_loss_grad, FusionSample};
use super::model::FusionParams;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub lambda: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub symmetric_bce: bool,
    pub hidden: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 0.02,
            epochs: 200,
            batch_size: 64,
            seed: 0,
            lambda: 1.0,
            alpha: 0.25,
            gamma: 2.0,
            symmetric_bce: false,
            hidden: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub initial_loss: f64,
    /// loss of the returned parameters
    pub final_loss: f64,
    pub best_epoch: usize,
    /// full-set loss after each epoch
    pub epoch_losses: Vec<f64>,
}

/// Adam over mini-batches of the summed loss; returns the parameters with
/// the lowest full-set loss seen, so the result never scores worse than `init`.
pub fn train_refinement<T: Scalar>(
    samples: &[FusionSample<T>],
    init: FusionParams<T>,
    cfg: &TrainConfig,
) -> Result<(FusionParams<T>, TrainReport)> {
    if !samples.iter().any(|s| s.label) || !samples.iter().any(|s| !s.label) {
        return Err(Error::Training(format!(
            "need at least one positive and one negative sample ({} given)",
            samples.len()
        )));
    }
    if cfg.batch_size == 0 || !(cfg.lr.is_finite() && cfg.lr >= 0.0) {
        return Err(Error::Config(
            "train: batch_size must be >= 1 and lr >= 0".into(),
        ));
    }
    let mut params = init;
    params.lambda = cfg.lambda;
    params.alpha = cfg.alpha;
    params.gamma = cfg.gamma;
    params.symmetric_bce = cfg.symmetric_bce;
    params.validate()?;

    let initial = total_loss(samples, &params)?.total.as_f64();
    if !initial.is_finite() {
        return Err(Error::Training(format!("initial loss is {initial}")));
    }
    let mut best = (initial, params.clone(), 0);
    let mut theta: Vec<f64> = params.to_vec().iter().map(|v| v.as_f64()).collect();
    let n = theta.len();
    let (mut m, mut v) = (vec![0.0; n], vec![0.0; n]);
    let (b1, b2, eps) = (0.9, 0.999, 1e-8);
    let mut step = 0i32;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut batch = Vec::with_capacity(cfg.batch_size);

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| samples[i].clone()));
            let (_, grad) = total_loss_grad(&batch, &params)?;
            step += 1;
            let scale = 1.0 / batch.len() as f64;
            for i in 0..n {
                let g = grad[i].as_f64() * scale;
                m[i] = b1 * m[i] + (1.0 - b1) * g;
                v[i] = b2 * v[i] + (1.0 - b2) * g * g;
                let mh = m[i] / (1.0 - b1.powi(step));
                let vh = v[i] / (1.0 - b2.powi(step));
                theta[i] -= cfg.lr * mh / (vh.sqrt() + eps);
            }
            if let Some(i) = theta.iter().position(|x| !x.is_finite()) {
                return Err(Error::Training(format!(
                    "parameter {i} became {} at epoch {epoch}, step {step} (lr {})",
                    theta[i], cfg.lr
                )));
            }
            let t: Vec<T> = theta.iter().map(|&x| T::lit(x)).collect();
            params.set_from_slice(&t);
        }
        let loss = total_loss(samples, &params)?.total.as_f64();
        if !loss.is_finite() {
            return Err(Error::Training(format!(
                "loss became {loss} at epoch {epoch} (last finite {:.6}, lr {})",
                epoch_losses.last().copied().unwrap_or(initial),
                cfg.lr
            )));
        }
        epoch_losses.push(loss);
        if loss < best.0 {
            best = (loss, params.clone(), epoch);
        }
    }
    let (final_loss, params, best_epoch) = best;
    Ok((
        params,
        TrainReport {
            initial_loss: initial,
            final_loss,
            best_epoch,
            epoch_losses,
        },
    ))
}
