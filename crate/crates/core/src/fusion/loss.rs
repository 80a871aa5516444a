use super::model::{fuse_vector, integrate_forward, FusionParams, N_POOLED};
use crate::camera::Box2D;
use crate::detector::Source;
use crate::error::{Error, Result};
use crate::scalar::{clamp_prob, Scalar, PROB_EPS};

/// `y = 1: -a (1-p)^g ln p`; `y = 0: -(1-a) p^g ln(1-p)`; `p` is clamped first.
pub fn focal_loss<T: Scalar>(p: T, y: bool, alpha: f64, gamma: f64) -> T {
    let p = clamp_prob(p);
    let (a, g) = (T::lit(alpha), T::lit(gamma));
    if y {
        -a * (T::one() - p).powf(g) * p.ln()
    } else {
        -(T::one() - a) * p.powf(g) * (T::one() - p).ln()
    }
}

fn focal_grad<T: Scalar>(p: T, y: bool, alpha: f64, gamma: f64) -> T {
    let (a, g) = (T::lit(alpha), T::lit(gamma));
    let one = T::one();
    if y {
        let d = if gamma == 0.0 {
            T::zero()
        } else {
            g * (one - p).powf(g - one) * p.ln()
        };
        a * (d - (one - p).powf(g) / p)
    } else {
        let d = if gamma == 0.0 {
            T::zero()
        } else {
            g * p.powf(g - one) * (one - p).ln()
        };
        -(one - a) * (d - p.powf(g) / (one - p))
    }
}

/// `-y ln q`, plus `-(1-y) ln(1-q)` when `symmetric`.
pub fn bce_loss<T: Scalar>(q: T, y: bool, symmetric: bool) -> T {
    let q = clamp_prob(q);
    if y {
        -q.ln()
    } else if symmetric {
        -(T::one() - q).ln()
    } else {
        T::zero()
    }
}

fn bce_grad<T: Scalar>(q: T, y: bool, symmetric: bool) -> T {
    if y {
        -T::one() / q
    } else if symmetric {
        T::one() / (T::one() - q)
    } else {
        T::zero()
    }
}

/// Derivative of the clamp: zero where it saturates.
fn clamp_slope<T: Scalar>(raw: T) -> T {
    let eps = T::lit(PROB_EPS);
    if raw < eps || raw > T::one() - eps {
        T::zero()
    } else {
        raw * (T::one() - raw)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SampleSelection {
    pub positives: Vec<usize>,
    pub negatives: Vec<usize>,
}

/// Positive when the best IoU with any truth box exceeds 0.7, negative below 0.3.
pub fn select_samples<T: Scalar>(candidates: &[Box2D<T>], truth: &[Box2D<T>]) -> SampleSelection {
    let (hi, lo) = (T::lit(0.7), T::lit(0.3));
    let mut sel = SampleSelection::default();
    for (i, c) in candidates.iter().enumerate() {
        let best = truth
            .iter()
            .map(|t| c.iou(t))
            .fold(T::zero(), |a, b| a.max(b));
        if best > hi {
            sel.positives.push(i);
        } else if best < lo {
            sel.negatives.push(i);
        }
    }
    sel
}

/// One selected training candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionSample<T> {
    pub source: Source,
    /// image score vector; radar candidates carry a neutral 0.5 vector
    pub v1: Vec<T>,
    pub pooled: [T; N_POOLED],
    pub label: bool,
}

impl<T: Scalar> FusionSample<T> {
    pub fn neutral_scores(n_classes: usize) -> Vec<T> {
        vec![T::lit(0.5); n_classes + 1]
    }

    fn class_index(&self) -> usize {
        let mut best = 1;
        for c in 2..self.v1.len() {
            if self.v1[c] > self.v1[best] {
                best = c;
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown<T> {
    /// focal terms of image candidates
    pub focal: T,
    /// unweighted BCE terms of all candidates
    pub bce: T,
    pub total: T,
}

/// Per-sample `(focal, bce)`; focal is zero for radar candidates. Adds the
/// gradient of `focal + lambda * bce` to `grad` when given.
pub fn sample_loss<T: Scalar>(
    s: &FusionSample<T>,
    params: &FusionParams<T>,
    grad: Option<&mut [T]>,
) -> (T, T) {
    let lambda = T::lit(params.lambda);
    let r = params.radar_score(&s.pooled);
    let v2 = fuse_vector(&s.v1, r);
    let cls = s.class_index();
    let q = clamp_prob(v2[cls]);
    let bce = bce_loss(q, s.label, params.symmetric_bce);
    let mut dr = lambda * bce_grad(q, s.label, params.symmetric_bce) * clamp_slope(v2[cls]);

    let mut focal = T::zero();
    let mut grads = grad;
    if s.source == Source::Image {
        let c1 = s.v1.len();
        let x: Vec<T> = s.v1.iter().chain(&v2).copied().collect();
        let fwd = integrate_forward(&x, params);
        let p = clamp_prob(fwd.p);
        focal = focal_loss(p, s.label, params.alpha, params.gamma);
        if let Some(g) = grads.as_deref_mut() {
            let d = x.len();
            let h = params.hidden;
            let (o_w1, o_b1) = (N_POOLED + 1, N_POOLED + 1 + h * d);
            let (o_w2, o_b2) = (o_b1 + h, o_b1 + 2 * h);
            let g_o = focal_grad(p, s.label, params.alpha, params.gamma) * clamp_slope(fwd.p);
            g[o_b2] += g_o;
            let mut g_x = vec![T::zero(); d];
            for k in 0..h {
                g[o_w2 + k] += g_o * fwd.hidden[k];
                if fwd.pre[k] <= T::zero() {
                    continue;
                }
                let g_a = g_o * params.w2[k];
                g[o_b1 + k] += g_a;
                for j in 0..d {
                    g[o_w1 + k * d + j] += g_a * x[j];
                    g_x[j] += g_a * params.w1[k * d + j];
                }
            }
            for c in 0..c1 {
                let slope = v2[c] * (T::one() - v2[c]);
                dr += g_x[c1 + c] * if c == 0 { -slope } else { slope };
            }
        }
    }
    if let Some(g) = grads {
        for i in 0..N_POOLED {
            g[i] += dr * s.pooled[i];
        }
        g[N_POOLED] += dr;
    }
    (focal, bce)
}

/// `sum_i [1(image) focal_i + lambda bce_i]` over the selected samples.
pub fn total_loss<T: Scalar>(
    samples: &[FusionSample<T>],
    params: &FusionParams<T>,
) -> Result<LossBreakdown<T>> {
    if samples.is_empty() {
        return Err(Error::Training("no selected samples in batch".into()));
    }
    let (mut focal, mut bce) = (T::zero(), T::zero());
    for s in samples {
        let (f, b) = sample_loss(s, params, None);
        focal += f;
        bce += b;
    }
    Ok(LossBreakdown {
        focal,
        bce,
        total: focal + T::lit(params.lambda) * bce,
    })
}

/// Total loss and its gradient in [`FusionParams::to_vec`] order.
pub fn total_loss_grad<T: Scalar>(
    samples: &[FusionSample<T>],
    params: &FusionParams<T>,
) -> Result<(T, Vec<T>)> {
    if samples.is_empty() {
        return Err(Error::Training("no selected samples in batch".into()));
    }
    let mut grad = vec![T::zero(); params.n_params()];
    let lambda = T::lit(params.lambda);
    let mut total = T::zero();
    for s in samples {
        let (f, b) = sample_loss(s, params, Some(&mut grad));
        total += f + lambda * b;
    }
    Ok((total, grad))
}
