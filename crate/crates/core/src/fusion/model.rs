use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::heatmap::{RoiFeature, N_CHANNELS, ROI_SIZE};
use crate::error::{Error, Result};
use crate::scalar::{clamp_prob, logit, sigmoid, Scalar};

pub const PARAMS_SCHEMA_VERSION: u32 = 1;
/// mean and max per RoI channel
pub const N_POOLED: usize = 2 * N_CHANNELS;

/// Pooled RoI summary: channel means followed by channel maxima.
pub fn pool<T: Scalar>(roi: &RoiFeature<T>) -> [T; N_POOLED] {
    let mut out = [T::zero(); N_POOLED];
    let n = T::from_usize_lossy(ROI_SIZE * ROI_SIZE);
    for c in 0..N_CHANNELS {
        let ch = roi.channel(c);
        out[c] = ch.iter().fold(T::zero(), |a, &v| a + v) / n;
        out[N_CHANNELS + c] = ch.iter().fold(T::neg_infinity(), |a, &v| a.max(v));
    }
    out
}

/// Refinement-head parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionParams<T> {
    /// number of object classes (score vectors have `n_classes + 1` entries)
    pub n_classes: usize,
    pub hidden: usize,
    pub radar_w: [T; N_POOLED],
    pub radar_b: T,
    /// `hidden x (2 * n_classes + 2)`, row-major
    pub w1: Vec<T>,
    pub b1: Vec<T>,
    pub w2: Vec<T>,
    pub b2: T,
    /// BCE weight
    pub lambda: f64,
    /// focal balance
    pub alpha: f64,
    /// focal exponent
    pub gamma: f64,
    /// add the `(1 - y) log(1 - q)` term to BCE
    pub symmetric_bce: bool,
}

impl<T: Scalar> FusionParams<T> {
    /// All-zero weights: `q` equals the image confidence and `p` is 0.5.
    pub fn zeros(n_classes: usize, hidden: usize) -> Self {
        let d = 2 * n_classes + 2;
        Self {
            n_classes,
            hidden,
            radar_w: [T::zero(); N_POOLED],
            radar_b: T::zero(),
            w1: vec![T::zero(); hidden * d],
            b1: vec![T::zero(); hidden],
            w2: vec![T::zero(); hidden],
            b2: T::zero(),
            lambda: 1.0,
            alpha: 0.25,
            gamma: 2.0,
            symmetric_bce: false,
        }
    }

    /// Small uniform weights, zero biases.
    pub fn init(n_classes: usize, hidden: usize, seed: u64) -> Self {
        let mut p = Self::zeros(n_classes, hidden);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = p.input_dim();
        let s1 = (1.0 / d as f64).sqrt();
        let s2 = (1.0 / hidden as f64).sqrt();
        for w in &mut p.w1 {
            *w = T::lit(rng.random_range(-s1..s1));
        }
        for w in &mut p.w2 {
            *w = T::lit(rng.random_range(-s2..s2));
        }
        for w in &mut p.radar_w {
            *w = T::lit(rng.random_range(-0.1..0.1));
        }
        p
    }

    pub fn input_dim(&self) -> usize {
        2 * self.n_classes + 2
    }

    pub fn n_params(&self) -> usize {
        N_POOLED + 1 + self.w1.len() + self.b1.len() + self.w2.len() + 1
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.input_dim();
        if self.n_classes < 1 || self.hidden < 1 {
            return Err(Error::Config(
                "fusion params need n_classes >= 1 and hidden >= 1".into(),
            ));
        }
        if self.w1.len() != self.hidden * d
            || self.b1.len() != self.hidden
            || self.w2.len() != self.hidden
        {
            return Err(Error::Config(format!(
                "fusion tensor shapes do not match hidden={} input={d}",
                self.hidden
            )));
        }
        if self.to_vec().iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("fusion params must be finite".into()));
        }
        if !(self.alpha >= 0.0 && self.alpha <= 1.0 && self.gamma >= 0.0 && self.lambda >= 0.0) {
            return Err(Error::Config(
                "need 0 <= alpha <= 1, gamma >= 0, lambda >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Flattened in the order radar_w, radar_b, w1, b1, w2, b2.
    pub fn to_vec(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.n_params());
        v.extend_from_slice(&self.radar_w);
        v.push(self.radar_b);
        v.extend_from_slice(&self.w1);
        v.extend_from_slice(&self.b1);
        v.extend_from_slice(&self.w2);
        v.push(self.b2);
        v
    }

    pub fn set_from_slice(&mut self, v: &[T]) {
        assert_eq!(v.len(), self.n_params(), "parameter vector length");
        let mut it = v.iter().copied();
        for w in &mut self.radar_w {
            *w = it.next().unwrap();
        }
        self.radar_b = it.next().unwrap();
        for w in self.w1.iter_mut().chain(&mut self.b1).chain(&mut self.w2) {
            *w = it.next().unwrap();
        }
        self.b2 = it.next().unwrap();
    }

    /// Linear radar confidence from pooled RoI features.
    pub fn radar_score(&self, pooled: &[T; N_POOLED]) -> T {
        pooled
            .iter()
            .zip(&self.radar_w)
            .fold(self.radar_b, |a, (&f, &w)| a + f * w)
    }
}

/// `q = sigmoid(logit(image_conf) + radar_conf)`.
pub fn perceptual_fuse<T: Scalar>(
    image_conf: T,
    roi: &RoiFeature<T>,
    params: &FusionParams<T>,
) -> T {
    fuse_score(image_conf, params.radar_score(&pool(roi)))
}

pub fn fuse_score<T: Scalar>(image_conf: T, radar_conf: T) -> T {
    sigmoid(logit(clamp_prob(image_conf)) + radar_conf)
}

/// Radar evidence applied to a whole score vector: class entries move up by
/// `radar_conf` in logit space and the background entry moves down.
pub fn fuse_vector<T: Scalar>(v1: &[T], radar_conf: T) -> Vec<T> {
    v1.iter()
        .enumerate()
        .map(|(c, &s)| {
            let l = logit(clamp_prob(s));
            sigmoid(if c == 0 {
                l - radar_conf
            } else {
                l + radar_conf
            })
        })
        .collect()
}

/// Keep score `p = sigmoid(w2 . relu(W1 [v1; v2] + b1) + b2)`.
pub fn integrate<T: Scalar>(v1: &[T], v2: &[T], params: &FusionParams<T>) -> Result<T> {
    let c1 = params.n_classes + 1;
    if v1.len() != c1 || v2.len() != c1 {
        return Err(Error::Input(format!(
            "score vectors must have {c1} entries, got {} and {}",
            v1.len(),
            v2.len()
        )));
    }
    let x: Vec<T> = v1.iter().chain(v2).copied().collect();
    Ok(integrate_forward(&x, params).p)
}

pub(crate) struct MlpForward<T> {
    pub pre: Vec<T>,
    pub hidden: Vec<T>,
    pub p: T,
}

pub(crate) fn integrate_forward<T: Scalar>(x: &[T], params: &FusionParams<T>) -> MlpForward<T> {
    let d = x.len();
    let mut pre = Vec::with_capacity(params.hidden);
    let mut hidden = Vec::with_capacity(params.hidden);
    for k in 0..params.hidden {
        let row = &params.w1[k * d..(k + 1) * d];
        let a = row
            .iter()
            .zip(x)
            .fold(params.b1[k], |acc, (&w, &xi)| acc + w * xi);
        pre.push(a);
        hidden.push(a.max(T::zero()));
    }
    let o = hidden
        .iter()
        .zip(&params.w2)
        .fold(params.b2, |acc, (&h, &w)| acc + h * w);
    MlpForward {
        pre,
        hidden,
        p: sigmoid(o),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ParamsFile {
    schema_version: u32,
    n_classes: usize,
    hidden: usize,
    lambda: f64,
    alpha: f64,
    gamma: f64,
    symmetric_bce: bool,
    tensors: Tensors,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Tensors {
    radar_w: Vec<f64>,
    radar_b: Vec<f64>,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

impl<T: Scalar> FusionParams<T> {
    pub fn to_toml_string(&self) -> Result<String> {
        let f = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
        crate::io::to_toml_string(&ParamsFile {
            schema_version: PARAMS_SCHEMA_VERSION,
            n_classes: self.n_classes,
            hidden: self.hidden,
            lambda: self.lambda,
            alpha: self.alpha,
            gamma: self.gamma,
            symmetric_bce: self.symmetric_bce,
            tensors: Tensors {
                radar_w: f(&self.radar_w),
                radar_b: vec![self.radar_b.as_f64()],
                w1: f(&self.w1),
                b1: f(&self.b1),
                w2: f(&self.w2),
                b2: vec![self.b2.as_f64()],
            },
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ParamsFile = crate::io::from_toml_str(text)?;
        if file.schema_version != PARAMS_SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported fusion params schema_version {}",
                file.schema_version
            )));
        }
        let t = &file.tensors;
        if t.radar_w.len() != N_POOLED || t.radar_b.len() != 1 || t.b2.len() != 1 {
            return Err(Error::Parse(
                "fusion params tensor has the wrong length".into(),
            ));
        }
        let g = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<_>>();
        let p = Self {
            n_classes: file.n_classes,
            hidden: file.hidden,
            radar_w: std::array::from_fn(|i| T::lit(t.radar_w[i])),
            radar_b: T::lit(t.radar_b[0]),
            w1: g(&t.w1),
            b1: g(&t.b1),
            w2: g(&t.w2),
            b2: T::lit(t.b2[0]),
            lambda: file.lambda,
            alpha: file.alpha,
            gamma: file.gamma,
            symmetric_bce: file.symmetric_bce,
        };
        p.validate()?;
        Ok(p)
    }
}
