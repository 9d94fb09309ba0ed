//! Two-layer graph convolutional network.
//!
//! The forward pass is `H = relu(Â X W0)`, `Z = softmax(Â H W1)` with
//! inverted dropout applied to the input of each layer when masks are
//! given. Training minimizes the mean cross-entropy over the labeled
//! nodes plus `weight_decay · ½‖W0‖²` by full-batch Adam.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::graph::NormalizedOperator;
use crate::rng::{self, stream, SplitMix64};
use crate::sparse::CsrMatrix;

/// Training hyperparameters. The defaults are the standard two-layer GCN
/// configuration for the citation benchmarks: 16 hidden units, dropout 0.5,
/// Adam at 0.01, weight decay 5e-4 on the first layer, 200 epochs.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Hyperparams {
    pub hidden_units: usize,
    pub dropout_rate: f64,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub epochs: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            hidden_units: 16,
            dropout_rate: 0.5,
            learning_rate: 0.01,
            weight_decay: 5e-4,
            epochs: 200,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 {
            return Err(Error::InvalidConfig("hidden_units must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::InvalidConfig(format!(
                "dropout_rate must be in [0, 1), got {}",
                self.dropout_rate
            )));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !self.weight_decay.is_finite() || self.weight_decay < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "weight_decay must be nonnegative, got {}",
                self.weight_decay
            )));
        }
        Ok(())
    }
}

/// Weight matrices of the two layers: `w0` is d×h, `w1` is h×K.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnnParams {
    pub w0: Array2<f64>,
    pub w1: Array2<f64>,
}

impl GcnnParams {
    /// Glorot-uniform initialization, drawn from the weight-init stream of
    /// `seed` (the same derivation [`train`] uses, so `train` with zero
    /// epochs returns exactly this).
    pub fn init(n_features: usize, hidden_units: usize, n_classes: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::new(rng::derive(seed, stream::WEIGHT_INIT));
        Self {
            w0: glorot(n_features, hidden_units, &mut rng),
            w1: glorot(hidden_units, n_classes, &mut rng),
        }
    }

    fn shapes_for(&self, features: &CsrMatrix, op: &NormalizedOperator) -> Result<()> {
        if features.rows() != op.n()
            || features.cols() != self.w0.nrows()
            || self.w0.ncols() != self.w1.nrows()
        {
            return Err(Error::ShapeMismatch {
                context: "gcnn forward",
                expected: format!(
                    "operator {0}×{0}, features {0}×{1}, w0 {1}×{2}, w1 {2}×k",
                    op.n(),
                    self.w0.nrows(),
                    self.w0.ncols()
                ),
                got: format!(
                    "features {}×{}, w0 {}×{}, w1 {}×{}",
                    features.rows(),
                    features.cols(),
                    self.w0.nrows(),
                    self.w0.ncols(),
                    self.w1.nrows(),
                    self.w1.ncols()
                ),
            });
        }
        Ok(())
    }
}

fn glorot(fan_in: usize, fan_out: usize, rng: &mut SplitMix64) -> Array2<f64> {
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let mut w = Array2::zeros((fan_in, fan_out));
    for i in 0..fan_in {
        for j in 0..fan_out {
            w[[i, j]] = rng.uniform(-bound, bound);
        }
    }
    w
}

/// Row-stochastic network output: each row is a categorical distribution
/// over the K classes.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxOutput {
    probs: Array2<f64>,
}

impl SoftmaxOutput {
    pub fn probs(&self) -> &Array2<f64> {
        &self.probs
    }

    pub fn into_probs(self) -> Array2<f64> {
        self.probs
    }
}

/// Dropout keep-masks for one forward pass. The input mask is aligned with
/// the stored nonzeros of the feature matrix (zero entries are unaffected
/// by dropout either way); the hidden mask covers the n×h first-layer
/// output in row-major order. Kept entries are scaled by `1/(1-rate)`.
#[derive(Debug, Clone)]
pub struct DropoutMasks {
    pub rate: f64,
    pub input_keep: Vec<bool>,
    pub hidden_keep: Vec<bool>,
}

impl DropoutMasks {
    pub fn sample(
        features: &CsrMatrix,
        hidden_units: usize,
        rate: f64,
        rng: &mut SplitMix64,
    ) -> Self {
        let keep_prob = 1.0 - rate;
        let input_keep = (0..features.nnz())
            .map(|_| rng.bernoulli(keep_prob))
            .collect();
        let hidden_keep = (0..features.rows() * hidden_units)
            .map(|_| rng.bernoulli(keep_prob))
            .collect();
        Self {
            rate,
            input_keep,
            hidden_keep,
        }
    }

    fn scale(&self) -> f64 {
        1.0 / (1.0 - self.rate)
    }

    fn check(&self, features: &CsrMatrix, hidden_units: usize) -> Result<()> {
        if self.input_keep.len() != features.nnz()
            || self.hidden_keep.len() != features.rows() * hidden_units
        {
            return Err(Error::ShapeMismatch {
                context: "dropout masks",
                expected: format!(
                    "{} input entries, {} hidden entries",
                    features.nnz(),
                    features.rows() * hidden_units
                ),
                got: format!("{}, {}", self.input_keep.len(), self.hidden_keep.len()),
            });
        }
        Ok(())
    }
}

struct ForwardCache {
    /// Pre-activation of the first layer, n×h.
    a1: Array2<f64>,
    /// Masked relu output fed to the second layer, n×h.
    h1: Array2<f64>,
    /// Logits, n×K.
    logits: Array2<f64>,
    /// Softmax of the logits, n×K.
    probs: Array2<f64>,
}

fn forward_cache(
    params: &GcnnParams,
    op: &NormalizedOperator,
    features: &CsrMatrix,
    masks: Option<&DropoutMasks>,
) -> Result<ForwardCache> {
    params.shapes_for(features, op)?;
    if let Some(m) = masks {
        m.check(features, params.w0.ncols())?;
    }

    let u = match masks {
        None => features.mul_dense(&params.w0),
        Some(m) => features.mul_dense_masked(&params.w0, &m.input_keep, m.scale()),
    };
    let a1 = op.mul_dense(&u);
    // relu (f64::max) silently maps NaN to 0, so divergence must be caught
    // on the pre-activation.
    if !a1.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("first-layer pre-activation"));
    }
    let mut h1 = a1.mapv(|v| v.max(0.0));
    if let Some(m) = masks {
        let scale = m.scale();
        for (idx, v) in h1.iter_mut().enumerate() {
            *v = if m.hidden_keep[idx] { *v * scale } else { 0.0 };
        }
    }
    let logits = op.mul_dense(&h1.dot(&params.w1));
    if !logits.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("gcnn logits"));
    }
    let probs = softmax_rows(&logits.view());
    Ok(ForwardCache {
        a1,
        h1,
        logits,
        probs,
    })
}

/// One forward pass. With `masks` present, inverted dropout is applied to
/// the inputs of both layers; without, the pass is deterministic.
pub fn forward(
    params: &GcnnParams,
    op: &NormalizedOperator,
    features: &CsrMatrix,
    masks: Option<&DropoutMasks>,
) -> Result<SoftmaxOutput> {
    forward_cache(params, op, features, masks).map(|c| SoftmaxOutput { probs: c.probs })
}

/// Numerically stable row-wise softmax (max subtraction).
pub fn softmax_rows(logits: &ArrayView2<f64>) -> Array2<f64> {
    let mut out = Array2::zeros(logits.dim());
    for (mut out_row, row) in out.rows_mut().into_iter().zip(logits.rows()) {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for (o, &v) in out_row.iter_mut().zip(row) {
            *o = (v - max).exp();
            sum += *o;
        }
        for o in out_row.iter_mut() {
            *o /= sum;
        }
    }
    out
}

/// Mean cross-entropy over `nodes` computed from logits via the log-sum-exp
/// identity, plus the first-layer ridge penalty.
fn loss_from_logits(
    logits: &Array2<f64>,
    labels: &[usize],
    nodes: &[usize],
    weight_decay: f64,
    w0: &Array2<f64>,
) -> f64 {
    let mut total = 0.0;
    for &i in nodes {
        let row = logits.row(i);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_sum: f64 = row.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
        total -= row[labels[i]] - max - log_sum;
    }
    total / nodes.len() as f64 + 0.5 * weight_decay * w0.iter().map(|v| v * v).sum::<f64>()
}

/// Gradients of the training objective with respect to the two weight
/// matrices.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub w0: Array2<f64>,
    pub w1: Array2<f64>,
}

/// Training objective and its analytic gradients at `params`, with the
/// given dropout masks applied (or none).
pub fn loss_and_gradients(
    params: &GcnnParams,
    op: &NormalizedOperator,
    features: &CsrMatrix,
    labels: &[usize],
    train_nodes: &[usize],
    weight_decay: f64,
    masks: Option<&DropoutMasks>,
) -> Result<(f64, Gradients)> {
    let cache = forward_cache(params, op, features, masks)?;
    let loss = loss_from_logits(&cache.logits, labels, train_nodes, weight_decay, &params.w0);

    let (n, k) = cache.probs.dim();
    let m = train_nodes.len() as f64;
    let mut d_logits = Array2::zeros((n, k));
    for &i in train_nodes {
        for c in 0..k {
            let target = if c == labels[i] { 1.0 } else { 0.0 };
            d_logits[[i, c]] = (cache.probs[[i, c]] - target) / m;
        }
    }

    // The operator is symmetric, so Âᵀ· = Â·.
    let d_u2 = op.mul_dense(&d_logits);
    let d_w1 = cache.h1.t().dot(&d_u2);
    let mut d_h1 = d_u2.dot(&params.w1.t());
    match masks {
        Some(mask) => {
            let scale = mask.scale();
            for (idx, v) in d_h1.iter_mut().enumerate() {
                let relu_grad = if cache.a1.as_slice().unwrap()[idx] > 0.0 {
                    1.0
                } else {
                    0.0
                };
                *v *= if mask.hidden_keep[idx] {
                    scale * relu_grad
                } else {
                    0.0
                };
            }
        }
        None => {
            for (v, &a) in d_h1.iter_mut().zip(cache.a1.iter()) {
                if a <= 0.0 {
                    *v = 0.0;
                }
            }
        }
    }
    let d_u = op.mul_dense(&d_h1);
    let mut d_w0 = match masks {
        None => features.transpose_mul_dense(&d_u),
        Some(mask) => features.transpose_mul_dense_masked(&d_u, &mask.input_keep, mask.scale()),
    };
    if weight_decay > 0.0 {
        d_w0.scaled_add(weight_decay, &params.w0);
    }

    Ok((loss, Gradients { w0: d_w0, w1: d_w1 }))
}

/// Evaluation-mode (dropout-free) training objective for a parameter set.
pub fn evaluation_loss(
    params: &GcnnParams,
    op: &NormalizedOperator,
    features: &CsrMatrix,
    labels: &[usize],
    nodes: &[usize],
    weight_decay: f64,
) -> Result<f64> {
    let cache = forward_cache(params, op, features, None)?;
    Ok(loss_from_logits(
        &cache.logits,
        labels,
        nodes,
        weight_decay,
        &params.w0,
    ))
}

struct Adam {
    m: Gradients,
    v: Gradients,
    t: i32,
    lr: f64,
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl Adam {
    fn new(d: usize, h: usize, k: usize, lr: f64) -> Self {
        Self {
            m: Gradients {
                w0: Array2::zeros((d, h)),
                w1: Array2::zeros((h, k)),
            },
            v: Gradients {
                w0: Array2::zeros((d, h)),
                w1: Array2::zeros((h, k)),
            },
            t: 0,
            lr,
        }
    }

    fn step(&mut self, params: &mut GcnnParams, grads: &Gradients) {
        self.t += 1;
        let corr1 = 1.0 - ADAM_BETA1.powi(self.t);
        let corr2 = 1.0 - ADAM_BETA2.powi(self.t);
        for (w, g, m, v) in [
            (&mut params.w0, &grads.w0, &mut self.m.w0, &mut self.v.w0),
            (&mut params.w1, &grads.w1, &mut self.m.w1, &mut self.v.w1),
        ] {
            ndarray::Zip::from(w)
                .and(g)
                .and(m)
                .and(v)
                .for_each(|w, &g, m, v| {
                    *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
                    *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
                    let m_hat = *m / corr1;
                    let v_hat = *v / corr2;
                    *w -= self.lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
                });
        }
    }
}

/// Train a network for exactly `hyper.epochs` full-graph Adam steps with
/// fresh dropout masks each step. Deterministic given the inputs and seed.
pub fn train(
    op: &NormalizedOperator,
    features: &CsrMatrix,
    labels: &[usize],
    n_classes: usize,
    train_nodes: &[usize],
    hyper: &Hyperparams,
    seed: u64,
) -> Result<GcnnParams> {
    hyper.validate()?;
    if train_nodes.is_empty() {
        return Err(Error::InvalidConfig("empty training set".into()));
    }
    if labels.len() != features.rows() {
        return Err(Error::ShapeMismatch {
            context: "gcnn training",
            expected: format!("{} labels", features.rows()),
            got: format!("{}", labels.len()),
        });
    }
    for &i in train_nodes {
        if i >= labels.len() {
            return Err(Error::NodeOutOfRange {
                index: i,
                n_nodes: labels.len(),
            });
        }
        if labels[i] >= n_classes {
            return Err(Error::LabelOutOfRange {
                node: i,
                label: labels[i],
                n_classes,
            });
        }
    }

    let mut params = GcnnParams::init(features.cols(), hyper.hidden_units, n_classes, seed);
    let mut adam = Adam::new(
        features.cols(),
        hyper.hidden_units,
        n_classes,
        hyper.learning_rate,
    );
    let mut mask_rng = SplitMix64::new(rng::derive(seed, stream::DROPOUT_MASKS));
    for epoch in 0..hyper.epochs {
        let masks = if hyper.dropout_rate > 0.0 {
            Some(DropoutMasks::sample(
                features,
                hyper.hidden_units,
                hyper.dropout_rate,
                &mut mask_rng,
            ))
        } else {
            None
        };
        let (loss, grads) = loss_and_gradients(
            &params,
            op,
            features,
            labels,
            train_nodes,
            hyper.weight_decay,
            masks.as_ref(),
        )
        .map_err(|e| match e {
            Error::NonFinite(_) => Error::Diverged {
                epoch,
                sample: None,
            },
            other => other,
        })?;
        if !loss.is_finite() {
            return Err(Error::Diverged {
                epoch,
                sample: None,
            });
        }
        adam.step(&mut params, &grads);
    }
    Ok(params)
}

/// Draw `s_samples` stochastic forward passes with dropout active at
/// prediction time. Pass `s` uses the mask stream `derive(seed, s)`, so any
/// single sample can be regenerated on its own. With `dropout_rate` zero
/// all samples equal the deterministic forward pass.
pub fn mc_dropout_predict(
    params: &GcnnParams,
    op: &NormalizedOperator,
    features: &CsrMatrix,
    dropout_rate: f64,
    s_samples: usize,
    seed: u64,
) -> Result<Vec<SoftmaxOutput>> {
    if s_samples == 0 {
        return Err(Error::InvalidConfig("s_samples must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&dropout_rate) {
        return Err(Error::InvalidConfig(format!(
            "dropout_rate must be in [0, 1), got {dropout_rate}"
        )));
    }
    let mut outputs = Vec::with_capacity(s_samples);
    for s in 0..s_samples {
        let masks = if dropout_rate > 0.0 {
            let mut rng = SplitMix64::new(rng::derive(seed, s as u64));
            Some(DropoutMasks::sample(
                features,
                params.w0.ncols(),
                dropout_rate,
                &mut rng,
            ))
        } else {
            None
        };
        outputs.push(forward(params, op, features, masks.as_ref())?);
    }
    Ok(outputs)
}

/// Per-row argmax with ties broken toward the lowest class index.
pub fn argmax_rows(probs: &ArrayView2<f64>) -> Vec<usize> {
    probs
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for (idx, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = idx;
                }
            }
            best
        })
        .collect()
}
