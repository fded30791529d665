//! Binary cross-entropy and softmax cross-entropy with analytic gradients.

use super::{NumericsError, Result};
use crate::scalar::{real, Scalar};
use ndarray::Array2;

/// Probability clamp applied inside the losses.
pub const EPS_CLIP: f64 = 1e-7;

fn clamp_prob<S: Scalar>(p: S) -> S {
    let lo = real::<S>(EPS_CLIP);
    let hi = S::one() - lo;
    p.max(lo).min(hi)
}

/// Mean binary cross-entropy of predicted probabilities against targets of
/// the same shape. Returns the loss and dL/d pred.
pub fn bce_loss<S: Scalar>(pred: &Array2<S>, target: &Array2<S>) -> Result<(S, Array2<S>)> {
    if pred.raw_dim() != target.raw_dim() {
        return Err(NumericsError::ShapeMismatch(format!(
            "pred {:?} vs target {:?}",
            pred.shape(),
            target.shape()
        )));
    }
    let n = real::<S>(pred.len() as f64);
    let mut loss = S::zero();
    let mut grad = Array2::zeros(pred.raw_dim());
    for ((g, &p_raw), &t) in grad.iter_mut().zip(pred.iter()).zip(target.iter()) {
        let p = clamp_prob(p_raw);
        loss = loss - (t * p.ln() + (S::one() - t) * (S::one() - p).ln());
        *g = (p - t) / (p * (S::one() - p) * n);
    }
    let loss = loss / n;
    if !loss.is_finite() {
        return Err(NumericsError::NonFiniteLoss);
    }
    Ok((loss, grad))
}

/// BCE against a constant target (all-real = 1, all-fake = 0).
pub fn bce_loss_const<S: Scalar>(pred: &Array2<S>, target: S) -> Result<(S, Array2<S>)> {
    let targets = Array2::from_elem(pred.raw_dim(), target);
    bce_loss(pred, &targets)
}

/// Row-wise softmax of a logit matrix.
pub fn softmax_rows<S: Scalar>(logits: &Array2<S>) -> Array2<S> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().cloned().fold(S::neg_infinity(), S::max);
        row.mapv_inplace(|z| (z - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|e| e / sum);
    }
    out
}

/// Mean cross-entropy of row logits against integer labels. Returns the loss
/// and dL/d logits = (softmax − one-hot)/n.
pub fn softmax_ce_loss<S: Scalar>(logits: &Array2<S>, labels: &[usize]) -> Result<(S, Array2<S>)> {
    let (n, k) = (logits.nrows(), logits.ncols());
    if labels.len() != n {
        return Err(NumericsError::ShapeMismatch(format!(
            "{n} logit rows but {} labels",
            labels.len()
        )));
    }
    for &label in labels {
        if label >= k {
            return Err(NumericsError::LabelOutOfRange { label, k });
        }
    }
    let n_s = real::<S>(n as f64);
    let probs = softmax_rows(logits);
    let mut loss = S::zero();
    let mut grad = probs.clone();
    for (i, &label) in labels.iter().enumerate() {
        let p = clamp_prob(probs[(i, label)]);
        loss = loss - p.ln();
        grad[(i, label)] = grad[(i, label)] - S::one();
    }
    grad.mapv_inplace(|g| g / n_s);
    let loss = loss / n_s;
    if !loss.is_finite() {
        return Err(NumericsError::NonFiniteLoss);
    }
    Ok((loss, grad))
}
