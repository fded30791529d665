//! Adam with bias correction over an ordered set of parameter tensors.

use super::{NumericsError, Result};
use crate::scalar::{real, Scalar};
use ndarray::{ArrayD, ArrayViewD, ArrayViewMutD, Zip};
use serde::{Deserialize, Serialize};

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AdamHyper<S: Scalar> {
    pub lr: S,
    pub beta1: S,
    pub beta2: S,
    pub epsilon: S,
}

impl<S: Scalar> AdamHyper<S> {
    pub fn new(lr: f64, beta1: f64, beta2: f64) -> Self {
        Self {
            lr: real(lr),
            beta1: real(beta1),
            beta2: real(beta2),
            epsilon: real(1e-8),
        }
    }
}

impl<S: Scalar> Default for AdamHyper<S> {
    fn default() -> Self {
        Self::new(0.0002, 0.5, 0.999)
    }
}

/// First/second-moment buffers for one ordered parameter set. Slots are
/// allocated lazily on the first step and must keep their shapes afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AdamState<S: Scalar> {
    pub hyper: AdamHyper<S>,
    pub t: u64,
    slots: Vec<(ArrayD<S>, ArrayD<S>)>,
}

impl<S: Scalar> AdamState<S> {
    pub fn new(hyper: AdamHyper<S>) -> Self {
        Self {
            hyper,
            t: 0,
            slots: Vec::new(),
        }
    }

    /// One update: `θ ← θ − lr · m̂ / (√v̂ + ε)` per tensor, with bias-corrected
    /// moment estimates. `params` and `grads` must pair up by position.
    pub fn step(
        &mut self,
        params: &mut [ArrayViewMutD<'_, S>],
        grads: &[ArrayViewD<'_, S>],
    ) -> Result<()> {
        if params.len() != grads.len() {
            return Err(NumericsError::ShapeMismatch(format!(
                "{} parameter tensors but {} gradient tensors",
                params.len(),
                grads.len()
            )));
        }
        if self.slots.is_empty() {
            self.slots = params
                .iter()
                .map(|p| (ArrayD::zeros(p.raw_dim()), ArrayD::zeros(p.raw_dim())))
                .collect();
        }
        if self.slots.len() != params.len() {
            return Err(NumericsError::ShapeMismatch(format!(
                "optimizer tracks {} tensors but received {}",
                self.slots.len(),
                params.len()
            )));
        }
        self.t += 1;
        let t = self.t as i32;
        let one = S::one();
        let AdamHyper {
            lr,
            beta1,
            beta2,
            epsilon,
        } = self.hyper;
        let bc1 = one - beta1.powi(t);
        let bc2 = one - beta2.powi(t);

        for ((param, grad), (m, v)) in params.iter_mut().zip(grads).zip(&mut self.slots) {
            if param.raw_dim() != grad.raw_dim() || param.raw_dim() != m.raw_dim() {
                return Err(NumericsError::ShapeMismatch(format!(
                    "parameter {:?}, gradient {:?}, state {:?}",
                    param.shape(),
                    grad.shape(),
                    m.shape()
                )));
            }
            Zip::from(param)
                .and(grad)
                .and(m)
                .and(v)
                .for_each(|theta, &g, m, v| {
                    *m = beta1 * *m + (one - beta1) * g;
                    *v = beta2 * *v + (one - beta2) * g * g;
                    let m_hat = *m / bc1;
                    let v_hat = *v / bc2;
                    *theta = *theta - lr * m_hat / (v_hat.sqrt() + epsilon);
                });
        }
        Ok(())
    }
}
