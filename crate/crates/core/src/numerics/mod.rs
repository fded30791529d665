//! Dense feed-forward networks with explicit forward/backward passes,
//! classification losses, label embeddings, and Adam. This is the substrate
//! both GAN variants train on; there is no general autograd graph, only the
//! compositions the pipeline needs.

mod adam;
mod embed;
mod loss;
mod net;

pub use adam::{AdamHyper, AdamState};
pub use embed::Embedding;
pub use loss::{bce_loss, bce_loss_const, softmax_ce_loss, softmax_rows, EPS_CLIP};
pub use net::{Activation, DenseLayer, DenseNet, NetGrads, Tape};

use crate::scalar::Scalar;
use ndarray::Array2;

/// Errors raised by the numeric substrate.
#[derive(Debug, thiserror::Error)]
pub enum NumericsError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite activation in layer {layer}")]
    NonFiniteActivation { layer: usize },
    #[error("tape does not match the current network parameters")]
    StaleTape,
    #[error("label {label} out of range for {k} classes")]
    LabelOutOfRange { label: usize, k: usize },
    #[error("non-finite loss")]
    NonFiniteLoss,
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// One training batch: standardized inputs, class labels, and the noise rows
/// paired with them.
#[derive(Debug, Clone)]
pub struct Batch<S: Scalar> {
    pub inputs: Array2<S>,
    pub labels: Vec<usize>,
    pub noise: Array2<S>,
}

impl<S: Scalar> Batch<S> {
    pub fn new(inputs: Array2<S>, labels: Vec<usize>, noise: Array2<S>) -> Result<Self> {
        let n = inputs.nrows();
        if labels.len() != n || noise.nrows() != n {
            return Err(NumericsError::ShapeMismatch(format!(
                "batch rows disagree: inputs {n}, labels {}, noise {}",
                labels.len(),
                noise.nrows()
            )));
        }
        Ok(Self {
            inputs,
            labels,
            noise,
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
