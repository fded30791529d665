//! Dense layers with explicit forward and backward passes.

use super::{NumericsError, Result};
use crate::rng::seeded_rng;
use crate::scalar::{real, Scalar};
use ndarray::{Array1, Array2, ArrayViewD, ArrayViewMutD, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Elementwise activation applied after the affine map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", rename_all = "snake_case")]
pub enum Activation<S: Scalar> {
    LeakyRelu { alpha: S },
    Sigmoid,
    Linear,
    Softmax,
}

impl<S: Scalar> Activation<S> {
    fn apply(&self, preact: &Array2<S>) -> Array2<S> {
        match self {
            Activation::LeakyRelu { alpha } => preact.mapv(|z| {
                if z > S::zero() {
                    z
                } else {
                    *alpha * z
                }
            }),
            Activation::Sigmoid => preact.mapv(|z| S::one() / (S::one() + (-z).exp())),
            Activation::Linear => preact.clone(),
            Activation::Softmax => {
                let mut out = preact.clone();
                for mut row in out.rows_mut() {
                    let max = row.iter().cloned().fold(S::neg_infinity(), S::max);
                    row.mapv_inplace(|z| (z - max).exp());
                    let sum = row.sum();
                    row.mapv_inplace(|e| e / sum);
                }
                out
            }
        }
    }

    /// dL/dz from dL/da, using the cached pre- and post-activation values.
    fn backprop(&self, preact: &Array2<S>, output: &Array2<S>, grad_out: &Array2<S>) -> Array2<S> {
        match self {
            Activation::LeakyRelu { alpha } => {
                let mut grad = grad_out.clone();
                grad.zip_mut_with(preact, |g, &z| {
                    if z <= S::zero() {
                        *g *= *alpha;
                    }
                });
                grad
            }
            Activation::Sigmoid => {
                let mut grad = grad_out.clone();
                grad.zip_mut_with(output, |g, &a| *g *= a * (S::one() - a));
                grad
            }
            Activation::Linear => grad_out.clone(),
            Activation::Softmax => {
                // dz_i = a_i (g_i − Σ_j g_j a_j) per row
                let mut grad = Array2::zeros(grad_out.raw_dim());
                for ((mut gz, a), g) in grad
                    .rows_mut()
                    .into_iter()
                    .zip(output.rows())
                    .zip(grad_out.rows())
                {
                    let dot: S = a.iter().zip(g.iter()).map(|(&ai, &gi)| ai * gi).sum();
                    for ((dzi, &ai), &gi) in gz.iter_mut().zip(a.iter()).zip(g.iter()) {
                        *dzi = ai * (gi - dot);
                    }
                }
                grad
            }
        }
    }
}

/// One affine layer: `a = act(x·Wᵀ + b)` with `W` stored out×in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DenseLayer<S: Scalar> {
    pub weight: Array2<S>,
    pub bias: Array1<S>,
    pub activation: Activation<S>,
}

impl<S: Scalar> DenseLayer<S> {
    pub fn input_width(&self) -> usize {
        self.weight.ncols()
    }

    pub fn output_width(&self) -> usize {
        self.weight.nrows()
    }
}

/// Cached activations from one forward pass, consumed by `backward`.
#[derive(Debug, Clone)]
pub struct Tape<S: Scalar> {
    /// values[0] is the input; values[i+1] the output of layer i.
    values: Vec<Array2<S>>,
    preacts: Vec<Array2<S>>,
    revision: u64,
}

impl<S: Scalar> Tape<S> {
    pub fn output(&self) -> &Array2<S> {
        self.values.last().expect("tape holds at least the input")
    }
}

/// Per-layer weight and bias gradients in layer order.
#[derive(Debug, Clone)]
pub struct NetGrads<S: Scalar> {
    pub layers: Vec<(Array2<S>, Array1<S>)>,
}

impl<S: Scalar> NetGrads<S> {
    /// Elementwise accumulation; shapes must match.
    pub fn accumulate(&mut self, other: &NetGrads<S>) {
        assert_eq!(self.layers.len(), other.layers.len());
        for ((w, b), (ow, ob)) in self.layers.iter_mut().zip(&other.layers) {
            *w += ow;
            *b += ob;
        }
    }

    /// Gradient views in the same order as [`DenseNet::params_mut`].
    pub fn views(&self) -> Vec<ArrayViewD<'_, S>> {
        let mut out = Vec::with_capacity(self.layers.len() * 2);
        for (w, b) in &self.layers {
            out.push(w.view().into_dyn());
            out.push(b.view().into_dyn());
        }
        out
    }
}

/// Feed-forward network: a chain of dense layers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DenseNet<S: Scalar> {
    pub layers: Vec<DenseLayer<S>>,
    revision: u64,
}

/// Equality is over parameters only; the tape-invalidation counter is
/// bookkeeping, not state.
impl<S: Scalar> PartialEq for DenseNet<S> {
    fn eq(&self, other: &Self) -> bool {
        self.layers == other.layers
    }
}

impl<S: Scalar> DenseNet<S> {
    /// Builds a net with the given layer widths (`sizes[0]` = input width).
    /// Hidden layers use `hidden`, the final layer `output`. Weights are
    /// drawn from N(0, 0.02²), biases start at zero.
    pub fn new(
        sizes: &[usize],
        hidden: Activation<S>,
        output: Activation<S>,
        seed: u64,
    ) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output widths");
        let mut rng = seeded_rng(seed);
        let init_std = 0.02;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(i, pair)| {
                let (n_in, n_out) = (pair[0], pair[1]);
                let weight = Array2::from_shape_fn((n_out, n_in), |_| {
                    let z: f64 = rng.sample(StandardNormal);
                    real::<S>(z * init_std)
                });
                let activation = if i + 2 == sizes.len() { output } else { hidden };
                DenseLayer {
                    weight,
                    bias: Array1::zeros(n_out),
                    activation,
                }
            })
            .collect();
        Self { layers, revision: 0 }
    }

    pub fn input_width(&self) -> usize {
        self.layers.first().map_or(0, DenseLayer::input_width)
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().map_or(0, DenseLayer::output_width)
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weight.len() + l.bias.len())
            .sum()
    }

    /// Runs the network, returning the output and the tape `backward` needs.
    pub fn forward(&self, x: &Array2<S>) -> Result<(Array2<S>, Tape<S>)> {
        if x.ncols() != self.input_width() {
            return Err(NumericsError::ShapeMismatch(format!(
                "input width {} but first layer expects {}",
                x.ncols(),
                self.input_width()
            )));
        }
        let mut values = Vec::with_capacity(self.layers.len() + 1);
        let mut preacts = Vec::with_capacity(self.layers.len());
        values.push(x.clone());
        for (i, layer) in self.layers.iter().enumerate() {
            let current = values.last().expect("non-empty");
            let mut preact = current.dot(&layer.weight.t());
            preact += &layer.bias;
            let out = layer.activation.apply(&preact);
            if out.iter().any(|v| !v.is_finite()) {
                return Err(NumericsError::NonFiniteActivation { layer: i });
            }
            preacts.push(preact);
            values.push(out);
        }
        let output = values.last().expect("non-empty").clone();
        Ok((
            output,
            Tape {
                values,
                preacts,
                revision: self.revision,
            },
        ))
    }

    /// Backpropagates `grad_output` (dL/d output) through the tape, returning
    /// parameter gradients and the gradient with respect to the input.
    pub fn backward(&self, tape: &Tape<S>, grad_output: &Array2<S>) -> Result<(NetGrads<S>, Array2<S>)> {
        if tape.revision != self.revision {
            return Err(NumericsError::StaleTape);
        }
        if grad_output.raw_dim() != tape.output().raw_dim() {
            return Err(NumericsError::ShapeMismatch(format!(
                "grad_output shape {:?} but output is {:?}",
                grad_output.shape(),
                tape.output().shape()
            )));
        }
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut grad = grad_output.clone();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let preact = &tape.preacts[i];
            let input = &tape.values[i];
            let output = &tape.values[i + 1];
            let grad_z = layer.activation.backprop(preact, output, &grad);
            let grad_w = grad_z.t().dot(input);
            let grad_b = grad_z.sum_axis(Axis(0));
            grad = grad_z.dot(&layer.weight);
            grads.push((grad_w, grad_b));
        }
        grads.reverse();
        Ok((NetGrads { layers: grads }, grad))
    }

    /// Mutable views over all parameters (weight then bias per layer).
    /// Calling this marks outstanding tapes stale.
    pub fn params_mut(&mut self) -> Vec<ArrayViewMutD<'_, S>> {
        self.revision += 1;
        let mut out = Vec::with_capacity(self.layers.len() * 2);
        for layer in &mut self.layers {
            out.push(layer.weight.view_mut().into_dyn());
            out.push(layer.bias.view_mut().into_dyn());
        }
        out
    }
}
