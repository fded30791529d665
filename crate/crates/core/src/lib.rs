//! Tabular bot-simulation pipeline: conditional GANs (CGAN and AC-GAN) that
//! generate class-conditional synthetic account records, classical
//! oversampling baselines (ADASYN, SMOTE-ENN), a from-scratch random forest
//! detector, and distribution-fidelity metrics, all over a shared dataset
//! layer.
//!
//! Every numeric kernel is generic over [`Scalar`] (`f32` or `f64`); the
//! `Real` alias below fixes the default precision used by the CLI and the
//! experiment harness.

pub mod dataset;
pub mod forest;
pub mod gan;
pub mod metrics;
pub mod numerics;
pub mod oversampling;
pub mod rng;
pub mod scalar;

pub use scalar::{real, Scalar};

/// Default scalar type for the pipeline.
pub type Real = f64;

/// Dataset at the default precision.
pub type RealDataset = dataset::Dataset<Real>;
/// Standardizer at the default precision.
pub type RealStandardizer = dataset::Standardizer<Real>;
/// Feed-forward network at the default precision.
pub type RealDenseNet = numerics::DenseNet<Real>;
/// GAN model at the default precision.
pub type RealGanModel = gan::GanModel<Real>;
/// Random forest at the default precision.
pub type RealForest = forest::Forest<Real>;
