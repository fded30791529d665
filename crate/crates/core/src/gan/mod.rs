//! Conditional GAN variants over tabular account data.
//!
//! Both variants share the generator wiring: the class label enters through
//! an embedding concatenated with the noise vector. They differ in the
//! discriminator:
//!
//! * CGAN: the discriminator also receives the label embedding, concatenated
//!   with the (real or fake) sample, and outputs one real/fake probability.
//! * AC-GAN: the discriminator never sees the label. A shared trunk feeds two
//!   heads, a sigmoid source head (real/fake) and a K-logit class head, so
//!   the trained discriminator doubles as a multi-class detector.
//!
//! Training follows the usual alternating scheme, one discriminator step then
//! one generator step per batch. The generator objective defaults to the
//! non-saturating form (maximize log D(G) instead of minimizing
//! log(1 − D(G))); the saturating form stays available behind a config flag.

mod checkpoint;

pub use checkpoint::{load_checkpoint, save_checkpoint, LoadedCheckpoint};

use crate::dataset::{AccountRecord, ClassMap, Dataset, DatasetError, FeatureSchema, Provenance};
use crate::numerics::{
    bce_loss_const, softmax_ce_loss, softmax_rows, Activation, AdamHyper, AdamState, Batch,
    DenseNet, Embedding, NumericsError,
};
use crate::rng::{derive_seed, seeded_rng};
use crate::scalar::{real, Scalar};
use ndarray::{concatenate, s, Array2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum GanError {
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("model has not been trained")]
    UntrainedModel,
    #[error("operation requires the {expected:?} variant, model is {got:?}")]
    WrongVariant { expected: GanVariant, got: GanVariant },
    #[error("non-finite loss in {stage} (epoch {epoch}, step {step})")]
    NonFiniteLoss {
        stage: &'static str,
        epoch: usize,
        step: usize,
    },
    #[error("training data is empty")]
    EmptyTrainingSet,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint encoding: {0}")]
    Encoding(#[from] serde_json::Error),
    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),
}

pub type Result<T> = std::result::Result<T, GanError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GanVariant {
    Cgan,
    Acgan,
}

/// Hyperparameters for one GAN. Defaults: 128-dim noise, 6-dim label
/// embedding, batches of 512, Adam at lr 0.0002 (β₁ 0.5, β₂ 0.999),
/// 300 epochs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GanConfig {
    pub variant: GanVariant,
    pub noise_dim: usize,
    pub embed_dim: usize,
    pub classes: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Generator hidden widths.
    pub g_hidden: Vec<usize>,
    /// Discriminator hidden widths (the trunk, for AC-GAN).
    pub d_hidden: Vec<usize>,
    pub leaky_alpha: f64,
    /// Use the literal minimax generator loss instead of the non-saturating
    /// default.
    pub saturating_g_loss: bool,
    /// Include fake samples in the AC-GAN class loss.
    pub fake_class_loss: bool,
    /// Per-class augmentation mask consulted by the harness; `None`
    /// generates for every class.
    pub augment_mask: Option<Vec<bool>>,
}

impl GanConfig {
    pub fn new(variant: GanVariant, classes: usize) -> Self {
        Self {
            variant,
            noise_dim: 128,
            embed_dim: 6,
            classes,
            batch_size: 512,
            lr: 0.0002,
            beta1: 0.5,
            beta2: 0.999,
            epochs: 300,
            seed: 0,
            g_hidden: vec![256, 512],
            d_hidden: vec![512, 256],
            leaky_alpha: 0.2,
            saturating_g_loss: false,
            fake_class_loss: true,
            augment_mask: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.noise_dim == 0 {
            problems.push("noise_dim must be ≥ 1");
        }
        if self.embed_dim == 0 {
            problems.push("embed_dim must be ≥ 1");
        }
        if self.classes < 2 {
            problems.push("need at least 2 classes");
        }
        if self.batch_size == 0 {
            problems.push("batch_size must be ≥ 1");
        }
        if !(self.lr > 0.0) {
            problems.push("lr must be > 0");
        }
        if self.d_hidden.is_empty() {
            problems.push("discriminator needs at least one hidden layer");
        }
        if self.g_hidden.iter().chain(&self.d_hidden).any(|&w| w == 0) {
            problems.push("hidden widths must be ≥ 1");
        }
        if let Some(mask) = &self.augment_mask {
            if mask.len() != self.classes {
                problems.push("augment_mask length must equal classes");
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(GanError::BadConfig(problems.join("; ")))
        }
    }
}

/// Variant-specific discriminator wiring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub enum Discriminator<S: Scalar> {
    Cgan {
        embed: Embedding<S>,
        net: DenseNet<S>,
    },
    Acgan {
        trunk: DenseNet<S>,
        source_head: DenseNet<S>,
        class_head: DenseNet<S>,
    },
}

/// Per-epoch training telemetry; class losses are present for AC-GAN only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub d_loss: f64,
    pub g_loss: f64,
    pub class_loss_real: Option<f64>,
    pub class_loss_fake: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs: Vec<EpochStats>,
    pub wall_time_secs: f64,
    pub final_epoch: usize,
}

/// A generator/discriminator pair with its optimizers and RNG stream.
#[derive(Debug, Clone)]
pub struct GanModel<S: Scalar> {
    pub config: GanConfig,
    pub schema: FeatureSchema,
    pub classes: ClassMap,
    pub generator: DenseNet<S>,
    pub gen_embed: Embedding<S>,
    pub discriminator: Discriminator<S>,
    pub opt_g: AdamState<S>,
    pub opt_d: AdamState<S>,
    pub(crate) rng: ChaCha8Rng,
    pub(crate) trained: bool,
}

// Seed streams carved out of the run seed.
const SEED_G_NET: u64 = 1;
const SEED_G_EMBED: u64 = 2;
const SEED_D_NET: u64 = 3;
const SEED_D_EMBED: u64 = 4;
const SEED_CLASS_HEAD: u64 = 5;
const SEED_MODEL_RNG: u64 = 6;
const SEED_SHUFFLE: u64 = 7;

/// Builds a seeded, untrained model with the variant wiring from the config.
pub fn build<S: Scalar>(
    config: GanConfig,
    schema: &FeatureSchema,
    classes: &ClassMap,
) -> Result<GanModel<S>> {
    config.validate()?;
    if classes.len() != config.classes {
        return Err(GanError::BadConfig(format!(
            "config says {} classes but the class map has {}",
            config.classes,
            classes.len()
        )));
    }
    let width = schema.total_width();
    let leaky = Activation::LeakyRelu {
        alpha: real::<S>(config.leaky_alpha),
    };
    let seed = config.seed;

    let mut g_sizes = vec![config.noise_dim + config.embed_dim];
    g_sizes.extend(&config.g_hidden);
    g_sizes.push(width);
    let generator = DenseNet::new(&g_sizes, leaky, Activation::Linear, derive_seed(seed, SEED_G_NET));
    let gen_embed = Embedding::new(
        config.classes,
        config.embed_dim,
        derive_seed(seed, SEED_G_EMBED),
    );

    let discriminator = match config.variant {
        GanVariant::Cgan => {
            let mut d_sizes = vec![width + config.embed_dim];
            d_sizes.extend(&config.d_hidden);
            d_sizes.push(1);
            Discriminator::Cgan {
                embed: Embedding::new(
                    config.classes,
                    config.embed_dim,
                    derive_seed(seed, SEED_D_EMBED),
                ),
                net: DenseNet::new(
                    &d_sizes,
                    leaky,
                    Activation::Sigmoid,
                    derive_seed(seed, SEED_D_NET),
                ),
            }
        }
        GanVariant::Acgan => {
            let mut trunk_sizes = vec![width];
            trunk_sizes.extend(&config.d_hidden);
            let trunk_out = *config.d_hidden.last().expect("validated non-empty");
            Discriminator::Acgan {
                trunk: DenseNet::new(&trunk_sizes, leaky, leaky, derive_seed(seed, SEED_D_NET)),
                source_head: DenseNet::new(
                    &[trunk_out, 1],
                    leaky,
                    Activation::Sigmoid,
                    derive_seed(seed, SEED_D_EMBED),
                ),
                class_head: DenseNet::new(
                    &[trunk_out, config.classes],
                    leaky,
                    Activation::Linear,
                    derive_seed(seed, SEED_CLASS_HEAD),
                ),
            }
        }
    };

    let hyper = AdamHyper::new(config.lr, config.beta1, config.beta2);
    Ok(GanModel {
        schema: schema.clone(),
        classes: classes.clone(),
        generator,
        gen_embed,
        discriminator,
        opt_g: AdamState::new(hyper),
        opt_d: AdamState::new(hyper),
        rng: seeded_rng(derive_seed(config.seed, SEED_MODEL_RNG)),
        trained: false,
        config,
    })
}

fn sample_noise<S: Scalar>(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Array2<S> {
    Array2::from_shape_fn((n, dim), |_| {
        let z: f64 = rng.sample(StandardNormal);
        real::<S>(z)
    })
}

fn finite<S: Scalar>(
    value: S,
    stage: &'static str,
    epoch: usize,
    step: usize,
) -> Result<S> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(GanError::NonFiniteLoss { stage, epoch, step })
    }
}

impl<S: Scalar> GanModel<S> {
    pub fn variant(&self) -> GanVariant {
        self.config.variant
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    fn feature_width(&self) -> usize {
        self.schema.total_width()
    }

    /// Generator forward for given noise and labels; returns the fake batch
    /// and the tapes needed to push gradients back into G.
    fn generator_forward(
        &self,
        noise: &Array2<S>,
        labels: &[usize],
    ) -> Result<(Array2<S>, crate::numerics::Tape<S>)> {
        let embedded = self.gen_embed.lookup(labels)?;
        let g_in = concatenate(Axis(1), &[noise.view(), embedded.view()])
            .expect("noise and embedding rows match");
        let (fake, tape) = self.generator.forward(&g_in)?;
        Ok((fake, tape))
    }

    /// One CGAN step: update D on real-vs-fake BCE, then G on fooling D.
    pub fn train_step_cgan(&mut self, batch: &Batch<S>) -> Result<(S, S)> {
        self.cgan_step(batch, 0, 0)
    }

    fn cgan_step(&mut self, batch: &Batch<S>, epoch: usize, step: usize) -> Result<(S, S)> {
        if self.config.variant != GanVariant::Cgan {
            return Err(GanError::WrongVariant {
                expected: GanVariant::Cgan,
                got: self.config.variant,
            });
        }
        let labels = &batch.labels;
        let n = batch.len();
        let width = self.feature_width();
        let noise_dim = self.config.noise_dim;
        let saturating = self.config.saturating_g_loss;

        // Fake batch for the D update; gradients stop at the generator output.
        let (x_fake, _) = self.generator_forward(&batch.noise, labels)?;

        let Discriminator::Cgan { embed, net } = &mut self.discriminator else {
            unreachable!("variant checked above");
        };

        // --- Discriminator update: BCE(D(x|c),1) + BCE(D(G(z|c)|c),0)
        let cond_real = embed.lookup(labels)?;
        let d_in_real = concatenate(Axis(1), &[batch.inputs.view(), cond_real.view()])
            .expect("row counts match");
        let (p_real, tape_real) = net.forward(&d_in_real)?;
        let (loss_real, grad_real) = bce_loss_const(&p_real, S::one())?;

        let cond_fake = embed.lookup(labels)?;
        let d_in_fake =
            concatenate(Axis(1), &[x_fake.view(), cond_fake.view()]).expect("row counts match");
        let (p_fake, tape_fake) = net.forward(&d_in_fake)?;
        let (loss_fake, grad_fake) = bce_loss_const(&p_fake, S::zero())?;

        let (mut d_grads, din_real) = net.backward(&tape_real, &grad_real)?;
        let (d_grads_fake, din_fake) = net.backward(&tape_fake, &grad_fake)?;
        d_grads.accumulate(&d_grads_fake);
        let mut embed_grad = embed.backward(labels, &din_real.slice(s![.., width..]).to_owned())?;
        embed_grad += &embed.backward(labels, &din_fake.slice(s![.., width..]).to_owned())?;

        let d_loss = finite(loss_real + loss_fake, "cgan discriminator", epoch, step)?;

        let mut params = net.params_mut();
        params.push(embed.table.view_mut().into_dyn());
        let mut grads = d_grads.views();
        grads.push(embed_grad.view().into_dyn());
        self.opt_d.step(&mut params, &grads)?;

        // --- Generator update on fresh noise: BCE(D(G(z|c)|c), 1)
        let z2 = sample_noise::<S>(&mut self.rng, n, noise_dim);
        let (x_fake2, tape_g) = {
            let embedded = self.gen_embed.lookup(labels)?;
            let g_in = concatenate(Axis(1), &[z2.view(), embedded.view()])
                .expect("row counts match");
            self.generator.forward(&g_in)?
        };

        let Discriminator::Cgan { embed, net } = &self.discriminator else {
            unreachable!("variant checked above");
        };
        let cond = embed.lookup(labels)?;
        let d_in =
            concatenate(Axis(1), &[x_fake2.view(), cond.view()]).expect("row counts match");
        let (p, tape_d) = net.forward(&d_in)?;
        let (g_loss, grad_p) = if saturating {
            // minimize mean ln(1 − D(G)) = −BCE(D(G), 0)
            let (l, g) = bce_loss_const(&p, S::zero())?;
            (-l, g.mapv(|v| -v))
        } else {
            bce_loss_const(&p, S::one())?
        };
        let g_loss = finite(g_loss, "cgan generator", epoch, step)?;

        let (_, din) = net.backward(&tape_d, &grad_p)?;
        let dx_fake = din.slice(s![.., ..width]).to_owned();
        let (g_grads, dgin) = self.generator.backward(&tape_g, &dx_fake)?;
        let g_embed_grad = self
            .gen_embed
            .backward(labels, &dgin.slice(s![.., noise_dim..]).to_owned())?;

        let mut params = self.generator.params_mut();
        params.push(self.gen_embed.table.view_mut().into_dyn());
        let mut grads = g_grads.views();
        grads.push(g_embed_grad.view().into_dyn());
        self.opt_g.step(&mut params, &grads)?;

        Ok((d_loss, g_loss))
    }

    /// One AC-GAN step. The discriminator ascends source + class
    /// log-likelihood; the generator ascends class minus source, i.e. it is
    /// updated on BCE(source(G),1) + CE(class(G), c).
    pub fn train_step_acgan(&mut self, batch: &Batch<S>) -> Result<(S, S, S, S)> {
        self.acgan_step(batch, 0, 0)
    }

    fn acgan_step(
        &mut self,
        batch: &Batch<S>,
        epoch: usize,
        step: usize,
    ) -> Result<(S, S, S, S)> {
        if self.config.variant != GanVariant::Acgan {
            return Err(GanError::WrongVariant {
                expected: GanVariant::Acgan,
                got: self.config.variant,
            });
        }
        let labels = &batch.labels;
        let n = batch.len();
        let noise_dim = self.config.noise_dim;
        let saturating = self.config.saturating_g_loss;
        let fake_class_loss = self.config.fake_class_loss;

        let (x_fake, _) = self.generator_forward(&batch.noise, labels)?;

        let Discriminator::Acgan {
            trunk,
            source_head,
            class_head,
        } = &mut self.discriminator
        else {
            unreachable!("variant checked above");
        };

        // --- Discriminator update
        let (h_real, tape_trunk_real) = trunk.forward(&batch.inputs)?;
        let (p_real, tape_src_real) = source_head.forward(&h_real)?;
        let (logits_real, tape_cls_real) = class_head.forward(&h_real)?;
        let (loss_src_real, grad_src_real) = bce_loss_const(&p_real, S::one())?;
        let (loss_cls_real, grad_cls_real) = softmax_ce_loss(&logits_real, labels)?;

        let (h_fake, tape_trunk_fake) = trunk.forward(&x_fake)?;
        let (p_fake, tape_src_fake) = source_head.forward(&h_fake)?;
        let (logits_fake, tape_cls_fake) = class_head.forward(&h_fake)?;
        let (loss_src_fake, grad_src_fake) = bce_loss_const(&p_fake, S::zero())?;
        let (loss_cls_fake, grad_cls_fake) = softmax_ce_loss(&logits_fake, labels)?;

        let (mut src_grads, dh_src_real) = source_head.backward(&tape_src_real, &grad_src_real)?;
        let (mut cls_grads, dh_cls_real) = class_head.backward(&tape_cls_real, &grad_cls_real)?;
        let (mut trunk_grads, _) =
            trunk.backward(&tape_trunk_real, &(&dh_src_real + &dh_cls_real))?;

        let (src_grads_fake, dh_src_fake) = source_head.backward(&tape_src_fake, &grad_src_fake)?;
        src_grads.accumulate(&src_grads_fake);
        let dh_fake = if fake_class_loss {
            let (cls_grads_fake, dh_cls_fake) =
                class_head.backward(&tape_cls_fake, &grad_cls_fake)?;
            cls_grads.accumulate(&cls_grads_fake);
            &dh_src_fake + &dh_cls_fake
        } else {
            dh_src_fake
        };
        let (trunk_grads_fake, _) = trunk.backward(&tape_trunk_fake, &dh_fake)?;
        trunk_grads.accumulate(&trunk_grads_fake);

        let mut d_loss = loss_src_real + loss_src_fake + loss_cls_real;
        if fake_class_loss {
            d_loss = d_loss + loss_cls_fake;
        }
        let d_loss = finite(d_loss, "acgan discriminator", epoch, step)?;

        let mut params = trunk.params_mut();
        params.extend(source_head.params_mut());
        params.extend(class_head.params_mut());
        let mut grads = trunk_grads.views();
        grads.extend(src_grads.views());
        grads.extend(cls_grads.views());
        self.opt_d.step(&mut params, &grads)?;

        // --- Generator update on fresh noise
        let z2 = sample_noise::<S>(&mut self.rng, n, noise_dim);
        let (x_fake2, tape_g) = {
            let embedded = self.gen_embed.lookup(labels)?;
            let g_in = concatenate(Axis(1), &[z2.view(), embedded.view()])
                .expect("row counts match");
            self.generator.forward(&g_in)?
        };

        let Discriminator::Acgan {
            trunk,
            source_head,
            class_head,
        } = &self.discriminator
        else {
            unreachable!("variant checked above");
        };
        let (h, tape_trunk) = trunk.forward(&x_fake2)?;
        let (p, tape_src) = source_head.forward(&h)?;
        let (logits, tape_cls) = class_head.forward(&h)?;
        let (loss_g_src, grad_g_src) = if saturating {
            let (l, g) = bce_loss_const(&p, S::zero())?;
            (-l, g.mapv(|v| -v))
        } else {
            bce_loss_const(&p, S::one())?
        };
        let (loss_g_cls, grad_g_cls) = softmax_ce_loss(&logits, labels)?;
        let g_loss = finite(loss_g_src + loss_g_cls, "acgan generator", epoch, step)?;

        let (_, dh_src) = source_head.backward(&tape_src, &grad_g_src)?;
        let (_, dh_cls) = class_head.backward(&tape_cls, &grad_g_cls)?;
        let (_, dx) = trunk.backward(&tape_trunk, &(&dh_src + &dh_cls))?;
        let (g_grads, dgin) = self.generator.backward(&tape_g, &dx)?;
        let g_embed_grad = self
            .gen_embed
            .backward(labels, &dgin.slice(s![.., noise_dim..]).to_owned())?;

        let mut params = self.generator.params_mut();
        params.push(self.gen_embed.table.view_mut().into_dyn());
        let mut grads = g_grads.views();
        grads.push(g_embed_grad.view().into_dyn());
        self.opt_g.step(&mut params, &grads)?;

        Ok((d_loss, g_loss, loss_cls_real, loss_cls_fake))
    }

    /// Trains for `config.epochs` epochs of alternating D/G steps over
    /// shuffled batches. Shuffling is reseeded per epoch from the run seed.
    pub fn train(&mut self, data: &Dataset<S>) -> Result<TrainReport> {
        if data.is_empty() {
            return Err(GanError::EmptyTrainingSet);
        }
        if data.schema() != &self.schema {
            return Err(GanError::BadConfig(
                "training data schema differs from the model schema".into(),
            ));
        }
        let started = std::time::Instant::now();
        let matrix = data.to_matrix();
        let labels = data.labels();
        let n = data.len();
        let batch_size = self.config.batch_size.min(n);
        let shuffle_base = derive_seed(self.config.seed, SEED_SHUFFLE);

        let mut epochs = Vec::with_capacity(self.config.epochs);
        for epoch in 0..self.config.epochs {
            let mut order: Vec<usize> = (0..n).collect();
            let mut shuffle_rng = seeded_rng(derive_seed(shuffle_base, epoch as u64));
            order.shuffle(&mut shuffle_rng);

            let mut d_sum = 0.0;
            let mut g_sum = 0.0;
            let mut cls_real_sum = 0.0;
            let mut cls_fake_sum = 0.0;
            let mut steps = 0usize;
            for (step, chunk) in order.chunks(batch_size).enumerate() {
                let inputs = matrix.select(Axis(0), chunk);
                let batch_labels: Vec<usize> = chunk.iter().map(|&i| labels[i]).collect();
                let noise =
                    sample_noise::<S>(&mut self.rng, chunk.len(), self.config.noise_dim);
                let batch = Batch::new(inputs, batch_labels, noise)?;
                match self.config.variant {
                    GanVariant::Cgan => {
                        let (d, g) = self.cgan_step(&batch, epoch, step)?;
                        d_sum += d.to_f64().expect("finite");
                        g_sum += g.to_f64().expect("finite");
                    }
                    GanVariant::Acgan => {
                        let (d, g, cr, cf) = self.acgan_step(&batch, epoch, step)?;
                        d_sum += d.to_f64().expect("finite");
                        g_sum += g.to_f64().expect("finite");
                        cls_real_sum += cr.to_f64().expect("finite");
                        cls_fake_sum += cf.to_f64().expect("finite");
                    }
                }
                steps += 1;
            }
            let steps_f = steps as f64;
            let acgan = self.config.variant == GanVariant::Acgan;
            epochs.push(EpochStats {
                d_loss: d_sum / steps_f,
                g_loss: g_sum / steps_f,
                class_loss_real: acgan.then_some(cls_real_sum / steps_f),
                class_loss_fake: acgan.then_some(cls_fake_sum / steps_f),
            });
        }
        self.trained = true;
        Ok(TrainReport {
            final_epoch: epochs.len(),
            epochs,
            wall_time_secs: started.elapsed().as_secs_f64(),
        })
    }

    /// Draws `counts[c]` samples per class as G(z|c), z ~ N(0, I), in
    /// standardized feature space. Classes are generated in ascending order
    /// from a generator seeded with `seed`.
    pub fn generate(&self, counts: &BTreeMap<usize, usize>, seed: u64) -> Result<Dataset<S>> {
        if !self.trained {
            return Err(GanError::UntrainedModel);
        }
        for &class in counts.keys() {
            if class >= self.config.classes {
                return Err(GanError::BadConfig(format!(
                    "requested class {class} out of range for {} classes",
                    self.config.classes
                )));
            }
        }
        let provenance = match self.config.variant {
            GanVariant::Cgan => Provenance::Cgan,
            GanVariant::Acgan => Provenance::Acgan,
        };
        let mut rng = seeded_rng(derive_seed(seed, SEED_MODEL_RNG));
        let mut records = Vec::new();
        const CHUNK: usize = 4096;
        for (&class, &count) in counts {
            let mut remaining = count;
            while remaining > 0 {
                let take = remaining.min(CHUNK);
                let z = sample_noise::<S>(&mut rng, take, self.config.noise_dim);
                let class_labels = vec![class; take];
                let (fake, _) = self.generator_forward(&z, &class_labels)?;
                for row in fake.rows() {
                    records.push(AccountRecord {
                        features: row.to_vec(),
                        label: class,
                        provenance,
                    });
                }
                remaining -= take;
            }
        }
        Ok(Dataset::new(
            self.schema.clone(),
            self.classes.clone(),
            records,
        ))
    }

    /// Runs the AC-GAN class head as a multi-class classifier: softmax
    /// probabilities and argmax labels per record. The source head is
    /// ignored.
    pub fn discriminate_classes(&self, data: &Dataset<S>) -> Result<(Array2<S>, Vec<usize>)> {
        let Discriminator::Acgan {
            trunk, class_head, ..
        } = &self.discriminator
        else {
            return Err(GanError::WrongVariant {
                expected: GanVariant::Acgan,
                got: self.config.variant,
            });
        };
        let x = data.to_matrix();
        let (h, _) = trunk.forward(&x)?;
        let (logits, _) = class_head.forward(&h)?;
        let probs = softmax_rows(&logits);
        let labels = probs
            .rows()
            .into_iter()
            .map(|row| {
                let as_f64: Vec<f64> = row.iter().map(|v| v.to_f64().expect("finite")).collect();
                crate::forest::argmax(&as_f64)
            })
            .collect();
        Ok((probs, labels))
    }
}
