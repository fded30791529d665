//! Versioned JSON checkpoints: enough state to resume training, regenerate
//! samples, or reload the AC-GAN discriminator as a classifier.

use super::{GanError, GanModel, Result};
use crate::dataset::{ClassMap, Standardizer};
use crate::numerics::{AdamState, DenseNet, Embedding};
use crate::scalar::Scalar;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
struct Checkpoint<S: Scalar> {
    format_version: u32,
    schema: crate::dataset::FeatureSchema,
    schema_hash: String,
    class_labels: Vec<String>,
    config: super::GanConfig,
    generator: DenseNet<S>,
    gen_embed: Embedding<S>,
    discriminator: super::Discriminator<S>,
    opt_g: AdamState<S>,
    opt_d: AdamState<S>,
    rng_seed: Vec<u8>,
    rng_word_pos: String,
    trained: bool,
    standardizer: Option<Standardizer<S>>,
}

/// A reloaded model plus the standardizer it was trained under, when one was
/// saved alongside.
pub struct LoadedCheckpoint<S: Scalar> {
    pub model: GanModel<S>,
    pub standardizer: Option<Standardizer<S>>,
}

/// Writes the model (and optionally its standardizer) as JSON.
pub fn save_checkpoint<S: Scalar>(
    path: &Path,
    model: &GanModel<S>,
    standardizer: Option<&Standardizer<S>>,
) -> Result<()> {
    let checkpoint = Checkpoint {
        format_version: FORMAT_VERSION,
        schema: model.schema.clone(),
        schema_hash: model.schema.hash(),
        class_labels: model.classes.labels().to_vec(),
        config: model.config.clone(),
        generator: model.generator.clone(),
        gen_embed: model.gen_embed.clone(),
        discriminator: model.discriminator.clone(),
        opt_g: model.opt_g.clone(),
        opt_d: model.opt_d.clone(),
        rng_seed: model.rng.get_seed().to_vec(),
        rng_word_pos: model.rng.get_word_pos().to_string(),
        trained: model.trained,
        standardizer: standardizer.cloned(),
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let file = std::fs::File::create(path)?;
    serde_json::to_writer(std::io::BufWriter::new(file), &checkpoint)?;
    Ok(())
}

/// Restores a model saved with [`save_checkpoint`].
pub fn load_checkpoint<S: Scalar>(path: &Path) -> Result<LoadedCheckpoint<S>> {
    let file = std::fs::File::open(path)?;
    let checkpoint: Checkpoint<S> = serde_json::from_reader(std::io::BufReader::new(file))?;
    if checkpoint.format_version != FORMAT_VERSION {
        return Err(GanError::BadCheckpoint(format!(
            "format version {} unsupported (expected {FORMAT_VERSION})",
            checkpoint.format_version
        )));
    }
    if checkpoint.schema_hash != checkpoint.schema.hash() {
        return Err(GanError::BadCheckpoint(
            "schema hash does not match the stored schema".into(),
        ));
    }
    let seed: [u8; 32] = checkpoint
        .rng_seed
        .as_slice()
        .try_into()
        .map_err(|_| GanError::BadCheckpoint("rng seed must be 32 bytes".into()))?;
    let word_pos: u128 = checkpoint
        .rng_word_pos
        .parse()
        .map_err(|_| GanError::BadCheckpoint("rng word position is not an integer".into()))?;
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_word_pos(word_pos);

    Ok(LoadedCheckpoint {
        model: GanModel {
            schema: checkpoint.schema,
            classes: ClassMap::new(checkpoint.class_labels),
            generator: checkpoint.generator,
            gen_embed: checkpoint.gen_embed,
            discriminator: checkpoint.discriminator,
            opt_g: checkpoint.opt_g,
            opt_d: checkpoint.opt_d,
            rng,
            trained: checkpoint.trained,
            config: checkpoint.config,
        },
        standardizer: checkpoint.standardizer,
    })
}
