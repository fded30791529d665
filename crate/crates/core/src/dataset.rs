//! Labeled tabular account data: loading, validation, encoding, splitting,
//! standardization, and augmentation.
//!
//! The unit flowing through every stage is an [`AccountRecord`]: a fixed-width
//! feature vector plus a class index. A [`Dataset`] bundles records with the
//! [`FeatureSchema`] (category layout) and [`ClassMap`] they were encoded
//! against, and tags every record with the technique that produced it.

use crate::rng::{derive_seed, seeded_rng};
use crate::scalar::{real, Scalar};
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::path::Path;

/// Errors raised by dataset construction and manipulation.
#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("missing column `{0}` in CSV header")]
    MissingColumn(String),
    #[error("row {0} has the wrong number of fields")]
    WidthMismatch(usize),
    #[error("row {row}, feature column {col}: cell is not a finite number")]
    NonNumericCell { row: usize, col: usize },
    #[error("row {row}: unknown label `{label}`")]
    UnknownLabel { row: usize, label: String },
    #[error("class `{0}` has fewer than 2 records, cannot split")]
    ClassTooSmall(String),
    #[error("train fraction {0} is outside (0, 1)")]
    InvalidFraction(f64),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("schema or class map mismatch: {0}")]
    SchemaMismatch(String),
    #[error("fixture component is degenerate: {0}")]
    BadCovariance(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, DatasetError>;

/// Ordered feature categories and their column widths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    categories: Vec<(String, usize)>,
    total_width: usize,
}

impl FeatureSchema {
    /// Builds a schema from `(category name, width)` pairs.
    ///
    /// Panics if names are empty, duplicated, or a width is zero.
    pub fn new(categories: Vec<(String, usize)>) -> Self {
        let mut seen = HashMap::new();
        for (name, width) in &categories {
            assert!(!name.is_empty(), "category name must be non-empty");
            assert!(*width > 0, "category `{name}` must have width > 0");
            assert!(
                seen.insert(name.clone(), ()).is_none(),
                "duplicate category `{name}`"
            );
        }
        let total_width = categories.iter().map(|(_, w)| w).sum();
        Self {
            categories,
            total_width,
        }
    }

    /// The 310-feature account schema: 182 content, 58 sentiment,
    /// 29 temporal, 28 user, and 13 hashtag-correlation features.
    pub fn accounts_310() -> Self {
        Self::new(vec![
            ("content".into(), 182),
            ("sentiment".into(), 58),
            ("temporal".into(), 29),
            ("user".into(), 28),
            ("hashtag".into(), 13),
        ])
    }

    pub fn total_width(&self) -> usize {
        self.total_width
    }

    pub fn categories(&self) -> &[(String, usize)] {
        &self.categories
    }

    /// Column range covered by a category, if present.
    pub fn category_range(&self, name: &str) -> Option<Range<usize>> {
        let mut start = 0;
        for (cat, width) in &self.categories {
            if cat == name {
                return Some(start..start + width);
            }
            start += width;
        }
        None
    }

    /// Column headers in on-disk order: `content_0, …, hashtag_12`.
    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.total_width);
        for (cat, width) in &self.categories {
            for i in 0..*width {
                names.push(format!("{cat}_{i}"));
            }
        }
        names
    }

    /// Stable hex digest of the category layout, recorded in checkpoints.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        for (cat, width) in &self.categories {
            hasher.update(cat.as_bytes());
            hasher.update(b":");
            hasher.update(width.to_le_bytes());
            hasher.update(b";");
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Ordered class labels with their integer encoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMap {
    labels: Vec<String>,
}

impl ClassMap {
    /// Panics if labels are duplicated or fewer than two.
    pub fn new(labels: Vec<String>) -> Self {
        assert!(labels.len() >= 2, "need at least 2 classes");
        let mut seen = HashMap::new();
        for label in &labels {
            assert!(
                seen.insert(label.clone(), ()).is_none(),
                "duplicate label `{label}`"
            );
        }
        Self { labels }
    }

    /// The six-class experiment map (the `other` bot type is discarded).
    pub fn six_class() -> Self {
        Self::new(
            ["spam", "social", "political", "cyborg", "self-declared", "human"]
                .map(String::from)
                .to_vec(),
        )
    }

    /// The full seven-class map as collected.
    pub fn seven_class() -> Self {
        Self::new(
            [
                "spam",
                "social",
                "political",
                "cyborg",
                "self-declared",
                "other",
                "human",
            ]
            .map(String::from)
            .to_vec(),
        )
    }

    /// Binary bot/human map used by the temporal experiment.
    pub fn binary() -> Self {
        Self::new(["bot", "human"].map(String::from).to_vec())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn name(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Technique that produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Original,
    Cgan,
    Acgan,
    Adasyn,
    SmoteEnn,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Original => "original",
            Provenance::Cgan => "cgan",
            Provenance::Acgan => "acgan",
            Provenance::Adasyn => "adasyn",
            Provenance::SmoteEnn => "smote_enn",
        };
        f.write_str(s)
    }
}

/// One account: feature vector plus encoded class label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AccountRecord<S: Scalar> {
    pub features: Vec<S>,
    pub label: usize,
    pub provenance: Provenance,
}

/// Ordered collection of records sharing one schema and class map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Dataset<S: Scalar> {
    schema: FeatureSchema,
    classes: ClassMap,
    records: Vec<AccountRecord<S>>,
}

impl<S: Scalar> Dataset<S> {
    /// Panics if any record width or label disagrees with the schema/classes.
    pub fn new(schema: FeatureSchema, classes: ClassMap, records: Vec<AccountRecord<S>>) -> Self {
        for rec in &records {
            assert_eq!(
                rec.features.len(),
                schema.total_width(),
                "record width must match schema"
            );
            assert!(rec.label < classes.len(), "label index out of range");
        }
        Self {
            schema,
            classes,
            records,
        }
    }

    pub fn empty(schema: FeatureSchema, classes: ClassMap) -> Self {
        Self::new(schema, classes, Vec::new())
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn classes(&self) -> &ClassMap {
        &self.classes
    }

    pub fn records(&self) -> &[AccountRecord<S>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records per class, indexed by class encoding.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.classes.len()];
        for rec in &self.records {
            counts[rec.label] += 1;
        }
        counts
    }

    /// One feature column as a vector.
    pub fn column(&self, col: usize) -> Vec<S> {
        self.records.iter().map(|r| r.features[col]).collect()
    }

    /// Feature matrix, one record per row.
    pub fn to_matrix(&self) -> Array2<S> {
        let n = self.records.len();
        let d = self.schema.total_width();
        let mut m = Array2::zeros((n, d));
        for (i, rec) in self.records.iter().enumerate() {
            for (j, &v) in rec.features.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn labels(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.label).collect()
    }

    /// New dataset holding the records at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let records = indices.iter().map(|&i| self.records[i].clone()).collect();
        Self {
            schema: self.schema.clone(),
            classes: self.classes.clone(),
            records,
        }
    }

    /// Records of one class only.
    pub fn filter_class(&self, class: usize) -> Self {
        let records = self
            .records
            .iter()
            .filter(|r| r.label == class)
            .cloned()
            .collect();
        Self {
            schema: self.schema.clone(),
            classes: self.classes.clone(),
            records,
        }
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.schema != other.schema {
            return Err(DatasetError::SchemaMismatch("feature schemas differ".into()));
        }
        if self.classes != other.classes {
            return Err(DatasetError::SchemaMismatch("class maps differ".into()));
        }
        Ok(())
    }
}

/// Reads a CSV with category-prefixed feature columns plus a `label` column.
///
/// Column order in the file may be arbitrary; cells must be finite numbers
/// and labels must exist in `classes`. Row indices in errors are 0-based
/// data rows (the header is not counted).
pub fn load_csv<S: Scalar>(
    path: &Path,
    schema: &FeatureSchema,
    classes: &ClassMap,
) -> Result<Dataset<S>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let position = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DatasetError::MissingColumn(name.to_string()))
    };

    let feature_positions: Vec<usize> = schema
        .column_names()
        .iter()
        .map(|n| position(n))
        .collect::<Result<_>>()?;
    let label_position = position("label")?;

    let mut records = Vec::new();
    for (row, result) in reader.records().enumerate() {
        let record = result?;
        if record.len() != headers.len() {
            return Err(DatasetError::WidthMismatch(row));
        }
        let mut features = Vec::with_capacity(schema.total_width());
        for (col, &pos) in feature_positions.iter().enumerate() {
            let cell = record.get(pos).ok_or(DatasetError::WidthMismatch(row))?;
            let value: f64 = cell
                .trim()
                .parse()
                .map_err(|_| DatasetError::NonNumericCell { row, col })?;
            if !value.is_finite() {
                return Err(DatasetError::NonNumericCell { row, col });
            }
            features.push(real::<S>(value));
        }
        let label_cell = record
            .get(label_position)
            .ok_or(DatasetError::WidthMismatch(row))?
            .trim();
        let label = classes
            .index_of(label_cell)
            .ok_or_else(|| DatasetError::UnknownLabel {
                row,
                label: label_cell.to_string(),
            })?;
        records.push(AccountRecord {
            features,
            label,
            provenance: Provenance::Original,
        });
    }
    Ok(Dataset::new(schema.clone(), classes.clone(), records))
}

/// Writes a dataset as CSV with schema column names plus `label`.
pub fn save_csv<S: Scalar>(dataset: &Dataset<S>, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = dataset.schema.column_names();
    header.push("label".into());
    writer.write_record(&header)?;
    for rec in dataset.records() {
        let mut row: Vec<String> = rec.features.iter().map(|v| format!("{v}")).collect();
        row.push(dataset.classes.name(rec.label).to_string());
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Splits per class: round-half-up of `train_fraction × count` records go to
/// train, the rest to test. Membership is a seeded shuffle; record order
/// within each side follows the input.
pub fn stratified_split<S: Scalar>(
    dataset: &Dataset<S>,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset<S>, Dataset<S>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::InvalidFraction(train_fraction));
    }
    let k = dataset.classes.len();
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, rec) in dataset.records.iter().enumerate() {
        per_class[rec.label].push(i);
    }
    for (class, indices) in per_class.iter().enumerate() {
        if indices.len() == 1 {
            return Err(DatasetError::ClassTooSmall(
                dataset.classes.name(class).to_string(),
            ));
        }
    }

    let mut train_indices = Vec::new();
    let mut test_indices = Vec::new();
    for (class, indices) in per_class.iter().enumerate() {
        if indices.is_empty() {
            continue;
        }
        let mut shuffled = indices.clone();
        let mut rng = seeded_rng(derive_seed(seed, class as u64));
        shuffled.shuffle(&mut rng);
        let n_train = round_half_up(train_fraction * indices.len() as f64).min(indices.len());
        train_indices.extend_from_slice(&shuffled[..n_train]);
        test_indices.extend_from_slice(&shuffled[n_train..]);
    }
    train_indices.sort_unstable();
    test_indices.sort_unstable();
    Ok((dataset.subset(&train_indices), dataset.subset(&test_indices)))
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Per-feature z-score parameters fitted on one dataset.
///
/// Zero-variance columns get their std clamped to 1 so the transform stays
/// invertible without dropping schema columns.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Standardizer<S: Scalar> {
    pub mean: Vec<S>,
    pub std: Vec<S>,
}

impl<S: Scalar> Standardizer<S> {
    /// Fits per-column mean and population standard deviation.
    pub fn fit(dataset: &Dataset<S>) -> Result<Self> {
        if dataset.is_empty() {
            return Err(DatasetError::EmptyDataset);
        }
        let n = real::<S>(dataset.len() as f64);
        let d = dataset.schema.total_width();
        let mut mean = vec![S::zero(); d];
        for rec in dataset.records() {
            for (j, &v) in rec.features.iter().enumerate() {
                mean[j] = mean[j] + v;
            }
        }
        for m in &mut mean {
            *m = *m / n;
        }
        let mut var = vec![S::zero(); d];
        for rec in dataset.records() {
            for (j, &v) in rec.features.iter().enumerate() {
                let delta = v - mean[j];
                var[j] = var[j] + delta * delta;
            }
        }
        let std = var
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > S::zero() {
                    s
                } else {
                    S::one()
                }
            })
            .collect();
        Ok(Self { mean, std })
    }

    /// Maps each column to (x − mean) / std.
    pub fn transform(&self, dataset: &Dataset<S>) -> Result<Dataset<S>> {
        self.check_width(dataset)?;
        let records = dataset
            .records
            .iter()
            .map(|rec| AccountRecord {
                features: rec
                    .features
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| (v - self.mean[j]) / self.std[j])
                    .collect(),
                label: rec.label,
                provenance: rec.provenance,
            })
            .collect();
        Ok(Dataset {
            schema: dataset.schema.clone(),
            classes: dataset.classes.clone(),
            records,
        })
    }

    /// Maps each column back to x·std + mean.
    pub fn inverse_transform(&self, dataset: &Dataset<S>) -> Result<Dataset<S>> {
        self.check_width(dataset)?;
        let records = dataset
            .records
            .iter()
            .map(|rec| AccountRecord {
                features: rec
                    .features
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| v * self.std[j] + self.mean[j])
                    .collect(),
                label: rec.label,
                provenance: rec.provenance,
            })
            .collect();
        Ok(Dataset {
            schema: dataset.schema.clone(),
            classes: dataset.classes.clone(),
            records,
        })
    }

    fn check_width(&self, dataset: &Dataset<S>) -> Result<()> {
        if dataset.schema.total_width() != self.mean.len() {
            return Err(DatasetError::SchemaMismatch(format!(
                "standardizer fitted on width {}, dataset has width {}",
                self.mean.len(),
                dataset.schema.total_width()
            )));
        }
        Ok(())
    }
}

/// Concatenates `synthetic` after `base`. Provenance tags are preserved and
/// neither input is mutated.
pub fn augment<S: Scalar>(base: &Dataset<S>, synthetic: &Dataset<S>) -> Result<Dataset<S>> {
    base.same_shape(synthetic)?;
    let mut records = base.records.clone();
    records.extend(synthetic.records.iter().cloned());
    Ok(Dataset {
        schema: base.schema.clone(),
        classes: base.classes.clone(),
        records,
    })
}

/// Synthetic samples to request per class under the expansion multiple
/// φ = a : b: a class with b' records gets ⌊b'·a/b⌋.
pub fn expansion_counts<S: Scalar>(
    dataset: &Dataset<S>,
    phi_a: usize,
    phi_b: usize,
) -> std::collections::BTreeMap<usize, usize> {
    assert!(phi_b >= 1, "phi_b must be at least 1");
    dataset
        .class_counts()
        .into_iter()
        .enumerate()
        .filter(|(_, count)| *count > 0)
        .map(|(class, count)| (class, count * phi_a / phi_b))
        .collect()
}

/// One Gaussian mixture component; `mean`/`std` of length 1 broadcast to the
/// full feature width.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureComponent {
    #[serde(default = "default_weight")]
    pub weight: f64,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

fn default_weight() -> f64 {
    1.0
}

/// Class-conditional mixture for one fixture class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureClass {
    pub label: String,
    pub components: Vec<FixtureComponent>,
}

/// Desk-scale stand-in for the external account dataset: known
/// class-conditional Gaussian mixtures for oracle tests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub classes: Vec<FixtureClass>,
}

impl FixtureSpec {
    /// Two well-separated unit-variance classes, means −3 and +3 in every
    /// dimension.
    pub fn two_class_separable() -> Self {
        Self {
            classes: vec![
                FixtureClass {
                    label: "bot".into(),
                    components: vec![FixtureComponent {
                        weight: 1.0,
                        mean: vec![-3.0],
                        std: vec![1.0],
                    }],
                },
                FixtureClass {
                    label: "human".into(),
                    components: vec![FixtureComponent {
                        weight: 1.0,
                        mean: vec![3.0],
                        std: vec![1.0],
                    }],
                },
            ],
        }
    }
}

fn expand_broadcast(values: &[f64], width: usize, what: &str) -> Result<Vec<f64>> {
    match values.len() {
        1 => Ok(vec![values[0]; width]),
        n if n == width => Ok(values.to_vec()),
        n => Err(DatasetError::BadCovariance(format!(
            "{what} has length {n}, expected 1 or {width}"
        ))),
    }
}

/// Draws a deterministic synthetic dataset with known class-conditional
/// distributions.
pub fn make_fixture<S: Scalar>(
    spec: &FixtureSpec,
    n_per_class: usize,
    schema: &FeatureSchema,
    seed: u64,
) -> Result<Dataset<S>> {
    let width = schema.total_width();
    let classes = ClassMap::new(spec.classes.iter().map(|c| c.label.clone()).collect());

    let mut records = Vec::with_capacity(n_per_class * spec.classes.len());
    for (class_idx, class_spec) in spec.classes.iter().enumerate() {
        if class_spec.components.is_empty() {
            return Err(DatasetError::BadCovariance(format!(
                "class `{}` has no components",
                class_spec.label
            )));
        }
        let mut components = Vec::new();
        let mut total_weight = 0.0;
        for comp in &class_spec.components {
            if !(comp.weight > 0.0 && comp.weight.is_finite()) {
                return Err(DatasetError::BadCovariance(format!(
                    "class `{}`: component weight {} must be positive",
                    class_spec.label, comp.weight
                )));
            }
            let mean = expand_broadcast(&comp.mean, width, "mean")?;
            let std = expand_broadcast(&comp.std, width, "std")?;
            if std.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
                return Err(DatasetError::BadCovariance(format!(
                    "class `{}`: std entries must be positive and finite",
                    class_spec.label
                )));
            }
            total_weight += comp.weight;
            components.push((comp.weight, mean, std));
        }

        let mut rng = seeded_rng(derive_seed(seed, class_idx as u64));
        for _ in 0..n_per_class {
            let mut pick = rng.gen::<f64>() * total_weight;
            let mut chosen = components.len() - 1;
            for (i, (w, _, _)) in components.iter().enumerate() {
                if pick < *w {
                    chosen = i;
                    break;
                }
                pick -= *w;
            }
            let (_, mean, std) = &components[chosen];
            let features = (0..width)
                .map(|j| {
                    let z: f64 = rng.sample(StandardNormal);
                    real::<S>(mean[j] + std[j] * z)
                })
                .collect();
            records.push(AccountRecord {
                features,
                label: class_idx,
                provenance: Provenance::Original,
            });
        }
    }
    Ok(Dataset::new(schema.clone(), classes, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::io::Write;

    fn small_schema() -> FeatureSchema {
        FeatureSchema::new(vec![("feat".into(), 4)])
    }

    fn two_classes() -> ClassMap {
        ClassMap::new(vec!["a".into(), "b".into()])
    }

    fn record(features: Vec<f64>, label: usize) -> AccountRecord<f64> {
        AccountRecord {
            features,
            label,
            provenance: Provenance::Original,
        }
    }

    fn toy_dataset(n_a: usize, n_b: usize) -> Dataset<f64> {
        let mut records = Vec::new();
        for i in 0..n_a {
            records.push(record(vec![i as f64, 0.0, 1.0, 2.0], 0));
        }
        for i in 0..n_b {
            records.push(record(vec![i as f64 + 100.0, 1.0, 1.0, 2.0], 1));
        }
        Dataset::new(small_schema(), two_classes(), records)
    }

    fn write_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn schema_default_is_310_wide() {
        let schema = FeatureSchema::accounts_310();
        assert_eq!(schema.total_width(), 310);
        assert_eq!(schema.category_range("content"), Some(0..182));
        assert_eq!(schema.category_range("hashtag"), Some(297..310));
        assert_eq!(schema.category_range("nope"), None);
    }

    #[test]
    fn class_maps_have_expected_sizes() {
        assert_eq!(ClassMap::six_class().len(), 6);
        assert_eq!(ClassMap::seven_class().len(), 7);
        assert_eq!(ClassMap::six_class().index_of("political"), Some(2));
        assert_eq!(ClassMap::six_class().index_of("other"), None);
        assert_eq!(ClassMap::seven_class().index_of("other"), Some(5));
    }

    #[test]
    fn load_csv_header_only_gives_empty_dataset() {
        let schema = FeatureSchema::new(vec![("feat".into(), 2)]);
        let classes = two_classes();
        let file = write_csv("feat_0,feat_1,label\n");
        let ds = load_csv::<f64>(file.path(), &schema, &classes).unwrap();
        assert_eq!(ds.len(), 0);
    }

    #[test]
    fn load_csv_parses_rows_in_order() {
        let schema = FeatureSchema::new(vec![("feat".into(), 2)]);
        let classes = two_classes();
        let file = write_csv("feat_0,feat_1,label\n1.5,2.5,a\n-3,4,b\n");
        let ds = load_csv::<f64>(file.path(), &schema, &classes).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.records()[0].features, vec![1.5, 2.5]);
        assert_eq!(ds.records()[0].label, 0);
        assert_eq!(ds.records()[1].features, vec![-3.0, 4.0]);
        assert_eq!(ds.records()[1].label, 1);
        assert!(ds.records().iter().all(|r| r.provenance == Provenance::Original));
    }

    #[test]
    fn load_csv_reports_non_numeric_cell() {
        let schema = FeatureSchema::new(vec![("feat".into(), 4)]);
        let classes = two_classes();
        let mut body = String::from("feat_0,feat_1,feat_2,feat_3,label\n");
        for i in 0..12 {
            if i == 7 {
                body.push_str("0,0,0,abc,a\n");
            } else {
                body.push_str("0,0,0,0,b\n");
            }
        }
        let file = write_csv(&body);
        let err = load_csv::<f64>(file.path(), &schema, &classes).unwrap_err();
        match err {
            DatasetError::NonNumericCell { row, col } => {
                assert_eq!(row, 7);
                assert_eq!(col, 3);
            }
            other => panic!("expected NonNumericCell, got {other:?}"),
        }
    }

    #[test]
    fn load_csv_rejects_nan_cells() {
        let schema = FeatureSchema::new(vec![("feat".into(), 2)]);
        let file = write_csv("feat_0,feat_1,label\nNaN,1,a\n");
        let err = load_csv::<f64>(file.path(), &schema, &two_classes()).unwrap_err();
        assert!(matches!(err, DatasetError::NonNumericCell { row: 0, col: 0 }));
    }

    #[test]
    fn load_csv_missing_column() {
        let schema = FeatureSchema::new(vec![("feat".into(), 2)]);
        let file = write_csv("feat_0,label\n1,a\n");
        let err = load_csv::<f64>(file.path(), &schema, &two_classes()).unwrap_err();
        assert!(matches!(err, DatasetError::MissingColumn(name) if name == "feat_1"));
    }

    #[test]
    fn load_csv_unknown_label() {
        let schema = FeatureSchema::new(vec![("feat".into(), 2)]);
        let file = write_csv("feat_0,feat_1,label\n1,2,a\n1,2,zebra\n");
        let err = load_csv::<f64>(file.path(), &schema, &two_classes()).unwrap_err();
        match err {
            DatasetError::UnknownLabel { row, label } => {
                assert_eq!(row, 1);
                assert_eq!(label, "zebra");
            }
            other => panic!("expected UnknownLabel, got {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip_preserves_records() {
        let ds = toy_dataset(3, 2);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        save_csv(&ds, &path).unwrap();
        let back = load_csv::<f64>(&path, ds.schema(), ds.classes()).unwrap();
        assert_eq!(back.records(), ds.records());
    }

    #[test]
    fn split_counts_match_round_half_up() {
        let ds = toy_dataset(60, 40);
        let (train, test) = stratified_split(&ds, 0.75, 11).unwrap();
        let counts = train.class_counts();
        assert_eq!(counts, vec![45, 30]);
        assert_eq!(test.class_counts(), vec![15, 10]);
    }

    #[test]
    fn split_on_reference_class_sizes() {
        // Per-class account counts of the 7-type reference corpus.
        let sizes = [17071usize, 11653, 497, 5891, 1198, 2109, 30752];
        let labels: Vec<String> = (0..7).map(|i| format!("c{i}")).collect();
        let classes = ClassMap::new(labels);
        let schema = FeatureSchema::new(vec![("feat".into(), 2)]);
        let mut records = Vec::new();
        for (class, &n) in sizes.iter().enumerate() {
            for i in 0..n {
                records.push(AccountRecord {
                    features: vec![i as f64, class as f64],
                    label: class,
                    provenance: Provenance::Original,
                });
            }
        }
        let ds = Dataset::new(schema, classes, records);
        let (train, test) = stratified_split(&ds, 0.75, 5).unwrap();
        // Independent check: sum of per-class round-half-up counts.
        let expected_train: usize = sizes
            .iter()
            .map(|&n| ((0.75 * n as f64) + 0.5).floor() as usize)
            .sum();
        assert_eq!(expected_train, 51_879);
        assert_eq!(train.len(), expected_train);
        assert_eq!(test.len(), 69_171 - expected_train);
        for (class, &n) in sizes.iter().enumerate() {
            let got = train.class_counts()[class];
            let want = ((0.75 * n as f64) + 0.5).floor() as usize;
            assert_eq!(got, want, "class {class}");
        }
    }

    #[test]
    fn split_is_deterministic() {
        let ds = toy_dataset(30, 20);
        let (tr1, te1) = stratified_split(&ds, 0.6, 99).unwrap();
        let (tr2, te2) = stratified_split(&ds, 0.6, 99).unwrap();
        assert_eq!(tr1.records(), tr2.records());
        assert_eq!(te1.records(), te2.records());
    }

    #[test]
    fn split_rejects_tiny_class() {
        let mut records = vec![record(vec![0.0; 4], 0)];
        for i in 0..5 {
            records.push(record(vec![i as f64; 4], 1));
        }
        let ds = Dataset::new(small_schema(), two_classes(), records);
        let err = stratified_split(&ds, 0.75, 1).unwrap_err();
        assert!(matches!(err, DatasetError::ClassTooSmall(label) if label == "a"));
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let ds = toy_dataset(4, 4);
        assert!(matches!(
            stratified_split(&ds, 1.0, 1),
            Err(DatasetError::InvalidFraction(_))
        ));
    }

    #[test]
    fn standardizer_constant_column_clamps_std() {
        let records = (0..5).map(|_| record(vec![5.0, 1.0, 2.0, 3.0], 0)).collect();
        let mut ds = Dataset::new(small_schema(), two_classes(), records);
        ds.records.push(record(vec![5.0, 2.0, 4.0, 9.0], 1));
        let s = Standardizer::fit(&ds).unwrap();
        assert_eq!(s.std[0], 1.0);
        let t = s.transform(&ds).unwrap();
        assert!(t.records().iter().all(|r| r.features[0] == 0.0));
    }

    #[test]
    fn standardizer_two_point_column() {
        let records = vec![record(vec![0.0; 4], 0), record(vec![2.0; 4], 1)];
        let ds = Dataset::new(small_schema(), two_classes(), records);
        let s = Standardizer::fit(&ds).unwrap();
        assert_abs_diff_eq!(s.mean[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.std[0], 1.0, epsilon = 1e-12);
        let t = s.transform(&ds).unwrap();
        assert_abs_diff_eq!(t.records()[0].features[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.records()[1].features[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn standardizer_fit_rejects_empty() {
        let ds = Dataset::<f64>::empty(small_schema(), two_classes());
        assert!(matches!(
            Standardizer::fit(&ds),
            Err(DatasetError::EmptyDataset)
        ));
    }

    #[test]
    fn standardized_columns_have_zero_mean_unit_std() {
        let ds = make_fixture::<f64>(
            &FixtureSpec::two_class_separable(),
            200,
            &small_schema(),
            3,
        )
        .unwrap();
        let s = Standardizer::fit(&ds).unwrap();
        let t = s.transform(&ds).unwrap();
        for col in 0..4 {
            let values = t.column(col);
            let n = values.len() as f64;
            let mean: f64 = values.iter().sum::<f64>() / n;
            let var: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-6);
            assert_abs_diff_eq!(var.sqrt(), 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn augment_concatenates_and_preserves_provenance() {
        let base = toy_dataset(2, 1);
        let mut synth = toy_dataset(3, 3);
        for rec in &mut synth.records {
            rec.provenance = Provenance::Cgan;
        }
        let out = augment(&base, &synth).unwrap();
        assert_eq!(out.len(), 9);
        let original = out
            .records()
            .iter()
            .filter(|r| r.provenance == Provenance::Original)
            .count();
        assert_eq!(original, 3);
        // base untouched
        assert_eq!(base.len(), 3);
    }

    #[test]
    fn augment_with_empty_is_identity() {
        let base = toy_dataset(4, 4);
        let empty = Dataset::empty(small_schema(), two_classes());
        let out = augment(&base, &empty).unwrap();
        assert_eq!(out.records(), base.records());
    }

    #[test]
    fn augment_rejects_schema_mismatch() {
        let base = toy_dataset(2, 2);
        let other = Dataset::<f64>::empty(
            FeatureSchema::new(vec![("feat".into(), 3)]),
            two_classes(),
        );
        assert!(matches!(
            augment(&base, &other),
            Err(DatasetError::SchemaMismatch(_))
        ));
    }

    #[test]
    fn expansion_counts_direct_ratio() {
        let ds = toy_dataset(10, 4);
        let counts = expansion_counts(&ds, 2, 1);
        assert_eq!(counts.get(&0), Some(&20));
        assert_eq!(counts.get(&1), Some(&8));
    }

    #[test]
    fn expansion_counts_floors() {
        let ds = toy_dataset(5, 2);
        let counts = expansion_counts(&ds, 1, 2);
        assert_eq!(counts.get(&0), Some(&2));
        assert_eq!(counts.get(&1), Some(&1));
    }

    #[test]
    fn expansion_counts_sum_property() {
        let ds = toy_dataset(13, 29);
        for (a, b) in [(2usize, 1usize), (1, 2), (3, 7), (5, 3)] {
            let counts = expansion_counts(&ds, a, b);
            let total: usize = counts.values().sum();
            let expected: usize = ds
                .class_counts()
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| c * a / b)
                .sum();
            assert_eq!(total, expected);
        }
    }

    #[test]
    fn fixture_is_deterministic() {
        let spec = FixtureSpec::two_class_separable();
        let a = make_fixture::<f64>(&spec, 50, &small_schema(), 7).unwrap();
        let b = make_fixture::<f64>(&spec, 50, &small_schema(), 7).unwrap();
        assert_eq!(a.records(), b.records());
        let c = make_fixture::<f64>(&spec, 50, &small_schema(), 8).unwrap();
        assert_ne!(a.records(), c.records());
    }

    #[test]
    fn fixture_zero_samples_is_empty() {
        let spec = FixtureSpec::two_class_separable();
        let ds = make_fixture::<f64>(&spec, 0, &small_schema(), 7).unwrap();
        assert!(ds.is_empty());
        assert_eq!(ds.classes().len(), 2);
    }

    #[test]
    fn fixture_class_means_match_spec() {
        let spec = FixtureSpec::two_class_separable();
        let ds = make_fixture::<f64>(&spec, 2000, &small_schema(), 42).unwrap();
        for (class, want) in [(0usize, -3.0), (1usize, 3.0)] {
            let sub = ds.filter_class(class);
            for col in 0..4 {
                let values = sub.column(col);
                let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
                assert_abs_diff_eq!(mean, want, epsilon = 0.12);
            }
        }
    }

    #[test]
    fn fixture_rejects_bad_std() {
        let mut spec = FixtureSpec::two_class_separable();
        spec.classes[0].components[0].std = vec![0.0];
        let err = make_fixture::<f64>(&spec, 10, &small_schema(), 1).unwrap_err();
        assert!(matches!(err, DatasetError::BadCovariance(_)));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn sorted_features(ds: &Dataset<f64>) -> Vec<(Vec<u64>, usize)> {
            let mut v: Vec<(Vec<u64>, usize)> = ds
                .records()
                .iter()
                .map(|r| (r.features.iter().map(|f| f.to_bits()).collect(), r.label))
                .collect();
            v.sort();
            v
        }

        proptest! {
            #[test]
            fn split_is_a_partition(n_a in 2usize..40, n_b in 2usize..40, seed in 0u64..500) {
                let ds = toy_dataset(n_a, n_b);
                let (train, test) = stratified_split(&ds, 0.7, seed).unwrap();
                prop_assert_eq!(train.len() + test.len(), ds.len());
                let mut union = sorted_features(&train);
                union.extend(sorted_features(&test));
                union.sort();
                prop_assert_eq!(union, sorted_features(&ds));
            }

            #[test]
            fn split_fraction_within_one_record(n_a in 2usize..60, frac in 0.2f64..0.8) {
                let ds = toy_dataset(n_a, 10);
                let (train, _) = stratified_split(&ds, frac, 3).unwrap();
                let got = train.class_counts()[0] as f64;
                prop_assert!((got - frac * n_a as f64).abs() <= 1.0 + 1e-9);
            }

            #[test]
            fn standardizer_round_trip(values in proptest::collection::vec(-1e6f64..1e6, 8..40)) {
                let records: Vec<_> = values
                    .chunks_exact(4)
                    .enumerate()
                    .map(|(i, chunk)| record(chunk.to_vec(), i % 2))
                    .collect();
                prop_assume!(records.len() >= 2);
                let ds = Dataset::new(small_schema(), two_classes(), records);
                let s = Standardizer::fit(&ds).unwrap();
                let back = s.inverse_transform(&s.transform(&ds).unwrap()).unwrap();
                for (orig, round) in ds.records().iter().zip(back.records()) {
                    for (a, b) in orig.features.iter().zip(&round.features) {
                        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
                    }
                }
            }
        }
    }
}
