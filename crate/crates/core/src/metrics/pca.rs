//! First-principal-axis projection of one feature category, used to reduce
//! each category to a single plottable dimension.

use super::{MetricsError, Result};
use crate::dataset::Dataset;
use crate::rng::seeded_rng;
use crate::scalar::{real, Scalar};
use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

const POWER_ITER_TOL: f64 = 1e-10;
const POWER_ITER_MAX: usize = 10_000;

/// Fitted PCA for one category: standardization parameters of its columns,
/// the unit principal axis, and the explained-variance share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PcaEntry<S: Scalar> {
    pub category: String,
    pub mean: Vec<S>,
    pub std: Vec<S>,
    pub axis: Vec<S>,
    pub eigenvalue: f64,
    pub explained_variance: f64,
}

/// Fits the first principal axis of the category's standardized columns by
/// power iteration. The axis sign is fixed so its largest-magnitude
/// component is positive.
pub fn pca_fit<S: Scalar>(dataset: &Dataset<S>, category: &str) -> Result<PcaEntry<S>> {
    let range = dataset
        .schema()
        .category_range(category)
        .ok_or_else(|| MetricsError::UnknownCategory(category.to_string()))?;
    let n = dataset.len();
    if n < 2 {
        return Err(MetricsError::EmptyDataset);
    }
    let width = range.len();
    let n_f = n as f64;

    // Standardize the category columns (population std, zero-variance
    // columns clamped to 1).
    let mut mean = vec![0.0f64; width];
    let mut std = vec![0.0f64; width];
    let mut data = Array2::<f64>::zeros((n, width));
    for (i, rec) in dataset.records().iter().enumerate() {
        for (j, col) in range.clone().enumerate() {
            data[(i, j)] = rec.features[col].to_f64().expect("finite feature");
        }
    }
    for j in 0..width {
        let col = data.column(j);
        let m = col.sum() / n_f;
        let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n_f;
        mean[j] = m;
        std[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
    }
    for i in 0..n {
        for j in 0..width {
            data[(i, j)] = (data[(i, j)] - mean[j]) / std[j];
        }
    }

    let cov = data.t().dot(&data) / n_f;
    let trace: f64 = (0..width).map(|j| cov[(j, j)]).sum();

    // Deterministic random start; a fixed vector could be orthogonal to the
    // leading eigenvector.
    let mut rng = seeded_rng(0x9ca_beef);
    let mut v = Array1::from_shape_fn(width, |_| rng.gen::<f64>() - 0.5);
    normalize(&mut v);
    let mut eigenvalue = 0.0;
    for _ in 0..POWER_ITER_MAX {
        let mut next = cov.dot(&v);
        eigenvalue = v.dot(&next);
        let residual = (&next - &(&v * eigenvalue)).mapv(f64::abs).sum();
        if eigenvalue.abs() < f64::MIN_POSITIVE {
            break;
        }
        normalize(&mut next);
        v = next;
        if residual < POWER_ITER_TOL * eigenvalue.abs().max(1e-300) {
            break;
        }
    }

    // Sign convention: largest-magnitude component positive.
    let lead = v
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).expect("finite"))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if v[lead] < 0.0 {
        v.mapv_inplace(|x| -x);
    }

    let explained_variance = if trace > 0.0 { eigenvalue / trace } else { 0.0 };
    Ok(PcaEntry {
        category: category.to_string(),
        mean: mean.into_iter().map(real::<S>).collect(),
        std: std.into_iter().map(real::<S>).collect(),
        axis: v.iter().map(|&x| real::<S>(x)).collect(),
        eigenvalue,
        explained_variance,
    })
}

fn normalize(v: &mut Array1<f64>) {
    let norm = v.dot(&*v).sqrt();
    if norm > 0.0 {
        v.mapv_inplace(|x| x / norm);
    } else {
        v[0] = 1.0;
    }
}

/// Projects each record's category columns onto the fitted axis.
pub fn pca_project<S: Scalar>(entry: &PcaEntry<S>, dataset: &Dataset<S>) -> Result<Vec<S>> {
    let range = dataset
        .schema()
        .category_range(&entry.category)
        .ok_or_else(|| MetricsError::UnknownCategory(entry.category.clone()))?;
    if range.len() != entry.axis.len() {
        return Err(MetricsError::SchemaMismatch(format!(
            "category `{}` has width {}, axis has {}",
            entry.category,
            range.len(),
            entry.axis.len()
        )));
    }
    Ok(dataset
        .records()
        .iter()
        .map(|rec| {
            range
                .clone()
                .enumerate()
                .map(|(j, col)| {
                    ((rec.features[col] - entry.mean[j]) / entry.std[j]) * entry.axis[j]
                })
                .fold(S::zero(), |acc, term| acc + term)
        })
        .collect())
}
