//! Evaluation metrics: confusion-matrix scores for detectors, KS/KL
//! distribution-similarity scores for synthetic data, and the exploratory
//! statistics (per-category PCA projections, KDE curves).

mod fidelity;
mod kde;
mod pca;

pub use fidelity::{fidelity_report, kl_score, ks_score, ks_statistic, FidelityReport};
pub use kde::kde_curve;
pub use pca::{pca_fit, pca_project, PcaEntry};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("prediction and truth lengths differ ({pred} vs {truth}) or are zero")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("label {label} out of range for {k} classes")]
    LabelOutOfRange { label: usize, k: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("unknown feature category `{0}`")]
    UnknownCategory(String),
    #[error("sample has fewer than 2 values or zero spread")]
    DegenerateSample,
}

pub type Result<T> = std::result::Result<T, MetricsError>;

/// Confusion matrix (rows = true class) plus the derived scalar scores.
///
/// Macro precision/recall/F1 are unweighted class means; a class absent from
/// the truth contributes recall 1 only if it was also never predicted, and a
/// never-predicted class contributes precision 0. The G-mean is the geometric
/// mean of the per-class recalls, which in the binary case reduces to
/// √(TPR·TNR).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub confusion: Vec<Vec<usize>>,
    pub accuracy: f64,
    pub precision_macro: f64,
    pub recall_macro: f64,
    pub f1_macro: f64,
    pub g_mean: f64,
}

impl EvalReport {
    pub fn n(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }
}

/// Scores `pred` against `truth` over `k` classes.
pub fn evaluate(pred: &[usize], truth: &[usize], k: usize) -> Result<EvalReport> {
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(MetricsError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &t) in pred.iter().zip(truth) {
        if p >= k {
            return Err(MetricsError::LabelOutOfRange { label: p, k });
        }
        if t >= k {
            return Err(MetricsError::LabelOutOfRange { label: t, k });
        }
        confusion[t][p] += 1;
    }

    let n = pred.len() as f64;
    let trace: usize = (0..k).map(|c| confusion[c][c]).sum();
    let accuracy = trace as f64 / n;

    let mut precision_sum = 0.0;
    let mut recall_sum = 0.0;
    let mut f1_sum = 0.0;
    let mut recall_log_product = 0.0f64;
    let mut recall_zero = false;
    for c in 0..k {
        let row: usize = confusion[c].iter().sum();
        let col: usize = (0..k).map(|t| confusion[t][c]).sum();
        let hit = confusion[c][c] as f64;

        let recall = if row > 0 {
            hit / row as f64
        } else if col == 0 {
            1.0
        } else {
            0.0
        };
        let precision = if col > 0 { hit / col as f64 } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        precision_sum += precision;
        recall_sum += recall;
        f1_sum += f1;
        if recall > 0.0 {
            recall_log_product += recall.ln();
        } else {
            recall_zero = true;
        }
    }
    let g_mean = if recall_zero {
        0.0
    } else {
        (recall_log_product / k as f64).exp()
    };

    Ok(EvalReport {
        confusion,
        accuracy,
        precision_macro: precision_sum / k as f64,
        recall_macro: recall_sum / k as f64,
        f1_macro: f1_sum / k as f64,
        g_mean,
    })
}
