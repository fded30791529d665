//! Random forest classifier: CART trees on bootstrap resamples with
//! Gini-impurity splits and midpoint thresholds.

use crate::dataset::Dataset;
use crate::rng::{derive_seed, seeded_rng};
use crate::scalar::{real, Scalar};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ForestError {
    #[error("training data contains a single class")]
    SingleClass,
    #[error("training data is empty")]
    EmptyTrain,
    #[error("input has width {got}, forest expects {expected}")]
    WidthMismatch { got: usize, expected: usize },
    #[error("class histogram is empty")]
    EmptyHistogram,
}

pub type Result<T> = std::result::Result<T, ForestError>;

/// How many candidate features each split considers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// ⌊√d⌋ features, sampled per split.
    Sqrt,
    /// Every feature, in column order.
    All,
    /// A fixed number of sampled features.
    Count(usize),
}

/// Forest hyperparameters. The defaults mirror the common library defaults:
/// 100 trees, √d features per split, unbounded depth, bootstrap resampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_features: MaxFeatures,
    pub min_samples_leaf: usize,
    pub max_depth: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_features: MaxFeatures::Sqrt,
            min_samples_leaf: 1,
            max_depth: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

/// Gini impurity 1 − Σ pᵢ² of a class histogram.
pub fn gini(counts: &[usize]) -> Result<f64> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(ForestError::EmptyHistogram);
    }
    let total = total as f64;
    let sum_sq: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            p * p
        })
        .sum();
    Ok(1.0 - sum_sq)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
enum TreeNode<S: Scalar> {
    Internal {
        feature: usize,
        threshold: S,
        left: usize,
        right: usize,
    },
    Leaf {
        histogram: Vec<usize>,
    },
}

/// One CART tree; `nodes[0]` is the root and left children take
/// `x[feature] <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DecisionTree<S: Scalar> {
    nodes: Vec<TreeNode<S>>,
}

impl<S: Scalar> DecisionTree<S> {
    fn leaf_histogram(&self, features: &[S]) -> &[usize] {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if features[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
                TreeNode::Leaf { histogram } => return histogram,
            }
        }
    }

    /// (feature, threshold) of the root split, if the tree has one.
    pub fn root_split(&self) -> Option<(usize, S)> {
        match &self.nodes[0] {
            TreeNode::Internal {
                feature, threshold, ..
            } => Some((*feature, *threshold)),
            TreeNode::Leaf { .. } => None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Fitted random forest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Forest<S: Scalar> {
    pub config: ForestConfig,
    n_classes: usize,
    n_features: usize,
    trees: Vec<DecisionTree<S>>,
}

struct TreeBuilder<'a, S: Scalar> {
    features: &'a [Vec<S>],
    labels: &'a [usize],
    n_classes: usize,
    n_features: usize,
    config: &'a ForestConfig,
}

impl<S: Scalar> TreeBuilder<'_, S> {
    fn histogram(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes];
        for &r in rows {
            counts[self.labels[r]] += 1;
        }
        counts
    }

    /// Best (feature, threshold, decrease) over the candidate features, or
    /// None when no split strictly decreases impurity. First-encountered
    /// candidates win ties.
    fn best_split(
        &self,
        rows: &[usize],
        parent_gini: f64,
        rng: &mut impl Rng,
    ) -> Option<(usize, S, f64)> {
        let candidates: Vec<usize> = match self.config.max_features {
            MaxFeatures::All => (0..self.n_features).collect(),
            MaxFeatures::Sqrt => {
                let m = (self.n_features as f64).sqrt().floor().max(1.0) as usize;
                sample_features(self.n_features, m, rng)
            }
            MaxFeatures::Count(m) => {
                let m = m.clamp(1, self.n_features);
                sample_features(self.n_features, m, rng)
            }
        };

        let n = rows.len();
        let n_f = n as f64;
        let min_leaf = self.config.min_samples_leaf.max(1);
        let mut best: Option<(usize, S, f64)> = None;

        for &feature in &candidates {
            let column = &self.features[feature];
            let mut order: Vec<usize> = rows.to_vec();
            order.sort_by(|&a, &b| {
                column[a]
                    .partial_cmp(&column[b])
                    .expect("finite feature values")
            });

            let mut left = vec![0usize; self.n_classes];
            let mut right = self.histogram(rows);
            let mut moved = 0usize;
            for w in 0..order.len() - 1 {
                let row = order[w];
                left[self.labels[row]] += 1;
                right[self.labels[row]] -= 1;
                moved += 1;
                let here = column[row];
                let next = column[order[w + 1]];
                if here == next {
                    continue;
                }
                if moved < min_leaf || n - moved < min_leaf {
                    continue;
                }
                let threshold = (here + next) / real::<S>(2.0);
                let gl = gini(&left).expect("left side non-empty");
                let gr = gini(&right).expect("right side non-empty");
                let weighted = (moved as f64 / n_f) * gl + ((n - moved) as f64 / n_f) * gr;
                let decrease = parent_gini - weighted;
                if decrease > 0.0 && best.map_or(true, |(_, _, d)| decrease > d) {
                    best = Some((feature, threshold, decrease));
                }
            }
        }
        best
    }

    fn build(&self, rows: Vec<usize>, rng: &mut impl Rng) -> DecisionTree<S> {
        let mut nodes = Vec::new();
        // (rows, depth, slot to patch in the parent: (node, is_left))
        let mut stack: Vec<(Vec<usize>, usize, Option<(usize, bool)>)> = vec![(rows, 0, None)];
        while let Some((rows, depth, parent)) = stack.pop() {
            let histogram = self.histogram(&rows);
            let parent_gini = gini(&histogram).expect("node non-empty");
            let depth_ok = self.config.max_depth.map_or(true, |d| depth < d);
            let split = if parent_gini > 0.0 && depth_ok && rows.len() >= 2 {
                self.best_split(&rows, parent_gini, rng)
            } else {
                None
            };

            let idx = nodes.len();
            match split {
                Some((feature, threshold, _)) => {
                    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                        .iter()
                        .partition(|&&r| self.features[feature][r] <= threshold);
                    nodes.push(TreeNode::Internal {
                        feature,
                        threshold,
                        left: 0,
                        right: 0,
                    });
                    // Right pushed first so the left child is built (and
                    // numbered) first, matching a preorder walk.
                    stack.push((right_rows, depth + 1, Some((idx, false))));
                    stack.push((left_rows, depth + 1, Some((idx, true))));
                }
                None => {
                    nodes.push(TreeNode::Leaf { histogram });
                }
            }
            if let Some((parent_idx, is_left)) = parent {
                if let TreeNode::Internal { left, right, .. } = &mut nodes[parent_idx] {
                    if is_left {
                        *left = idx;
                    } else {
                        *right = idx;
                    }
                }
            }
        }
        DecisionTree { nodes }
    }
}

/// `m` distinct feature indices in sampled order.
fn sample_features(d: usize, m: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut all: Vec<usize> = (0..d).collect();
    let (sampled, _) = all.partial_shuffle(rng, m);
    sampled.to_vec()
}

/// Fits `config.n_trees` CART trees on bootstrap resamples of `train`.
pub fn fit<S: Scalar>(train: &Dataset<S>, config: &ForestConfig) -> Result<Forest<S>> {
    if train.is_empty() {
        return Err(ForestError::EmptyTrain);
    }
    let labels = train.labels();
    let distinct = {
        let mut seen = vec![false; train.classes().len()];
        for &l in &labels {
            seen[l] = true;
        }
        seen.iter().filter(|&&s| s).count()
    };
    if distinct < 2 {
        return Err(ForestError::SingleClass);
    }

    let n = train.len();
    let n_features = train.schema().total_width();
    // Column-major copy so split sweeps touch contiguous memory.
    let mut features: Vec<Vec<S>> = vec![Vec::with_capacity(n); n_features];
    for rec in train.records() {
        for (j, &v) in rec.features.iter().enumerate() {
            features[j].push(v);
        }
    }

    let builder = TreeBuilder {
        features: &features,
        labels: &labels,
        n_classes: train.classes().len(),
        n_features,
        config,
    };

    let trees: Vec<DecisionTree<S>> = (0..config.n_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(derive_seed(config.seed, i as u64));
            let rows: Vec<usize> = if config.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            builder.build(rows, &mut rng)
        })
        .collect();

    Ok(Forest {
        config: *config,
        n_classes: train.classes().len(),
        n_features,
        trees,
    })
}

impl<S: Scalar> Forest<S> {
    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn trees(&self) -> usize {
        self.trees.len()
    }

    /// Mean of per-tree normalized leaf histograms.
    pub fn predict_proba(&self, features: &[S]) -> Result<Vec<f64>> {
        if features.len() != self.n_features {
            return Err(ForestError::WidthMismatch {
                got: features.len(),
                expected: self.n_features,
            });
        }
        let mut probs = vec![0.0f64; self.n_classes];
        for tree in &self.trees {
            let histogram = tree.leaf_histogram(features);
            let total: usize = histogram.iter().sum();
            for (p, &c) in probs.iter_mut().zip(histogram) {
                *p += c as f64 / total as f64;
            }
        }
        for p in &mut probs {
            *p /= self.trees.len() as f64;
        }
        Ok(probs)
    }

    /// Argmax of `predict_proba`, ties to the lowest class index.
    pub fn predict(&self, features: &[S]) -> Result<usize> {
        let probs = self.predict_proba(features)?;
        Ok(argmax(&probs))
    }

    /// Predicted label per record.
    pub fn predict_dataset(&self, data: &Dataset<S>) -> Result<Vec<usize>> {
        data.records()
            .iter()
            .map(|r| self.predict(&r.features))
            .collect()
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
