//! Classical augmentation baselines: ADASYN and SMOTE-ENN, backed by exact
//! brute-force k-nearest-neighbour search in standardized feature space.
//!
//! Synthesis order is part of the contract (it pins the random draws):
//! classes ascending, members in record order within a class, and for each
//! member first the neighbour pick (`gen_range`) then the interpolation
//! factor (`gen::<f64>()`), from a per-class generator seeded with
//! `derive_seed(seed, class)`.

use crate::dataset::{AccountRecord, Dataset, Provenance};
use crate::rng::{derive_seed, seeded_rng};
use crate::scalar::{real, Scalar};
use rand::Rng;
use std::collections::BTreeMap;

pub const DEFAULT_SMOTE_K: usize = 5;
pub const DEFAULT_ENN_K: usize = 3;

#[derive(Debug, thiserror::Error)]
pub enum OversamplingError {
    #[error("class `{class}` has {members} members, need more than k = {k}")]
    ClassTooSmall {
        class: String,
        members: usize,
        k: usize,
    },
    #[error("class `{0}` is requested but has no members")]
    EmptyMinority(String),
}

pub type Result<T> = std::result::Result<T, OversamplingError>;

/// Exact brute-force neighbour search over a point set. Neighbour lists
/// exclude the query point and sort ascending by squared Euclidean distance
/// with index-order tie-breaks.
pub struct NeighborIndex<'a, S: Scalar> {
    points: Vec<&'a [S]>,
}

impl<'a, S: Scalar> NeighborIndex<'a, S> {
    pub fn new(dataset: &'a Dataset<S>) -> Self {
        Self {
            points: dataset.records().iter().map(|r| r.features.as_slice()).collect(),
        }
    }

    fn squared_distance(&self, a: usize, b: usize) -> f64 {
        self.points[a]
            .iter()
            .zip(self.points[b])
            .map(|(&x, &y)| {
                let d = (x - y).to_f64().expect("finite features");
                d * d
            })
            .sum()
    }

    /// Indices of the `k` nearest points to `query` among `candidates`.
    pub fn nearest(&self, query: usize, candidates: &[usize], k: usize) -> Vec<usize> {
        let mut scored: Vec<(f64, usize)> = candidates
            .iter()
            .filter(|&&c| c != query)
            .map(|&c| (self.squared_distance(query, c), c))
            .collect();
        scored.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
        scored.into_iter().take(k).map(|(_, c)| c).collect()
    }
}

fn class_members<S: Scalar>(dataset: &Dataset<S>) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); dataset.classes().len()];
    for (i, rec) in dataset.records().iter().enumerate() {
        members[rec.label].push(i);
    }
    members
}

/// Target map that balances every class up to the current majority count.
pub fn balanced_target<S: Scalar>(dataset: &Dataset<S>) -> BTreeMap<usize, usize> {
    let counts = dataset.class_counts();
    let majority = counts.iter().copied().max().unwrap_or(0);
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(class, _)| (class, majority))
        .collect()
}

fn check_class<S: Scalar>(
    dataset: &Dataset<S>,
    class: usize,
    members: usize,
    k: usize,
) -> Result<()> {
    if members == 0 {
        return Err(OversamplingError::EmptyMinority(
            dataset.classes().name(class).to_string(),
        ));
    }
    if members <= k {
        return Err(OversamplingError::ClassTooSmall {
            class: dataset.classes().name(class).to_string(),
            members,
            k,
        });
    }
    Ok(())
}

fn interpolate<S: Scalar>(a: &[S], b: &[S], lambda: f64) -> Vec<S> {
    let l = real::<S>(lambda);
    a.iter().zip(b).map(|(&x, &y)| x + l * (y - x)).collect()
}

/// ADASYN: density-adaptive synthesis. Each minority point gets a share of
/// the requested count proportional to how many of its k nearest neighbours
/// belong to other classes; points are synthesized on segments toward random
/// same-class neighbours. When every point has zero density weight the
/// allocation falls back to uniform. `target` maps class → desired total
/// count; only the synthetic records are returned.
pub fn adasyn<S: Scalar>(
    dataset: &Dataset<S>,
    target: &BTreeMap<usize, usize>,
    k: usize,
    seed: u64,
) -> Result<Dataset<S>> {
    let index = NeighborIndex::new(dataset);
    let members = class_members(dataset);
    let all: Vec<usize> = (0..dataset.len()).collect();
    let mut synthetic: Vec<AccountRecord<S>> = Vec::new();

    for (&class, &want) in target {
        let mine = &members[class];
        let have = mine.len();
        let grow = want.saturating_sub(have);
        if grow == 0 {
            continue;
        }
        check_class(dataset, class, have, k)?;

        // Density ratio rᵢ = (#other-class neighbours among k)/k.
        let ratios: Vec<f64> = mine
            .iter()
            .map(|&i| {
                let neighbours = index.nearest(i, &all, k);
                let other = neighbours
                    .iter()
                    .filter(|&&n| dataset.records()[n].label != class)
                    .count();
                other as f64 / k as f64
            })
            .collect();
        let total: f64 = ratios.iter().sum();
        let weights: Vec<f64> = if total > 0.0 {
            ratios.iter().map(|r| r / total).collect()
        } else {
            vec![1.0 / have as f64; have]
        };

        // Floor allocation, leftover to the highest-weight points.
        let mut allocation: Vec<usize> = weights
            .iter()
            .map(|w| (w * grow as f64).floor() as usize)
            .collect();
        let assigned: usize = allocation.iter().sum();
        let mut order: Vec<usize> = (0..have).collect();
        order.sort_by(|&a, &b| {
            weights[b]
                .partial_cmp(&weights[a])
                .expect("finite weights")
                .then(a.cmp(&b))
        });
        for &i in order.iter().take(grow - assigned) {
            allocation[i] += 1;
        }

        let mut rng = seeded_rng(derive_seed(seed, class as u64));
        for (pos, &i) in mine.iter().enumerate() {
            if allocation[pos] == 0 {
                continue;
            }
            let same_class = index.nearest(i, mine, k);
            for _ in 0..allocation[pos] {
                let pick = same_class[rng.gen_range(0..same_class.len())];
                let lambda: f64 = rng.gen();
                synthetic.push(AccountRecord {
                    features: interpolate(
                        &dataset.records()[i].features,
                        &dataset.records()[pick].features,
                        lambda,
                    ),
                    label: class,
                    provenance: Provenance::Adasyn,
                });
            }
        }
    }
    Ok(Dataset::new(
        dataset.schema().clone(),
        dataset.classes().clone(),
        synthetic,
    ))
}

/// SMOTE: uniform per-point allocation with segment interpolation toward
/// random same-class neighbours. Returns the synthetic records only.
pub fn smote<S: Scalar>(
    dataset: &Dataset<S>,
    target: &BTreeMap<usize, usize>,
    k: usize,
    seed: u64,
) -> Result<Dataset<S>> {
    let index = NeighborIndex::new(dataset);
    let members = class_members(dataset);
    let mut synthetic: Vec<AccountRecord<S>> = Vec::new();

    for (&class, &want) in target {
        let mine = &members[class];
        let have = mine.len();
        let grow = want.saturating_sub(have);
        if grow == 0 {
            continue;
        }
        check_class(dataset, class, have, k)?;

        let base = grow / have;
        let extra = grow % have;
        let mut rng = seeded_rng(derive_seed(seed, class as u64));
        for (pos, &i) in mine.iter().enumerate() {
            let count = base + usize::from(pos < extra);
            if count == 0 {
                continue;
            }
            let same_class = index.nearest(i, mine, k);
            for _ in 0..count {
                let pick = same_class[rng.gen_range(0..same_class.len())];
                let lambda: f64 = rng.gen();
                synthetic.push(AccountRecord {
                    features: interpolate(
                        &dataset.records()[i].features,
                        &dataset.records()[pick].features,
                        lambda,
                    ),
                    label: class,
                    provenance: Provenance::SmoteEnn,
                });
            }
        }
    }
    Ok(Dataset::new(
        dataset.schema().clone(),
        dataset.classes().clone(),
        synthetic,
    ))
}

/// Edited nearest neighbours: drops every record whose k-NN majority label
/// disagrees with its own. Votes tie-break to the lowest class index; records
/// are never added or relabeled.
pub fn enn_clean<S: Scalar>(dataset: &Dataset<S>, k: usize) -> Dataset<S> {
    let index = NeighborIndex::new(dataset);
    let all: Vec<usize> = (0..dataset.len()).collect();
    let keep: Vec<usize> = (0..dataset.len())
        .filter(|&i| {
            let neighbours = index.nearest(i, &all, k);
            if neighbours.is_empty() {
                return true;
            }
            let mut votes = vec![0usize; dataset.classes().len()];
            for &n in &neighbours {
                votes[dataset.records()[n].label] += 1;
            }
            let winner = votes
                .iter()
                .enumerate()
                .max_by(|(ia, a), (ib, b)| a.cmp(b).then(ib.cmp(ia)))
                .map(|(i, _)| i)
                .expect("at least one class");
            winner == dataset.records()[i].label
        })
        .collect();
    dataset.subset(&keep)
}

/// SMOTE followed by ENN cleaning of the combined data. Returns the full
/// cleaned dataset (original + synthetic survivors).
pub fn smote_enn<S: Scalar>(
    dataset: &Dataset<S>,
    target: &BTreeMap<usize, usize>,
    seed: u64,
) -> Result<Dataset<S>> {
    let synthetic = smote(dataset, target, DEFAULT_SMOTE_K, seed)?;
    let combined = crate::dataset::augment(dataset, &synthetic)
        .expect("smote preserves schema and classes");
    Ok(enn_clean(&combined, DEFAULT_ENN_K))
}
