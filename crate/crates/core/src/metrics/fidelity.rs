//! Distribution-similarity scores between a real and a synthetic dataset.
//!
//! Both scores are per-feature values mapped into [0, 1] and averaged, with 1
//! meaning the two empirical distributions are identical: the KS score is
//! 1 − D (two-sample Kolmogorov–Smirnov statistic), the KL score is
//! 1/(1 + KL(synth‖real)) over smoothed shared-range histograms.

use super::{MetricsError, Result};
use crate::dataset::Dataset;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Per-feature similarity detail plus the averaged scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub ks_score: f64,
    pub kl_score: f64,
    pub ks_per_feature: Vec<f64>,
    pub kl_per_feature: Vec<f64>,
}

/// Two-sample KS statistic D = sup |F₁ − F₂| via an exact merged ECDF sweep.
pub fn ks_statistic<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "samples must be non-empty");
    let mut a: Vec<S> = a.to_vec();
    let mut b: Vec<S> = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).expect("finite values"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("finite values"));
    let (n, m) = (a.len() as f64, b.len() as f64);

    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&av), Some(&bv)) => {
                if av < bv {
                    av
                } else {
                    bv
                }
            }
            (Some(&av), None) => av,
            (None, Some(&bv)) => bv,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

fn check_pair<S: Scalar>(real: &Dataset<S>, synth: &Dataset<S>) -> Result<()> {
    if real.is_empty() || synth.is_empty() {
        return Err(MetricsError::EmptyDataset);
    }
    if real.schema() != synth.schema() {
        return Err(MetricsError::SchemaMismatch(
            "fidelity requires matching feature schemas".into(),
        ));
    }
    Ok(())
}

/// Mean over features of 1 − D.
pub fn ks_score<S: Scalar>(real: &Dataset<S>, synth: &Dataset<S>) -> Result<f64> {
    Ok(mean(&ks_per_feature(real, synth)?))
}

fn ks_per_feature<S: Scalar>(real: &Dataset<S>, synth: &Dataset<S>) -> Result<Vec<f64>> {
    check_pair(real, synth)?;
    let width = real.schema().total_width();
    Ok((0..width)
        .map(|j| 1.0 - ks_statistic(&real.column(j), &synth.column(j)))
        .collect())
}

/// Mean over features of 1/(1 + KL(synth‖real)), histograms on the shared
/// range with `bins` equal bins and +1 Laplace smoothing.
pub fn kl_score<S: Scalar>(real: &Dataset<S>, synth: &Dataset<S>, bins: usize) -> Result<f64> {
    Ok(mean(&kl_per_feature(real, synth, bins)?))
}

fn kl_per_feature<S: Scalar>(
    real: &Dataset<S>,
    synth: &Dataset<S>,
    bins: usize,
) -> Result<Vec<f64>> {
    check_pair(real, synth)?;
    assert!(bins >= 1, "need at least one bin");
    let width = real.schema().total_width();
    let mut scores = Vec::with_capacity(width);
    for j in 0..width {
        let rv: Vec<f64> = real
            .column(j)
            .iter()
            .map(|v| v.to_f64().expect("finite"))
            .collect();
        let sv: Vec<f64> = synth
            .column(j)
            .iter()
            .map(|v| v.to_f64().expect("finite"))
            .collect();
        let lo = rv.iter().chain(&sv).cloned().fold(f64::INFINITY, f64::min);
        let hi = rv
            .iter()
            .chain(&sv)
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let kl = if hi == lo {
            0.0
        } else {
            let hist = |values: &[f64]| -> Vec<f64> {
                let mut counts = vec![1.0f64; bins]; // +1 smoothing
                for &v in values {
                    let idx = (((v - lo) / (hi - lo)) * bins as f64).floor() as usize;
                    counts[idx.min(bins - 1)] += 1.0;
                }
                let total: f64 = counts.iter().sum();
                counts.iter().map(|c| c / total).collect()
            };
            let p = hist(&rv);
            let q = hist(&sv);
            q.iter()
                .zip(&p)
                .map(|(&qi, &pi)| qi * (qi / pi).ln())
                .sum::<f64>()
                .max(0.0)
        };
        scores.push(1.0 / (1.0 + kl));
    }
    Ok(scores)
}

/// KS and KL scores with per-feature detail.
pub fn fidelity_report<S: Scalar>(
    real: &Dataset<S>,
    synth: &Dataset<S>,
    kl_bins: usize,
) -> Result<FidelityReport> {
    let ks = ks_per_feature(real, synth)?;
    let kl = kl_per_feature(real, synth, kl_bins)?;
    Ok(FidelityReport {
        ks_score: mean(&ks),
        kl_score: mean(&kl),
        ks_per_feature: ks,
        kl_per_feature: kl,
    })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AccountRecord, ClassMap, Dataset, FeatureSchema, Provenance};
    use approx::assert_abs_diff_eq;

    fn one_column(values: &[f64]) -> Dataset<f64> {
        let schema = FeatureSchema::new(vec![("feat".into(), 1)]);
        let classes = ClassMap::new(vec!["a".into(), "b".into()]);
        let records = values
            .iter()
            .map(|&v| AccountRecord {
                features: vec![v],
                label: 0,
                provenance: Provenance::Original,
            })
            .collect();
        Dataset::new(schema, classes, records)
    }

    #[test]
    fn identical_samples_score_one() {
        let ds = one_column(&[1.0, 2.0, 3.0, 4.0]);
        assert_abs_diff_eq!(ks_score(&ds, &ds).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(kl_score(&ds, &ds, 50).unwrap(), 1.0, epsilon = 1e-12);
        let report = fidelity_report(&ds, &ds, 50).unwrap();
        assert_eq!(report.ks_per_feature, vec![1.0]);
    }

    #[test]
    fn disjoint_constants_have_zero_ks_score() {
        let real = one_column(&[0.0, 0.0, 0.0, 0.0]);
        let synth = one_column(&[1.0, 1.0, 1.0, 1.0]);
        assert_abs_diff_eq!(ks_score(&real, &synth).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ks_quarter_statistic() {
        let real = one_column(&[1.0, 2.0, 3.0, 4.0]);
        let synth = one_column(&[1.0, 2.0, 3.0, 10.0]);
        assert_abs_diff_eq!(ks_statistic(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 10.0]), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(ks_score(&real, &synth).unwrap(), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn ks_matches_brute_force_threshold_enumeration() {
        // Independent oracle: evaluate |F1(t) − F2(t)| at every sample point.
        use rand::Rng;
        let mut rng = crate::rng::seeded_rng(17);
        for _ in 0..20 {
            let n = rng.gen_range(1..15);
            let m = rng.gen_range(1..15);
            // Coarse grid values force plenty of ties.
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64).collect();
            let b: Vec<f64> = (0..m).map(|_| rng.gen_range(0..8) as f64).collect();

            let mut brute: f64 = 0.0;
            for t in a.iter().chain(&b) {
                let fa = a.iter().filter(|&&v| v <= *t).count() as f64 / n as f64;
                let fb = b.iter().filter(|&&v| v <= *t).count() as f64 / m as f64;
                brute = brute.max((fa - fb).abs());
            }
            assert_abs_diff_eq!(ks_statistic(&a, &b), brute, epsilon = 1e-12);
        }
    }

    #[test]
    fn kl_two_bin_hand_case() {
        // Real histogram [3,1], synth [1,3] over two bins; +1 smoothing gives
        // p = [4/6, 2/6], q = [2/6, 4/6];
        // KL = (1/3)ln(1/2) + (2/3)ln(2) = ln(2)/3 ≈ 0.231049.
        let real = one_column(&[0.1, 0.2, 0.3, 0.7]);
        let synth = one_column(&[0.2, 0.6, 0.7, 0.8]);
        let kl = std::f64::consts::LN_2 / 3.0;
        let expected = 1.0 / (1.0 + kl);
        assert_abs_diff_eq!(kl_score(&real, &synth, 2).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.8123153, epsilon = 1e-6);
    }

    #[test]
    fn kl_score_decreases_with_shift() {
        use rand::Rng;
        let mut rng = crate::rng::seeded_rng(5);
        let base: Vec<f64> = (0..400).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let real = one_column(&base);
        let mut last = f64::INFINITY;
        for shift in [0.0, 1.0, 3.0] {
            let shifted: Vec<f64> = base.iter().map(|v| v + shift).collect();
            let synth = one_column(&shifted);
            let score = kl_score(&real, &synth, 50).unwrap();
            assert!(score < last, "shift {shift}: {score} !< {last}");
            last = score;
        }
    }

    #[test]
    fn scores_are_bounded() {
        use rand::Rng;
        let mut rng = crate::rng::seeded_rng(6);
        for _ in 0..10 {
            let a: Vec<f64> = (0..30).map(|_| rng.gen::<f64>() * 10.0).collect();
            let b: Vec<f64> = (0..20).map(|_| rng.gen::<f64>() * 3.0 - 5.0).collect();
            let real = one_column(&a);
            let synth = one_column(&b);
            let ks = ks_score(&real, &synth).unwrap();
            let kl = kl_score(&real, &synth, 50).unwrap();
            assert!((0.0..=1.0).contains(&ks));
            assert!((0.0..=1.0).contains(&kl));
        }
    }

    #[test]
    fn empty_and_mismatched_inputs_error() {
        let ds = one_column(&[1.0]);
        let empty = one_column(&[]);
        assert!(matches!(
            ks_score(&ds, &empty),
            Err(MetricsError::EmptyDataset)
        ));
        let wide = Dataset::<f64>::empty(
            FeatureSchema::new(vec![("feat".into(), 2)]),
            ClassMap::new(vec!["a".into(), "b".into()]),
        );
        assert!(matches!(
            ks_score(&ds, &wide),
            Err(MetricsError::EmptyDataset) | Err(MetricsError::SchemaMismatch(_))
        ));
    }

    #[test]
    fn subsample_scores_at_least_as_high_as_noise() {
        use rand::Rng;
        let mut rng = crate::rng::seeded_rng(7);
        let base: Vec<f64> = (0..500).map(|_| rng.gen::<f64>()).collect();
        let real = one_column(&base);
        let sub = one_column(&base[..250]);
        let noise: Vec<f64> = (0..250).map(|_| rng.gen::<f64>() * 20.0 - 10.0).collect();
        let noisy = one_column(&noise);
        let s_sub = ks_score(&real, &sub).unwrap();
        let s_noise = ks_score(&real, &noisy).unwrap();
        assert!(s_sub >= s_noise);
    }
}
