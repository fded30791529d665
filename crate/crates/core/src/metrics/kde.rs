//! Gaussian kernel density estimate with Silverman's bandwidth, for the
//! per-category distribution plots.

use super::{MetricsError, Result};
use crate::scalar::Scalar;

/// Evaluates a Gaussian KDE of `values` on a uniform grid spanning
/// [min − 3h, max + 3h], h = 0.9·min(σ, IQR/1.34)·n^(−1/5).
pub fn kde_curve<S: Scalar>(values: &[S], grid_points: usize) -> Result<Vec<(f64, f64)>> {
    if values.len() < 2 {
        return Err(MetricsError::DegenerateSample);
    }
    let mut xs: Vec<f64> = values
        .iter()
        .map(|v| v.to_f64().expect("finite value"))
        .collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = xs.len() as f64;
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    if hi == lo {
        return Err(MetricsError::DegenerateSample);
    }

    let mean = xs.iter().sum::<f64>() / n;
    let sigma = (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    let iqr = quantile(&xs, 0.75) - quantile(&xs, 0.25);
    let spread = if iqr > 0.0 {
        sigma.min(iqr / 1.34)
    } else {
        sigma
    };
    let h = 0.9 * spread * n.powf(-0.2);

    let grid_points = grid_points.max(2);
    let start = lo - 3.0 * h;
    let end = hi + 3.0 * h;
    let step = (end - start) / (grid_points - 1) as f64;
    let norm = 1.0 / (n * h * (2.0 * std::f64::consts::PI).sqrt());

    let curve = (0..grid_points)
        .map(|g| {
            let x = start + g as f64 * step;
            let density = xs
                .iter()
                .map(|xi| {
                    let u = (x - xi) / h;
                    (-0.5 * u * u).exp()
                })
                .sum::<f64>()
                * norm;
            (x, density)
        })
        .collect();
    Ok(curve)
}

/// Linear-interpolation quantile of a sorted slice (position p·(n−1)).
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn standard_normal_sample(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = crate::rng::seeded_rng(seed);
        (0..n)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect()
    }

    fn trapezoid(curve: &[(f64, f64)]) -> f64 {
        curve
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
            .sum()
    }

    #[test]
    fn standard_normal_peak_density() {
        let xs = standard_normal_sample(10_000, 1);
        let curve = kde_curve(&xs, 200).unwrap();
        let peak = curve
            .iter()
            .cloned()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        assert_abs_diff_eq!(peak.1, 0.399, epsilon = 0.05);
        assert!(peak.0.abs() < 0.3, "peak at {}", peak.0);
    }

    #[test]
    fn curve_integrates_to_one() {
        let xs = standard_normal_sample(3000, 2);
        let curve = kde_curve(&xs, 200).unwrap();
        assert_abs_diff_eq!(trapezoid(&curve), 1.0, epsilon = 0.02);
        assert!(curve.iter().all(|(_, d)| *d >= 0.0));
    }

    #[test]
    fn two_clusters_give_two_local_maxima() {
        let mut rng = crate::rng::seeded_rng(3);
        let xs: Vec<f64> = (0..2000)
            .map(|i| {
                let center = if i % 2 == 0 { -5.0 } else { 5.0 };
                center + rng.sample::<f64, _>(rand_distr::StandardNormal) * 0.5
            })
            .collect();
        let curve = kde_curve(&xs, 300).unwrap();
        let mut maxima = 0;
        for w in curve.windows(3) {
            if w[1].1 > w[0].1 && w[1].1 > w[2].1 && w[1].1 > 0.01 {
                maxima += 1;
            }
        }
        assert_eq!(maxima, 2);
    }

    #[test]
    fn degenerate_samples_are_rejected() {
        assert!(matches!(
            kde_curve(&[1.0f64], 100),
            Err(MetricsError::DegenerateSample)
        ));
        assert!(matches!(
            kde_curve(&[2.0f64, 2.0, 2.0], 100),
            Err(MetricsError::DegenerateSample)
        ));
    }
}
