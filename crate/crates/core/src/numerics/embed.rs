//! Class-label embedding table.

use super::{NumericsError, Result};
use crate::rng::seeded_rng;
use crate::scalar::{real, Scalar};
use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// K×E lookup table mapping class indices to dense condition vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Embedding<S: Scalar> {
    pub table: Array2<S>,
}

impl<S: Scalar> Embedding<S> {
    /// Rows drawn from N(0, 0.02²), matching the dense-layer init scale.
    pub fn new(classes: usize, width: usize, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let table = Array2::from_shape_fn((classes, width), |_| {
            let z: f64 = rng.sample(StandardNormal);
            real::<S>(z * 0.02)
        });
        Self { table }
    }

    pub fn classes(&self) -> usize {
        self.table.nrows()
    }

    pub fn width(&self) -> usize {
        self.table.ncols()
    }

    /// Stacks the embedding rows for `labels` into an n×E matrix.
    pub fn lookup(&self, labels: &[usize]) -> Result<Array2<S>> {
        let k = self.classes();
        let mut out = Array2::zeros((labels.len(), self.width()));
        for (i, &label) in labels.iter().enumerate() {
            if label >= k {
                return Err(NumericsError::LabelOutOfRange { label, k });
            }
            out.row_mut(i).assign(&self.table.row(label));
        }
        Ok(out)
    }

    /// Accumulates per-row output gradients back onto the table rows;
    /// duplicate labels add up.
    pub fn backward(&self, labels: &[usize], grad: &Array2<S>) -> Result<Array2<S>> {
        if grad.nrows() != labels.len() || grad.ncols() != self.width() {
            return Err(NumericsError::ShapeMismatch(format!(
                "grad {:?} for {} labels and width {}",
                grad.shape(),
                labels.len(),
                self.width()
            )));
        }
        let k = self.classes();
        let mut out = Array2::zeros(self.table.raw_dim());
        for (i, &label) in labels.iter().enumerate() {
            if label >= k {
                return Err(NumericsError::LabelOutOfRange { label, k });
            }
            let mut row = out.row_mut(label);
            row += &grad.row(i);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn lookup_stacks_rows() {
        let mut e = Embedding::<f64>::new(2, 3, 1);
        e.table = array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]];
        let out = e.lookup(&[0, 0, 1]).unwrap();
        assert_eq!(out, array![[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]);
    }

    #[test]
    fn lookup_rejects_out_of_range() {
        let e = Embedding::<f64>::new(2, 3, 1);
        assert!(matches!(
            e.lookup(&[2]),
            Err(NumericsError::LabelOutOfRange { label: 2, k: 2 })
        ));
    }

    #[test]
    fn backward_accumulates_duplicates() {
        let e = Embedding::<f64>::new(3, 2, 1);
        let grad = array![[1.0, 0.5], [2.0, 0.25], [10.0, 1.0]];
        let out = e.backward(&[1, 1, 0], &grad).unwrap();
        assert_eq!(out.row(1).to_vec(), vec![3.0, 0.75]);
        assert_eq!(out.row(0).to_vec(), vec![10.0, 1.0]);
        assert_eq!(out.row(2).to_vec(), vec![0.0, 0.0]);
    }
}
