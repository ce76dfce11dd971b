//! Small supervised learners for comparing individual, centralized, and
//! collaborative analyses.
//!
//! [`RidgeClassifier`] is penalized, so per-feature scaling (and therefore
//! eigenvalue weighting) changes its fit. [`CentroidClassifier`] is a
//! nearest-mean rule; it is invariant to a uniform rescaling of all features
//! but not to per-column scaling.

mod centroid;
mod ridge;

pub use centroid::{centroid_fit, centroid_predict, CentroidClassifier};
pub use ridge::{ridge_fit, ridge_predict, RidgeClassifier};

use crate::{DcaError, Matrix, Result};

pub fn one_hot(labels: &[usize], num_classes: usize) -> Matrix {
    let mut m = Matrix::zeros(labels.len(), num_classes);
    for (row, &l) in labels.iter().enumerate() {
        m[(row, l)] = 1.0;
    }
    m
}

/// Fraction of positions where the two label vectors agree.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(DcaError::Dimension(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(DcaError::InvalidInput("accuracy of an empty label set".into()));
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Index of the largest entry; the lowest index wins ties.
pub(crate) fn argmax<'a>(values: impl IntoIterator<Item = &'a f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &v) in values.into_iter().enumerate() {
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    best
}
