//! The simulated institutions. Raw rows live in private fields of
//! [`LocalInstitution`]; the only thing collaborative code can obtain from
//! one is a [`SharedRepresentation`], which holds reduced rows and labels.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dca_core::{apply_abstraction, fit_abstraction, DimRule, Matrix};

use crate::data::Dataset;
use crate::model::Classifier;

/// What one institution hands to the analyst.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedRepresentation {
    pub train: Matrix,
    pub train_labels: Vec<usize>,
    pub test: Matrix,
    pub test_labels: Vec<usize>,
    pub anchor: Matrix,
}

impl SharedRepresentation {
    pub fn dim(&self) -> usize {
        self.anchor.ncols()
    }
}

#[derive(Debug, Clone)]
pub struct LocalInstitution {
    train: Matrix,
    train_labels: Vec<usize>,
    test: Matrix,
    test_labels: Vec<usize>,
}

fn select(dataset: &Dataset, rows: &[usize]) -> (Matrix, Vec<usize>) {
    let x = Matrix::from_fn(rows.len(), dataset.dims(), |r, c| dataset.features[(rows[r], c)]);
    let y = rows.iter().map(|&r| dataset.labels[r]).collect();
    (x, y)
}

/// Number of rows an institution of `rows` holds out for testing.
pub fn test_count(rows: usize, holdout_ratio: f64) -> usize {
    let n = (rows as f64 * holdout_ratio).round() as usize;
    n.clamp(1, rows.saturating_sub(1).max(1))
}

impl LocalInstitution {
    /// Takes `rows` of the dataset and splits them at random into a test
    /// share of `holdout_ratio` and a training remainder.
    pub fn with_holdout(dataset: &Dataset, rows: &[usize], holdout_ratio: f64, seed: u64) -> Self {
        let n_test = test_count(rows.len(), holdout_ratio);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut is_test = vec![false; rows.len()];
        for k in index::sample(&mut rng, rows.len(), n_test) {
            is_test[k] = true;
        }
        let mut train_rows = Vec::with_capacity(rows.len() - n_test);
        let mut test_rows = Vec::with_capacity(n_test);
        for (&row, &held_out) in rows.iter().zip(&is_test) {
            if held_out {
                test_rows.push(row);
            } else {
                train_rows.push(row);
            }
        }
        let (train, train_labels) = select(dataset, &train_rows);
        let (test, test_labels) = select(dataset, &test_rows);
        Self {
            train,
            train_labels,
            test,
            test_labels,
        }
    }

    /// All of `rows` used for training, none held out.
    pub fn without_holdout(dataset: &Dataset, rows: &[usize]) -> Self {
        let (train, train_labels) = select(dataset, rows);
        Self {
            train,
            train_labels,
            test: Matrix::zeros(0, dataset.dims()),
            test_labels: Vec::new(),
        }
    }

    pub fn train_rows(&self) -> usize {
        self.train.nrows()
    }

    pub fn test_rows(&self) -> usize {
        self.test.nrows()
    }

    /// Reduced dimension the rule selects on this institution's training rows.
    pub fn reduced_dim(&self, rule: DimRule) -> dca_core::Result<usize> {
        Ok(fit_abstraction(&self.train, rule)?.output_dim())
    }

    /// Fits PCA on the training rows and applies it to training rows, test
    /// rows, and the shared anchor.
    pub fn share(&self, anchor: &Matrix, rule: DimRule) -> dca_core::Result<SharedRepresentation> {
        let map = fit_abstraction(&self.train, rule)?;
        Ok(SharedRepresentation {
            train: apply_abstraction(&map, &self.train)?,
            train_labels: self.train_labels.clone(),
            test: apply_abstraction(&map, &self.test)?,
            test_labels: self.test_labels.clone(),
            anchor: apply_abstraction(&map, anchor)?,
        })
    }

    /// Accuracy of a model trained and tested on this institution's raw rows.
    pub fn individual_accuracy(&self, classifier: &Classifier) -> dca_core::Result<f64> {
        classifier.fit_evaluate(&self.train, &self.train_labels, &[(&self.test, &self.test_labels)])
    }
}

/// Pools every institution's raw training rows into one model and averages
/// its per-institution test accuracy. This is the non-private reference.
pub fn centralized_accuracy(institutions: &[LocalInstitution], classifier: &Classifier) -> dca_core::Result<f64> {
    let total: usize = institutions.iter().map(|i| i.train_rows()).sum();
    let dims = institutions.first().map_or(0, |i| i.train.ncols());
    let mut x = Matrix::zeros(total, dims);
    let mut y = Vec::with_capacity(total);
    let mut off = 0;
    for inst in institutions {
        x.rows_mut(off, inst.train_rows()).copy_from(&inst.train);
        y.extend_from_slice(&inst.train_labels);
        off += inst.train_rows();
    }
    let tests: Vec<(&Matrix, &Vec<usize>)> = institutions.iter().map(|i| (&i.test, &i.test_labels)).collect();
    classifier.fit_evaluate(&x, &y, &tests)
}
