use dca_core::models::{accuracy, centroid_fit, centroid_predict, one_hot, ridge_fit, ridge_predict};
use dca_core::{DcaError, Matrix};

use crate::config::ClassifierKind;

/// Mean per-column sum of squares of the centered matrix. Ridge penalties
/// are multiplied by this so that rescaling every feature by the same
/// factor leaves predictions unchanged; per-column scaling still matters.
pub fn feature_scale(x: &Matrix) -> f64 {
    let ss: f64 = x.column_iter().map(|c| (c.add_scalar(-c.mean())).norm_squared()).sum();
    let scale = ss / x.ncols().max(1) as f64;
    if scale > 0.0 {
        scale
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classifier {
    Ridge { penalty: f64, num_classes: usize },
    Centroid,
}

impl Classifier {
    pub fn new(kind: ClassifierKind, penalty: f64, num_classes: usize) -> Self {
        match kind {
            ClassifierKind::Ridge => Classifier::Ridge {
                penalty,
                num_classes,
            },
            ClassifierKind::Centroid => Classifier::Centroid,
        }
    }

    /// Trains once, then returns the mean accuracy over the test sets.
    pub fn fit_evaluate(
        &self,
        train: &Matrix,
        labels: &[usize],
        tests: &[(&Matrix, &Vec<usize>)],
    ) -> dca_core::Result<f64> {
        if tests.is_empty() {
            return Err(DcaError::InvalidInput("no test sets".into()));
        }
        let predict: Box<dyn Fn(&Matrix) -> dca_core::Result<Vec<usize>>> = match *self {
            Classifier::Ridge {
                penalty,
                num_classes,
            } => {
                let model = ridge_fit(train, &one_hot(labels, num_classes), penalty * feature_scale(train))?;
                Box::new(move |x| ridge_predict(&model, x))
            }
            Classifier::Centroid => {
                let model = centroid_fit(train, labels)?;
                Box::new(move |x| centroid_predict(&model, x))
            }
        };
        let mut total = 0.0;
        for (x, y) in tests {
            total += accuracy(&predict(x)?, y)?;
        }
        Ok(total / tests.len() as f64)
    }
}
