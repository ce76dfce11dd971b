use nalgebra::Cholesky;

use super::argmax;
use crate::{DcaError, Matrix, Result, Vector};

/// One-vs-all L2-regularized least squares on one-hot targets.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeClassifier {
    /// (features + 1) x classes; the last row is the unpenalized bias.
    pub weights: Matrix,
    pub penalty: f64,
}

impl RidgeClassifier {
    pub fn num_features(&self) -> usize {
        self.weights.nrows() - 1
    }

    pub fn scores(&self, x: &Matrix) -> Result<Matrix> {
        let p = self.num_features();
        if x.ncols() != p {
            return Err(DcaError::Dimension(format!(
                "model has {p} features, input has {}",
                x.ncols()
            )));
        }
        let mut s = x * self.weights.rows(0, p);
        let bias = self.weights.row(p);
        for mut row in s.row_iter_mut() {
            row += &bias;
        }
        Ok(s)
    }
}

/// Minimizes `||X W + 1 b - Y||^2 + penalty ||W||^2`. Centering both sides
/// removes the bias from the penalized system.
pub fn ridge_fit(x: &Matrix, targets: &Matrix, penalty: f64) -> Result<RidgeClassifier> {
    let (n, p) = x.shape();
    let c = targets.ncols();
    if targets.nrows() != n {
        return Err(DcaError::Dimension(format!(
            "{n} rows of features, {} rows of targets",
            targets.nrows()
        )));
    }
    if c < 2 || n < c {
        return Err(DcaError::InvalidInput(format!(
            "ridge needs rows >= classes >= 2, got {n} rows and {c} classes"
        )));
    }
    if !(penalty > 0.0 && penalty.is_finite()) {
        return Err(DcaError::InvalidInput(format!("penalty must be positive, got {penalty}")));
    }

    let x_mean = Vector::from_iterator(p, x.column_iter().map(|col| col.mean()));
    let y_mean = Vector::from_iterator(c, targets.column_iter().map(|col| col.mean()));
    let mut xc = x.clone();
    for mut row in xc.row_iter_mut() {
        row -= x_mean.transpose();
    }
    let mut yc = targets.clone();
    for mut row in yc.row_iter_mut() {
        row -= y_mean.transpose();
    }

    let mut gram = xc.transpose() * &xc;
    for k in 0..p {
        gram[(k, k)] += penalty;
    }
    let chol = Cholesky::new(gram)
        .ok_or_else(|| DcaError::InvalidInput("regularized Gram matrix is not definite".into()))?;
    let coef = chol.solve(&(xc.transpose() * &yc));
    let bias = y_mean - coef.transpose() * x_mean;

    let mut weights = Matrix::zeros(p + 1, c);
    weights.rows_mut(0, p).copy_from(&coef);
    weights.row_mut(p).copy_from(&bias.transpose());
    Ok(RidgeClassifier { weights, penalty })
}

pub fn ridge_predict(model: &RidgeClassifier, x: &Matrix) -> Result<Vec<usize>> {
    let s = model.scores(x)?;
    Ok(s.row_iter().map(|row| argmax(row.iter())).collect())
}
