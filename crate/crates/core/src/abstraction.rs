use dca_linalg::svd_thin;

use crate::{DcaError, Matrix, Result, Vector};

/// Components whose singular value falls below this fraction of the largest
/// carry no variance and are never selected.
const RANK_RCOND: f64 = 1e-12;

/// How many principal components an institution keeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DimRule {
    /// Exactly this many components.
    Fixed(usize),
    /// The largest count whose cumulative explained-variance ratio stays
    /// strictly below the threshold, but at least one.
    Threshold(f64),
}

/// A fitted PCA map `x -> (x - mean) * components`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbstractionMap {
    pub mean: Vector,
    /// m x m~ with orthonormal columns.
    pub components: Matrix,
    /// Fraction of total variance carried by each kept component.
    pub explained_ratio: Vector,
}

impl AbstractionMap {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.ncols()
    }
}

fn center(x: &Matrix, mean: &Vector) -> Matrix {
    let mut c = x.clone();
    for mut row in c.row_iter_mut() {
        row -= mean.transpose();
    }
    c
}

pub fn fit_abstraction(x: &Matrix, rule: DimRule) -> Result<AbstractionMap> {
    let (n, m) = x.shape();
    if n < 2 || m == 0 {
        return Err(DcaError::Dimension(format!(
            "PCA needs at least 2 rows and 1 column, got {n}x{m}"
        )));
    }
    let mean = Vector::from_iterator(m, x.column_iter().map(|c| c.mean()));
    let svd = svd_thin(&center(x, &mean))?;

    let variances: Vec<f64> = svd.sigma.iter().map(|s| s * s).collect();
    let total: f64 = variances.iter().sum();
    let rank = svd.rank(RANK_RCOND);
    if rank == 0 || total <= 0.0 {
        return Err(DcaError::Rank("data has zero variance".into()));
    }
    let ratios: Vec<f64> = variances.iter().map(|v| v / total).collect();

    let keep = match rule {
        DimRule::Fixed(k) => {
            let limit = (n - 1).min(m);
            if k == 0 || k > limit {
                return Err(DcaError::Dimension(format!(
                    "requested {k} components, allowed 1..={limit}"
                )));
            }
            if k > rank {
                return Err(DcaError::Dimension(format!(
                    "requested {k} components but the data has rank {rank}"
                )));
            }
            k
        }
        DimRule::Threshold(tau) => {
            if !(tau > 0.0 && tau <= 1.0) {
                return Err(DcaError::InvalidInput(format!(
                    "contribution threshold {tau} outside (0, 1]"
                )));
            }
            let mut cumulative = 0.0;
            let mut count = 0;
            for &r in ratios.iter().take(rank) {
                cumulative += r;
                if cumulative < tau {
                    count += 1;
                } else {
                    break;
                }
            }
            count.max(1)
        }
    };

    Ok(AbstractionMap {
        mean,
        components: svd.v.columns(0, keep).into_owned(),
        explained_ratio: Vector::from_row_slice(&ratios[..keep]),
    })
}

pub fn apply_abstraction(map: &AbstractionMap, x: &Matrix) -> Result<Matrix> {
    if x.ncols() != map.input_dim() {
        return Err(DcaError::Dimension(format!(
            "input has {} columns, map expects {}",
            x.ncols(),
            map.input_dim()
        )));
    }
    Ok(center(x, &map.mean) * &map.components)
}
