use crate::{DcaError, Matrix, Result, Vector};

/// Nearest class mean in Euclidean distance.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidClassifier {
    /// (class, centroid) for every class seen during fitting, ascending.
    pub centroids: Vec<(usize, Vector)>,
}

pub fn centroid_fit(x: &Matrix, labels: &[usize]) -> Result<CentroidClassifier> {
    if x.nrows() != labels.len() {
        return Err(DcaError::Dimension(format!(
            "{} rows for {} labels",
            x.nrows(),
            labels.len()
        )));
    }
    if labels.is_empty() {
        return Err(DcaError::InvalidInput("no training rows".into()));
    }
    let num_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut sums = vec![Vector::zeros(x.ncols()); num_classes];
    let mut counts = vec![0usize; num_classes];
    for (row, &l) in x.row_iter().zip(labels) {
        sums[l] += row.transpose();
        counts[l] += 1;
    }
    let centroids = sums
        .into_iter()
        .zip(counts)
        .enumerate()
        .filter(|(_, (_, n))| *n > 0)
        .map(|(class, (sum, n))| (class, sum / n as f64))
        .collect();
    Ok(CentroidClassifier { centroids })
}

pub fn centroid_predict(model: &CentroidClassifier, x: &Matrix) -> Result<Vec<usize>> {
    let dim = model.centroids[0].1.len();
    if x.ncols() != dim {
        return Err(DcaError::Dimension(format!(
            "model has {dim} features, input has {}",
            x.ncols()
        )));
    }
    Ok(x
        .row_iter()
        .map(|row| {
            let mut best = model.centroids[0].0;
            let mut best_d = f64::INFINITY;
            for (class, c) in &model.centroids {
                let d = (row.transpose() - c).norm_squared();
                if d < best_d {
                    best_d = d;
                    best = *class;
                }
            }
            best
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn midpoint_minus_epsilon_goes_left() {
        let model = centroid_fit(&dmatrix![0.0; 10.0], &[0, 1]).unwrap();
        assert_eq!(centroid_predict(&model, &dmatrix![5.0 - 1e-9]).unwrap(), vec![0]);
        // exact tie resolves to the lower class
        assert_eq!(centroid_predict(&model, &dmatrix![5.0]).unwrap(), vec![0]);
    }

    #[test]
    fn centroids_classify_to_themselves() {
        let x = dmatrix![0.0, 0.0; 1.0, 1.0; 5.0, 5.0; 6.0, 6.0; -4.0, 3.0];
        let y = [0, 0, 2, 2, 1];
        let model = centroid_fit(&x, &y).unwrap();
        for (class, c) in &model.centroids {
            let row = Matrix::from_row_slice(1, 2, c.as_slice());
            assert_eq!(centroid_predict(&model, &row).unwrap(), vec![*class]);
        }
    }

    #[test]
    fn absent_classes_are_skipped() {
        let model = centroid_fit(&dmatrix![1.0; 2.0], &[0, 3]).unwrap();
        let classes: Vec<usize> = model.centroids.iter().map(|(c, _)| *c).collect();
        assert_eq!(classes, vec![0, 3]);
    }
}
