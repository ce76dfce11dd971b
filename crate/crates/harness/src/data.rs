use std::collections::HashMap;
use std::path::Path;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use dca_core::Matrix;

use crate::{HarnessError, Result};

/// A labelled feature table.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Matrix,
    /// Class indices into `class_names`.
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
    pub label_column: String,
}

impl Dataset {
    pub fn rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn dims(&self) -> usize {
        self.features.ncols()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }
}

fn data_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Data(msg.into())
}

/// Reads a headed CSV. Every column except `label_column` must be numeric;
/// labels are encoded 0..c-1 in order of first appearance.
pub fn load_csv(path: &Path, label_column: &str) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    read_csv(file, label_column).map_err(|e| match e {
        HarnessError::Data(msg) => data_err(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn read_csv(reader: impl std::io::Read, label_column: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| data_err(e.to_string()))?.clone();
    if headers.is_empty() {
        return Err(data_err("missing header row"));
    }
    let label_idx = headers
        .iter()
        .position(|h| h.trim() == label_column)
        .ok_or_else(|| data_err(format!("no column named '{label_column}'")))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.trim().to_string())
        .collect();
    if feature_names.is_empty() {
        return Err(data_err("no feature columns"));
    }

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut class_index: HashMap<String, usize> = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| data_err(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        for (i, field) in record.iter().enumerate() {
            if i == label_idx {
                let name = field.trim().to_string();
                let next = class_names.len();
                let id = *class_index.entry(name.clone()).or_insert_with(|| {
                    class_names.push(name);
                    next
                });
                labels.push(id);
            } else {
                let v: f64 = field.trim().parse().map_err(|_| {
                    data_err(format!(
                        "line {line}, column '{}': cannot parse '{field}' as a number",
                        &headers[i]
                    ))
                })?;
                if !v.is_finite() {
                    return Err(data_err(format!(
                        "line {line}, column '{}': non-finite value '{field}'",
                        &headers[i]
                    )));
                }
                values.push(v);
            }
        }
    }
    if labels.is_empty() {
        return Err(data_err("no data rows"));
    }
    Ok(Dataset {
        features: Matrix::from_row_slice(labels.len(), feature_names.len(), &values),
        labels,
        class_names,
        feature_names,
        label_column: label_column.to_string(),
    })
}

/// Writes features then the label column. Values use the shortest decimal
/// form that parses back to the same bits.
pub fn write_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut wtr = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let io = |e: csv::Error| data_err(format!("{}: {e}", path.display()));
    let mut header = dataset.feature_names.clone();
    header.push(dataset.label_column.clone());
    wtr.write_record(&header).map_err(io)?;
    for (r, &label) in dataset.labels.iter().enumerate() {
        let mut row: Vec<String> = dataset.features.row(r).iter().map(|v| v.to_string()).collect();
        row.push(dataset.class_names[label].clone());
        wtr.write_record(&row).map_err(io)?;
    }
    wtr.flush().map_err(|e| HarnessError::io(path, e))?;
    Ok(())
}

/// Gaussian blobs: class means are standard normal points, rows add
/// isotropic noise of standard deviation `spread`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub classes: usize,
    pub dims: usize,
    pub rows: usize,
    pub spread: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.classes < 2 {
            return Err(HarnessError::Config("synthetic data needs at least 2 classes".into()));
        }
        if self.dims == 0 || self.rows == 0 {
            return Err(HarnessError::Config("synthetic data needs rows and dims >= 1".into()));
        }
        if !(self.spread >= 0.0 && self.spread.is_finite()) {
            return Err(HarnessError::Config("synthetic_spread must be >= 0".into()));
        }
        Ok(())
    }
}

pub fn make_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let means = Matrix::from_fn(spec.classes, spec.dims, |_, _| StandardNormal.sample(&mut rng));
    // balanced classes, shuffled so any prefix is mixed
    let mut labels: Vec<usize> = (0..spec.rows).map(|i| i % spec.classes).collect();
    let order = index::sample(&mut rng, spec.rows, spec.rows);
    labels = order.iter().map(|i| labels[i]).collect();
    let mut features = Matrix::zeros(spec.rows, spec.dims);
    for (r, &label) in labels.iter().enumerate() {
        for c in 0..spec.dims {
            let z: f64 = StandardNormal.sample(&mut rng);
            features[(r, c)] = means[(label, c)] + spec.spread * z;
        }
    }
    Ok(Dataset {
        features,
        labels,
        class_names: (0..spec.classes).map(|k| format!("c{k}")).collect(),
        feature_names: (0..spec.dims).map(|k| format!("x{k}")).collect(),
        label_column: "label".into(),
    })
}

/// `n_institutions` disjoint sorted index sets of `rows_each` rows, drawn
/// without replacement.
pub fn partition(n_rows: usize, n_institutions: usize, rows_each: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let needed = n_institutions
        .checked_mul(rows_each)
        .ok_or_else(|| HarnessError::Config("partition size overflows".into()))?;
    if needed > n_rows {
        return Err(HarnessError::Config(format!(
            "{n_institutions} institutions x {rows_each} rows needs {needed} rows, dataset has {n_rows}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drawn = index::sample(&mut rng, n_rows, needed).into_vec();
    Ok(drawn
        .chunks(rows_each.max(1))
        .take(n_institutions)
        .map(|chunk| {
            let mut part = chunk.to_vec();
            part.sort_unstable();
            part
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "a,b,label\n1,2,x\n3,oops,y\n";
        let err = read_csv(text.as_bytes(), "label").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3") && msg.contains("'b'"), "{msg}");
    }

    #[test]
    fn missing_label_column() {
        let err = read_csv("a,b\n1,2\n".as_bytes(), "label").unwrap_err();
        assert!(err.to_string().contains("label"));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(read_csv("a,label\n1,x\n2,3,y\n".as_bytes(), "label").is_err());
    }

    #[test]
    fn nonfinite_rejected() {
        assert!(read_csv("a,label\nNaN,x\n".as_bytes(), "label").is_err());
    }

    #[test]
    fn label_column_may_be_anywhere() {
        let d = read_csv("y,a,b\nq,1,2\nr,3,4\n".as_bytes(), "y").unwrap();
        assert_eq!(d.feature_names, vec!["a", "b"]);
        assert_eq!(d.features, Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
        assert_eq!(d.labels, vec![0, 1]);
    }

    #[test]
    fn oversubscribed_partition_rejected() {
        assert!(partition(10, 3, 4, 0).is_err());
        assert_eq!(partition(12, 3, 4, 0).unwrap().len(), 3);
    }

    #[test]
    fn synthetic_classes_balanced() {
        let spec = SyntheticSpec {
            classes: 3,
            dims: 2,
            rows: 31,
            spread: 1.0,
            seed: 5,
        };
        let d = make_synthetic(&spec).unwrap();
        let counts: Vec<usize> = (0..3).map(|k| d.labels.iter().filter(|&&l| l == k).count()).collect();
        assert_eq!(counts, vec![11, 10, 10]);
    }
}
