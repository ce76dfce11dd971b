use std::fmt;

use crate::{DcaError, Matrix, Result, Vector};

/// One institution's private rows and integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct InstitutionData {
    pub features: Matrix,
    pub labels: Vec<usize>,
    pub num_classes: usize,
}

impl InstitutionData {
    pub fn new(features: Matrix, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(DcaError::InvalidInput("institution has no rows".into()));
        }
        if labels.len() != features.nrows() {
            return Err(DcaError::Dimension(format!(
                "{} labels for {} rows",
                labels.len(),
                features.nrows()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(DcaError::InvalidInput(format!(
                "label {bad} outside 0..{num_classes}"
            )));
        }
        Ok(Self {
            features,
            labels,
            num_classes,
        })
    }

    pub fn rows(&self) -> usize {
        self.features.nrows()
    }

    /// Labels expanded to an n x num_classes indicator matrix.
    pub fn one_hot(&self) -> Matrix {
        crate::models::one_hot(&self.labels, self.num_classes)
    }
}

/// Intermediate representations shared by one institution: the reduced
/// private rows and the reduced anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct Intermediate {
    pub data: Matrix,
    pub anchor: Matrix,
}

impl Intermediate {
    pub fn dim(&self) -> usize {
        self.anchor.ncols()
    }
}

/// Everything the analyst receives. Raw features never enter this type.
#[derive(Debug, Clone, PartialEq)]
pub struct IntermediateBundle {
    institutions: Vec<Intermediate>,
}

impl IntermediateBundle {
    pub fn new(institutions: Vec<Intermediate>) -> Result<Self> {
        let first = institutions
            .first()
            .ok_or_else(|| DcaError::InvalidInput("bundle needs at least one institution".into()))?;
        let r = first.anchor.nrows();
        if r == 0 {
            return Err(DcaError::Dimension("anchor has no rows".into()));
        }
        for (i, inst) in institutions.iter().enumerate() {
            if inst.anchor.nrows() != r {
                return Err(DcaError::Dimension(format!(
                    "institution {i} has {} anchor rows, expected {r}",
                    inst.anchor.nrows()
                )));
            }
            if inst.anchor.ncols() == 0 {
                return Err(DcaError::Dimension(format!(
                    "institution {i} has an empty intermediate dimension"
                )));
            }
            if inst.data.ncols() != inst.anchor.ncols() {
                return Err(DcaError::Dimension(format!(
                    "institution {i}: data has {} columns, anchor has {}",
                    inst.data.ncols(),
                    inst.anchor.ncols()
                )));
            }
        }
        Ok(Self { institutions })
    }

    /// Bundle with anchor images only; the data slots hold zero rows.
    pub fn from_anchors(anchors: Vec<Matrix>) -> Result<Self> {
        Self::new(
            anchors
                .into_iter()
                .map(|a| Intermediate {
                    data: Matrix::zeros(0, a.ncols()),
                    anchor: a,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.institutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.institutions.is_empty()
    }

    pub fn institutions(&self) -> &[Intermediate] {
        &self.institutions
    }

    pub fn anchor_rows(&self) -> usize {
        self.institutions[0].anchor.nrows()
    }

    /// Intermediate dimension of every institution, in order.
    pub fn dims(&self) -> Vec<usize> {
        self.institutions.iter().map(Intermediate::dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims().iter().sum()
    }

    /// Column offset of each institution's block in the stacked vector.
    pub fn offsets(&self) -> Vec<usize> {
        self.dims()
            .iter()
            .scan(0, |acc, &d| {
                let start = *acc;
                *acc += d;
                Some(start)
            })
            .collect()
    }

    /// Horizontal concatenation of the anchor images.
    pub fn stacked_anchor(&self) -> Matrix {
        let r = self.anchor_rows();
        let mut w = Matrix::zeros(r, self.total_dim());
        for (inst, off) in self.institutions.iter().zip(self.offsets()) {
            w.columns_mut(off, inst.dim()).copy_from(&inst.anchor);
        }
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CollabMethod {
    MinPerturb,
    Gep,
    QrSvd,
}

impl fmt::Display for CollabMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CollabMethod::MinPerturb => "min_perturb",
            CollabMethod::Gep => "gep",
            CollabMethod::QrSvd => "qr_svd",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvdVariant {
    Exact,
    Randomized {
        oversample: usize,
        power_iters: usize,
        seed: u64,
    },
}

/// Per-institution collaborative maps `G_i` (m~_i x m^).
#[derive(Debug, Clone, PartialEq)]
pub struct CollaborativeMaps {
    pub maps: Vec<Matrix>,
    /// Ascending generalized eigenvalues; empty for the min-perturbation method.
    pub eigenvalues: Vector,
    pub method: CollabMethod,
    /// Ridge added to `B` by the generalized eigensolver (0 when unused).
    pub ridge: f64,
}

impl CollaborativeMaps {
    pub fn collab_dim(&self) -> usize {
        self.maps.first().map_or(0, |g| g.ncols())
    }

    /// The j-th column of every map stacked into one vector, i.e. `v_j`.
    pub fn stacked_column(&self, j: usize) -> Vector {
        let total: usize = self.maps.iter().map(|g| g.nrows()).sum();
        let mut v = Vector::zeros(total);
        let mut off = 0;
        for g in &self.maps {
            v.rows_mut(off, g.nrows()).copy_from(&g.column(j));
            off += g.nrows();
        }
        v
    }

    /// `x * G_i`, optionally scaling column j by `weights[j]`.
    pub fn project(&self, institution: usize, x: &Matrix, weights: Option<&Vector>) -> Result<Matrix> {
        let g = self.maps.get(institution).ok_or(DcaError::IndexOutOfRange {
            index: institution,
            len: self.maps.len(),
        })?;
        if x.ncols() != g.nrows() {
            return Err(DcaError::Dimension(format!(
                "institution {institution}: input has {} columns, map expects {}",
                x.ncols(),
                g.nrows()
            )));
        }
        let mut out = x * g;
        if let Some(w) = weights {
            if w.len() != g.ncols() {
                return Err(DcaError::Dimension(format!(
                    "{} weights for {} collaborative features",
                    w.len(),
                    g.ncols()
                )));
            }
            for (j, mut col) in out.column_iter_mut().enumerate() {
                col *= w[j];
            }
        }
        Ok(out)
    }
}

/// Collaborative representations `X^_i = X~_i G_i` of every institution.
#[derive(Debug, Clone, PartialEq)]
pub struct CollaborativeData {
    pub reps: Vec<Matrix>,
    pub applied_weights: Option<Vector>,
}
