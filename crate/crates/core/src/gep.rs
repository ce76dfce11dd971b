//! Collaborative maps from the symmetric-definite pencil `(A, B)`.
//!
//! Stacking the j-th columns of all maps into `v_j`, the total pairwise
//! disagreement of the anchor images is the quadratic form `v_j^T A v_j`,
//! and the norm constraint on the anchor images is `v_j^T B v_j = 1`. The
//! constrained minimizers are generalized eigenvectors, and the objective
//! at each one equals its eigenvalue.

use dca_linalg::gen_eig_sym_auto;

use crate::{CollabMethod, CollaborativeMaps, DcaError, IntermediateBundle, Matrix, Result};

/// `A` has diagonal blocks `2(N-1) X_i^T X_i` and off-diagonal blocks
/// `-2 X_i^T X_j`; `B` is block-diagonal with `X_i^T X_i`, where `X_i` is
/// institution i's anchor image.
pub fn build_gep_matrices(bundle: &IntermediateBundle) -> (Matrix, Matrix) {
    let n_inst = bundle.len();
    let total = bundle.total_dim();
    let offsets = bundle.offsets();
    let insts = bundle.institutions();
    let diag_scale = 2.0 * (n_inst as f64 - 1.0);

    let mut a = Matrix::zeros(total, total);
    let mut b = Matrix::zeros(total, total);
    for i in 0..n_inst {
        let xi = &insts[i].anchor;
        let gram = xi.transpose() * xi;
        let (oi, di) = (offsets[i], insts[i].dim());
        a.view_mut((oi, oi), (di, di)).copy_from(&(&gram * diag_scale));
        b.view_mut((oi, oi), (di, di)).copy_from(&gram);
        for j in (i + 1)..n_inst {
            let cross = xi.transpose() * &insts[j].anchor * -2.0;
            let (oj, dj) = (offsets[j], insts[j].dim());
            a.view_mut((oi, oj), (di, dj)).copy_from(&cross);
            a.view_mut((oj, oi), (dj, di)).copy_from(&cross.transpose());
        }
    }
    (a, b)
}

/// Splits stacked column vectors into per-institution maps by block size.
pub(crate) fn split_blocks(vectors: &Matrix, dims: &[usize]) -> Vec<Matrix> {
    let mut off = 0;
    dims.iter()
        .map(|&d| {
            let g = vectors.rows(off, d).into_owned();
            off += d;
            g
        })
        .collect()
}

pub(crate) fn check_collab_dim(collab_dim: usize, limit: usize) -> Result<()> {
    if collab_dim == 0 || collab_dim > limit {
        return Err(DcaError::Dimension(format!(
            "collaborative dimension {collab_dim} outside 1..={limit}"
        )));
    }
    Ok(())
}

/// The assembled pencil, ready to solve for any collaborative dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct GepSystem {
    pub a: Matrix,
    pub b: Matrix,
    dims: Vec<usize>,
}

impl GepSystem {
    pub fn build(bundle: &IntermediateBundle) -> Self {
        let (a, b) = build_gep_matrices(bundle);
        Self {
            a,
            b,
            dims: bundle.dims(),
        }
    }

    /// The `collab_dim` smallest generalized eigenpairs, split into
    /// per-institution maps. `ridge` is the initial shift on `B`; when `B`
    /// is numerically singular the eigensolver escalates it automatically.
    pub fn solve(&self, collab_dim: usize, ridge: f64) -> Result<CollaborativeMaps> {
        check_collab_dim(collab_dim, self.a.nrows())?;
        let (pairs, ridge_used) = gen_eig_sym_auto(&self.a, &self.b, collab_dim, ridge)?;
        Ok(CollaborativeMaps {
            maps: split_blocks(&pairs.vectors, &self.dims),
            eigenvalues: pairs.values,
            method: CollabMethod::Gep,
            ridge: ridge_used,
        })
    }
}

/// [`GepSystem::build`] followed by [`GepSystem::solve`].
pub fn solve_collab_gep(
    bundle: &IntermediateBundle,
    collab_dim: usize,
    ridge: f64,
) -> Result<CollaborativeMaps> {
    check_collab_dim(collab_dim, bundle.total_dim())?;
    GepSystem::build(bundle).solve(collab_dim, ridge)
}

/// Total pairwise disagreement of the j-th collaborative anchor column,
/// summed literally over all ordered institution pairs.
pub fn objective_value(bundle: &IntermediateBundle, maps: &CollaborativeMaps, j: usize) -> Result<f64> {
    let collab_dim = maps.collab_dim();
    if j >= collab_dim {
        return Err(DcaError::IndexOutOfRange {
            index: j,
            len: collab_dim,
        });
    }
    if maps.maps.len() != bundle.len() {
        return Err(DcaError::Dimension(format!(
            "{} maps for {} institutions",
            maps.maps.len(),
            bundle.len()
        )));
    }
    let images = bundle
        .institutions()
        .iter()
        .zip(&maps.maps)
        .map(|(inst, g)| {
            if g.nrows() != inst.dim() {
                return Err(DcaError::Dimension(format!(
                    "map has {} rows for intermediate dimension {}",
                    g.nrows(),
                    inst.dim()
                )));
            }
            Ok(&inst.anchor * g.column(j))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut total = 0.0;
    for a in &images {
        for b in &images {
            total += (a - b).norm_squared();
        }
    }
    Ok(total)
}
