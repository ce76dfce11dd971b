//! The pencil `(A, B)` after orthogonalizing every anchor image.
//!
//! With `X_i = Q_i R_i`, substituting `v'_i = R_i g_i` turns `B` into the
//! identity and `A` into `2N I - 2 W_Q^T W_Q` for `W_Q = [Q_1 ... Q_N]`, so
//! the smallest generalized eigenvalues are `2N - 2 sigma^2` for the largest
//! singular values of `W_Q`, and `g_i = R_i^-1 v'_i`.

use dca_linalg::{fix_column_signs, qr_thin, randomized_svd, svd_thin};

use crate::gep::{check_collab_dim, split_blocks};
use crate::{CollabMethod, CollaborativeMaps, DcaError, IntermediateBundle, Matrix, Result, SvdVariant, Vector};

/// Relative size of the smallest `R_i` diagonal entry below which `R_i` is
/// treated as singular.
const R_RCOND: f64 = 1e-12;

/// Orthogonalized anchor images `W_Q` and the triangular factors `R_i`.
#[derive(Debug, Clone)]
pub struct QrSvdSystem<'a> {
    bundle: &'a IntermediateBundle,
    pub w_q: Matrix,
    pub factors: Vec<Matrix>,
}

impl<'a> QrSvdSystem<'a> {
    pub fn build(bundle: &'a IntermediateBundle) -> Result<Self> {
        let r = bundle.anchor_rows();
        let mut w_q = Matrix::zeros(r, bundle.total_dim());
        let mut factors = Vec::with_capacity(bundle.len());
        for ((i, inst), off) in bundle.institutions().iter().enumerate().zip(bundle.offsets()) {
            if r < inst.dim() {
                return Err(DcaError::Dimension(format!(
                    "institution {i}: {r} anchor rows cannot support a thin QR of width {}",
                    inst.dim()
                )));
            }
            let (q, rr) = qr_thin(&inst.anchor)?;
            let diag = rr.diagonal();
            let dmax = diag.amax();
            if !(diag.min() > R_RCOND * dmax) {
                return Err(DcaError::Rank(format!(
                    "institution {i}: anchor image is rank deficient (R diagonal min {:.3e}, max {:.3e}); \
                     use the generalized eigenvalue solver, which regularizes B",
                    diag.min(),
                    dmax
                )));
            }
            w_q.columns_mut(off, inst.dim()).copy_from(&q);
            factors.push(rr);
        }
        Ok(Self {
            bundle,
            w_q,
            factors,
        })
    }

    pub fn solve(&self, collab_dim: usize, variant: SvdVariant) -> Result<CollaborativeMaps> {
        let bundle = self.bundle;
        let dims = bundle.dims();
        let total = bundle.total_dim();
        check_collab_dim(collab_dim, bundle.anchor_rows().min(total))?;

        let svd = match variant {
            SvdVariant::Exact => svd_thin(&self.w_q)?.truncate(collab_dim),
            SvdVariant::Randomized {
                oversample,
                power_iters,
                seed,
            } => randomized_svd(&self.w_q, collab_dim, oversample, power_iters, seed)?,
        };

        let n = bundle.len() as f64;
        let eigenvalues = Vector::from_iterator(
            collab_dim,
            svd.sigma.iter().map(|s| -2.0 * (s * s) + 2.0 * n),
        );

        let mut stacked = Matrix::zeros(total, collab_dim);
        let mut off = 0;
        for (rr, &d) in self.factors.iter().zip(&dims) {
            let block = svd.v.rows(off, d).into_owned();
            let g = rr
                .solve_upper_triangular(&block)
                .ok_or_else(|| DcaError::Rank("triangular factor is singular".into()))?;
            stacked.view_mut((off, 0), (d, collab_dim)).copy_from(&g);
            off += d;
        }

        // v_j^T B v_j = sum_i ||X_i g_ij||^2; drift through R^-1 is removed here.
        for j in 0..collab_dim {
            let mut quad = 0.0;
            let mut off = 0;
            for inst in bundle.institutions() {
                let d = inst.dim();
                quad += (&inst.anchor * stacked.view((off, j), (d, 1))).norm_squared();
                off += d;
            }
            stacked.column_mut(j).scale_mut(1.0 / quad.sqrt());
        }
        fix_column_signs(&mut stacked);

        Ok(CollaborativeMaps {
            maps: split_blocks(&stacked, &dims),
            eigenvalues,
            method: CollabMethod::QrSvd,
            ridge: 0.0,
        })
    }
}

/// [`QrSvdSystem::build`] followed by [`QrSvdSystem::solve`].
pub fn solve_collab_qr_svd(
    bundle: &IntermediateBundle,
    collab_dim: usize,
    variant: SvdVariant,
) -> Result<CollaborativeMaps> {
    check_collab_dim(collab_dim, bundle.anchor_rows().min(bundle.total_dim()))?;
    QrSvdSystem::build(bundle)?.solve(collab_dim, variant)
}
