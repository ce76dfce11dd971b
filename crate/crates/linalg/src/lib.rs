//! Dense linear-algebra kernels used by the collaborative-function solvers.
//!
//! Everything here is a pure function of its inputs: thin QR with a
//! nonnegative-diagonal `R`, thin and randomized SVD, symmetric and
//! symmetric-definite generalized eigensolvers, and the Moore-Penrose
//! pseudo-inverse. Matrices are `nalgebra::DMatrix<f64>`.
//!
//! Eigenvectors are sign-normalized so that the entry of largest magnitude
//! is positive. Repeated eigenvalues yield *some* orthonormal basis of the
//! eigenspace; which one is not specified.

mod eig;
mod qr;
mod rsvd;
mod svd;

pub use eig::{gen_eig_sym, gen_eig_sym_auto, sym_eig, EigPairs};
pub use qr::qr_thin;
pub use rsvd::randomized_svd;
pub use svd::{pseudo_inverse, pseudo_inverse_with, svd_thin, SvdResult, DEFAULT_RCOND};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not symmetric: asymmetry {asymmetry:.3e} exceeds tolerance {tolerance:.3e}")]
    Asymmetric { asymmetry: f64, tolerance: f64 },
    #[error("matrix is not positive definite (ridge {ridge:.3e})")]
    NotPositiveDefinite { ridge: f64 },
    #[error("matrix is singular: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

pub(crate) fn ensure_finite(m: &Matrix) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

pub(crate) fn ensure_nonempty(m: &Matrix) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(LinalgError::Dimension(format!(
            "empty matrix {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Sign (+1 or -1) of the largest-magnitude entry; ties resolve to the
/// first such entry and an all-zero slice counts as positive.
pub(crate) fn dominant_sign<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    let mut best = 0.0_f64;
    let mut best_abs = -1.0_f64;
    for &x in values {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = x;
        }
    }
    if best < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Flip the sign of every column whose largest-magnitude entry is negative.
pub fn fix_column_signs(m: &mut Matrix) {
    for mut col in m.column_iter_mut() {
        if dominant_sign(col.iter()) < 0.0 {
            col.neg_mut();
        }
    }
}
