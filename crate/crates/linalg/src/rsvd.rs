//! Randomized range-finder SVD.
//!
//! A Gaussian sketch `Y = M * Omega` with `k + oversample` columns is
//! orthonormalized, optionally refined by power iterations (re-orthonormalized
//! after every multiply), and the small projected matrix `Q^T M` is
//! decomposed exactly.
//!
//! The sketch is drawn from `ChaCha8Rng::seed_from_u64(seed)` through the
//! ziggurat `StandardNormal` sampler, column by column.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{ensure_finite, ensure_nonempty, qr_thin, svd_thin, LinalgError, Matrix, Result, SvdResult};

pub fn randomized_svd(
    m: &Matrix,
    k: usize,
    oversample: usize,
    power_iters: usize,
    seed: u64,
) -> Result<SvdResult> {
    ensure_nonempty(m)?;
    ensure_finite(m)?;
    let (rows, cols) = m.shape();
    let full = rows.min(cols);
    if k == 0 || k > full {
        return Err(LinalgError::Dimension(format!(
            "target rank {k} outside 1..={full} for a {rows}x{cols} matrix"
        )));
    }
    let sketch = (k + oversample).min(full);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = Matrix::from_fn(cols, sketch, |_, _| StandardNormal.sample(&mut rng));

    let (mut q, _) = qr_thin(&(m * omega))?;
    for _ in 0..power_iters {
        let (z, _) = qr_thin(&(m.transpose() * &q))?;
        let (next, _) = qr_thin(&(m * z))?;
        q = next;
    }

    let small = svd_thin(&(q.transpose() * m))?;
    let lifted = SvdResult {
        u: &q * small.u,
        sigma: small.sigma,
        v: small.v,
    };
    Ok(lifted.truncate(k))
}
