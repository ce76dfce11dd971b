use crate::{ensure_finite, ensure_nonempty, LinalgError, Matrix, Result};

/// Thin Householder QR of a tall matrix, `m = q * r` with `q` of size
/// rows x cols and `r` upper triangular cols x cols.
///
/// The diagonal of `r` is made nonnegative by flipping matching columns of
/// `q`, which pins the otherwise free sign of each Householder reflection.
pub fn qr_thin(m: &Matrix) -> Result<(Matrix, Matrix)> {
    ensure_nonempty(m)?;
    ensure_finite(m)?;
    let (rows, cols) = m.shape();
    if rows < cols {
        return Err(LinalgError::Dimension(format!(
            "thin QR needs rows >= cols, got {rows}x{cols}"
        )));
    }
    let qr = m.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for k in 0..cols {
        if r[(k, k)] < 0.0 {
            r.row_mut(k).neg_mut();
            q.column_mut(k).neg_mut();
        }
    }
    Ok((q, r))
}
