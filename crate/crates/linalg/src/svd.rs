use crate::{dominant_sign, ensure_finite, ensure_nonempty, Matrix, Result, Vector};

/// Singular values below `DEFAULT_RCOND * sigma_max` are treated as zero by
/// [`pseudo_inverse`].
pub const DEFAULT_RCOND: f64 = 1e-12;

/// Thin singular value decomposition `m = u * diag(sigma) * v^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    /// Left singular vectors, one per column.
    pub u: Matrix,
    /// Singular values, descending and nonnegative.
    pub sigma: Vector,
    /// Right singular vectors, one per column (not transposed).
    pub v: Matrix,
}

impl SvdResult {
    pub fn recompose(&self) -> Matrix {
        let mut us = self.u.clone();
        for (k, mut col) in us.column_iter_mut().enumerate() {
            col *= self.sigma[k];
        }
        us * self.v.transpose()
    }

    /// Number of singular values above `rcond * sigma_max`.
    pub fn rank(&self, rcond: f64) -> usize {
        let smax = self.sigma.iter().cloned().fold(0.0, f64::max);
        if smax == 0.0 {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s > rcond * smax).count()
    }

    /// Keep the leading `k` triplets.
    pub fn truncate(self, k: usize) -> SvdResult {
        let k = k.min(self.sigma.len());
        SvdResult {
            u: self.u.columns(0, k).into_owned(),
            sigma: self.sigma.rows(0, k).into_owned(),
            v: self.v.columns(0, k).into_owned(),
        }
    }
}

/// Sweeps of the one-sided Jacobi iteration before giving up on convergence.
const MAX_SWEEPS: usize = 80;

/// Full thin SVD: `min(rows, cols)` triplets sorted by descending singular
/// value. Each right singular vector has its largest-magnitude entry made
/// positive, with the matching left vector flipped alongside.
///
/// Computed by one-sided (Hestenes) Jacobi rotations on the columns of the
/// taller orientation, which stays accurate for rank-deficient input.
pub fn svd_thin(m: &Matrix) -> Result<SvdResult> {
    ensure_nonempty(m)?;
    ensure_finite(m)?;
    let (mut u, mut sigma, mut v) = if m.nrows() >= m.ncols() {
        one_sided_jacobi(m.clone())
    } else {
        let (u, s, v) = one_sided_jacobi(m.transpose());
        (v, s, u)
    };

    let k = sigma.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));
    u = Matrix::from_fn(u.nrows(), k, |r, c| u[(r, order[c])]);
    v = Matrix::from_fn(v.nrows(), k, |r, c| v[(r, order[c])]);
    sigma = Vector::from_iterator(k, order.iter().map(|&i| sigma[i]));

    for j in 0..k {
        if dominant_sign(v.column(j).iter()) < 0.0 {
            v.column_mut(j).neg_mut();
            u.column_mut(j).neg_mut();
        }
    }
    Ok(SvdResult { u, sigma, v })
}

/// Orthogonalizes the columns of a tall `a` (rows >= cols) in place.
/// Returns unsorted `(u, sigma, v)` with `a = u diag(sigma) v^T`.
fn one_sided_jacobi(mut a: Matrix) -> (Matrix, Vector, Matrix) {
    let (rows, cols) = a.shape();
    let mut v = Matrix::identity(cols, cols);
    {
        let av = a.as_mut_slice();
        let vv = v.as_mut_slice();
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..cols {
                for q in (p + 1)..cols {
                    let (alpha, beta, gamma) = {
                        let cp = &av[p * rows..(p + 1) * rows];
                        let cq = &av[q * rows..(q + 1) * rows];
                        let mut alpha = 0.0;
                        let mut beta = 0.0;
                        let mut gamma = 0.0;
                        for (x, y) in cp.iter().zip(cq) {
                            alpha += x * x;
                            beta += y * y;
                            gamma += x * y;
                        }
                        (alpha, beta, gamma)
                    };
                    if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    rotate_columns(av, rows, p, q, c, s);
                    rotate_columns(vv, cols, p, q, c, s);
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let mut sigma = Vector::zeros(cols);
    let mut zero_cols = Vec::new();
    for (j, mut col) in a.column_iter_mut().enumerate() {
        let norm = col.norm();
        sigma[j] = norm;
        if norm > 0.0 {
            col /= norm;
        } else {
            zero_cols.push(j);
        }
    }
    complete_orthonormal(&mut a, &zero_cols);
    (a, sigma, v)
}

/// `(x_p, x_q) <- (c x_p - s x_q, s x_p + c x_q)` on columns of a
/// column-major buffer with `len` rows.
fn rotate_columns(buf: &mut [f64], len: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = buf.split_at_mut(q * len);
    let cp = &mut head[p * len..(p + 1) * len];
    let cq = &mut tail[..len];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Replaces the listed columns with unit vectors orthogonal to every other
/// column, drawn from the standard basis by twice-repeated Gram-Schmidt.
fn complete_orthonormal(u: &mut Matrix, fill: &[usize]) {
    if fill.is_empty() {
        return;
    }
    let rows = u.nrows();
    let mut done: Vec<usize> = (0..u.ncols()).filter(|j| !fill.contains(j)).collect();
    let mut basis = 0;
    for &j in fill {
        while basis < rows {
            let mut cand = Vector::zeros(rows);
            cand[basis] = 1.0;
            basis += 1;
            for _ in 0..2 {
                for &k in &done {
                    let proj = u.column(k).dot(&cand);
                    cand -= u.column(k) * proj;
                }
            }
            let norm = cand.norm();
            if norm > 0.5 {
                u.set_column(j, &(cand / norm));
                done.push(j);
                break;
            }
        }
    }
}

/// Moore-Penrose pseudo-inverse with the default relative cutoff.
pub fn pseudo_inverse(m: &Matrix) -> Result<Matrix> {
    pseudo_inverse_with(m, DEFAULT_RCOND)
}

pub fn pseudo_inverse_with(m: &Matrix, rcond: f64) -> Result<Matrix> {
    let svd = svd_thin(m)?;
    let smax = svd.sigma.iter().cloned().fold(0.0, f64::max);
    let cutoff = rcond * smax;
    let mut v_scaled = svd.v.clone();
    for (k, mut col) in v_scaled.column_iter_mut().enumerate() {
        let s = svd.sigma[k];
        if s > cutoff && s > 0.0 {
            col /= s;
        } else {
            col.fill(0.0);
        }
    }
    Ok(v_scaled * svd.u.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn diagonal_values() {
        let s = svd_thin(&dmatrix![3.0, 0.0; 0.0, 1.0]).unwrap();
        assert!((s.sigma[0] - 3.0).abs() < 1e-14);
        assert!((s.sigma[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn permuted_diagonal() {
        let m = dmatrix![0.0, 2.0; 1.0, 0.0];
        let s = svd_thin(&m).unwrap();
        assert!((s.sigma[0] - 2.0).abs() < 1e-14);
        assert!((s.sigma[1] - 1.0).abs() < 1e-14);
        assert!((s.recompose() - m).amax() < 1e-14);
    }

    #[test]
    fn wide_matrix_shapes() {
        let m = dmatrix![1.0, 2.0, 3.0; 4.0, 5.0, 6.0];
        let s = svd_thin(&m).unwrap();
        assert_eq!(s.u.shape(), (2, 2));
        assert_eq!(s.v.shape(), (3, 2));
        assert!((s.recompose() - m).amax() < 1e-13);
    }

    #[test]
    fn pinv_identity_and_scalar() {
        let p = pseudo_inverse(&Matrix::identity(4, 4)).unwrap();
        assert!((p - Matrix::identity(4, 4)).amax() < 1e-15);
        let p = pseudo_inverse(&dmatrix![2.0]).unwrap();
        assert!((p[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pinv_of_zero_is_zero() {
        let p = pseudo_inverse(&Matrix::zeros(3, 2)).unwrap();
        assert_eq!(p.shape(), (2, 3));
        assert_eq!(p.amax(), 0.0);
    }

    #[test]
    fn rank_deficient_keeps_orthonormal_factors() {
        let x = dmatrix![1.0, 2.0; 2.0, 4.0; 3.0, 6.0; 0.0, 0.0];
        let s = svd_thin(&x).unwrap();
        assert!((s.recompose() - &x).amax() < 1e-14);
        assert!((s.u.transpose() * &s.u - Matrix::identity(2, 2)).amax() < 1e-14);
        assert!((s.v.transpose() * &s.v - Matrix::identity(2, 2)).amax() < 1e-14);
    }

    #[test]
    fn rank_counts_above_cutoff() {
        let m = dmatrix![1.0, 2.0; 2.0, 4.0; 3.0, 6.0];
        assert_eq!(svd_thin(&m).unwrap().rank(DEFAULT_RCOND), 1);
    }
}
