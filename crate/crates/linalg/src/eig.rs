use nalgebra::linalg::SymmetricEigen;

use crate::{ensure_finite, ensure_nonempty, fix_column_signs, LinalgError, Matrix, Result, Vector};

/// Relative asymmetry accepted by [`sym_eig`] before it refuses the input.
const SYMMETRY_TOL: f64 = 1e-8;

/// Pivots of the Cholesky factor whose square falls below this fraction of
/// the largest diagonal entry count as a definiteness failure.
const PIVOT_TOL: f64 = 1e-13;

/// Number of x10 escalations after the first automatic ridge.
const RIDGE_ESCALATIONS: usize = 3;

/// Eigenvalues in ascending order with eigenvectors stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct EigPairs {
    pub values: Vector,
    pub vectors: Matrix,
}

impl EigPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn take_smallest(self, k: usize) -> EigPairs {
        EigPairs {
            values: self.values.rows(0, k).into_owned(),
            vectors: self.vectors.columns(0, k).into_owned(),
        }
    }
}

fn ensure_square(m: &Matrix, name: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::Dimension(format!(
            "{name} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Symmetric eigendecomposition, ascending, orthonormal vectors.
///
/// The input is symmetrized as `(s + s^T) / 2` once its asymmetry
/// `||s - s^T||_F` is within `1e-8 * ||s||_F`.
pub fn sym_eig(s: &Matrix) -> Result<EigPairs> {
    ensure_nonempty(s)?;
    ensure_square(s, "symmetric matrix")?;
    ensure_finite(s)?;
    let asym = (s - s.transpose()).norm();
    let tol = SYMMETRY_TOL * s.norm();
    if asym > tol {
        return Err(LinalgError::Asymmetric {
            asymmetry: asym,
            tolerance: tol,
        });
    }
    let sym = (s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);

    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let mut values = Vector::zeros(n);
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = eig.eigenvalues[src];
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    fix_column_signs(&mut vectors);
    Ok(EigPairs { values, vectors })
}

/// Lower Cholesky factor of `b + ridge * I`, refusing matrices whose pivots
/// collapse relative to the largest diagonal entry.
fn cholesky_with_ridge(b: &Matrix, ridge: f64) -> Result<Matrix> {
    let n = b.nrows();
    let shifted = b + Matrix::identity(n, n) * ridge;
    let max_diag = shifted.diagonal().iter().cloned().fold(0.0, f64::max);
    let not_pd = LinalgError::NotPositiveDefinite { ridge };
    if max_diag <= 0.0 {
        return Err(not_pd);
    }
    let l = shifted.cholesky().ok_or(not_pd.clone())?.unpack();
    let min_pivot_sq = l
        .diagonal()
        .iter()
        .map(|d| d * d)
        .fold(f64::INFINITY, f64::min);
    if !(min_pivot_sq > PIVOT_TOL * max_diag) {
        return Err(not_pd);
    }
    Ok(l)
}

/// The `k` smallest eigenpairs of the symmetric-definite pencil
/// `a v = lambda (b + ridge I) v`.
///
/// Reduces through the Cholesky factor `L` of `b + ridge I` to the standard
/// problem `L^-1 a L^-T y = lambda y` and back-transforms `v = L^-T y`.
/// Returned vectors satisfy `v^T (b + ridge I) v = 1`.
pub fn gen_eig_sym(a: &Matrix, b: &Matrix, k: usize, ridge: f64) -> Result<EigPairs> {
    ensure_nonempty(a)?;
    ensure_square(a, "a")?;
    ensure_square(b, "b")?;
    ensure_finite(a)?;
    ensure_finite(b)?;
    let n = a.nrows();
    if b.nrows() != n {
        return Err(LinalgError::Dimension(format!(
            "a is {n}x{n} but b is {}x{}",
            b.nrows(),
            b.ncols()
        )));
    }
    if k == 0 || k > n {
        return Err(LinalgError::Dimension(format!(
            "requested {k} eigenpairs of a {n}x{n} pencil"
        )));
    }
    if !(ridge >= 0.0) || !ridge.is_finite() {
        return Err(LinalgError::Dimension(format!("invalid ridge {ridge}")));
    }

    let l = cholesky_with_ridge(b, ridge)?;
    let sym_a = (a + a.transpose()) * 0.5;
    let half = l
        .solve_lower_triangular(&sym_a)
        .ok_or(LinalgError::NotPositiveDefinite { ridge })?;
    let mut reduced = l
        .solve_lower_triangular(&half.transpose())
        .ok_or(LinalgError::NotPositiveDefinite { ridge })?;
    reduced = (&reduced + reduced.transpose()) * 0.5;

    let standard = sym_eig(&reduced)?.take_smallest(k);
    let mut vectors = l
        .transpose()
        .solve_upper_triangular(&standard.vectors)
        .ok_or(LinalgError::NotPositiveDefinite { ridge })?;

    let shifted = b + Matrix::identity(n, n) * ridge;
    for mut col in vectors.column_iter_mut() {
        let quad = col.dot(&(&shifted * &col));
        col /= quad.sqrt();
    }
    fix_column_signs(&mut vectors);
    Ok(EigPairs {
        values: standard.values,
        vectors,
    })
}

/// [`gen_eig_sym`] with automatic ridge escalation.
///
/// Tries `ridge` first. When `b + ridge I` is not numerically definite the
/// ridge restarts at `1e-10 * trace(b) / n` and grows x10 up to three times
/// before giving up. Returns the pairs with the ridge that succeeded.
pub fn gen_eig_sym_auto(a: &Matrix, b: &Matrix, k: usize, ridge: f64) -> Result<(EigPairs, f64)> {
    match gen_eig_sym(a, b, k, ridge) {
        Ok(p) => return Ok((p, ridge)),
        Err(LinalgError::NotPositiveDefinite { .. }) => {}
        Err(e) => return Err(e),
    }
    let n = b.nrows() as f64;
    let mut eps = (1e-10 * b.trace() / n).max(ridge);
    if !(eps > 0.0) {
        eps = 1e-10;
    }
    let mut last = LinalgError::NotPositiveDefinite { ridge: eps };
    for _ in 0..=RIDGE_ESCALATIONS {
        match gen_eig_sym(a, b, k, eps) {
            Ok(p) => return Ok((p, eps)),
            Err(e @ LinalgError::NotPositiveDefinite { .. }) => last = e,
            Err(e) => return Err(e),
        }
        eps *= 10.0;
    }
    Err(last)
}
