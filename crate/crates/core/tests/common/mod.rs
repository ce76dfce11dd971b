#![allow(dead_code)]

use dca_core::{IntermediateBundle, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Random full-rank anchor images: N in 2..=6, dims in 2..=6, r in 8..=32.
pub fn random_bundle(seed: u64) -> IntermediateBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=6);
    let r = rng.random_range(8..=32);
    let anchors = (0..n)
        .map(|_| {
            let d = rng.random_range(2..=6);
            gaussian(r, d, &mut rng)
        })
        .collect();
    IntermediateBundle::from_anchors(anchors).unwrap()
}

/// `W^T W` by explicit triple loop.
pub fn gram_by_loops(w: &Matrix) -> Matrix {
    let (r, c) = w.shape();
    Matrix::from_fn(c, c, |i, j| (0..r).map(|k| w[(k, i)] * w[(k, j)]).sum())
}

/// Cyclic Jacobi eigen-decomposition, ascending.
pub fn jacobi_eig(s: &Matrix) -> (Vec<f64>, Matrix) {
    let n = s.nrows();
    let mut a = s.clone();
    let mut v = Matrix::identity(n, n);
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
        }
        if off < 1e-30 * a.norm_squared().max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[(p, q)] == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * x - sn * y;
                    a[(k, q)] = sn * x + c * y;
                }
                for k in 0..n {
                    let (x, y) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * x - sn * y;
                    a[(q, k)] = sn * x + c * y;
                }
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * x - sn * y;
                    v[(k, q)] = sn * x + c * y;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&x, &y| a[(x, x)].total_cmp(&a[(y, y)]));
    let vals = idx.iter().map(|&i| a[(i, i)]).collect();
    let vecs = Matrix::from_fn(n, n, |r, c| v[(r, idx[c])]);
    (vals, vecs)
}

/// Smallest generalized eigenpairs via `B^{-1/2} A B^{-1/2}`, both pieces by
/// Jacobi; vectors are B-normalized.
pub fn oracle_gen_eig(a: &Matrix, b: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.nrows();
    let (bvals, bvecs) = jacobi_eig(b);
    let d = Matrix::from_fn(n, n, |i, j| if i == j { 1.0 / bvals[i].sqrt() } else { 0.0 });
    let inv_sqrt = &bvecs * d * bvecs.transpose();
    let (vals, y) = jacobi_eig(&(&inv_sqrt * a * &inv_sqrt));
    (vals, inv_sqrt * y)
}

/// Modified Gram-Schmidt orthonormal basis of the columns.
pub fn gram_schmidt(x: &Matrix) -> Matrix {
    let mut q = x.clone();
    for j in 0..q.ncols() {
        for _ in 0..2 {
            for k in 0..j {
                let proj = q.column(k).dot(&q.column(j));
                let qk = q.column(k).into_owned();
                q.column_mut(j).axpy(-proj, &qk, 1.0);
            }
        }
        let norm = q.column(j).norm();
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    q
}

/// Column-space projector `Q Q^T` of the columns.
pub fn projector(x: &Matrix) -> Matrix {
    let q = gram_schmidt(x);
    &q * q.transpose()
}
