use dca_linalg::{
    gen_eig_sym, pseudo_inverse, qr_thin, randomized_svd, svd_thin, sym_eig, Matrix,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn seeded(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
}

fn orthonormality_error(q: &Matrix) -> f64 {
    (q.transpose() * q - Matrix::identity(q.ncols(), q.ncols())).amax()
}

/// Cyclic Jacobi rotations; slow but shares nothing with the production path.
fn jacobi_eigenvalues(s: &Matrix) -> (Vec<f64>, Matrix) {
    let n = s.nrows();
    let mut a = s.clone();
    let mut v = Matrix::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&x, &y| vals[x].total_cmp(&vals[y]));
    let sorted_v = Matrix::from_fn(n, n, |r, c| v[(r, idx[c])]);
    vals = idx.iter().map(|&i| vals[i]).collect();
    (vals, sorted_v)
}

#[test]
fn qr_recomposes_seeded_tall_matrix() {
    let m = seeded(8, 3, 11);
    let (q, r) = qr_thin(&m).unwrap();
    assert!(orthonormality_error(&q) < 1e-10);
    assert!((&q * &r - &m).amax() <= 1e-10 * m.norm());
    for i in 0..3 {
        assert!(r[(i, i)] >= 0.0);
        for j in 0..i {
            assert_eq!(r[(i, j)], 0.0);
        }
    }
}

#[test]
fn svd_recomposes_seeded_matrix() {
    let m = seeded(6, 4, 12);
    let s = svd_thin(&m).unwrap();
    assert!((s.recompose() - &m).amax() <= 1e-10 * m.norm());
    assert!(orthonormality_error(&s.u) < 1e-10);
    assert!(orthonormality_error(&s.v) < 1e-10);
    for w in s.sigma.as_slice().windows(2) {
        assert!(w[0] >= w[1]);
    }
}

#[test]
fn sym_eig_recovers_constructed_spectrum() {
    let (q, _) = qr_thin(&seeded(5, 5, 13)).unwrap();
    let d = [3.5, -1.0, 0.25, 7.0, 2.0];
    let s = &q * Matrix::from_diagonal(&nalgebra::DVector::from_row_slice(&d)) * q.transpose();
    let e = sym_eig(&s).unwrap();
    let mut sorted = d.to_vec();
    sorted.sort_by(f64::total_cmp);
    for (got, want) in e.values.iter().zip(&sorted) {
        assert!((got - want).abs() < 1e-8);
    }
    for k in 0..5 {
        let v = e.vectors.column(k);
        let resid = (&s * v - v * e.values[k]).norm();
        assert!(resid <= 1e-8 * s.norm());
    }
    assert!(orthonormality_error(&e.vectors) < 1e-10);
}

#[test]
fn gen_eig_with_identity_b_matches_sym_eig() {
    let x = seeded(7, 7, 14);
    let a = &x + x.transpose();
    let plain = sym_eig(&a).unwrap();
    let gen = gen_eig_sym(&a, &Matrix::identity(7, 7), 7, 0.0).unwrap();
    for k in 0..7 {
        assert!((plain.values[k] - gen.values[k]).abs() < 1e-10);
        assert!((gen.vectors.column(k).norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn gen_eig_matches_independent_jacobi_oracle() {
    let xa = seeded(10, 6, 15);
    let xb = seeded(12, 6, 16);
    let a = xa.transpose() * &xa;
    let b = xb.transpose() * &xb;
    let e = gen_eig_sym(&a, &b, 3, 0.0).unwrap();

    // B^{-1/2} A B^{-1/2} via a Jacobi decomposition of B.
    let (bvals, bvecs) = jacobi_eigenvalues(&b);
    let inv_sqrt = &bvecs
        * Matrix::from_diagonal(&nalgebra::DVector::from_iterator(
            6,
            bvals.iter().map(|l| 1.0 / l.sqrt()),
        ))
        * bvecs.transpose();
    let (oracle, _) = jacobi_eigenvalues(&(&inv_sqrt * &a * &inv_sqrt));

    for j in 0..3 {
        assert!(
            (e.values[j] - oracle[j]).abs() <= 1e-8 * oracle[j].abs().max(1.0),
            "{} vs {}",
            e.values[j],
            oracle[j]
        );
        let v = e.vectors.column(j);
        let resid = (&a * v - (&b * v) * e.values[j]).norm();
        assert!(resid <= 1e-8 * a.norm());
        assert!((v.dot(&(&b * v)) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn pinv_of_tall_full_rank_is_left_inverse() {
    let m = seeded(10, 4, 17);
    let p = pseudo_inverse(&m).unwrap();
    assert!((&p * &m - Matrix::identity(4, 4)).amax() < 1e-8);
}

#[test]
fn pinv_satisfies_penrose_conditions_on_rank_deficient_input() {
    let m = seeded(8, 2, 18) * seeded(2, 5, 19);
    let p = pseudo_inverse(&m).unwrap();
    let tol = 1e-8 * m.norm();
    assert!((&m * &p * &m - &m).amax() < tol);
    assert!((&p * &m * &p - &p).amax() < tol);
    let mp = &m * &p;
    let pm = &p * &m;
    assert!((&mp - mp.transpose()).amax() < tol);
    assert!((&pm - pm.transpose()).amax() < tol);
}

#[test]
fn rank_deficient_randomized_svd_matches_exact() {
    let m = seeded(40, 3, 20) * seeded(3, 25, 21);
    let exact = svd_thin(&m).unwrap();
    let approx = randomized_svd(&m, 3, 2, 1, 22).unwrap();
    for j in 0..3 {
        assert!((approx.sigma[j] - exact.sigma[j]).abs() <= 1e-6 * exact.sigma[j]);
    }
}

#[test]
fn operations_are_pure() {
    let m = seeded(9, 5, 23);
    assert_eq!(svd_thin(&m).unwrap(), svd_thin(&m).unwrap());
    assert_eq!(qr_thin(&m).unwrap(), qr_thin(&m).unwrap());
    let s = m.transpose() * &m;
    assert_eq!(sym_eig(&s).unwrap(), sym_eig(&s).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn factorizations_recompose(rows in 1usize..200, cols in 1usize..100, seed in any::<u64>()) {
        let m = seeded(rows, cols, seed);
        let norm = m.norm();
        let s = svd_thin(&m).unwrap();
        prop_assert!((s.recompose() - &m).amax() <= 1e-10 * norm);
        if rows >= cols {
            let (q, r) = qr_thin(&m).unwrap();
            prop_assert!((&q * &r - &m).amax() <= 1e-10 * norm);
        }
    }

    #[test]
    fn randomized_sigma_never_exceeds_exact(
        rows in 2usize..40, cols in 2usize..40, frac in 0.0f64..1.0, seed in any::<u64>()
    ) {
        let m = seeded(rows, cols, seed);
        let full = rows.min(cols);
        let k = 1 + ((full - 1) as f64 * frac) as usize;
        let exact = svd_thin(&m).unwrap();
        let approx = randomized_svd(&m, k, 2, 1, seed ^ 0x5eed).unwrap();
        for j in 0..k {
            prop_assert!(approx.sigma[j] <= exact.sigma[j] + 1e-8);
        }
    }

    #[test]
    fn gen_eig_identity_b_equals_sym_eig(n in 1usize..12, seed in any::<u64>()) {
        let x = seeded(n, n, seed);
        let a = &x + x.transpose();
        let plain = sym_eig(&a).unwrap();
        let gen = gen_eig_sym(&a, &Matrix::identity(n, n), n, 0.0).unwrap();
        for k in 0..n {
            prop_assert!((plain.values[k] - gen.values[k]).abs() <= 1e-10 * a.norm().max(1.0));
        }
    }
}

