use dca_linalg::{pseudo_inverse, randomized_svd, svd_thin, DEFAULT_RCOND};

use crate::gep::check_collab_dim;
use crate::{CollabMethod, CollaborativeMaps, DcaError, IntermediateBundle, Matrix, Result, SvdVariant, Vector};

/// The concatenated anchor images `[X_1 ... X_N]`.
#[derive(Debug, Clone)]
pub struct MinPerturbSystem<'a> {
    bundle: &'a IntermediateBundle,
    pub stacked: Matrix,
}

impl<'a> MinPerturbSystem<'a> {
    pub fn build(bundle: &'a IntermediateBundle) -> Self {
        Self {
            bundle,
            stacked: bundle.stacked_anchor(),
        }
    }

    /// Baseline maps `G_i = pinv(X_i) U`, where `U` holds the leading left
    /// singular vectors of the concatenation.
    pub fn solve(&self, collab_dim: usize, variant: SvdVariant) -> Result<CollaborativeMaps> {
        let w = &self.stacked;
        check_collab_dim(collab_dim, w.nrows().min(w.ncols()))?;

        let svd = match variant {
            SvdVariant::Exact => svd_thin(w)?,
            SvdVariant::Randomized {
                oversample,
                power_iters,
                seed,
            } => randomized_svd(w, collab_dim, oversample, power_iters, seed)?,
        };
        let smax = svd.sigma[0];
        if !(svd.sigma[collab_dim - 1] > DEFAULT_RCOND * smax) {
            return Err(DcaError::Dimension(format!(
                "collaborative dimension {collab_dim} exceeds the rank {} of the concatenated anchor images",
                svd.rank(DEFAULT_RCOND)
            )));
        }
        let u = svd.u.columns(0, collab_dim).into_owned();

        let maps = self
            .bundle
            .institutions()
            .iter()
            .map(|inst| Ok(pseudo_inverse(&inst.anchor)? * &u))
            .collect::<Result<Vec<_>>>()?;
        Ok(CollaborativeMaps {
            maps,
            eigenvalues: Vector::zeros(0),
            method: CollabMethod::MinPerturb,
            ridge: 0.0,
        })
    }
}

/// [`MinPerturbSystem::build`] followed by [`MinPerturbSystem::solve`].
pub fn solve_collab_minperturb(
    bundle: &IntermediateBundle,
    collab_dim: usize,
    variant: SvdVariant,
) -> Result<CollaborativeMaps> {
    MinPerturbSystem::build(bundle).solve(collab_dim, variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
    }

    #[test]
    fn orthonormal_single_institution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = gaussian(10, 3, &mut rng).qr().q();
        let bundle = IntermediateBundle::from_anchors(vec![q.clone()]).unwrap();
        let maps = solve_collab_minperturb(&bundle, 3, SvdVariant::Exact).unwrap();
        let g = &maps.maps[0];
        let u = svd_thin(&q).unwrap().u;
        assert!((&q * g - &u).amax() < 1e-8);
        assert!((g.transpose() * g - Matrix::identity(3, 3)).amax() < 1e-8);
        assert!(maps.eigenvalues.is_empty());
    }

    #[test]
    fn identical_institutions_share_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = gaussian(12, 3, &mut rng);
        let bundle = IntermediateBundle::from_anchors(vec![x.clone(), x]).unwrap();
        let maps = solve_collab_minperturb(&bundle, 2, SvdVariant::Exact).unwrap();
        assert!((&maps.maps[0] - &maps.maps[1]).amax() < 1e-8);
    }

    #[test]
    fn rank_limit_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = gaussian(12, 2, &mut rng);
        // identical blocks: rank of the concatenation is 2, not 4
        let bundle = IntermediateBundle::from_anchors(vec![x.clone(), x]).unwrap();
        assert!(matches!(
            solve_collab_minperturb(&bundle, 3, SvdVariant::Exact),
            Err(DcaError::Dimension(_))
        ));
    }

    #[test]
    fn randomized_variant_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let anchors: Vec<Matrix> = (0..3).map(|_| gaussian(20, 3, &mut rng)).collect();
        let bundle = IntermediateBundle::from_anchors(anchors).unwrap();
        let variant = SvdVariant::Randomized {
            oversample: 5,
            power_iters: 2,
            seed: 9,
        };
        let a = solve_collab_minperturb(&bundle, 3, variant).unwrap();
        let b = solve_collab_minperturb(&bundle, 3, variant).unwrap();
        assert_eq!(a, b);
    }
}
