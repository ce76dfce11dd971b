use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{DcaError, Matrix, Result};

/// Identifies the sampler behind [`generate_anchor`] in result metadata.
pub const ANCHOR_GENERATOR: &str = "ChaCha8Rng(seed_from_u64)+StandardNormal(ziggurat),row-major";

/// Shared dummy rows every institution pushes through its abstraction map.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorData {
    pub matrix: Matrix,
    pub seed: u64,
}

/// r x m matrix of i.i.d. standard normal draws, filled row by row.
pub fn generate_anchor(r: usize, m: usize, seed: u64) -> Result<AnchorData> {
    if r == 0 || m == 0 {
        return Err(DcaError::Dimension(format!("anchor shape {r}x{m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..r * m).map(|_| StandardNormal.sample(&mut rng)).collect();
    Ok(AnchorData {
        matrix: Matrix::from_row_slice(r, m, &values),
        seed,
    })
}
