use crate::{CollaborativeData, CollaborativeMaps, DcaError, IntermediateBundle, Result, Vector};

/// `X^_i = X~_i G_i` for every institution, with column j scaled by
/// `weights[j]` when weights are given.
pub fn transform_collab(
    bundle: &IntermediateBundle,
    maps: &CollaborativeMaps,
    weights: Option<&Vector>,
) -> Result<CollaborativeData> {
    if maps.maps.len() != bundle.len() {
        return Err(DcaError::Dimension(format!(
            "{} maps for {} institutions",
            maps.maps.len(),
            bundle.len()
        )));
    }
    let reps = bundle
        .institutions()
        .iter()
        .enumerate()
        .map(|(i, inst)| maps.project(i, &inst.data, weights))
        .collect::<Result<Vec<_>>>()?;
    Ok(CollaborativeData {
        reps,
        applied_weights: weights.cloned(),
    })
}
