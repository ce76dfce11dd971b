use crate::Vector;

/// Eigenvalue spans at or below this are treated as a single repeated value.
const DEGENERATE_SPAN: f64 = 1e-12;

/// `w_j = exp(-(l_j - l_1) / (l_last - l_1))` for ascending eigenvalues.
///
/// Features whose anchor images disagree more are damped toward `1/e`. A
/// flat spectrum has no ordering to exploit and gets unit weights.
pub fn weight_vector(eigenvalues: &Vector) -> Vector {
    let Some(&first) = eigenvalues.as_slice().first() else {
        return Vector::zeros(0);
    };
    let last = eigenvalues[eigenvalues.len() - 1];
    let span = last - first;
    if span.abs() <= DEGENERATE_SPAN {
        return Vector::from_element(eigenvalues.len(), 1.0);
    }
    eigenvalues.map(|l| (-(l - first) / span).exp())
}
