//! Data collaboration analysis.
//!
//! Each institution reduces its private rows with its own PCA map and shares
//! only the reduced rows plus the reduced image of a common random anchor.
//! The analyst then solves for per-institution collaborative maps `G_i` that
//! make the anchor images agree, and trains on the aligned representations.
//!
//! Three solvers produce the maps:
//!
//! * [`solve_collab_minperturb`]: leading left singular vectors of the
//!   concatenated anchor images, pulled back through each pseudo-inverse.
//! * [`solve_collab_gep`]: per-column disagreement minimization under a norm
//!   constraint, i.e. the smallest eigenpairs of the pencil `(A, B)` from
//!   [`build_gep_matrices`].
//! * [`solve_collab_qr_svd`]: the same pencil after orthogonalizing each
//!   anchor image, which turns it into an SVD of the stacked `Q` factors.
//!
//! The generalized eigenvalues measure the residual disagreement of each
//! collaborative feature and drive [`weight_vector`].

mod abstraction;
mod anchor;
mod bundle;
mod error;
mod gep;
pub mod models;
mod min_perturb;
mod qr_svd;
mod transform;
mod weighting;

pub use abstraction::{apply_abstraction, fit_abstraction, AbstractionMap, DimRule};
pub use anchor::{generate_anchor, AnchorData, ANCHOR_GENERATOR};
pub use bundle::{
    CollabMethod, CollaborativeData, CollaborativeMaps, InstitutionData, Intermediate,
    IntermediateBundle, SvdVariant,
};
pub use error::{DcaError, Result};
pub use gep::{build_gep_matrices, objective_value, solve_collab_gep, GepSystem};
pub use min_perturb::{solve_collab_minperturb, MinPerturbSystem};
pub use qr_svd::{solve_collab_qr_svd, QrSvdSystem};
pub use transform::transform_collab;
pub use weighting::weight_vector;

pub use dca_linalg::{Matrix, Vector};
